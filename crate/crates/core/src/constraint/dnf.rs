//! Negation-normal form and disjunctive normal form over constraint atoms.
//! NOT is eliminated at the atoms via weak closure under negation: the
//! negation of every atom is a disjunction of atoms of the same language.

use super::{Atom, BoolExpr, CmpOp, Conjunction, Expr, TopoRel};
use crate::term::Lang;

/// The disjunction equivalent to the negation of `atom` under the intended
/// structure of `lang`.
pub fn negate_atom(atom: &Atom, lang: Lang) -> Vec<Atom> {
    match atom {
        Atom::True => vec![Atom::False],
        Atom::False => vec![Atom::True],
        Atom::Eq { l, r, neg } => match lang {
            Lang::Ecl => vec![Atom::Eq {
                l: l.clone(),
                r: r.clone(),
                neg: !*neg,
            }],
            // Box equality is a conjunction of four coordinate equalities,
            // so its negation is the disjunction of the eight strict
            // violations.
            Lang::Rcl => {
                if *neg {
                    return vec![Atom::Eq {
                        l: l.clone(),
                        r: r.clone(),
                        neg: false,
                    }];
                }
                let lowered = crate::backend::rcl::rcl_lower(
                    std::slice::from_ref(atom),
                    &Default::default(),
                )
                .expect("box equality lowers");
                let mut out = Vec::new();
                for a in lowered {
                    if let Atom::Cmp {
                        lhs,
                        rhs,
                        op: CmpOp::Le,
                        bound,
                    } = a
                    {
                        out.push(Atom::Cmp {
                            lhs: lhs.clone(),
                            rhs: rhs.clone(),
                            op: CmpOp::Gt,
                            bound: bound.clone(),
                        });
                        out.push(Atom::Cmp {
                            lhs,
                            rhs,
                            op: CmpOp::Lt,
                            bound,
                        });
                    }
                }
                // rcl_lower emits Le/Ge pairs plus well-formedness Lt atoms;
                // keep only the bounds that came from the equality itself.
                out.retain(|a| matches!(a, Atom::Cmp { op: CmpOp::Gt | CmpOp::Lt, .. }));
                dedup(out)
            }
            _ => unreachable!("Eq atoms are constructed only for ecl/rcl"),
        },
        Atom::Topo { rel, l, r, neg } => {
            if *neg {
                return vec![Atom::Topo {
                    rel: *rel,
                    l: l.clone(),
                    r: r.clone(),
                    neg: false,
                }];
            }
            // The complement of one base relation: the other five surface
            // relations plus the two inverses via argument swap.
            let mut out = Vec::new();
            for other in TopoRel::ALL {
                if other != *rel {
                    out.push(Atom::Topo {
                        rel: other,
                        l: l.clone(),
                        r: r.clone(),
                        neg: false,
                    });
                }
            }
            for inv in [TopoRel::Tpp, TopoRel::Ntpp] {
                out.push(Atom::Topo {
                    rel: inv,
                    l: r.clone(),
                    r: l.clone(),
                    neg: false,
                });
            }
            // Dropping the self-converse duplicates: negating EQ keeps the
            // swapped TPP/NTPP, negating TPP drops the unswapped TPPi slot
            // (represented only by the swap), so the set is exactly 7.
            dedup(out)
        }
        Atom::Cmp {
            lhs,
            rhs,
            op,
            bound,
        } => {
            let with = |op: CmpOp| Atom::Cmp {
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                op,
                bound: bound.clone(),
            };
            match op {
                CmpOp::Le => vec![with(CmpOp::Gt)],
                CmpOp::Lt => vec![with(CmpOp::Ge)],
                CmpOp::Ge => vec![with(CmpOp::Lt)],
                CmpOp::Gt => vec![with(CmpOp::Le)],
                CmpOp::Eq => vec![with(CmpOp::Lt), with(CmpOp::Gt)],
            }
        }
    }
}

fn dedup(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for a in atoms {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

/// Disjunctive normal form: a list of conjunctions whose disjunction is
/// logically equivalent to the input. The empty list is `false`; a list
/// containing the empty conjunction covers `true`.
pub fn dnf(expr: &BoolExpr, lang: Lang) -> Vec<Conjunction> {
    let conjs = dnf_signed(expr, lang, true);
    let mut out: Vec<Conjunction> = Vec::new();
    for c in conjs {
        if c.is_false() {
            continue;
        }
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn dnf_signed(expr: &BoolExpr, lang: Lang, positive: bool) -> Vec<Conjunction> {
    match (expr, positive) {
        (Expr::Atom(a), true) => vec![Conjunction::of([a.clone()])],
        (Expr::Atom(a), false) => negate_atom(a, lang)
            .into_iter()
            .map(|a| Conjunction::of([a]))
            .collect(),
        (Expr::Not(e), pos) => dnf_signed(e, lang, !pos),
        (Expr::And(es), true) | (Expr::Or(es), false) => {
            let mut acc = vec![Conjunction::truth()];
            for e in es {
                let branches = dnf_signed(e, lang, positive);
                let mut next = Vec::new();
                for a in &acc {
                    for b in &branches {
                        let joined = a.and(b);
                        if !joined.is_false() && !next.contains(&joined) {
                            next.push(joined);
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    return acc;
                }
            }
            acc
        }
        (Expr::Or(es), true) | (Expr::And(es), false) => {
            let mut out = Vec::new();
            for e in es {
                for c in dnf_signed(e, lang, positive) {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::CTerm;
    use crate::term::{ConstValue, EName};

    fn lit(s: &str) -> CTerm {
        CTerm::Lit(EName::new(s))
    }

    fn ecl_eq(l: &str, r: &str) -> Atom {
        Atom::Eq {
            l: lit(l),
            r: CTerm::Const(ConstValue::Str(r.into())),
            neg: false,
        }
    }

    #[test]
    fn disjunctive_global_to_dnf() {
        // (a && b) || c
        let a = ecl_eq("x", "a");
        let b = ecl_eq("y", "b");
        let c = ecl_eq("z", "c");
        let expr = Expr::or(
            Expr::and(Expr::Atom(a.clone()), Expr::Atom(b.clone())),
            Expr::Atom(c.clone()),
        );
        let ds = dnf(&expr, Lang::Ecl);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[0], Conjunction::of([a, b]));
        assert_eq!(ds[1], Conjunction::of([c]));
    }

    #[test]
    fn single_atom_dnf() {
        let a = ecl_eq("x", "a");
        let ds = dnf(&Expr::Atom(a.clone()), Lang::Ecl);
        assert_eq!(ds, vec![Conjunction::of([a])]);
    }

    #[test]
    fn ntpp_negation_has_seven_disjuncts() {
        let atom = Atom::Topo {
            rel: TopoRel::Ntpp,
            l: lit("x"),
            r: lit("y"),
            neg: false,
        };
        let disjuncts = negate_atom(&atom, Lang::Pcl);
        assert_eq!(disjuncts.len(), 7);
        // one per remaining base relation, inverses by argument swap
        assert!(disjuncts.contains(&Atom::Topo {
            rel: TopoRel::Ntpp,
            l: lit("y"),
            r: lit("x"),
            neg: false
        }));
        assert!(!disjuncts.contains(&atom));
    }

    #[test]
    fn eq_negation_has_seven_disjuncts() {
        let atom = Atom::Topo {
            rel: TopoRel::Eq,
            l: lit("x"),
            r: lit("y"),
            neg: false,
        };
        assert_eq!(negate_atom(&atom, Lang::Pcl).len(), 7);
    }

    #[test]
    fn depcl_negation_is_order_flip() {
        let atom = Atom::Cmp {
            lhs: Some(crate::constraint::ScalarVar::Point(EName::new("x"))),
            rhs: Some(crate::constraint::ScalarVar::Point(EName::new("y"))),
            op: CmpOp::Le,
            bound: crate::geom::rat(5),
        };
        let n = negate_atom(&atom, Lang::DePcl);
        assert_eq!(n.len(), 1);
        assert!(matches!(n[0], Atom::Cmp { op: CmpOp::Gt, .. }));
    }

    #[test]
    fn ecl_eq_negation_is_disequality() {
        let atom = ecl_eq("x", "c");
        let n = negate_atom(&atom, Lang::Ecl);
        assert_eq!(n.len(), 1);
        assert!(matches!(n[0], Atom::Eq { neg: true, .. }));
    }

    #[test]
    fn not_not_atom_round_trips() {
        let atom = ecl_eq("x", "c");
        let expr = Expr::not(Expr::not(Expr::Atom(atom.clone())));
        assert_eq!(dnf(&expr, Lang::Ecl), vec![Conjunction::of([atom])]);
    }
}
