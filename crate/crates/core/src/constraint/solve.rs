//! Satisfiability, entailment, witness production and forced-constant
//! detection over Boolean combinations, by DNF dispatch to the per-language
//! backends.

use super::dnf::dnf;
use super::ground::eval_expr_ground;
use super::{mk_eq, BoolExpr, CTerm, Condition, Expr};
use crate::backend::{self, BackendError};
use crate::term::{ConstValue, EName, Lang};
use std::collections::{BTreeMap, BTreeSet};

pub type Valuation = BTreeMap<EName, ConstValue>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("global constraint is unsatisfiable")]
    UnsatGlobal,
    #[error("witness violates the formula it was solved from")]
    WitnessCheck,
}

/// True iff some valuation over the intended structure satisfies `f`.
pub fn satisfiable(f: &BoolExpr, lang: Lang) -> Result<bool, SolveError> {
    for conj in dnf(f, lang) {
        if backend::sat_conjunction(&conj, lang)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `phi` entails `theta`: `phi && !theta` is unsatisfiable.
pub fn entails(phi: &BoolExpr, theta: &Condition, lang: Lang) -> Result<bool, SolveError> {
    let refutation = Expr::and(phi.clone(), Expr::not(theta.to_expr()));
    Ok(!satisfiable(&refutation, lang)?)
}

/// A satisfying total valuation over `lits`, or `None` iff unsatisfiable.
pub fn solve(
    f: &BoolExpr,
    lang: Lang,
    lits: &BTreeSet<EName>,
) -> Result<Option<Valuation>, SolveError> {
    let disjuncts = dnf(f, lang);
    if disjuncts.is_empty() {
        return Ok(None);
    }
    let mut any_sat = false;
    let mut witness_failure = false;
    for conj in &disjuncts {
        match backend::solve_conjunction(conj, lang) {
            Ok(Some(partial)) => {
                let mut v = partial;
                let mut counter = 0usize;
                for lit in lits {
                    v.entry(lit.clone())
                        .or_insert_with(|| backend::default_constant(lang, &mut counter));
                }
                // A witness must actually satisfy the formula it came from.
                match eval_expr_ground(f, &v) {
                    Ok(true) => return Ok(Some(v)),
                    _ => {
                        any_sat = true;
                        witness_failure = true;
                    }
                }
            }
            Ok(None) => {}
            Err(BackendError::NoWitness) => {
                any_sat = true;
                witness_failure = true;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if any_sat && witness_failure {
        return Err(SolveError::Backend(BackendError::NoWitness));
    }
    Ok(None)
}

/// The unique constant that `phi` forces the e-literal to take, if any.
/// Procedure: take a witness valuation, use its value as the candidate, and
/// confirm by entailment; if any constant is forced it must equal every
/// witness's value.
pub fn forced_constant(
    phi: &BoolExpr,
    lit: &EName,
    lang: Lang,
) -> Result<Option<ConstValue>, SolveError> {
    let mut lits = BTreeSet::new();
    lits.insert(lit.clone());
    let witness = match solve(phi, lang, &lits)? {
        None => return Err(SolveError::UnsatGlobal),
        Some(v) => v,
    };
    let candidate = witness
        .get(lit)
        .cloned()
        .expect("solve returns a total valuation over the requested literals");
    let eq = mk_eq(
        lang,
        CTerm::Lit(lit.clone()),
        CTerm::Const(candidate.clone()),
    );
    let theta = Condition::single(super::Conjunction::of([eq]));
    if entails(phi, &theta, lang)? {
        Ok(Some(candidate))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{Atom, CmpOp, Conjunction, ScalarVar, TopoRel};
    use crate::geom::{rat, Polygon};

    fn lit(s: &str) -> CTerm {
        CTerm::Lit(EName::new(s))
    }

    fn poly_term(x1: i64, y1: i64, x2: i64, y2: i64) -> CTerm {
        CTerm::Const(ConstValue::Poly(Polygon::rect_i(x1, y1, x2, y2).unwrap()))
    }

    fn ntpp(l: CTerm, r: CTerm) -> BoolExpr {
        Expr::Atom(Atom::Topo {
            rel: TopoRel::Ntpp,
            l,
            r,
            neg: false,
        })
    }

    #[test]
    fn example_global_is_satisfiable() {
        let phi = ntpp(lit("R1"), poly_term(6, 8, 23, 19));
        assert!(satisfiable(&phi, Lang::Pcl).unwrap());
    }

    #[test]
    fn ecl_eq_neq_clash_unsatisfiable() {
        let phi = Expr::and(
            Expr::Atom(Atom::Eq {
                l: lit("x"),
                r: CTerm::Const(ConstValue::Str("c".into())),
                neg: false,
            }),
            Expr::Atom(Atom::Eq {
                l: lit("x"),
                r: CTerm::Const(ConstValue::Str("c".into())),
                neg: true,
            }),
        );
        assert!(!satisfiable(&phi, Lang::Ecl).unwrap());
    }

    #[test]
    fn ntpp_chain_with_dc_unsat_via_dnf() {
        let phi = Expr::And(vec![
            ntpp(lit("a"), lit("b")),
            ntpp(lit("b"), lit("c")),
            Expr::Atom(Atom::Topo {
                rel: TopoRel::Dc,
                l: lit("a"),
                r: lit("c"),
                neg: false,
            }),
        ]);
        assert!(!satisfiable(&phi, Lang::Tcl).unwrap());
    }

    #[test]
    fn entailment_of_larger_container() {
        // R1 NTPP [6,8]x[23,19] entails R1 NTPP [2,4]x[28,22]
        let phi = ntpp(lit("R1"), poly_term(6, 8, 23, 19));
        let theta = Condition::single(Conjunction::of([Atom::Topo {
            rel: TopoRel::Ntpp,
            l: lit("R1"),
            r: poly_term(2, 4, 28, 22),
            neg: false,
        }]));
        assert!(entails(&phi, &theta, Lang::Pcl).unwrap());
    }

    #[test]
    fn no_entailment_of_smaller_inner_rectangle() {
        let phi = ntpp(lit("R1"), poly_term(6, 8, 23, 19));
        let theta = Condition::single(Conjunction::of([Atom::Topo {
            rel: TopoRel::Ntpp,
            l: lit("R1"),
            r: poly_term(10, 12, 21, 17),
            neg: false,
        }]));
        assert!(!entails(&phi, &theta, Lang::Pcl).unwrap());
    }

    #[test]
    fn everything_entails_true() {
        let phi = ntpp(lit("R1"), poly_term(6, 8, 23, 19));
        assert!(entails(&phi, &Condition::truth(), Lang::Pcl).unwrap());
    }

    #[test]
    fn solve_produces_checked_witness() {
        let phi = ntpp(lit("R1"), poly_term(6, 8, 23, 19));
        let mut lits = BTreeSet::new();
        lits.insert(EName::new("R1"));
        let v = solve(&phi, Lang::Pcl, &lits).unwrap().unwrap();
        assert!(eval_expr_ground(&phi, &v).unwrap());
    }

    #[test]
    fn solve_false_is_none() {
        let phi = Expr::Atom(Atom::False);
        assert_eq!(solve(&phi, Lang::Pcl, &BTreeSet::new()).unwrap(), None);
    }

    #[test]
    fn depcl_negative_cycle_has_no_witness() {
        let x = || ScalarVar::Point(EName::new("x"));
        let y = || ScalarVar::Point(EName::new("y"));
        let phi = Expr::And(vec![
            Expr::Atom(Atom::Cmp {
                lhs: Some(x()),
                rhs: Some(y()),
                op: CmpOp::Le,
                bound: rat(-1),
            }),
            Expr::Atom(Atom::Cmp {
                lhs: Some(y()),
                rhs: Some(x()),
                op: CmpOp::Le,
                bound: rat(-1),
            }),
        ]);
        assert_eq!(solve(&phi, Lang::DePcl, &BTreeSet::new()).unwrap(), None);
    }

    #[test]
    fn forced_constant_from_direct_equality() {
        let pinned = Expr::and(
            Expr::Atom(Atom::Topo {
                rel: TopoRel::Eq,
                l: lit("R1"),
                r: poly_term(1, 1, 2, 2),
                neg: false,
            }),
            ntpp(lit("R1"), poly_term(0, 0, 10, 10)),
        );
        let c = forced_constant(&pinned, &EName::new("R1"), Lang::Pcl)
            .unwrap()
            .unwrap();
        assert_eq!(
            c,
            ConstValue::Poly(Polygon::rect_i(1, 1, 2, 2).unwrap())
        );
    }

    #[test]
    fn unforced_literal_yields_none() {
        let phi = ntpp(lit("R1"), poly_term(6, 8, 23, 19));
        assert_eq!(
            forced_constant(&phi, &EName::new("R1"), Lang::Pcl).unwrap(),
            None
        );
    }

    #[test]
    fn forced_constant_on_unsat_global_errors() {
        let phi = Expr::Atom(Atom::False);
        assert_eq!(
            forced_constant(&phi, &EName::new("x"), Lang::Ecl).unwrap_err(),
            SolveError::UnsatGlobal
        );
    }

    #[test]
    fn depcl_pinched_bounds_force_constant() {
        let x = || ScalarVar::Point(EName::new("x"));
        let phi = Expr::And(vec![
            Expr::Atom(Atom::Cmp {
                lhs: Some(x()),
                rhs: None,
                op: CmpOp::Le,
                bound: rat(3),
            }),
            Expr::Atom(Atom::Cmp {
                lhs: Some(x()),
                rhs: None,
                op: CmpOp::Ge,
                bound: rat(3),
            }),
        ]);
        let c = forced_constant(&phi, &EName::new("x"), Lang::DePcl)
            .unwrap()
            .unwrap();
        assert_eq!(c, ConstValue::Rat(rat(3)));
    }
}
