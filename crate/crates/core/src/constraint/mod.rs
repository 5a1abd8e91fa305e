//! Language-independent constraint layer: atoms, conjunctions, Boolean
//! combinations, DNF conversion, and the satisfiability/entailment drivers.

mod dnf;
mod ground;
mod solve;

pub use dnf::{dnf, negate_atom};
pub use ground::{eval_atom_ground, eval_expr_ground, holds_ground};
pub use solve::{entails, forced_constant, satisfiable, solve, SolveError, Valuation};

use crate::geom::{format_rat, Rat};
use crate::term::{ConstValue, EName, Lang};
use num::Zero;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

/// Argument of an equality or topology atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CTerm {
    Lit(EName),
    Const(ConstValue),
}

impl fmt::Display for CTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CTerm::Lit(e) => write!(f, "{}", e),
            CTerm::Const(c) => write!(f, "{}", c),
        }
    }
}

/// Coordinate selector for box-sorted variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Corner {
    Llx,
    Lly,
    Urx,
    Ury,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::Llx, Corner::Lly, Corner::Urx, Corner::Ury];

    pub fn name(self) -> &'static str {
        match self {
            Corner::Llx => "LLx",
            Corner::Lly => "LLy",
            Corner::Urx => "URx",
            Corner::Ury => "URy",
        }
    }
}

/// A scalar unknown of a difference constraint: a time point or one
/// coordinate of a box.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScalarVar {
    Point(EName),
    Coord(EName, Corner),
}

impl ScalarVar {
    pub fn ename(&self) -> &EName {
        match self {
            ScalarVar::Point(e) => e,
            ScalarVar::Coord(e, _) => e,
        }
    }
}

impl fmt::Display for ScalarVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarVar::Point(e) => write!(f, "{}", e),
            ScalarVar::Coord(e, c) => write!(f, "{}({})", c.name(), e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn eval(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// The six surface predicates of the topology languages. Inverse relations
/// are expressed by interchanging the arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TopoRel {
    Dc,
    Ec,
    Po,
    Eq,
    Tpp,
    Ntpp,
}

impl TopoRel {
    pub const ALL: [TopoRel; 6] = [
        TopoRel::Dc,
        TopoRel::Ec,
        TopoRel::Po,
        TopoRel::Eq,
        TopoRel::Tpp,
        TopoRel::Ntpp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopoRel::Dc => "DC",
            TopoRel::Ec => "EC",
            TopoRel::Po => "PO",
            TopoRel::Eq => "EQ",
            TopoRel::Tpp => "TPP",
            TopoRel::Ntpp => "NTPP",
        }
    }

    pub fn from_name(s: &str) -> Option<TopoRel> {
        match s {
            "DC" => Some(TopoRel::Dc),
            "EC" => Some(TopoRel::Ec),
            "PO" => Some(TopoRel::Po),
            "EQ" => Some(TopoRel::Eq),
            "TPP" => Some(TopoRel::Tpp),
            "NTPP" => Some(TopoRel::Ntpp),
            _ => None,
        }
    }
}

/// An atomic constraint. `Cmp` encodes `lhs - rhs OP bound` with either side
/// optional (a missing side contributes zero); constants are folded into the
/// bound at construction time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    True,
    False,
    /// Equality (or, negated, disequality) between symbolic or box terms.
    Eq { l: CTerm, r: CTerm, neg: bool },
    /// RCC-8 topology atom, possibly negated.
    Topo {
        rel: TopoRel,
        l: CTerm,
        r: CTerm,
        neg: bool,
    },
    /// Difference bound `lhs - rhs OP bound`.
    Cmp {
        lhs: Option<ScalarVar>,
        rhs: Option<ScalarVar>,
        op: CmpOp,
        bound: Rat,
    },
}

impl Atom {
    pub fn e_literals(&self, out: &mut BTreeSet<EName>) {
        match self {
            Atom::True | Atom::False => {}
            Atom::Eq { l, r, .. } | Atom::Topo { l, r, .. } => {
                for t in [l, r] {
                    if let CTerm::Lit(e) = t {
                        out.insert(e.clone());
                    }
                }
            }
            Atom::Cmp { lhs, rhs, .. } => {
                for side in [lhs, rhs].into_iter().flatten() {
                    out.insert(side.ename().clone());
                }
            }
        }
    }

    pub fn constants(&self, out: &mut BTreeSet<ConstValue>) {
        match self {
            Atom::Eq { l, r, .. } | Atom::Topo { l, r, .. } => {
                for t in [l, r] {
                    if let CTerm::Const(c) = t {
                        out.insert(c.clone());
                    }
                }
            }
            _ => {}
        }
    }

    /// Whether this atom belongs to the given language's constraint class.
    pub fn fits_language(&self, lang: Lang) -> bool {
        match self {
            Atom::True | Atom::False => true,
            Atom::Eq { l, r, .. } => match lang {
                Lang::Ecl => {
                    ok_ecl_term(l) && ok_ecl_term(r)
                }
                Lang::Rcl => ok_box_term(l) && ok_box_term(r),
                _ => false,
            },
            Atom::Topo { l, r, .. } => match lang {
                Lang::Pcl => ok_region_term(l) && ok_region_term(r),
                Lang::Tcl => matches!(l, CTerm::Lit(_)) && matches!(r, CTerm::Lit(_)),
                _ => false,
            },
            Atom::Cmp {
                lhs, rhs, bound, ..
            } => {
                let sides = [lhs, rhs];
                let vars = sides.into_iter().flatten();
                match lang {
                    Lang::DiPcl => {
                        bound.denom() == &num::BigInt::from(1)
                            && vars.clone().all(|v| matches!(v, ScalarVar::Point(_)))
                            && vars_nonempty(lhs, rhs)
                    }
                    Lang::DePcl => {
                        vars.clone().all(|v| matches!(v, ScalarVar::Point(_)))
                            && vars_nonempty(lhs, rhs)
                    }
                    Lang::Rcl => {
                        vars.clone().all(|v| matches!(v, ScalarVar::Coord(_, _)))
                            && vars_nonempty(lhs, rhs)
                    }
                    _ => false,
                }
            }
        }
    }
}

fn vars_nonempty(lhs: &Option<ScalarVar>, rhs: &Option<ScalarVar>) -> bool {
    lhs.is_some() || rhs.is_some()
}

fn ok_ecl_term(t: &CTerm) -> bool {
    matches!(t, CTerm::Lit(_) | CTerm::Const(ConstValue::Str(_)))
}

fn ok_box_term(t: &CTerm) -> bool {
    matches!(t, CTerm::Lit(_) | CTerm::Const(ConstValue::Box(_)))
}

fn ok_region_term(t: &CTerm) -> bool {
    matches!(t, CTerm::Lit(_) | CTerm::Const(ConstValue::Poly(_)))
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::True => f.write_str("true"),
            Atom::False => f.write_str("false"),
            Atom::Eq { l, r, neg } => {
                if *neg {
                    write!(f, "{} != {}", l, r)
                } else {
                    write!(f, "{} = {}", l, r)
                }
            }
            Atom::Topo { rel, l, r, neg } => {
                if *neg {
                    write!(f, "!({} {} {})", l, rel.name(), r)
                } else {
                    write!(f, "{} {} {}", l, rel.name(), r)
                }
            }
            Atom::Cmp {
                lhs,
                rhs,
                op,
                bound,
            } => {
                match (lhs, rhs) {
                    (Some(a), Some(b)) => write!(f, "{} - {}", a, b)?,
                    (Some(a), None) => write!(f, "{}", a)?,
                    (None, Some(b)) => write!(f, "0 - {}", b)?,
                    (None, None) => write!(f, "0")?,
                }
                write!(f, " {} {}", op.symbol(), format_rat(bound))
            }
        }
    }
}

/// Build the distinguished equality atom between two terms, dispatched on
/// the language's sort.
pub fn mk_eq(lang: Lang, l: CTerm, r: CTerm) -> Atom {
    mk_eq_polarity(lang, l, r, false)
}

/// Equality or (when the language can express it as one atom) negated
/// equality. Only ECL and the topology languages have single-atom negation
/// of EQ; callers needing `!=` for the numeric languages go through
/// [`negate_atom`] expansion instead.
pub fn mk_eq_polarity(lang: Lang, l: CTerm, r: CTerm, neg: bool) -> Atom {
    match lang {
        Lang::Ecl => fold_eq(Atom::Eq { l, r, neg }),
        Lang::Rcl => fold_eq(Atom::Eq { l, r, neg }),
        Lang::Pcl | Lang::Tcl => fold_topo(Atom::Topo {
            rel: TopoRel::Eq,
            l,
            r,
            neg,
        }),
        Lang::DiPcl | Lang::DePcl => {
            let atom = match (&l, &r) {
                (CTerm::Lit(a), CTerm::Lit(b)) => Atom::Cmp {
                    lhs: Some(ScalarVar::Point(a.clone())),
                    rhs: Some(ScalarVar::Point(b.clone())),
                    op: CmpOp::Eq,
                    bound: Rat::zero(),
                },
                (CTerm::Lit(a), CTerm::Const(c)) | (CTerm::Const(c), CTerm::Lit(a)) => Atom::Cmp {
                    lhs: Some(ScalarVar::Point(a.clone())),
                    rhs: None,
                    op: CmpOp::Eq,
                    bound: c.as_rat().unwrap_or_else(Rat::zero),
                },
                (CTerm::Const(c1), CTerm::Const(c2)) => {
                    if c1 == c2 {
                        Atom::True
                    } else {
                        Atom::False
                    }
                }
            };
            if neg {
                negate_ground_safe(atom)
            } else {
                atom
            }
        }
    }
}

fn negate_ground_safe(atom: Atom) -> Atom {
    // Only called on the folding paths where the atom became ground.
    match atom {
        Atom::True => Atom::False,
        Atom::False => Atom::True,
        other => panic!("single-atom negation unavailable for {}", other),
    }
}

fn fold_eq(atom: Atom) -> Atom {
    if let Atom::Eq { l, r, neg } = &atom {
        if let (CTerm::Const(a), CTerm::Const(b)) = (l, r) {
            return if (a == b) != *neg { Atom::True } else { Atom::False };
        }
        if l == r {
            return if *neg { Atom::False } else { Atom::True };
        }
    }
    atom
}

fn fold_topo(atom: Atom) -> Atom {
    if let Atom::Topo { rel, l, r, neg } = &atom {
        if let (CTerm::Const(ConstValue::Poly(p)), CTerm::Const(ConstValue::Poly(q))) = (l, r) {
            let holds = crate::backend::rcc8::surface_holds(*rel, p, q);
            return if holds != *neg { Atom::True } else { Atom::False };
        }
    }
    atom
}

/// Evaluate an atom whose arguments are all constants to `true`/`false`;
/// atoms with e-literals pass through unchanged.
pub fn fold_ground_atom(atom: Atom) -> Atom {
    match &atom {
        Atom::Topo { .. } => fold_topo(atom),
        Atom::Eq { .. } => fold_eq(atom),
        _ => atom,
    }
}

/// A conjunction of atomic constraints. `true` is the empty conjunction and
/// any conjunction containing `false` collapses to `false`. Equality,
/// ordering and hashing are up to atom reordering.
#[derive(Debug, Clone, Default)]
pub struct Conjunction {
    atoms: Vec<Atom>,
}

impl Conjunction {
    pub fn truth() -> Self {
        Conjunction { atoms: Vec::new() }
    }

    pub fn falsity() -> Self {
        Conjunction {
            atoms: vec![Atom::False],
        }
    }

    pub fn of(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut c = Conjunction::truth();
        for a in atoms {
            c.push(a);
        }
        c
    }

    pub fn push(&mut self, atom: Atom) {
        if self.is_false() {
            return;
        }
        match atom {
            Atom::True => {}
            Atom::False => self.atoms = vec![Atom::False],
            a => {
                if !self.atoms.contains(&a) {
                    self.atoms.push(a);
                }
            }
        }
    }

    pub fn and(&self, other: &Conjunction) -> Conjunction {
        let mut out = self.clone();
        for a in &other.atoms {
            out.push(a.clone());
        }
        out
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_false(&self) -> bool {
        self.atoms.first() == Some(&Atom::False)
    }

    pub fn e_literals(&self, out: &mut BTreeSet<EName>) {
        for a in &self.atoms {
            a.e_literals(out);
        }
    }

    fn canon(&self) -> Vec<&Atom> {
        let mut v: Vec<&Atom> = self.atoms.iter().collect();
        v.sort();
        v
    }

    pub fn to_expr(&self) -> BoolExpr {
        if self.is_true() {
            return Expr::Atom(Atom::True);
        }
        Expr::And(self.atoms.iter().cloned().map(Expr::Atom).collect())
    }
}

impl PartialEq for Conjunction {
    fn eq(&self, other: &Self) -> bool {
        self.canon() == other.canon()
    }
}

impl Eq for Conjunction {}

impl PartialOrd for Conjunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Conjunction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canon().cmp(&other.canon())
    }
}

impl Hash for Conjunction {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canon().hash(state);
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return f.write_str("true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            write!(f, "{}", a)?;
        }
        Ok(())
    }
}

/// The condition of a conditional triple: normally a single conjunction;
/// normalization introduces disjunctions of conjunctions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Condition {
    disjuncts: Vec<Conjunction>,
}

impl Condition {
    pub fn truth() -> Self {
        Condition {
            disjuncts: vec![Conjunction::truth()],
        }
    }

    pub fn falsity() -> Self {
        Condition {
            disjuncts: vec![Conjunction::falsity()],
        }
    }

    pub fn single(conj: Conjunction) -> Self {
        Condition {
            disjuncts: vec![conj],
        }
    }

    pub fn of_disjuncts(ds: impl IntoIterator<Item = Conjunction>) -> Self {
        let mut out: Vec<Conjunction> = Vec::new();
        for d in ds {
            if d.is_false() {
                continue;
            }
            if !out.contains(&d) {
                out.push(d);
            }
        }
        if out.is_empty() {
            return Condition::falsity();
        }
        Condition { disjuncts: out }
    }

    pub fn merge(&self, other: &Condition) -> Condition {
        Condition::of_disjuncts(self.disjuncts.iter().chain(other.disjuncts.iter()).cloned())
    }

    pub fn disjuncts(&self) -> &[Conjunction] {
        &self.disjuncts
    }

    pub fn is_true(&self) -> bool {
        self.disjuncts.iter().any(|d| d.is_true())
    }

    pub fn is_false(&self) -> bool {
        self.disjuncts.iter().all(|d| d.is_false())
    }

    pub fn e_literals(&self, out: &mut BTreeSet<EName>) {
        for d in &self.disjuncts {
            d.e_literals(out);
        }
    }

    pub fn to_expr(&self) -> BoolExpr {
        if self.disjuncts.len() == 1 {
            return self.disjuncts[0].to_expr();
        }
        Expr::Or(self.disjuncts.iter().map(|d| d.to_expr()).collect())
    }
}

impl PartialOrd for Condition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Condition {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a: Vec<&Conjunction> = self.disjuncts.iter().collect();
        let mut b: Vec<&Conjunction> = other.disjuncts.iter().collect();
        a.sort();
        b.sort();
        a.cmp(&b)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            write!(f, "{}", d)?;
        }
        Ok(())
    }
}

/// Boolean combination over an arbitrary atom type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr<A> {
    Atom(A),
    And(Vec<Expr<A>>),
    Or(Vec<Expr<A>>),
    Not(Box<Expr<A>>),
}

pub type BoolExpr = Expr<Atom>;

impl<A> Expr<A> {
    pub fn and(l: Expr<A>, r: Expr<A>) -> Expr<A> {
        Expr::And(vec![l, r])
    }

    pub fn or(l: Expr<A>, r: Expr<A>) -> Expr<A> {
        Expr::Or(vec![l, r])
    }

    pub fn not(e: Expr<A>) -> Expr<A> {
        Expr::Not(Box::new(e))
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| out.push(a));
        out
    }

    fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a A)) {
        match self {
            Expr::Atom(a) => f(a),
            Expr::And(es) | Expr::Or(es) => {
                for e in es {
                    e.visit_atoms(f);
                }
            }
            Expr::Not(e) => e.visit_atoms(f),
        }
    }
}

impl BoolExpr {
    pub fn truth() -> BoolExpr {
        Expr::Atom(Atom::True)
    }

    pub fn e_literals(&self) -> BTreeSet<EName> {
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            a.e_literals(&mut out);
        }
        out
    }

    pub fn constants(&self) -> BTreeSet<ConstValue> {
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            a.constants(&mut out);
        }
        out
    }

    pub fn fits_language(&self, lang: Lang) -> bool {
        self.atoms().iter().all(|a| a.fits_language(lang))
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(a) => write!(f, "{}", a),
            Expr::And(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" && ")?;
                    }
                    if matches!(e, Expr::Or(_)) {
                        write!(f, "({})", e)?;
                    } else {
                        write!(f, "{}", e)?;
                    }
                }
                Ok(())
            }
            Expr::Or(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" || ")?;
                    }
                    write!(f, "{}", e)?;
                }
                Ok(())
            }
            Expr::Not(e) => match &**e {
                Expr::Atom(a) => write!(f, "!({})", a),
                other => write!(f, "!({})", other),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polygon;

    fn elit(s: &str) -> CTerm {
        CTerm::Lit(EName::new(s))
    }

    #[test]
    fn conjunction_canonicalizes_true_and_duplicates() {
        let a = Atom::Eq {
            l: elit("x"),
            r: CTerm::Const(ConstValue::Str("c".into())),
            neg: false,
        };
        let mut c = Conjunction::truth();
        c.push(Atom::True);
        c.push(a.clone());
        c.push(a.clone());
        assert_eq!(c.atoms().len(), 1);
        let mut d = Conjunction::truth();
        d.push(a);
        assert_eq!(c, d);
    }

    #[test]
    fn false_swallows_conjunction() {
        let mut c = Conjunction::truth();
        c.push(Atom::False);
        c.push(Atom::Eq {
            l: elit("x"),
            r: elit("y"),
            neg: false,
        });
        assert!(c.is_false());
        assert_eq!(c, Conjunction::falsity());
    }

    #[test]
    fn eq_constructor_dispatches_on_language() {
        let p = Polygon::rect_i(1, 1, 2, 2).unwrap();
        let topo = mk_eq(
            Lang::Pcl,
            elit("R1"),
            CTerm::Const(ConstValue::Poly(p)),
        );
        assert!(matches!(topo, Atom::Topo { rel: TopoRel::Eq, .. }));
        let num = mk_eq(Lang::DePcl, elit("x"), elit("y"));
        assert!(matches!(num, Atom::Cmp { op: CmpOp::Eq, .. }));
        let sym = mk_eq(Lang::Ecl, elit("x"), CTerm::Const(ConstValue::Str("a".into())));
        assert!(matches!(sym, Atom::Eq { neg: false, .. }));
    }

    #[test]
    fn ground_topo_atoms_fold() {
        let small = Polygon::rect_i(1, 1, 2, 2).unwrap();
        let big = Polygon::rect_i(0, 0, 10, 10).unwrap();
        let t = fold_topo(Atom::Topo {
            rel: TopoRel::Ntpp,
            l: CTerm::Const(ConstValue::Poly(small)),
            r: CTerm::Const(ConstValue::Poly(big)),
            neg: false,
        });
        assert_eq!(t, Atom::True);
    }
}
