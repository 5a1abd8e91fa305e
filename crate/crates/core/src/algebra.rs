//! Conditional mappings and the graph-pattern algebra over them:
//! compatibility, possible compatibility, join, union, difference,
//! left-outer join, triple-pattern and FILTER evaluation.

use crate::constraint::{
    dnf, mk_eq, mk_eq_polarity, Atom, BoolExpr, CTerm, CmpOp, Conjunction, Corner,
    Expr, ScalarVar, TopoRel,
};
use crate::geom::Rat;
use crate::model::Database;
use crate::term::{ConstValue, EName, Lang, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("mappings are not possibly compatible")]
    NotPossiblyCompatible,
    #[error("filter constraint does not belong to language {lang}: {detail}")]
    LanguageMismatch { lang: Lang, detail: String },
}

/// Query variables; the normal/special kinds partition the variable space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// Ranges over IRIs, blank nodes, and plain literals.
    Normal,
    /// Ranges over constraint constants and e-literals.
    Special,
}

impl Variable {
    pub fn normal(name: impl Into<String>) -> Variable {
        Variable {
            name: name.into(),
            kind: VarKind::Normal,
        }
    }

    pub fn special(name: impl Into<String>) -> Variable {
        Variable {
            name: name.into(),
            kind: VarKind::Special,
        }
    }

    /// Whether `t` is in this variable's value range.
    pub fn admits(&self, t: &Term) -> bool {
        match self.kind {
            VarKind::Normal => t.is_rdf_term(),
            VarKind::Special => t.is_clit() || t.is_elit(),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Normal => write!(f, "?{}", self.name),
            VarKind::Special => write!(f, "?{}!s", self.name),
        }
    }
}

/// A plain (unconditional) mapping: the solution unit of standard evaluation
/// over ground graphs.
pub type PlainMapping = BTreeMap<Variable, Term>;

/// A partial variable binding paired with a condition constraining the
/// e-literals it mentions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConditionalMapping {
    pub binding: BTreeMap<Variable, Term>,
    pub condition: Conjunction,
}

impl ConditionalMapping {
    pub fn new(binding: BTreeMap<Variable, Term>, condition: Conjunction) -> Self {
        ConditionalMapping { binding, condition }
    }

    pub fn dom(&self) -> BTreeSet<&Variable> {
        self.binding.keys().collect()
    }

    pub fn get(&self, v: &Variable) -> Option<&Term> {
        self.binding.get(v)
    }

    /// Restriction to a variable set; the condition is kept.
    pub fn restrict(&self, w: &BTreeSet<Variable>) -> ConditionalMapping {
        ConditionalMapping {
            binding: self
                .binding
                .iter()
                .filter(|(k, _)| w.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            condition: self.condition.clone(),
        }
    }
}

impl fmt::Display for ConditionalMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({{")?;
        for (i, (k, v)) in self.binding.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", k, v)?;
        }
        write!(f, "}}, {})", self.condition)
    }
}

/// A set of conditional mappings (set semantics; structural duplicates
/// removed, insertion order preserved).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MappingSet {
    items: Vec<ConditionalMapping>,
}

impl MappingSet {
    pub fn new() -> MappingSet {
        MappingSet { items: Vec::new() }
    }

    pub fn of(items: impl IntoIterator<Item = ConditionalMapping>) -> MappingSet {
        let mut s = MappingSet::new();
        for m in items {
            s.insert(m);
        }
        s
    }

    pub fn insert(&mut self, m: ConditionalMapping) {
        if !self.items.contains(&m) {
            self.items.push(m);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConditionalMapping> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, m: &ConditionalMapping) -> bool {
        self.items.contains(m)
    }

    /// Set equality irrespective of insertion order.
    pub fn same_set(&self, other: &MappingSet) -> bool {
        self.len() == other.len() && self.items.iter().all(|m| other.contains(m))
    }
}

impl fmt::Display for MappingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.items.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", m)?;
        }
        write!(f, "}}")
    }
}

impl IntoIterator for MappingSet {
    type Item = ConditionalMapping;
    type IntoIter = std::vec::IntoIter<ConditionalMapping>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

/// Bindings agree on every shared variable.
pub fn compatible(m1: &ConditionalMapping, m2: &ConditionalMapping) -> bool {
    m1.binding.iter().all(|(x, t1)| match m2.binding.get(x) {
        Some(t2) => t1 == t2,
        None => true,
    })
}

/// Bindings agree on every shared variable, or the variable is special and
/// at least one side binds an e-literal (so a valuation could reconcile
/// them).
pub fn possibly_compatible(m1: &ConditionalMapping, m2: &ConditionalMapping) -> bool {
    m1.binding.iter().all(|(x, t1)| match m2.binding.get(x) {
        None => true,
        Some(t2) => {
            t1 == t2 || (x.kind == VarKind::Special && (t1.is_elit() || t2.is_elit()))
        }
    })
}

/// Join of two possibly compatible conditional mappings. On a shared special
/// variable bound to an e-literal on one side, the e-literal stays in the
/// merged binding and an EQ atom reconciling the two values joins the
/// condition.
pub fn join(
    m1: &ConditionalMapping,
    m2: &ConditionalMapping,
    lang: Lang,
) -> Result<ConditionalMapping, AlgebraError> {
    if !possibly_compatible(m1, m2) {
        return Err(AlgebraError::NotPossiblyCompatible);
    }
    let mut binding = m1.binding.clone();
    let mut xi1: Vec<Atom> = Vec::new(); // e-literal / e-literal pairs
    let mut xi2: Vec<Atom> = Vec::new(); // left e-literal, right constant
    let mut xi3: Vec<Atom> = Vec::new(); // right e-literal, left constant
    for (x, t2) in &m2.binding {
        match m1.binding.get(x) {
            None => {
                binding.insert(x.clone(), t2.clone());
            }
            Some(t1) if t1 == t2 => {}
            Some(t1) => match (t1, t2) {
                (Term::ELit(a), Term::ELit(b)) => {
                    // left e-literal wins the tie
                    xi1.push(mk_eq(lang, CTerm::Lit(a.clone()), CTerm::Lit(b.clone())));
                }
                (Term::ELit(a), Term::CLit(c)) => {
                    xi2.push(mk_eq(
                        lang,
                        CTerm::Lit(a.clone()),
                        CTerm::Const(c.clone()),
                    ));
                }
                (Term::CLit(c), Term::ELit(b)) => {
                    binding.insert(x.clone(), t2.clone());
                    xi3.push(mk_eq(
                        lang,
                        CTerm::Lit(b.clone()),
                        CTerm::Const(c.clone()),
                    ));
                }
                _ => unreachable!("possible compatibility requires an e-literal side"),
            },
        }
    }
    let mut condition = m1.condition.and(&m2.condition);
    for atom in xi1.into_iter().chain(xi2).chain(xi3) {
        condition.push(atom);
    }
    Ok(ConditionalMapping { binding, condition })
}

/// Pairwise join over possibly compatible pairs.
pub fn join_sets(o1: &MappingSet, o2: &MappingSet, lang: Lang) -> MappingSet {
    let mut out = MappingSet::new();
    for m1 in o1.iter() {
        for m2 in o2.iter() {
            if possibly_compatible(m1, m2) {
                out.insert(join(m1, m2, lang).expect("checked possibly compatible"));
            }
        }
    }
    out
}

pub fn union_sets(o1: &MappingSet, o2: &MappingSet) -> MappingSet {
    MappingSet::of(o1.iter().chain(o2.iter()).cloned())
}

/// Difference. A mapping of the left set that is not possibly compatible
/// with any right mapping survives unchanged; one possibly compatible with
/// some right mappings survives under the extra condition that each of their
/// conditions fails or some shared special variable takes a different value.
/// The empty disjunction over shared special variables is `false`.
pub fn diff_sets(o1: &MappingSet, o2: &MappingSet, lang: Lang) -> MappingSet {
    let mut out = MappingSet::new();
    for m in o1.iter() {
        let rivals: Vec<&ConditionalMapping> = o2
            .iter()
            .filter(|m2| possibly_compatible(m, m2))
            .collect();
        if rivals.is_empty() {
            out.insert(m.clone());
            continue;
        }
        // theta && AND_i (NOT theta_i OR OR_x !(mu(x) EQ mu_i(x)))
        let mut guards: Vec<BoolExpr> = Vec::new();
        for mi in &rivals {
            let mut alternatives: Vec<BoolExpr> = Vec::new();
            if !mi.condition.is_true() {
                alternatives.push(Expr::not(mi.condition.to_expr()));
            }
            for (x, t1) in &m.binding {
                if x.kind != VarKind::Special {
                    continue;
                }
                let Some(t2) = mi.binding.get(x) else {
                    continue;
                };
                if let Some(e) = neq_expr(lang, t1, t2) {
                    alternatives.push(e);
                }
            }
            guards.push(match alternatives.len() {
                0 => Expr::Atom(Atom::False),
                1 => alternatives.pop().expect("len checked"),
                _ => Expr::Or(alternatives),
            });
        }
        let formula = Expr::And(guards);
        for delta in dnf(&formula, lang) {
            let condition = m.condition.and(&delta);
            if condition.is_false() {
                continue;
            }
            out.insert(ConditionalMapping {
                binding: m.binding.clone(),
                condition,
            });
        }
    }
    out
}

/// `!(t1 EQ t2)` as a formula over backend-native atoms. ECL and the
/// topology languages express it as one negated atom; the numeric languages
/// expand through atom negation. Identical terms yield an unsatisfiable
/// guard (None contributes nothing to the disjunction).
fn neq_expr(lang: Lang, t1: &Term, t2: &Term) -> Option<BoolExpr> {
    let ct = |t: &Term| -> Option<CTerm> {
        match t {
            Term::ELit(e) => Some(CTerm::Lit(e.clone())),
            Term::CLit(c) => Some(CTerm::Const(c.clone())),
            _ => None,
        }
    };
    let (a, b) = (ct(t1)?, ct(t2)?);
    if a == b {
        return None;
    }
    match lang {
        Lang::Ecl | Lang::Pcl | Lang::Tcl => Some(Expr::Atom(mk_eq_polarity(lang, a, b, true))),
        Lang::DiPcl | Lang::DePcl | Lang::Rcl => {
            Some(Expr::not(Expr::Atom(mk_eq(lang, a, b))))
        }
    }
}

/// Left-outer join: join where possible, keep the rest.
pub fn leftjoin_sets(o1: &MappingSet, o2: &MappingSet, lang: Lang) -> MappingSet {
    union_sets(&join_sets(o1, o2, lang), &diff_sets(o1, o2, lang))
}

/// A component of a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Term(Term),
    Var(Variable),
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Term(t) => write!(f, "{}", t),
            PatternTerm::Var(v) => write!(f, "{}", v),
        }
    }
}

/// A triple pattern; blank nodes are not allowed (a query uses fresh
/// variables instead).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

impl TriplePattern {
    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for pt in [&self.s, &self.p, &self.o] {
            if let PatternTerm::Var(v) = pt {
                out.insert(v.clone());
            }
        }
        out
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.s, self.p, self.o)
    }
}

/// Atom of a FILTER condition, over query variables, e-literals, and
/// constants. Scalar comparisons keep constants folded into the bound.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FilterAtom {
    True,
    False,
    Eq {
        l: QTerm,
        r: QTerm,
        neg: bool,
    },
    Topo {
        rel: TopoRel,
        l: QTerm,
        r: QTerm,
        neg: bool,
    },
    Cmp {
        lhs: Option<QScalar>,
        rhs: Option<QScalar>,
        op: CmpOp,
        bound: Rat,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QTerm {
    Var(Variable),
    Lit(EName),
    Const(ConstValue),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QScalar {
    pub base: QTerm,
    pub corner: Option<Corner>,
}

pub type FilterExpr = Expr<FilterAtom>;

impl FilterAtom {
    pub fn vars(&self, out: &mut BTreeSet<Variable>) {
        let term = |t: &QTerm, out: &mut BTreeSet<Variable>| {
            if let QTerm::Var(v) = t {
                out.insert(v.clone());
            }
        };
        match self {
            FilterAtom::True | FilterAtom::False => {}
            FilterAtom::Eq { l, r, .. } | FilterAtom::Topo { l, r, .. } => {
                term(l, out);
                term(r, out);
            }
            FilterAtom::Cmp { lhs, rhs, .. } => {
                for s in [lhs, rhs].into_iter().flatten() {
                    term(&s.base, out);
                }
            }
        }
    }
}

pub fn filter_vars(expr: &FilterExpr) -> BTreeSet<Variable> {
    let mut out = BTreeSet::new();
    for a in expr.atoms() {
        a.vars(&mut out);
    }
    out
}

impl fmt::Display for FilterAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs = |s: &QScalar| match s.corner {
            Some(c) => format!("{}({})", c.name(), qterm_str(&s.base)),
            None => qterm_str(&s.base),
        };
        match self {
            FilterAtom::True => f.write_str("true"),
            FilterAtom::False => f.write_str("false"),
            FilterAtom::Eq { l, r, neg } => {
                let op = if *neg { "!=" } else { "=" };
                write!(f, "{} {} {}", qterm_str(l), op, qterm_str(r))
            }
            FilterAtom::Topo { rel, l, r, neg } => {
                if *neg {
                    write!(f, "!({} {} {})", qterm_str(l), rel.name(), qterm_str(r))
                } else {
                    write!(f, "{} {} {}", qterm_str(l), rel.name(), qterm_str(r))
                }
            }
            FilterAtom::Cmp {
                lhs,
                rhs,
                op,
                bound,
            } => {
                match (lhs, rhs) {
                    (Some(a), Some(b)) => write!(f, "{} - {}", qs(a), qs(b))?,
                    (Some(a), None) => write!(f, "{}", qs(a))?,
                    (None, Some(b)) => write!(f, "0 - {}", qs(b))?,
                    (None, None) => write!(f, "0")?,
                }
                write!(f, " {} {}", op.symbol(), crate::geom::format_rat(bound))
            }
        }
    }
}

fn qterm_str(t: &QTerm) -> String {
    match t {
        QTerm::Var(v) => v.to_string(),
        QTerm::Lit(e) => e.to_string(),
        QTerm::Const(c) => c.to_string(),
    }
}

/// Graph patterns of the algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphPattern {
    Triple(TriplePattern),
    And(Box<GraphPattern>, Box<GraphPattern>),
    Union(Box<GraphPattern>, Box<GraphPattern>),
    Opt(Box<GraphPattern>, Box<GraphPattern>),
    Filter(Box<GraphPattern>, FilterExpr),
}

impl GraphPattern {
    pub fn and(l: GraphPattern, r: GraphPattern) -> GraphPattern {
        GraphPattern::And(Box::new(l), Box::new(r))
    }

    pub fn union(l: GraphPattern, r: GraphPattern) -> GraphPattern {
        GraphPattern::Union(Box::new(l), Box::new(r))
    }

    pub fn opt(l: GraphPattern, r: GraphPattern) -> GraphPattern {
        GraphPattern::Opt(Box::new(l), Box::new(r))
    }

    pub fn filter(p: GraphPattern, r: FilterExpr) -> GraphPattern {
        GraphPattern::Filter(Box::new(p), r)
    }

    /// Variables occurring anywhere in the pattern, filters included.
    pub fn vars(&self) -> BTreeSet<Variable> {
        match self {
            GraphPattern::Triple(t) => t.vars(),
            GraphPattern::And(l, r) | GraphPattern::Union(l, r) | GraphPattern::Opt(l, r) => {
                let mut out = l.vars();
                out.extend(r.vars());
                out
            }
            GraphPattern::Filter(p, r) => {
                let mut out = p.vars();
                out.extend(filter_vars(r));
                out
            }
        }
    }

    pub fn contains_union(&self) -> bool {
        match self {
            GraphPattern::Triple(_) => false,
            GraphPattern::Union(_, _) => true,
            GraphPattern::And(l, r) | GraphPattern::Opt(l, r) => {
                l.contains_union() || r.contains_union()
            }
            GraphPattern::Filter(p, _) => p.contains_union(),
        }
    }

    pub fn contains_opt(&self) -> bool {
        match self {
            GraphPattern::Triple(_) => false,
            GraphPattern::Opt(_, _) => true,
            GraphPattern::And(l, r) | GraphPattern::Union(l, r) => {
                l.contains_opt() || r.contains_opt()
            }
            GraphPattern::Filter(p, _) => p.contains_opt(),
        }
    }
}

/// Evaluation of a graph pattern over a database.
pub fn eval_pattern(p: &GraphPattern, db: &Database) -> Result<MappingSet, AlgebraError> {
    match p {
        GraphPattern::Triple(tp) => eval_triple_pattern(tp, db),
        GraphPattern::And(l, r) => Ok(join_sets(
            &eval_pattern(l, db)?,
            &eval_pattern(r, db)?,
            db.lang,
        )),
        GraphPattern::Union(l, r) => Ok(union_sets(&eval_pattern(l, db)?, &eval_pattern(r, db)?)),
        GraphPattern::Opt(l, r) => Ok(leftjoin_sets(
            &eval_pattern(l, db)?,
            &eval_pattern(r, db)?,
            db.lang,
        )),
        GraphPattern::Filter(inner, r) => eval_filter(&eval_pattern(inner, db)?, r, db.lang),
    }
}

/// Triple-pattern evaluation. When the pattern object is a constraint
/// constant, solutions come both from exact matches and from triples with an
/// e-literal object, the latter with an `EQ` atom bridging the e-literal to
/// the constant. Conditions of matched triples carry over.
fn eval_triple_pattern(tp: &TriplePattern, db: &Database) -> Result<MappingSet, AlgebraError> {
    let mut out = MappingSet::new();
    let pattern_const = match &tp.o {
        PatternTerm::Term(Term::CLit(c)) => Some(c),
        _ => None,
    };
    for ct in &db.graph {
        // Conditions are conjunctions except on normalized databases, whose
        // disjunctive conditions evaluate as one solution per disjunct.
        for theta in ct.condition.disjuncts() {
            // Exact structural match on all three positions.
            if let Some(binding) = match_triple(tp, ct) {
                out.insert(ConditionalMapping {
                    binding,
                    condition: theta.clone(),
                });
            }
            // Bridging match: pattern object in C, triple object an e-literal.
            if let (Some(c), Term::ELit(l)) = (pattern_const, &ct.triple.o) {
                if let Some(binding) =
                    match_positions(&[(&tp.s, &ct.triple.s), (&tp.p, &ct.triple.p)])
                {
                    if db.lang == Lang::Tcl {
                        return Err(AlgebraError::LanguageMismatch {
                            lang: db.lang,
                            detail: "constants cannot be compared in tcl".into(),
                        });
                    }
                    let mut condition = Conjunction::of([mk_eq(
                        db.lang,
                        CTerm::Lit(l.clone()),
                        CTerm::Const(c.clone()),
                    )]);
                    condition = condition.and(theta);
                    out.insert(ConditionalMapping { binding, condition });
                }
            }
        }
    }
    Ok(out)
}

fn match_triple(tp: &TriplePattern, ct: &crate::model::ConditionalTriple) -> Option<PlainMapping> {
    match_positions(&[
        (&tp.s, &ct.triple.s),
        (&tp.p, &ct.triple.p),
        (&tp.o, &ct.triple.o),
    ])
}

fn match_positions(pairs: &[(&PatternTerm, &Term)]) -> Option<PlainMapping> {
    let mut binding: PlainMapping = BTreeMap::new();
    for (pt, t) in pairs {
        match pt {
            PatternTerm::Term(expected) => {
                if expected != *t {
                    return None;
                }
            }
            PatternTerm::Var(v) => {
                if !v.admits(t) {
                    return None;
                }
                match binding.get(v) {
                    Some(existing) if existing != *t => return None,
                    _ => {
                        binding.insert(v.clone(), (*t).clone());
                    }
                }
            }
        }
    }
    Some(binding)
}

/// FILTER evaluation is lazy: the substituted constraint is conjoined to the
/// condition without checking satisfiability. A Boolean filter is pushed to
/// DNF and one output mapping is emitted per disjunct, so conditions stay
/// conjunctive. A mapping that leaves a filter variable unbound contributes
/// nothing.
fn eval_filter(
    inner: &MappingSet,
    r: &FilterExpr,
    lang: Lang,
) -> Result<MappingSet, AlgebraError> {
    let mut out = MappingSet::new();
    for m in inner.iter() {
        let substituted = match subst_filter(r, m, lang)? {
            None => continue,
            Some(e) => e,
        };
        for delta in dnf(&substituted, lang) {
            out.insert(ConditionalMapping {
                binding: m.binding.clone(),
                condition: m.condition.and(&delta),
            });
        }
    }
    Ok(out)
}

/// Apply the mapping's binding to a filter formula. Returns `None` when a
/// variable of the formula is unbound.
pub fn subst_filter(
    r: &FilterExpr,
    m: &ConditionalMapping,
    lang: Lang,
) -> Result<Option<BoolExpr>, AlgebraError> {
    Ok(Some(match r {
        Expr::Atom(a) => match subst_atom(a, m, lang)? {
            None => return Ok(None),
            Some(atom) => Expr::Atom(atom),
        },
        Expr::And(es) => {
            let mut out = Vec::new();
            for e in es {
                match subst_filter(e, m, lang)? {
                    None => return Ok(None),
                    Some(x) => out.push(x),
                }
            }
            Expr::And(out)
        }
        Expr::Or(es) => {
            let mut out = Vec::new();
            for e in es {
                match subst_filter(e, m, lang)? {
                    None => return Ok(None),
                    Some(x) => out.push(x),
                }
            }
            Expr::Or(out)
        }
        Expr::Not(e) => match subst_filter(e, m, lang)? {
            None => return Ok(None),
            Some(x) => Expr::not(x),
        },
    }))
}

fn subst_atom(
    a: &FilterAtom,
    m: &ConditionalMapping,
    lang: Lang,
) -> Result<Option<Atom>, AlgebraError> {
    let term = |t: &QTerm| -> Result<Option<CTerm>, AlgebraError> {
        match t {
            QTerm::Lit(e) => Ok(Some(CTerm::Lit(e.clone()))),
            QTerm::Const(c) => Ok(Some(CTerm::Const(c.clone()))),
            QTerm::Var(v) => match m.get(v) {
                None => Ok(None),
                Some(Term::ELit(e)) => Ok(Some(CTerm::Lit(e.clone()))),
                Some(Term::CLit(c)) => Ok(Some(CTerm::Const(c.clone()))),
                Some(other) => Err(AlgebraError::LanguageMismatch {
                    lang,
                    detail: format!("{} bound to non-constraint term {}", v, other),
                }),
            },
        }
    };
    match a {
        FilterAtom::True => Ok(Some(Atom::True)),
        FilterAtom::False => Ok(Some(Atom::False)),
        FilterAtom::Eq { l, r, neg } => {
            let (Some(lv), Some(rv)) = (term(l)?, term(r)?) else {
                return Ok(None);
            };
            Ok(Some(crate::constraint::mk_eq_polarity(lang, lv, rv, *neg)))
        }
        FilterAtom::Topo { rel, l, r, neg } => {
            let (Some(lv), Some(rv)) = (term(l)?, term(r)?) else {
                return Ok(None);
            };
            let atom = Atom::Topo {
                rel: *rel,
                l: lv,
                r: rv,
                neg: *neg,
            };
            if !atom.fits_language(lang) {
                return Err(AlgebraError::LanguageMismatch {
                    lang,
                    detail: atom.to_string(),
                });
            }
            Ok(Some(fold_ground(atom)))
        }
        FilterAtom::Cmp {
            lhs,
            rhs,
            op,
            bound,
        } => {
            let mut bound = bound.clone();
            let mut side = |s: &Option<QScalar>, sign_left: bool| -> Result<
                Option<Option<ScalarVar>>,
                AlgebraError,
            > {
                let Some(qs) = s else {
                    return Ok(Some(None));
                };
                let Some(ct) = term(&qs.base)? else {
                    return Ok(None);
                };
                match (ct, qs.corner) {
                    (CTerm::Lit(e), None) => Ok(Some(Some(ScalarVar::Point(e)))),
                    (CTerm::Lit(e), Some(c)) => Ok(Some(Some(ScalarVar::Coord(e, c)))),
                    (CTerm::Const(c), corner) => {
                        let val = match (&c, corner) {
                            (ConstValue::Box(b), Some(crn)) => b.coord(crn).clone(),
                            (other, None) => {
                                other.as_rat().ok_or_else(|| AlgebraError::LanguageMismatch {
                                    lang,
                                    detail: format!("non-numeric constant {}", other),
                                })?
                            }
                            (other, Some(_)) => {
                                return Err(AlgebraError::LanguageMismatch {
                                    lang,
                                    detail: format!("coordinate of non-box constant {}", other),
                                })
                            }
                        };
                        // Fold the constant into the bound.
                        if sign_left {
                            bound -= val;
                        } else {
                            bound += val;
                        }
                        Ok(Some(None))
                    }
                }
            };
            let lv = match side(lhs, true)? {
                None => return Ok(None),
                Some(v) => v,
            };
            let rv = match side(rhs, false)? {
                None => return Ok(None),
                Some(v) => v,
            };
            if lv.is_none() && rv.is_none() {
                let zero = Rat::from_integer(0.into());
                return Ok(Some(if op.eval(&zero, &bound) {
                    Atom::True
                } else {
                    Atom::False
                }));
            }
            Ok(Some(Atom::Cmp {
                lhs: lv,
                rhs: rv,
                op: *op,
                bound,
            }))
        }
    }
}

fn fold_ground(atom: Atom) -> Atom {
    if let Atom::Topo { rel, l, r, neg } = &atom {
        if let (CTerm::Const(ConstValue::Poly(p)), CTerm::Const(ConstValue::Poly(q))) = (l, r) {
            let holds = crate::backend::rcc8::surface_holds(*rel, p, q);
            return if holds != *neg { Atom::True } else { Atom::False };
        }
    }
    atom
}

/// Subsumption of plain mappings: `m1` is subsumed by `m2` iff `m2` extends
/// `m1`.
pub fn subsumes(m1: &PlainMapping, m2: &PlainMapping) -> bool {
    m1.iter().all(|(k, v)| m2.get(k) == Some(v))
}

/// Every member of `o1` is subsumed by some member of `o2`.
pub fn set_subsumed(o1: &[PlainMapping], o2: &[PlainMapping]) -> bool {
    o1.iter().all(|m1| o2.iter().any(|m2| subsumes(m1, m2)))
}
