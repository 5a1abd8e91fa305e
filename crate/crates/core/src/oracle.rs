//! Brute-force possible-worlds semantics over a finite domain restriction:
//! world enumeration, standard SPARQL evaluation per world, certain-answer
//! intersection, and coinitiality. Ground truth for the symbolic engine on
//! small instances.

use crate::algebra::{
    set_subsumed, subst_filter, ConditionalMapping, GraphPattern, MappingSet, PatternTerm,
    PlainMapping, TriplePattern,
};
use crate::constraint::{eval_expr_ground, holds_ground, Conjunction, Valuation};
use crate::model::Database;
use crate::query::{ConstructQuery, Query, SelectQuery};
use crate::term::{ConstValue, EName, ETriple, Lang, Term};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("no valuation in the domain satisfies the global constraint")]
    EmptyWorldSet,
    #[error("domain does not cover e-literal {0}")]
    DomainGap(EName),
    #[error("ground evaluation failure: {0}")]
    Ground(String),
}

/// Finite candidate constants per e-literal.
pub type DomainSpec = BTreeMap<EName, Vec<ConstValue>>;

/// A ground graph: no e-literals, blank nodes allowed.
pub type World = BTreeSet<ETriple>;

/// Apply a valuation to a conditional graph: substitute constants for
/// e-literals in objects and keep the triples whose instantiated condition
/// holds.
pub fn apply_valuation_graph(
    v: &Valuation,
    graph: &[crate::model::ConditionalTriple],
) -> Result<World, OracleError> {
    let mut out = World::new();
    for ct in graph {
        let keep = holds_ground(&ct.condition, v).map_err(|e| OracleError::Ground(e.to_string()))?;
        if !keep {
            continue;
        }
        let o = match &ct.triple.o {
            Term::ELit(e) => Term::CLit(
                v.get(e)
                    .cloned()
                    .ok_or_else(|| OracleError::DomainGap(e.clone()))?,
            ),
            other => other.clone(),
        };
        out.insert(ETriple::new(
            ct.triple.s.clone(),
            ct.triple.p.clone(),
            o,
        ));
    }
    Ok(out)
}

/// Apply a valuation to a conditional mapping set: keep mappings whose
/// condition holds and substitute constants for e-literal bindings.
pub fn apply_valuation_mappings(
    v: &Valuation,
    mappings: &MappingSet,
) -> Result<Vec<PlainMapping>, OracleError> {
    let mut out: Vec<PlainMapping> = Vec::new();
    for m in mappings.iter() {
        let cond = crate::constraint::Condition::single(m.condition.clone());
        if !holds_ground(&cond, v).map_err(|e| OracleError::Ground(e.to_string()))? {
            continue;
        }
        let mut plain: PlainMapping = BTreeMap::new();
        for (var, t) in &m.binding {
            let t = match t {
                Term::ELit(e) => Term::CLit(
                    v.get(e)
                        .cloned()
                        .ok_or_else(|| OracleError::DomainGap(e.clone()))?,
                ),
                other => other.clone(),
            };
            plain.insert(var.clone(), t);
        }
        if !out.contains(&plain) {
            out.push(plain);
        }
    }
    Ok(out)
}

/// All valuations over the domain that satisfy the global constraint.
pub fn satisfying_valuations(db: &Database, dom: &DomainSpec) -> Result<Vec<Valuation>, OracleError> {
    let lits: Vec<EName> = crate::model::e_literals_of(db).into_iter().collect();
    for lit in &lits {
        match dom.get(lit) {
            Some(cands) if !cands.is_empty() => {}
            _ => return Err(OracleError::DomainGap(lit.clone())),
        }
    }
    let mut out = Vec::new();
    let mut v: Valuation = BTreeMap::new();
    enumerate(&lits, 0, dom, &mut v, &mut |v| {
        match eval_expr_ground(&db.global, v) {
            Ok(true) => {
                out.push(v.clone());
                Ok(())
            }
            Ok(false) => Ok(()),
            Err(e) => Err(OracleError::Ground(e.to_string())),
        }
    })?;
    Ok(out)
}

fn enumerate(
    lits: &[EName],
    idx: usize,
    dom: &DomainSpec,
    acc: &mut Valuation,
    visit: &mut impl FnMut(&Valuation) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    if idx == lits.len() {
        return visit(acc);
    }
    let lit = &lits[idx];
    for cand in &dom[lit] {
        acc.insert(lit.clone(), cand.clone());
        enumerate(lits, idx + 1, dom, acc, visit)?;
    }
    acc.remove(lit);
    Ok(())
}

/// The minimal possible worlds of the database over the finite domain:
/// `v(G)` for every satisfying valuation, deduplicated, in a deterministic
/// order.
pub fn enumerate_worlds(db: &Database, dom: &DomainSpec) -> Result<Vec<World>, OracleError> {
    let vals = satisfying_valuations(db, dom)?;
    if vals.is_empty() {
        return Err(OracleError::EmptyWorldSet);
    }
    let mut worlds: BTreeSet<World> = BTreeSet::new();
    for v in &vals {
        worlds.insert(apply_valuation_graph(v, &db.graph)?);
    }
    Ok(worlds.into_iter().collect())
}

/// Standard SPARQL set-semantics evaluation of a graph pattern over a
/// ground graph. FILTER is eager: a solution leaving a filter variable
/// unbound, or failing the ground check, is dropped.
pub fn std_eval_pattern(
    p: &GraphPattern,
    world: &World,
    lang: Lang,
) -> Result<Vec<PlainMapping>, OracleError> {
    Ok(match p {
        GraphPattern::Triple(tp) => std_triple(tp, world),
        GraphPattern::And(l, r) => std_join(
            &std_eval_pattern(l, world, lang)?,
            &std_eval_pattern(r, world, lang)?,
        ),
        GraphPattern::Union(l, r) => {
            let mut out = std_eval_pattern(l, world, lang)?;
            for m in std_eval_pattern(r, world, lang)? {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            out
        }
        GraphPattern::Opt(l, r) => {
            let left = std_eval_pattern(l, world, lang)?;
            let right = std_eval_pattern(r, world, lang)?;
            let mut out = std_join(&left, &right);
            for m in std_diff(&left, &right) {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            out
        }
        GraphPattern::Filter(inner, cond) => {
            let mut out = Vec::new();
            for m in std_eval_pattern(inner, world, lang)? {
                let wrapped = ConditionalMapping::new(m.clone(), Conjunction::truth());
                match subst_filter(cond, &wrapped, lang) {
                    Ok(Some(expr)) => {
                        let empty: Valuation = BTreeMap::new();
                        match eval_expr_ground(&expr, &empty) {
                            Ok(true) => out.push(m),
                            Ok(false) => {}
                            Err(e) => return Err(OracleError::Ground(e.to_string())),
                        }
                    }
                    Ok(None) => {} // unbound filter variable: solution dropped
                    Err(e) => return Err(OracleError::Ground(e.to_string())),
                }
            }
            out
        }
    })
}

fn std_triple(tp: &TriplePattern, world: &World) -> Vec<PlainMapping> {
    let mut out = Vec::new();
    for t in world {
        if let Some(binding) = match_ground(tp, t) {
            if !out.contains(&binding) {
                out.push(binding);
            }
        }
    }
    out
}

fn match_ground(tp: &TriplePattern, t: &ETriple) -> Option<PlainMapping> {
    let mut binding: PlainMapping = BTreeMap::new();
    for (pt, v) in [(&tp.s, &t.s), (&tp.p, &t.p), (&tp.o, &t.o)] {
        match pt {
            PatternTerm::Term(expected) => {
                if expected != v {
                    return None;
                }
            }
            PatternTerm::Var(var) => {
                if !var.admits(v) {
                    return None;
                }
                match binding.get(var) {
                    Some(existing) if existing != v => return None,
                    _ => {
                        binding.insert(var.clone(), v.clone());
                    }
                }
            }
        }
    }
    Some(binding)
}

fn plain_compatible(m1: &PlainMapping, m2: &PlainMapping) -> bool {
    m1.iter().all(|(k, v)| match m2.get(k) {
        Some(w) => v == w,
        None => true,
    })
}

fn std_join(o1: &[PlainMapping], o2: &[PlainMapping]) -> Vec<PlainMapping> {
    let mut out = Vec::new();
    for m1 in o1 {
        for m2 in o2 {
            if plain_compatible(m1, m2) {
                let mut joined = m1.clone();
                for (k, v) in m2 {
                    joined.insert(k.clone(), v.clone());
                }
                if !out.contains(&joined) {
                    out.push(joined);
                }
            }
        }
    }
    out
}

fn std_diff(o1: &[PlainMapping], o2: &[PlainMapping]) -> Vec<PlainMapping> {
    o1.iter()
        .filter(|m1| o2.iter().all(|m2| !plain_compatible(m1, m2)))
        .cloned()
        .collect()
}

/// Standard CONSTRUCT evaluation over a ground graph.
pub fn std_eval_construct(
    q: &ConstructQuery,
    world: &World,
    lang: Lang,
) -> Result<World, OracleError> {
    let solutions = std_eval_pattern(&q.pattern, world, lang)?;
    let world_blanks: BTreeSet<String> = world
        .iter()
        .flat_map(|t| [&t.s, &t.o])
        .filter_map(|t| match t {
            Term::Blank(b) => Some(b.clone()),
            _ => None,
        })
        .collect();
    let renamings =
        crate::query::fresh_blank_renaming(&q.template, solutions.len(), &world_blanks);
    let mut out = World::new();
    for (m, renaming) in solutions.iter().zip(renamings.iter()) {
        for tt in &q.template {
            let inst = |pt: &PatternTerm| -> Option<Term> {
                match pt {
                    PatternTerm::Term(Term::Blank(b)) => Some(Term::Blank(renaming[b].clone())),
                    PatternTerm::Term(t) => Some(t.clone()),
                    PatternTerm::Var(v) => m.get(v).cloned(),
                }
            };
            let (Some(s), Some(p), Some(o)) = (inst(&tt.s), inst(&tt.p), inst(&tt.o)) else {
                continue;
            };
            if !matches!(s, Term::Iri(_) | Term::Blank(_)) || !matches!(p, Term::Iri(_)) {
                continue;
            }
            out.insert(ETriple::new(s, p, o));
        }
    }
    Ok(out)
}

/// Per-world evaluation of a SELECT query.
pub fn std_eval_select(
    q: &SelectQuery,
    world: &World,
    lang: Lang,
) -> Result<Vec<PlainMapping>, OracleError> {
    let mut out: Vec<PlainMapping> = Vec::new();
    for m in std_eval_pattern(&q.pattern, world, lang)? {
        let restricted: PlainMapping = m
            .into_iter()
            .filter(|(k, _)| q.projection.contains(k))
            .collect();
        if !out.contains(&restricted) {
            out.push(restricted);
        }
    }
    Ok(out)
}

/// The certain answer over the finite domain restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    Triples(BTreeSet<ETriple>),
    Rows(Vec<PlainMapping>),
}

pub fn oracle_certain(
    q: &Query,
    db: &Database,
    dom: &DomainSpec,
) -> Result<OracleAnswer, OracleError> {
    let worlds = enumerate_worlds(db, dom)?;
    match q {
        Query::Construct(cq) => {
            let mut acc: Option<BTreeSet<ETriple>> = None;
            for w in &worlds {
                let ans = std_eval_construct(cq, w, db.lang)?;
                acc = Some(match acc {
                    None => ans,
                    Some(prev) => prev.intersection(&ans).cloned().collect(),
                });
            }
            Ok(OracleAnswer::Triples(acc.unwrap_or_default()))
        }
        Query::Select(sq) => {
            let mut acc: Option<Vec<PlainMapping>> = None;
            for w in &worlds {
                let ans = std_eval_select(sq, w, db.lang)?;
                acc = Some(match acc {
                    None => ans,
                    Some(prev) => prev.into_iter().filter(|m| ans.contains(m)).collect(),
                });
            }
            let mut rows = acc.unwrap_or_default();
            rows.sort();
            Ok(OracleAnswer::Rows(rows))
        }
    }
}

/// Two world lists are coinitial when each world of one contains some world
/// of the other.
pub fn coinitial(gs: &[World], hs: &[World]) -> bool {
    let lower_bounded = |xs: &[World], ys: &[World]| {
        xs.iter()
            .all(|x| ys.iter().any(|y| y.is_subset(x)))
    };
    lower_bounded(gs, hs) && lower_bounded(hs, gs)
}

/// Greatest lower bound of a world list under intersection.
pub fn glb(worlds: &[World]) -> World {
    let mut iter = worlds.iter();
    let Some(first) = iter.next() else {
        return World::new();
    };
    iter.fold(first.clone(), |acc, w| {
        acc.intersection(w).cloned().collect()
    })
}

/// Weak-monotonicity helper: every row of the first list subsumed by one of
/// the second.
pub fn rows_subsumed(o1: &[PlainMapping], o2: &[PlainMapping]) -> bool {
    set_subsumed(o1, o2)
}
