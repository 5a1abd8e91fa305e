//! SELECT and CONSTRUCT queries: evaluation, well-designed pattern
//! checking, EQ-completion, normalization, certain-answer computation, and
//! the certainty decision procedure.

use crate::algebra::{
    eval_pattern, AlgebraError, GraphPattern, MappingSet, PatternTerm, PlainMapping, Variable,
};
use crate::constraint::{
    dnf, entails, fold_ground_atom, mk_eq, mk_eq_polarity, satisfiable, Atom, BoolExpr, CTerm,
    Condition, Conjunction, ScalarVar, SolveError,
};
use crate::model::{e_literals_of_graph, ConditionalTriple, Database};
use crate::term::{ConstValue, EName, ETriple, Lang, Term};
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("pattern is outside the AND-FILTER-OPT fragment (contains UNION)")]
    NotAfoFragment,
    #[error("query fragment is not covered by the certain-answer guarantee")]
    UnsupportedFragment,
    #[error("global constraint is unsatisfiable")]
    UnsatGlobal,
    #[error("graph contains a non-ground triple: {0}")]
    NonGroundGraph(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl From<SolveError> for QueryError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::UnsatGlobal => QueryError::UnsatGlobal,
            other => QueryError::Solver(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectQuery {
    pub projection: BTreeSet<Variable>,
    pub pattern: GraphPattern,
}

/// A template triple; any position may hold a variable, and blank nodes are
/// allowed in subject/object positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateTriple {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

pub type Template = Vec<TemplateTriple>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructQuery {
    pub template: Template,
    pub pattern: GraphPattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Select(SelectQuery),
    Construct(ConstructQuery),
}

pub fn template_blanks(template: &Template) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for t in template {
        for pt in [&t.s, &t.p, &t.o] {
            if let PatternTerm::Term(Term::Blank(b)) = pt {
                out.insert(b.clone());
            }
        }
    }
    out
}

/// Fragment classification for the certain-answer machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryFragmentTag {
    Auf,
    Wd,
    Other,
}

pub fn fragment_of(p: &GraphPattern) -> QueryFragmentTag {
    if !p.contains_opt() {
        return QueryFragmentTag::Auf;
    }
    match check_well_designed(p) {
        Ok(true) => QueryFragmentTag::Wd,
        _ => QueryFragmentTag::Other,
    }
}

/// Well-designedness over the AND-FILTER-OPT fragment: the pattern is safe
/// (every FILTER's variables occur in its operand) and every variable of an
/// OPT's right side that also occurs outside the OPT occurs in its left
/// side.
pub fn check_well_designed(p: &GraphPattern) -> Result<bool, QueryError> {
    if p.contains_union() {
        return Err(QueryError::NotAfoFragment);
    }
    if !safe(p) {
        return Ok(false);
    }
    let mut opts: Vec<(BTreeSet<Variable>, BTreeSet<Variable>, BTreeSet<Variable>)> = Vec::new();
    collect_opts(p, &mut Vec::new(), &mut opts, p);
    for (left, right, outside) in opts {
        for x in right {
            if outside.contains(&x) && !left.contains(&x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn safe(p: &GraphPattern) -> bool {
    match p {
        GraphPattern::Triple(_) => true,
        GraphPattern::And(l, r) | GraphPattern::Union(l, r) | GraphPattern::Opt(l, r) => {
            safe(l) && safe(r)
        }
        GraphPattern::Filter(inner, cond) => {
            safe(inner)
                && crate::algebra::filter_vars(cond)
                    .iter()
                    .all(|v| inner.vars().contains(v))
        }
    }
}

/// For each OPT node: its left vars, right vars, and the vars occurring in
/// the whole pattern outside that OPT subtree.
fn collect_opts(
    node: &GraphPattern,
    path: &mut Vec<usize>,
    out: &mut Vec<(BTreeSet<Variable>, BTreeSet<Variable>, BTreeSet<Variable>)>,
    root: &GraphPattern,
) {
    match node {
        GraphPattern::Triple(_) => {}
        GraphPattern::Filter(inner, _) => {
            path.push(0);
            collect_opts(inner, path, out, root);
            path.pop();
        }
        GraphPattern::And(l, r) | GraphPattern::Union(l, r) => {
            path.push(0);
            collect_opts(l, path, out, root);
            path.pop();
            path.push(1);
            collect_opts(r, path, out, root);
            path.pop();
        }
        GraphPattern::Opt(l, r) => {
            let outside = vars_outside(root, path, 0);
            out.push((l.vars(), r.vars(), outside));
            path.push(0);
            collect_opts(l, path, out, root);
            path.pop();
            path.push(1);
            collect_opts(r, path, out, root);
            path.pop();
        }
    }
}

/// Variables of `root` outside the subtree addressed by `path`.
fn vars_outside(node: &GraphPattern, path: &[usize], depth: usize) -> BTreeSet<Variable> {
    if depth == path.len() {
        return BTreeSet::new();
    }
    let step = path[depth];
    match node {
        GraphPattern::Triple(_) => BTreeSet::new(),
        GraphPattern::Filter(inner, cond) => {
            let mut out = vars_outside(inner, path, depth + 1);
            out.extend(crate::algebra::filter_vars(cond));
            out
        }
        GraphPattern::And(l, r) | GraphPattern::Union(l, r) | GraphPattern::Opt(l, r) => {
            let (chosen, other): (&GraphPattern, &GraphPattern) =
                if step == 0 { (l, r) } else { (r, l) };
            let mut out = vars_outside(chosen, path, depth + 1);
            out.extend(other.vars());
            out
        }
    }
}

/// Answer to a SELECT query: the restricted solutions, with the global
/// constraint reported alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectAnswer {
    pub solutions: MappingSet,
    pub global: BoolExpr,
}

pub fn eval_select(q: &SelectQuery, db: &Database) -> Result<SelectAnswer, QueryError> {
    let raw = eval_pattern(&q.pattern, db)?;
    let mut solutions = MappingSet::new();
    for m in raw.iter() {
        solutions.insert(m.restrict(&q.projection));
    }
    Ok(SelectAnswer {
        solutions,
        global: db.global.clone(),
    })
}

/// One injective blank-node renaming per solution, ranges pairwise disjoint
/// and disjoint from the graph's blank labels. Deterministic in the
/// solution order.
pub fn fresh_blank_renaming(
    template: &Template,
    n_solutions: usize,
    graph_blanks: &BTreeSet<String>,
) -> Vec<BTreeMap<String, String>> {
    let blanks = template_blanks(template);
    let mut used: BTreeSet<String> = graph_blanks.clone();
    let mut out = Vec::with_capacity(n_solutions);
    for k in 0..n_solutions {
        let mut f = BTreeMap::new();
        for b in &blanks {
            let mut counter = 0usize;
            let fresh = loop {
                let candidate = format!("{}.{}.{}", b, k, counter);
                if !used.contains(&candidate) {
                    break candidate;
                }
                counter += 1;
            };
            used.insert(fresh.clone());
            f.insert(b.clone(), fresh);
        }
        out.push(f);
    }
    out
}

fn graph_blank_labels(db: &Database) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for ct in &db.graph {
        for t in [&ct.triple.s, &ct.triple.o] {
            if let Term::Blank(b) = t {
                out.insert(b.clone());
            }
        }
    }
    out
}

/// Answer to a CONSTRUCT query: per-solution template instantiation with
/// fresh blank nodes, dropping instantiations that are not valid triples;
/// each emitted triple carries its solution's condition, and the global
/// constraint is carried unchanged.
pub fn eval_construct(q: &ConstructQuery, db: &Database) -> Result<Database, QueryError> {
    let solutions = eval_pattern(&q.pattern, db)?;
    let renamings = fresh_blank_renaming(&q.template, solutions.len(), &graph_blank_labels(db));
    let mut graph: Vec<ConditionalTriple> = Vec::new();
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
                continue; // unbound variable: not a triple
            };
            if !matches!(s, Term::Iri(_) | Term::Blank(_)) || !matches!(p, Term::Iri(_)) {
                continue; // outside (I u B) x I x T
            }
            let ct = ConditionalTriple::new(
                ETriple::new(s, p, o),
                Condition::single(m.condition.clone()),
            );
            if !graph.contains(&ct) {
                graph.push(ct);
            }
        }
    }
    Ok(Database {
        graph,
        global: db.global.clone(),
        lang: db.lang,
    })
}

/// Replace every e-literal that the global constraint forces to a constant
/// by that constant, in triple objects and in graph conditions; the global
/// constraint itself is unchanged.
pub fn eq_complete(db: &Database) -> Result<Database, QueryError> {
    if !satisfiable(&db.global, db.lang)? {
        return Err(QueryError::UnsatGlobal);
    }
    let mut forced: BTreeMap<EName, ConstValue> = BTreeMap::new();
    for lit in e_literals_of_graph(&db.graph) {
        if let Some(c) = crate::constraint::forced_constant(&db.global, &lit, db.lang)? {
            forced.insert(lit, c);
        }
    }
    if forced.is_empty() {
        return Ok(db.clone());
    }
    let mut graph = Vec::new();
    for ct in &db.graph {
        let o = match &ct.triple.o {
            Term::ELit(e) if forced.contains_key(e) => Term::CLit(forced[e].clone()),
            other => other.clone(),
        };
        let condition = substitute_condition(&ct.condition, &forced, db.lang);
        let new_ct = ConditionalTriple::new(
            ETriple::new(ct.triple.s.clone(), ct.triple.p.clone(), o),
            condition,
        );
        if !graph.contains(&new_ct) {
            graph.push(new_ct);
        }
    }
    Ok(Database {
        graph,
        global: db.global.clone(),
        lang: db.lang,
    })
}

fn substitute_condition(
    cond: &Condition,
    forced: &BTreeMap<EName, ConstValue>,
    lang: Lang,
) -> Condition {
    Condition::of_disjuncts(cond.disjuncts().iter().map(|conj| {
        let mut out = Conjunction::truth();
        for atom in conj.atoms() {
            out.push(substitute_atom(atom, forced, lang));
        }
        out
    }))
}

fn substitute_atom(atom: &Atom, forced: &BTreeMap<EName, ConstValue>, lang: Lang) -> Atom {
    let term = |t: &CTerm| -> CTerm {
        match t {
            CTerm::Lit(e) if forced.contains_key(e) => CTerm::Const(forced[e].clone()),
            other => other.clone(),
        }
    };
    match atom {
        Atom::True => Atom::True,
        Atom::False => Atom::False,
        Atom::Eq { l, r, neg } => mk_eq_polarity(lang, term(l), term(r), *neg),
        Atom::Topo { rel, l, r, neg } => fold_ground_atom(Atom::Topo {
            rel: *rel,
            l: term(l),
            r: term(r),
            neg: *neg,
        }),
        Atom::Cmp {
            lhs,
            rhs,
            op,
            bound,
        } => {
            let mut bound = bound.clone();
            let mut subst_side = |side: &Option<ScalarVar>, is_lhs: bool| -> Option<ScalarVar> {
                let sv = side.as_ref()?;
                let value: Option<crate::geom::Rat> = match sv {
                    ScalarVar::Point(e) => forced.get(e).and_then(|c| c.as_rat()),
                    ScalarVar::Coord(e, corner) => match forced.get(e) {
                        Some(ConstValue::Box(b)) => Some(b.coord(*corner).clone()),
                        _ => None,
                    },
                };
                match value {
                    None => Some(sv.clone()),
                    Some(v) => {
                        if is_lhs {
                            bound -= v;
                        } else {
                            bound += v;
                        }
                        None
                    }
                }
            };
            let lhs = subst_side(lhs, true);
            let rhs = subst_side(rhs, false);
            if lhs.is_none() && rhs.is_none() {
                return if op.eval(&crate::geom::Rat::zero(), &bound) {
                    Atom::True
                } else {
                    Atom::False
                };
            }
            Atom::Cmp {
                lhs,
                rhs,
                op: *op,
                bound,
            }
        }
    }
}

/// Merge conditional triples with the same triple part into one conditional
/// triple with the disjunction of their conditions. Idempotent.
pub fn normalize(db: &Database) -> Database {
    let mut order: Vec<ETriple> = Vec::new();
    let mut groups: BTreeMap<ETriple, Vec<Condition>> = BTreeMap::new();
    for ct in &db.graph {
        if !groups.contains_key(&ct.triple) {
            order.push(ct.triple.clone());
        }
        groups
            .entry(ct.triple.clone())
            .or_default()
            .push(ct.condition.clone());
    }
    let graph = order
        .into_iter()
        .map(|t| {
            let conds = &groups[&t];
            let merged = conds
                .iter()
                .skip(1)
                .fold(conds[0].clone(), |acc, c| acc.merge(c));
            ConditionalTriple::new(t, merged)
        })
        .collect();
    Database {
        graph,
        global: db.global.clone(),
        lang: db.lang,
    }
}

fn require_certain_fragment(pattern: &GraphPattern) -> Result<(), QueryError> {
    match fragment_of(pattern) {
        QueryFragmentTag::Auf | QueryFragmentTag::Wd => Ok(()),
        QueryFragmentTag::Other => Err(QueryError::UnsupportedFragment),
    }
}

/// The certain answer to a CONSTRUCT query: evaluate, EQ-complete,
/// normalize, then keep the ground triples whose matching condition
/// (disjoined across the triples sharing the subject and predicate, with an
/// EQ atom pairing an e-literal object with the candidate constant) is
/// entailed by the global constraint.
pub fn certain_answer(q: &ConstructQuery, db: &Database) -> Result<BTreeSet<ETriple>, QueryError> {
    require_certain_fragment(&q.pattern)?;
    if !template_blanks(&q.template).is_empty() {
        return Err(QueryError::UnsupportedFragment);
    }
    if !satisfiable(&db.global, db.lang)? {
        return Err(QueryError::UnsatGlobal);
    }
    let evaluated = eval_construct(q, db)?;
    let h_q = normalize(&eq_complete(&evaluated)?);
    let candidates = candidate_triples(&h_q, db)?;
    let mut out = BTreeSet::new();
    for t in candidates {
        let theta = matching_disjunction(&t, &h_q.graph, db.lang);
        if theta.is_false() {
            continue;
        }
        if entails(&db.global, &theta, db.lang)? {
            out.insert(t);
        }
    }
    Ok(out)
}

/// Ground candidate triples: every ground triple of the evaluated graph,
/// plus, for triples with an e-literal object, candidates obtained from
/// constants that some disjunct of the global constraint forces the literal
/// to take and from constants appearing in the database, query result, or
/// global constraint. Spurious candidates are rejected by the entailment
/// check.
fn candidate_triples(h_q: &Database, db: &Database) -> Result<BTreeSet<ETriple>, QueryError> {
    let mut out: BTreeSet<ETriple> = BTreeSet::new();
    let mut constant_pool: BTreeSet<ConstValue> = db.global.constants();
    for source in [&h_q.graph, &db.graph] {
        for ct in source {
            if let Term::CLit(c) = &ct.triple.o {
                constant_pool.insert(c.clone());
            }
            for d in ct.condition.disjuncts() {
                for a in d.atoms() {
                    a.constants(&mut constant_pool);
                }
            }
        }
    }
    let lits = e_literals_of_graph(&h_q.graph);
    let mut forced_per_disjunct: BTreeMap<EName, BTreeSet<ConstValue>> = BTreeMap::new();
    if !lits.is_empty() {
        for disjunct in dnf(&db.global, db.lang) {
            let expr = disjunct.to_expr();
            if !satisfiable(&expr, db.lang)? {
                continue;
            }
            for lit in &lits {
                if let Some(c) = crate::constraint::forced_constant(&expr, lit, db.lang)? {
                    forced_per_disjunct
                        .entry(lit.clone())
                        .or_default()
                        .insert(c);
                }
            }
        }
    }
    for ct in &h_q.graph {
        match &ct.triple.o {
            Term::ELit(e) => {
                let mut cands: BTreeSet<ConstValue> = constant_pool
                    .iter()
                    .filter(|c| c.datatype() == db.lang.datatype())
                    .cloned()
                    .collect();
                if let Some(forced) = forced_per_disjunct.get(e) {
                    cands.extend(forced.iter().cloned());
                }
                for c in cands {
                    out.insert(ETriple::new(
                        ct.triple.s.clone(),
                        ct.triple.p.clone(),
                        Term::CLit(c),
                    ));
                }
            }
            _ => {
                out.insert(ct.triple.clone());
            }
        }
    }
    Ok(out)
}

/// The disjunction, over graph triples agreeing with `t` on subject and
/// predicate, of their conditions (strengthened with the e-literal/constant
/// EQ atom when the objects pair that way). `false` when nothing matches.
fn matching_disjunction(t: &ETriple, graph: &[ConditionalTriple], lang: Lang) -> Condition {
    let mut disjuncts: Vec<Conjunction> = Vec::new();
    for ct in graph {
        if ct.triple.s != t.s || ct.triple.p != t.p {
            continue;
        }
        if ct.triple.o == t.o {
            disjuncts.extend(ct.condition.disjuncts().iter().cloned());
        } else if let (Term::ELit(l), Term::CLit(o)) = (&ct.triple.o, &t.o) {
            let bridge = mk_eq(lang, CTerm::Lit(l.clone()), CTerm::Const(o.clone()));
            for d in ct.condition.disjuncts() {
                let mut conj = d.clone();
                conj.push(bridge.clone());
                disjuncts.push(conj);
            }
        }
    }
    if disjuncts.is_empty() {
        return Condition::falsity();
    }
    Condition::of_disjuncts(disjuncts)
}

/// The certainty decision problem: is every triple of the ground graph `h`
/// in the certain answer of `q` over `db`? Decided through validity of
/// `global implies Theta(t)` per triple, with `Theta` built from the
/// un-normalized evaluation result.
pub fn certainty(q: &ConstructQuery, h: &[ETriple], db: &Database) -> Result<bool, QueryError> {
    require_certain_fragment(&q.pattern)?;
    if !template_blanks(&q.template).is_empty() {
        return Err(QueryError::UnsupportedFragment);
    }
    for t in h {
        if !t.is_ground() {
            return Err(QueryError::NonGroundGraph(t.to_string()));
        }
    }
    if !satisfiable(&db.global, db.lang)? {
        return Err(QueryError::UnsatGlobal);
    }
    let evaluated = eval_construct(q, db)?;
    for t in h {
        let theta = matching_disjunction(t, &evaluated.graph, db.lang);
        if theta.is_false() {
            return Ok(false);
        }
        if !entails(&db.global, &theta, db.lang)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certain rows of a SELECT query with a monotone (AND-UNION-FILTER)
/// pattern: the ground bindings delivered by every possible graph.
pub fn select_certain(q: &SelectQuery, db: &Database) -> Result<Vec<PlainMapping>, QueryError> {
    if q.pattern.contains_opt() {
        return Err(QueryError::UnsupportedFragment);
    }
    if !satisfiable(&db.global, db.lang)? {
        return Err(QueryError::UnsatGlobal);
    }
    let answer = eval_select(q, db)?;
    let mut constant_pool: BTreeSet<ConstValue> = db.global.constants();
    for ct in &db.graph {
        if let Term::CLit(c) = &ct.triple.o {
            constant_pool.insert(c.clone());
        }
        for d in ct.condition.disjuncts() {
            for a in d.atoms() {
                a.constants(&mut constant_pool);
            }
        }
    }
    let mut bound_lits: BTreeSet<EName> = BTreeSet::new();
    for m in answer.solutions.iter() {
        for t in m.binding.values() {
            if let Term::ELit(e) = t {
                bound_lits.insert(e.clone());
            }
        }
    }
    let mut forced_pool: BTreeMap<EName, BTreeSet<ConstValue>> = BTreeMap::new();
    if !bound_lits.is_empty() {
        for disjunct in dnf(&db.global, db.lang) {
            let expr = disjunct.to_expr();
            if !satisfiable(&expr, db.lang)? {
                continue;
            }
            for lit in &bound_lits {
                if let Some(c) = crate::constraint::forced_constant(&expr, lit, db.lang)? {
                    forced_pool.entry(lit.clone()).or_default().insert(c);
                }
            }
        }
    }
    let mut candidates: BTreeSet<PlainMapping> = BTreeSet::new();
    for m in answer.solutions.iter() {
        let entries: Vec<(&Variable, &Term)> = m.binding.iter().collect();
        expand_candidates(
            &entries,
            0,
            &mut BTreeMap::new(),
            &constant_pool,
            &forced_pool,
            db.lang,
            &mut candidates,
        );
    }
    let mut out = Vec::new();
    for cand in candidates {
        // The disjunction over solutions that coincide with this row once
        // their e-literal bindings are pinned by EQ atoms.
        let mut disjuncts: Vec<Conjunction> = Vec::new();
        for m in answer.solutions.iter() {
            if m.binding.len() != cand.len() {
                continue;
            }
            let mut conj = m.condition.clone();
            let mut ok = true;
            for (var, val) in &m.binding {
                match cand.get(var) {
                    None => {
                        ok = false;
                        break;
                    }
                    Some(target) if target == val => {}
                    Some(Term::CLit(c)) => {
                        if let Term::ELit(e) = val {
                            conj.push(mk_eq(
                                db.lang,
                                CTerm::Lit(e.clone()),
                                CTerm::Const(c.clone()),
                            ));
                        } else {
                            ok = false;
                            break;
                        }
                    }
                    Some(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                disjuncts.push(conj);
            }
        }
        if disjuncts.is_empty() {
            continue;
        }
        let theta = Condition::of_disjuncts(disjuncts);
        if entails(&db.global, &theta, db.lang)? {
            out.push(cand);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn expand_candidates(
    entries: &[(&Variable, &Term)],
    idx: usize,
    acc: &mut PlainMapping,
    pool: &BTreeSet<ConstValue>,
    forced_pool: &BTreeMap<EName, BTreeSet<ConstValue>>,
    lang: Lang,
    out: &mut BTreeSet<PlainMapping>,
) {
    if idx == entries.len() {
        out.insert(acc.clone());
        return;
    }
    let (var, term) = entries[idx];
    match term {
        Term::ELit(e) => {
            let mut cands: BTreeSet<ConstValue> = pool
                .iter()
                .filter(|c| c.datatype() == lang.datatype())
                .cloned()
                .collect();
            if let Some(f) = forced_pool.get(e) {
                cands.extend(f.iter().cloned());
            }
            for c in cands {
                acc.insert(var.clone(), Term::CLit(c));
                expand_candidates(entries, idx + 1, acc, pool, forced_pool, lang, out);
            }
            acc.remove(var);
        }
        ground => {
            acc.insert(var.clone(), ground.clone());
            expand_candidates(entries, idx + 1, acc, pool, forced_pool, lang, out);
            acc.remove(var);
        }
    }
}
