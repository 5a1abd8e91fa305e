//! RCC-8 reasoning: base-relation computation on polygons, the composition
//! table, path consistency over constraint networks with landmarks, and a
//! grid-based witness search for satisfiable networks.

use crate::constraint::{Atom, CTerm, Conjunction, TopoRel};
use crate::geom::{rat, Polygon, Rat};
use crate::term::{ConstValue, EName};
use num::One;
use std::collections::BTreeMap;
use std::fmt;

/// The eight jointly exhaustive, pairwise disjoint base relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseRel {
    Dc = 0,
    Ec = 1,
    Po = 2,
    Tpp = 3,
    Ntpp = 4,
    Tppi = 5,
    Ntppi = 6,
    Eq = 7,
}

impl BaseRel {
    pub const ALL: [BaseRel; 8] = [
        BaseRel::Dc,
        BaseRel::Ec,
        BaseRel::Po,
        BaseRel::Tpp,
        BaseRel::Ntpp,
        BaseRel::Tppi,
        BaseRel::Ntppi,
        BaseRel::Eq,
    ];

    pub fn converse(self) -> BaseRel {
        match self {
            BaseRel::Tpp => BaseRel::Tppi,
            BaseRel::Tppi => BaseRel::Tpp,
            BaseRel::Ntpp => BaseRel::Ntppi,
            BaseRel::Ntppi => BaseRel::Ntpp,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseRel::Dc => "DC",
            BaseRel::Ec => "EC",
            BaseRel::Po => "PO",
            BaseRel::Tpp => "TPP",
            BaseRel::Ntpp => "NTPP",
            BaseRel::Tppi => "TPPi",
            BaseRel::Ntppi => "NTPPi",
            BaseRel::Eq => "EQ",
        }
    }

    fn from_index(i: usize) -> BaseRel {
        BaseRel::ALL[i]
    }
}

impl fmt::Display for BaseRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of base relations as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelSet(pub u8);

impl RelSet {
    pub const EMPTY: RelSet = RelSet(0);
    pub const ALL: RelSet = RelSet(0xff);

    pub fn singleton(r: BaseRel) -> RelSet {
        RelSet(1 << r as u8)
    }

    pub fn of(rels: &[BaseRel]) -> RelSet {
        let mut s = RelSet::EMPTY;
        for &r in rels {
            s = s.union(RelSet::singleton(r));
        }
        s
    }

    pub fn contains(self, r: BaseRel) -> bool {
        self.0 & (1 << r as u8) != 0
    }

    pub fn intersect(self, o: RelSet) -> RelSet {
        RelSet(self.0 & o.0)
    }

    pub fn union(self, o: RelSet) -> RelSet {
        RelSet(self.0 | o.0)
    }

    pub fn complement(self) -> RelSet {
        RelSet(!self.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = BaseRel> {
        (0..8).filter_map(move |i| {
            if self.0 & (1 << i) != 0 {
                Some(BaseRel::from_index(i))
            } else {
                None
            }
        })
    }

    pub fn converse(self) -> RelSet {
        let mut out = RelSet::EMPTY;
        for r in self.iter() {
            out = out.union(RelSet::singleton(r.converse()));
        }
        out
    }
}

impl fmt::Display for RelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", r)?;
        }
        write!(f, "}}")
    }
}

use BaseRel::*;

/// `composition(r, s)` is the set of base relations possible between x and z
/// given `x r y` and `y s z`. The standard table; each cell is validated by
/// exhaustive rectangle sampling in the acceptance suite.
pub fn composition(r: BaseRel, s: BaseRel) -> RelSet {
    if r == Eq {
        return RelSet::singleton(s);
    }
    if s == Eq {
        return RelSet::singleton(r);
    }
    match (r, s) {
        (Dc, Dc) => RelSet::ALL,
        (Dc, Ec) | (Dc, Po) | (Dc, Tpp) | (Dc, Ntpp) => RelSet::of(&[Dc, Ec, Po, Tpp, Ntpp]),
        (Dc, Tppi) | (Dc, Ntppi) => RelSet::singleton(Dc),

        (Ec, Dc) => RelSet::of(&[Dc, Ec, Po, Tppi, Ntppi]),
        (Ec, Ec) => RelSet::of(&[Dc, Ec, Po, Tpp, Tppi, Eq]),
        (Ec, Po) => RelSet::of(&[Dc, Ec, Po, Tpp, Ntpp]),
        (Ec, Tpp) => RelSet::of(&[Ec, Po, Tpp, Ntpp]),
        (Ec, Ntpp) => RelSet::of(&[Po, Tpp, Ntpp]),
        (Ec, Tppi) => RelSet::of(&[Dc, Ec]),
        (Ec, Ntppi) => RelSet::singleton(Dc),

        (Po, Dc) | (Po, Ec) => RelSet::of(&[Dc, Ec, Po, Tppi, Ntppi]),
        (Po, Po) => RelSet::ALL,
        (Po, Tpp) | (Po, Ntpp) => RelSet::of(&[Po, Tpp, Ntpp]),
        (Po, Tppi) | (Po, Ntppi) => RelSet::of(&[Dc, Ec, Po, Tppi, Ntppi]),

        (Tpp, Dc) => RelSet::singleton(Dc),
        (Tpp, Ec) => RelSet::of(&[Dc, Ec]),
        (Tpp, Po) => RelSet::of(&[Dc, Ec, Po, Tpp, Ntpp]),
        (Tpp, Tpp) => RelSet::of(&[Tpp, Ntpp]),
        (Tpp, Ntpp) => RelSet::singleton(Ntpp),
        (Tpp, Tppi) => RelSet::of(&[Dc, Ec, Po, Tpp, Tppi, Eq]),
        (Tpp, Ntppi) => RelSet::of(&[Dc, Ec, Po, Tppi, Ntppi]),

        (Ntpp, Dc) => RelSet::singleton(Dc),
        (Ntpp, Ec) => RelSet::singleton(Dc),
        (Ntpp, Po) => RelSet::of(&[Dc, Ec, Po, Tpp, Ntpp]),
        (Ntpp, Tpp) => RelSet::singleton(Ntpp),
        (Ntpp, Ntpp) => RelSet::singleton(Ntpp),
        (Ntpp, Tppi) => RelSet::of(&[Dc, Ec, Po, Tpp, Ntpp]),
        (Ntpp, Ntppi) => RelSet::ALL,

        (Tppi, Dc) => RelSet::of(&[Dc, Ec, Po, Tppi, Ntppi]),
        (Tppi, Ec) => RelSet::of(&[Ec, Po, Tppi, Ntppi]),
        (Tppi, Po) => RelSet::of(&[Po, Tppi, Ntppi]),
        (Tppi, Tpp) => RelSet::of(&[Po, Tpp, Tppi, Eq]),
        (Tppi, Ntpp) => RelSet::of(&[Po, Tpp, Ntpp]),
        (Tppi, Tppi) => RelSet::of(&[Tppi, Ntppi]),
        (Tppi, Ntppi) => RelSet::singleton(Ntppi),

        (Ntppi, Dc) => RelSet::of(&[Dc, Ec, Po, Tppi, Ntppi]),
        (Ntppi, Ec) => RelSet::of(&[Po, Tppi, Ntppi]),
        (Ntppi, Po) => RelSet::of(&[Po, Tppi, Ntppi]),
        (Ntppi, Tpp) => RelSet::of(&[Po, Tppi, Ntppi]),
        (Ntppi, Ntpp) => RelSet::of(&[Po, Tpp, Ntpp, Tppi, Ntppi, Eq]),
        (Ntppi, Tppi) => RelSet::singleton(Ntppi),
        (Ntppi, Ntppi) => RelSet::singleton(Ntppi),

        (Eq, _) | (_, Eq) => unreachable!(),
    }
}

pub fn compose_sets(a: RelSet, b: RelSet) -> RelSet {
    let mut out = RelSet::EMPTY;
    for r in a.iter() {
        for s in b.iter() {
            out = out.union(composition(r, s));
        }
    }
    out
}

/// The unique base relation between two regions, decided exactly.
pub fn relation(p: &Polygon, q: &Polygon) -> BaseRel {
    if p == q {
        return Eq;
    }
    if p.subset_of(q) {
        return if p.inside_interior_of(q) { Ntpp } else { Tpp };
    }
    if q.subset_of(p) {
        return if q.inside_interior_of(p) { Ntppi } else { Tppi };
    }
    if p.interiors_meet(q) {
        return Po;
    }
    if p.meets(q) {
        Ec
    } else {
        Dc
    }
}

/// Whether the surface-vocabulary relation holds between two regions.
pub fn surface_holds(rel: TopoRel, p: &Polygon, q: &Polygon) -> bool {
    relation(p, q) == surface_to_base(rel)
}

pub fn surface_to_base(rel: TopoRel) -> BaseRel {
    match rel {
        TopoRel::Dc => Dc,
        TopoRel::Ec => Ec,
        TopoRel::Po => Po,
        TopoRel::Eq => Eq,
        TopoRel::Tpp => Tpp,
        TopoRel::Ntpp => Ntpp,
    }
}

/// Constraint network over variables and polygon landmarks.
#[derive(Debug, Clone)]
pub struct Network {
    labels: Vec<NodeLabel>,
    edges: Vec<RelSet>, // n*n row-major
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeLabel {
    Var(EName),
    Landmark(Polygon),
}

impl Network {
    pub fn new(labels: Vec<NodeLabel>) -> Network {
        let n = labels.len();
        let mut net = Network {
            labels,
            edges: vec![RelSet::ALL; n * n],
        };
        for i in 0..n {
            net.edges[i * n + i] = RelSet::singleton(Eq);
        }
        // Landmark-landmark edges are fixed by geometry.
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if let (NodeLabel::Landmark(p), NodeLabel::Landmark(q)) =
                    (&net.labels[i], &net.labels[j])
                {
                    let r = relation(p, q);
                    let idx = i * n + j;
                    net.edges[idx] = RelSet::singleton(r);
                }
            }
        }
        net
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn edge(&self, i: usize, j: usize) -> RelSet {
        self.edges[i * self.len() + j]
    }

    /// Intersect edge (i,j) with `rels`, keeping the converse edge coherent.
    /// Returns false if the edge becomes empty.
    pub fn restrict(&mut self, i: usize, j: usize, rels: RelSet) -> bool {
        let n = self.len();
        let cur = self.edges[i * n + j];
        let new = cur.intersect(rels);
        self.edges[i * n + j] = new;
        self.edges[j * n + i] = new.converse();
        !new.is_empty()
    }

    /// Standard composition-table closure. Returns the consistency verdict
    /// and the refined network. For networks whose edges are all singleton
    /// base relations, an empty edge decides satisfiability.
    pub fn path_consistency(mut self) -> (bool, Network) {
        let n = self.len();
        if n == 0 {
            return (true, self);
        }
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for k in 0..n {
                        if k == i || k == j {
                            continue;
                        }
                        let through = compose_sets(self.edge(i, k), self.edge(k, j));
                        let cur = self.edge(i, j);
                        let new = cur.intersect(through);
                        if new != cur {
                            changed = true;
                            if !self.restrict(i, j, new) {
                                return (false, self);
                            }
                        }
                    }
                    if self.edge(i, j).is_empty() {
                        return (false, self);
                    }
                }
            }
        }
        (true, self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Rcc8Error {
    #[error("atom is not a topology constraint: {0}")]
    NotTopo(String),
    #[error("no witness found at the search resolution")]
    NoWitness,
}

/// Assemble a network from a conjunction of (possibly negated) topology
/// atoms. Ground atoms are checked directly.
fn build_network(atoms: &[Atom]) -> Result<Option<Network>, Rcc8Error> {
    let mut vars: Vec<EName> = Vec::new();
    let mut landmarks: Vec<Polygon> = Vec::new();
    let note_term = |t: &CTerm, vars: &mut Vec<EName>, landmarks: &mut Vec<Polygon>| match t {
        CTerm::Lit(e) => {
            if !vars.contains(e) {
                vars.push(e.clone());
            }
        }
        CTerm::Const(ConstValue::Poly(p)) => {
            if !landmarks.contains(p) {
                landmarks.push(p.clone());
            }
        }
        CTerm::Const(_) => {}
    };
    for atom in atoms {
        match atom {
            Atom::True => {}
            Atom::False => return Ok(None),
            Atom::Topo { l, r, .. } => {
                note_term(l, &mut vars, &mut landmarks);
                note_term(r, &mut vars, &mut landmarks);
            }
            other => return Err(Rcc8Error::NotTopo(other.to_string())),
        }
    }
    let mut labels: Vec<NodeLabel> = vars.into_iter().map(NodeLabel::Var).collect();
    labels.extend(landmarks.into_iter().map(NodeLabel::Landmark));
    let mut net = Network::new(labels);

    let index_of = |net: &Network, t: &CTerm| -> usize {
        net.labels
            .iter()
            .position(|l| match (l, t) {
                (NodeLabel::Var(v), CTerm::Lit(e)) => v == e,
                (NodeLabel::Landmark(p), CTerm::Const(ConstValue::Poly(q))) => p == q,
                _ => false,
            })
            .expect("term registered above")
    };

    for atom in atoms {
        if let Atom::Topo { rel, l, r, neg } = atom {
            let base = surface_to_base(*rel);
            let set = if *neg {
                RelSet::singleton(base).complement()
            } else {
                RelSet::singleton(base)
            };
            match (l, r) {
                (CTerm::Const(ConstValue::Poly(p)), CTerm::Const(ConstValue::Poly(q))) => {
                    if !set.contains(relation(p, q)) {
                        return Ok(None);
                    }
                }
                _ => {
                    let i = index_of(&net, l);
                    let j = index_of(&net, r);
                    if i == j {
                        // Self-loop: only EQ can hold.
                        if !set.contains(Eq) {
                            return Ok(None);
                        }
                    } else if !net.restrict(i, j, set) {
                        return Ok(None);
                    }
                }
            }
        }
    }
    Ok(Some(net))
}

/// Satisfiability of a conjunction of topology atoms over variables and
/// landmarks, via path consistency. Incomplete in general for landmark-rich
/// networks; sound for refutation, and exact when every variable is pinned
/// by an EQ edge to a landmark.
pub fn pcl_sat(atoms: &[Atom]) -> Result<bool, Rcc8Error> {
    match build_network(atoms)? {
        None => Ok(false),
        Some(net) => Ok(net.path_consistency().0),
    }
}

/// Witness search over axis-aligned rectangles on a coordinate grid derived
/// from the landmarks, refined once on failure. Returns `Ok(None)` when the
/// conjunction is unsatisfiable per path consistency, `Err(NoWitness)` when
/// satisfiable but no rectangle witness was found at the search resolution.
pub fn pcl_solve(atoms: &[Atom]) -> Result<Option<BTreeMap<EName, Polygon>>, Rcc8Error> {
    let net = match build_network(atoms)? {
        None => return Ok(None),
        Some(net) => net,
    };
    let (ok, _) = net.clone().path_consistency();
    if !ok {
        return Ok(None);
    }
    let vars: Vec<EName> = net
        .labels
        .iter()
        .filter_map(|l| match l {
            NodeLabel::Var(v) => Some(v.clone()),
            NodeLabel::Landmark(_) => None,
        })
        .collect();
    if vars.is_empty() {
        return Ok(Some(BTreeMap::new()));
    }
    let landmarks: Vec<Polygon> = net
        .labels
        .iter()
        .filter_map(|l| match l {
            NodeLabel::Landmark(p) => Some(p.clone()),
            NodeLabel::Var(_) => None,
        })
        .collect();

    for refinement in 0..2 {
        let candidates = candidate_regions(&landmarks, refinement);
        if let Some(w) = backtrack(&vars, &candidates, atoms) {
            return Ok(Some(w));
        }
    }
    Err(Rcc8Error::NoWitness)
}

/// Candidate rectangles: the landmarks themselves plus rectangles spanned by
/// a grid of distinguished coordinates (landmark bounding-box corners,
/// midpoints, and margins).
fn candidate_regions(landmarks: &[Polygon], refinement: usize) -> Vec<Polygon> {
    let mut xs: Vec<Rat> = Vec::new();
    let mut ys: Vec<Rat> = Vec::new();
    let push = |v: Rat, into: &mut Vec<Rat>| {
        if !into.contains(&v) {
            into.push(v);
        }
    };
    for lm in landmarks {
        let (x1, y1, x2, y2) = lm.bbox();
        let midx = (&x1 + &x2) / rat(2);
        let midy = (&y1 + &y2) / rat(2);
        for v in [x1.clone(), x2.clone(), midx.clone()] {
            push(v, &mut xs);
        }
        for v in [y1.clone(), y2.clone(), midy.clone()] {
            push(v, &mut ys);
        }
        if refinement > 0 {
            push((&x1 + &midx) / rat(2), &mut xs);
            push((&midx + &x2) / rat(2), &mut xs);
            push((&y1 + &midy) / rat(2), &mut ys);
            push((&midy + &y2) / rat(2), &mut ys);
        }
    }
    if xs.is_empty() {
        for k in 0..4 + 2 * refinement as i64 {
            push(rat(k), &mut xs);
            push(rat(k), &mut ys);
        }
    } else {
        xs.sort();
        ys.sort();
        let margin = Rat::one();
        push(&xs[0] - &margin, &mut xs);
        push(&xs[xs.len() - 1] + &margin, &mut xs);
        push(&ys[0] - &margin, &mut ys);
        push(&ys[ys.len() - 1] + &margin, &mut ys);
    }
    xs.sort();
    ys.sort();
    let mut out: Vec<Polygon> = landmarks.to_vec();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            for k in 0..ys.len() {
                for l in k + 1..ys.len() {
                    if let Ok(r) =
                        Polygon::rect(xs[i].clone(), ys[k].clone(), xs[j].clone(), ys[l].clone())
                    {
                        if !out.contains(&r) {
                            out.push(r);
                        }
                    }
                }
            }
        }
    }
    out
}

fn backtrack(
    vars: &[EName],
    candidates: &[Polygon],
    atoms: &[Atom],
) -> Option<BTreeMap<EName, Polygon>> {
    let mut assignment: BTreeMap<EName, Polygon> = BTreeMap::new();
    let mut budget: usize = 2_000_000;
    if assign(vars, 0, candidates, atoms, &mut assignment, &mut budget) {
        Some(assignment)
    } else {
        None
    }
}

fn assign(
    vars: &[EName],
    idx: usize,
    candidates: &[Polygon],
    atoms: &[Atom],
    assignment: &mut BTreeMap<EName, Polygon>,
    budget: &mut usize,
) -> bool {
    if idx == vars.len() {
        return atoms_hold(atoms, assignment, true);
    }
    for cand in candidates {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        assignment.insert(vars[idx].clone(), cand.clone());
        if atoms_hold(atoms, assignment, false)
            && assign(vars, idx + 1, candidates, atoms, assignment, budget)
        {
            return true;
        }
        assignment.remove(&vars[idx]);
    }
    false
}

/// Check the atoms against a (possibly partial) assignment; atoms with
/// unassigned variables pass unless `total` is set.
fn atoms_hold(atoms: &[Atom], assignment: &BTreeMap<EName, Polygon>, total: bool) -> bool {
    for atom in atoms {
        if let Atom::Topo { rel, l, r, neg } = atom {
            let lp = term_region(l, assignment);
            let rp = term_region(r, assignment);
            match (lp, rp) {
                (Some(p), Some(q)) => {
                    let holds = relation(&p, &q) == surface_to_base(*rel);
                    if holds == *neg {
                        return false;
                    }
                }
                _ if total => return false,
                _ => {}
            }
        }
    }
    true
}

fn term_region(t: &CTerm, assignment: &BTreeMap<EName, Polygon>) -> Option<Polygon> {
    match t {
        CTerm::Lit(e) => assignment.get(e).cloned(),
        CTerm::Const(ConstValue::Poly(p)) => Some(p.clone()),
        CTerm::Const(_) => None,
    }
}

/// Ground check used by valuation application and the oracle.
pub fn conjunction_sat(conj: &Conjunction) -> Result<bool, Rcc8Error> {
    pcl_sat(conj.atoms())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::CTerm;

    fn lit(s: &str) -> CTerm {
        CTerm::Lit(EName::new(s))
    }

    fn poly(x1: i64, y1: i64, x2: i64, y2: i64) -> CTerm {
        CTerm::Const(ConstValue::Poly(Polygon::rect_i(x1, y1, x2, y2).unwrap()))
    }

    fn topo(rel: TopoRel, l: CTerm, r: CTerm) -> Atom {
        Atom::Topo {
            rel,
            l,
            r,
            neg: false,
        }
    }

    #[test]
    fn relation_base_cases() {
        let small = Polygon::rect_i(1, 1, 2, 2).unwrap();
        let big = Polygon::rect_i(0, 0, 10, 10).unwrap();
        assert_eq!(relation(&small, &big), Ntpp);
        assert_eq!(relation(&big, &small), Ntppi);
        assert_eq!(relation(&small, &small), Eq);
        let a = Polygon::rect_i(2, 4, 6, 8).unwrap();
        let b = Polygon::rect_i(6, 8, 23, 19).unwrap();
        assert_eq!(relation(&a, &b), Ec);
    }

    #[test]
    fn converse_coherence_on_samples() {
        let regions = [
            Polygon::rect_i(0, 0, 2, 2).unwrap(),
            Polygon::rect_i(1, 1, 3, 3).unwrap(),
            Polygon::rect_i(0, 0, 4, 4).unwrap(),
            Polygon::rect_i(2, 2, 4, 4).unwrap(),
            Polygon::rect_i(5, 5, 6, 6).unwrap(),
        ];
        for p in &regions {
            for q in &regions {
                assert_eq!(relation(p, q).converse(), relation(q, p));
            }
        }
    }

    #[test]
    fn ntpp_chain_with_dc_is_inconsistent() {
        let atoms = vec![
            topo(TopoRel::Ntpp, lit("a"), lit("b")),
            topo(TopoRel::Ntpp, lit("b"), lit("c")),
            topo(TopoRel::Dc, lit("a"), lit("c")),
        ];
        assert_eq!(pcl_sat(&atoms).unwrap(), false);
    }

    #[test]
    fn ntpp_chain_refines_transitively() {
        let atoms = vec![
            topo(TopoRel::Ntpp, lit("a"), lit("b")),
            topo(TopoRel::Ntpp, lit("b"), lit("c")),
        ];
        let net = build_network(&atoms).unwrap().unwrap();
        let (ok, refined) = net.path_consistency();
        assert!(ok);
        assert_eq!(refined.edge(0, 2), RelSet::singleton(Ntpp));
    }

    #[test]
    fn self_tpp_is_unsatisfiable() {
        let atoms = vec![topo(TopoRel::Tpp, lit("x"), lit("x"))];
        assert_eq!(pcl_sat(&atoms).unwrap(), false);
    }

    #[test]
    fn conflicting_landmark_equalities() {
        let atoms = vec![
            topo(TopoRel::Eq, lit("R1"), poly(1, 1, 2, 2)),
            topo(TopoRel::Eq, lit("R1"), poly(6, 8, 23, 19)),
        ];
        assert_eq!(pcl_sat(&atoms).unwrap(), false);
    }

    #[test]
    fn example_global_is_satisfiable_with_witness() {
        let atoms = vec![topo(TopoRel::Ntpp, lit("R1"), poly(6, 8, 23, 19))];
        assert!(pcl_sat(&atoms).unwrap());
        let w = pcl_solve(&atoms).unwrap().unwrap();
        let target = Polygon::rect_i(6, 8, 23, 19).unwrap();
        assert_eq!(relation(&w[&EName::new("R1")], &target), Ntpp);
    }

    #[test]
    fn pinned_witness_uses_landmark() {
        let atoms = vec![
            topo(TopoRel::Eq, lit("R1"), poly(1, 1, 2, 2)),
            topo(TopoRel::Ntpp, lit("R1"), poly(0, 0, 10, 10)),
        ];
        let w = pcl_solve(&atoms).unwrap().unwrap();
        assert_eq!(w[&EName::new("R1")], Polygon::rect_i(1, 1, 2, 2).unwrap());
    }

    #[test]
    fn empty_network_consistent() {
        assert!(pcl_sat(&[]).unwrap());
    }
}
