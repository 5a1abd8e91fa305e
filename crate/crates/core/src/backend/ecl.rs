//! Equality/disequality solver over an infinite domain of symbolic
//! constants: union-find over the EQ atoms, then disequality and
//! constant-clash checks.

use crate::constraint::{Atom, CTerm};
use crate::term::{ConstValue, EName};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EclError {
    #[error("atom is not an equality constraint: {0}")]
    NotEquality(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Var(EName),
    Const(String),
}

struct UnionFind {
    nodes: Vec<Node>,
    parent: Vec<usize>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind {
            nodes: Vec::new(),
            parent: Vec::new(),
        }
    }

    fn index(&mut self, n: Node) -> usize {
        if let Some(i) = self.nodes.iter().position(|m| *m == n) {
            return i;
        }
        self.nodes.push(n);
        self.parent.push(self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn root(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.root(a);
        let rb = self.root(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn node_of(t: &CTerm) -> Result<Node, EclError> {
    match t {
        CTerm::Lit(e) => Ok(Node::Var(e.clone())),
        CTerm::Const(ConstValue::Str(s)) => Ok(Node::Const(s.clone())),
        CTerm::Const(other) => Err(EclError::NotEquality(other.to_string())),
    }
}

fn solve_classes(atoms: &[Atom]) -> Result<Option<(UnionFind, Vec<(usize, usize)>)>, EclError> {
    let mut uf = UnionFind::new();
    let mut neqs: Vec<(usize, usize)> = Vec::new();
    for atom in atoms {
        match atom {
            Atom::True => {}
            Atom::False => return Ok(None),
            Atom::Eq { l, r, neg } => {
                let a = uf.index(node_of(l)?);
                let b = uf.index(node_of(r)?);
                if *neg {
                    neqs.push((a, b));
                } else {
                    uf.union(a, b);
                }
            }
            other => return Err(EclError::NotEquality(other.to_string())),
        }
    }
    // Distinct constants interpret as themselves, so two of them in one
    // class are a clash.
    let count = uf.nodes.len();
    let mut class_const: BTreeMap<usize, String> = BTreeMap::new();
    for i in 0..count {
        if let Node::Const(s) = uf.nodes[i].clone() {
            let r = uf.root(i);
            match class_const.get(&r) {
                Some(existing) if existing != &s => return Ok(None),
                _ => {
                    class_const.insert(r, s);
                }
            }
        }
    }
    for &(a, b) in &neqs {
        if uf.root(a) == uf.root(b) {
            return Ok(None);
        }
    }
    Ok(Some((uf, neqs)))
}

pub fn ecl_sat(atoms: &[Atom]) -> Result<bool, EclError> {
    Ok(solve_classes(atoms)?.is_some())
}

/// A satisfying assignment: each class takes its constant if it has one and
/// a fresh symbol otherwise. Fresh symbols are pairwise distinct and avoid
/// every constant occurring in the conjunction, which suffices over an
/// infinite domain.
pub fn ecl_solve(atoms: &[Atom]) -> Result<Option<BTreeMap<EName, String>>, EclError> {
    let (mut uf, _) = match solve_classes(atoms)? {
        None => return Ok(None),
        Some(x) => x,
    };
    let count = uf.nodes.len();
    let mut class_const: BTreeMap<usize, String> = BTreeMap::new();
    let mut used: Vec<String> = Vec::new();
    for i in 0..count {
        if let Node::Const(s) = uf.nodes[i].clone() {
            let r = uf.root(i);
            used.push(s.clone());
            class_const.insert(r, s);
        }
    }
    let mut fresh_counter = 0usize;
    let mut fresh = |used: &mut Vec<String>| -> String {
        loop {
            let cand = format!("fresh:{}", fresh_counter);
            fresh_counter += 1;
            if !used.contains(&cand) {
                used.push(cand.clone());
                return cand;
            }
        }
    };
    let mut out = BTreeMap::new();
    let mut class_value: BTreeMap<usize, String> = BTreeMap::new();
    for i in 0..count {
        if let Node::Var(v) = uf.nodes[i].clone() {
            let r = uf.root(i);
            let value = match class_const.get(&r) {
                Some(c) => c.clone(),
                None => class_value
                    .entry(r)
                    .or_insert_with(|| fresh(&mut used))
                    .clone(),
            };
            out.insert(v, value);
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> CTerm {
        CTerm::Lit(EName::new(s))
    }

    fn con(s: &str) -> CTerm {
        CTerm::Const(ConstValue::Str(s.into()))
    }

    fn eq(l: CTerm, r: CTerm) -> Atom {
        Atom::Eq { l, r, neg: false }
    }

    fn neq(l: CTerm, r: CTerm) -> Atom {
        Atom::Eq { l, r, neg: true }
    }

    #[test]
    fn chain_clash_through_constant() {
        let atoms = vec![
            eq(lit("x"), lit("y")),
            eq(lit("y"), con("c1")),
            neq(lit("x"), con("c1")),
        ];
        assert!(!ecl_sat(&atoms).unwrap());
    }

    #[test]
    fn disequality_over_infinite_domain() {
        let atoms = vec![eq(lit("x"), lit("y")), neq(lit("x"), lit("z"))];
        assert!(ecl_sat(&atoms).unwrap());
        let w = ecl_solve(&atoms).unwrap().unwrap();
        assert_eq!(w[&EName::new("x")], w[&EName::new("y")]);
        assert_ne!(w[&EName::new("x")], w[&EName::new("z")]);
    }

    #[test]
    fn two_distinct_constants_clash() {
        let atoms = vec![eq(lit("x"), con("c1")), eq(lit("x"), con("c2"))];
        assert!(!ecl_sat(&atoms).unwrap());
    }

    #[test]
    fn fresh_values_avoid_constants() {
        let atoms = vec![neq(lit("x"), con("fresh:0"))];
        let w = ecl_solve(&atoms).unwrap().unwrap();
        assert_ne!(w[&EName::new("x")], "fresh:0");
    }
}
