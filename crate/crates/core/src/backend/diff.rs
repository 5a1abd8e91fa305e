//! Decision procedure for conjunctions of difference constraints
//! `x - y ~ c` over the integers or the rationals.
//!
//! Constraints become weighted edges of a graph; satisfiability is the
//! absence of a negative cycle. Over the integers, strict bounds are
//! tightened to `<= c - 1` up front. Over the rationals, strictness is
//! tracked exactly as a lexicographic second weight component, so dense-order
//! cases like `x - y < 1 && y - x < 0` (satisfiable) versus the same system
//! over the integers (unsatisfiable) come out right without epsilon hacks.

use crate::constraint::{Atom, CmpOp, ScalarVar};
use crate::geom::Rat;
use num::{BigInt, One, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumSort {
    Int,
    Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error("atom is not a difference constraint: {0}")]
    NotDifference(String),
    #[error("non-integer constant in an integer-sorted constraint: {0}")]
    NotInteger(String),
}

/// One normalized bound `u - v <= c` (or `< c` when strict). `None` stands
/// for the origin pseudo-variable fixed at zero.
#[derive(Debug, Clone)]
struct Bound {
    u: Option<ScalarVar>,
    v: Option<ScalarVar>,
    c: Rat,
    strict: bool,
}

/// Expand an atom into its normalized bounds.
fn bounds_of(atom: &Atom) -> Result<Vec<Bound>, DiffError> {
    let (lhs, rhs, op, bound) = match atom {
        Atom::Cmp {
            lhs,
            rhs,
            op,
            bound,
        } => (lhs.clone(), rhs.clone(), *op, bound.clone()),
        other => return Err(DiffError::NotDifference(other.to_string())),
    };
    // lhs - rhs OP bound
    let le = |u: Option<ScalarVar>, v: Option<ScalarVar>, c: Rat, strict: bool| Bound {
        u,
        v,
        c,
        strict,
    };
    Ok(match op {
        CmpOp::Le => vec![le(lhs, rhs, bound, false)],
        CmpOp::Lt => vec![le(lhs, rhs, bound, true)],
        CmpOp::Ge => vec![le(rhs, lhs, -bound, false)],
        CmpOp::Gt => vec![le(rhs, lhs, -bound, true)],
        CmpOp::Eq => vec![
            le(lhs.clone(), rhs.clone(), bound.clone(), false),
            le(rhs, lhs, -bound, false),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Dist {
    w: Rat,
    strict: usize,
}

impl Dist {
    fn zero() -> Dist {
        Dist {
            w: Rat::zero(),
            strict: 0,
        }
    }

    /// Tighter-than: smaller weight, or equal weight with more strict steps.
    fn tighter_than(&self, other: &Dist) -> bool {
        self.w < other.w || (self.w == other.w && self.strict > other.strict)
    }
}

struct Graph {
    nodes: Vec<ScalarVar>,
    // (from, to, weight, strict): to - from <= weight (< if strict)
    edges: Vec<(usize, usize, Rat, bool)>,
}

const ORIGIN: usize = 0;

fn build_graph(atoms: &[Atom], sort: NumSort) -> Result<Option<Graph>, DiffError> {
    let mut nodes: Vec<ScalarVar> = Vec::new();
    let index = |v: &ScalarVar, nodes: &mut Vec<ScalarVar>| -> usize {
        match nodes.iter().position(|n| n == v) {
            Some(i) => i + 1,
            None => {
                nodes.push(v.clone());
                nodes.len()
            }
        }
    };
    let mut edges: Vec<(usize, usize, Rat, bool)> = Vec::new();
    for atom in atoms {
        match atom {
            Atom::True => continue,
            Atom::False => return Ok(None),
            _ => {}
        }
        for b in bounds_of(atom)? {
            let (mut c, mut strict) = (b.c, b.strict);
            if sort == NumSort::Int {
                if !c.denom().is_one() {
                    // Tighten a fractional bound to the next representable
                    // integer bound; u - v <= 3/2 over Z means u - v <= 1.
                    c = c.floor();
                    strict = false;
                } else if strict {
                    c -= Rat::one();
                    strict = false;
                }
            }
            let u = b.u.as_ref().map(|v| index(v, &mut nodes)).unwrap_or(ORIGIN);
            let v = b.v.as_ref().map(|v| index(v, &mut nodes)).unwrap_or(ORIGIN);
            if u == v {
                // u - u <= c: unsatisfiable iff c < 0 or (c = 0 strict).
                if c < Rat::zero() || (c.is_zero() && strict) {
                    return Ok(None);
                }
                continue;
            }
            // u - v <= c is the edge v -> u with weight c.
            edges.push((v, u, c, strict));
        }
    }
    Ok(Some(Graph { nodes, edges }))
}

fn bellman_ford(g: &Graph) -> Option<Vec<Dist>> {
    let n = g.nodes.len() + 1;
    let mut dist: Vec<Dist> = vec![Dist::zero(); n];
    for round in 0..=n {
        let mut changed = false;
        for (from, to, w, strict) in &g.edges {
            let cand = Dist {
                w: &dist[*from].w + w,
                strict: dist[*from].strict + usize::from(*strict),
            };
            if cand.tighter_than(&dist[*to]) {
                dist[*to] = cand;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
        if round == n {
            return None; // still relaxing: negative cycle
        }
    }
    Some(dist)
}

pub fn diff_sat(atoms: &[Atom], sort: NumSort) -> Result<bool, DiffError> {
    match build_graph(atoms, sort)? {
        None => Ok(false),
        Some(g) => Ok(bellman_ford(&g).is_some()),
    }
}

/// A satisfying assignment for the variables of the conjunction, or `None`
/// if unsatisfiable. Integer-sorted solutions are integral.
pub fn diff_solve(atoms: &[Atom], sort: NumSort) -> Result<Option<BTreeMap<ScalarVar, Rat>>, DiffError> {
    let g = match build_graph(atoms, sort)? {
        None => return Ok(None),
        Some(g) => g,
    };
    let dist = match bellman_ford(&g) {
        None => return Ok(None),
        Some(d) => d,
    };
    // Choose epsilon small enough that subtracting strict-step counts keeps
    // every non-tight edge satisfied.
    let mut eps = Rat::zero();
    if sort == NumSort::Rat {
        let max_strict = dist.iter().map(|d| d.strict).max().unwrap_or(0);
        let mut min_gap: Option<Rat> = None;
        for (from, to, w, _) in &g.edges {
            let gap = &dist[*from].w + w - &dist[*to].w;
            if gap > Rat::zero() && min_gap.as_ref().map_or(true, |m| &gap < m) {
                min_gap = Some(gap);
            }
        }
        let denom = Rat::from_integer(BigInt::from(2 * (max_strict + 2) as i64));
        eps = match min_gap {
            Some(g) => g / denom,
            None => Rat::one() / denom,
        };
    }
    let origin_val = &dist[ORIGIN].w - &eps * Rat::from_integer(BigInt::from(dist[ORIGIN].strict as i64));
    let mut out = BTreeMap::new();
    for (i, v) in g.nodes.iter().enumerate() {
        let d = &dist[i + 1];
        let raw = &d.w - &eps * Rat::from_integer(BigInt::from(d.strict as i64));
        out.insert(v.clone(), raw - &origin_val);
    }
    Ok(Some(out))
}

/// Evaluate a conjunction under a total numeric assignment.
pub fn eval_ground(atoms: &[Atom], values: &BTreeMap<ScalarVar, Rat>) -> Result<bool, DiffError> {
    for atom in atoms {
        match atom {
            Atom::True => continue,
            Atom::False => return Ok(false),
            Atom::Cmp {
                lhs,
                rhs,
                op,
                bound,
            } => {
                let side = |s: &Option<ScalarVar>| -> Rat {
                    s.as_ref()
                        .and_then(|v| values.get(v).cloned())
                        .unwrap_or_else(Rat::zero)
                };
                let val = side(lhs) - side(rhs);
                if !op.eval(&val, bound) {
                    return Ok(false);
                }
            }
            other => return Err(DiffError::NotDifference(other.to_string())),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_frac};
    use crate::term::EName;

    fn x() -> ScalarVar {
        ScalarVar::Point(EName::new("x"))
    }

    fn y() -> ScalarVar {
        ScalarVar::Point(EName::new("y"))
    }

    fn cmp(lhs: Option<ScalarVar>, rhs: Option<ScalarVar>, op: CmpOp, bound: Rat) -> Atom {
        Atom::Cmp {
            lhs,
            rhs,
            op,
            bound,
        }
    }

    #[test]
    fn negative_cycle_detected() {
        let atoms = vec![
            cmp(Some(x()), Some(y()), CmpOp::Le, rat(-1)),
            cmp(Some(y()), Some(x()), CmpOp::Le, rat(-1)),
        ];
        assert!(!diff_sat(&atoms, NumSort::Rat).unwrap());
        assert!(!diff_sat(&atoms, NumSort::Int).unwrap());
    }

    #[test]
    fn strict_cycle_rational_vs_integer() {
        // x - y < 1 && y - x < 0
        let atoms = vec![
            cmp(Some(x()), Some(y()), CmpOp::Lt, rat(1)),
            cmp(Some(y()), Some(x()), CmpOp::Lt, rat(0)),
        ];
        assert!(diff_sat(&atoms, NumSort::Rat).unwrap());
        assert!(!diff_sat(&atoms, NumSort::Int).unwrap());
        let w = diff_solve(&atoms, NumSort::Rat).unwrap().unwrap();
        assert!(eval_ground(&atoms, &w).unwrap());
    }

    #[test]
    fn pinched_equality_witness() {
        // x <= 3 && 3 <= x
        let atoms = vec![
            cmp(Some(x()), None, CmpOp::Le, rat(3)),
            cmp(Some(x()), None, CmpOp::Ge, rat(3)),
        ];
        let w = diff_solve(&atoms, NumSort::Rat).unwrap().unwrap();
        assert_eq!(w[&x()], rat(3));
    }

    #[test]
    fn integer_pinch_without_syntactic_constant() {
        // 0 < x < 2 forces x = 1 over the integers.
        let atoms = vec![
            cmp(Some(x()), None, CmpOp::Gt, rat(0)),
            cmp(Some(x()), None, CmpOp::Lt, rat(2)),
        ];
        let w = diff_solve(&atoms, NumSort::Int).unwrap().unwrap();
        assert_eq!(w[&x()], rat(1));
        assert!(eval_ground(&atoms, &w).unwrap());
    }

    #[test]
    fn strictness_epsilon_respects_all_edges() {
        let atoms = vec![
            cmp(Some(x()), Some(y()), CmpOp::Lt, rat_frac(1, 2)),
            cmp(Some(y()), None, CmpOp::Lt, rat(2)),
            cmp(Some(y()), None, CmpOp::Gt, rat(1)),
            cmp(Some(x()), None, CmpOp::Ge, rat(1)),
        ];
        let w = diff_solve(&atoms, NumSort::Rat).unwrap().unwrap();
        assert!(eval_ground(&atoms, &w).unwrap());
    }

    #[test]
    fn unbounded_system_gets_default_zeroes() {
        let atoms = vec![cmp(Some(x()), Some(y()), CmpOp::Le, rat(5))];
        let w = diff_solve(&atoms, NumSort::Rat).unwrap().unwrap();
        assert!(eval_ground(&atoms, &w).unwrap());
    }
}
