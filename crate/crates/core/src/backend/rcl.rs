//! Rectangle constraint language: coordinate difference constraints over
//! boxes, lowered to plain difference constraints over the rationals.

use crate::backend::diff::{self, DiffError, NumSort};
use crate::constraint::{Atom, CTerm, CmpOp, Corner, ScalarVar};
use crate::geom::{BoxC, Rat};
use crate::term::{ConstValue, EName};
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RclError {
    #[error("atom is not a rectangle constraint: {0}")]
    NotRectangle(String),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

fn coord_var(e: &EName, c: Corner) -> ScalarVar {
    ScalarVar::Coord(e.clone(), c)
}

fn cmp(lhs: Option<ScalarVar>, rhs: Option<ScalarVar>, op: CmpOp, bound: Rat) -> Atom {
    Atom::Cmp {
        lhs,
        rhs,
        op,
        bound,
    }
}

/// Lower a conjunction of rectangle constraints to difference constraints
/// over the four coordinates of each box. Every mentioned or declared box
/// gets the implicit well-formedness bounds `LLx - URx < 0`, `LLy - URy < 0`;
/// box equalities split into four coordinate equalities (which the
/// difference layer further splits into paired bounds).
pub fn rcl_lower(atoms: &[Atom], declared: &BTreeSet<EName>) -> Result<Vec<Atom>, RclError> {
    let mut boxes: BTreeSet<EName> = declared.clone();
    let mut lowered: Vec<Atom> = Vec::new();
    for atom in atoms {
        match atom {
            Atom::True | Atom::False => lowered.push(atom.clone()),
            Atom::Cmp { lhs, rhs, .. } => {
                for side in [lhs, rhs].into_iter().flatten() {
                    match side {
                        ScalarVar::Coord(e, _) => {
                            boxes.insert(e.clone());
                        }
                        ScalarVar::Point(_) => {
                            return Err(RclError::NotRectangle(atom.to_string()))
                        }
                    }
                }
                lowered.push(atom.clone());
            }
            Atom::Eq { l, r, neg } => {
                if *neg {
                    return Err(RclError::NotRectangle(atom.to_string()));
                }
                match (l, r) {
                    (CTerm::Lit(a), CTerm::Lit(b)) => {
                        boxes.insert(a.clone());
                        boxes.insert(b.clone());
                        for c in Corner::ALL {
                            lowered.push(cmp(
                                Some(coord_var(a, c)),
                                Some(coord_var(b, c)),
                                CmpOp::Eq,
                                Rat::zero(),
                            ));
                        }
                    }
                    (CTerm::Lit(a), CTerm::Const(ConstValue::Box(bx)))
                    | (CTerm::Const(ConstValue::Box(bx)), CTerm::Lit(a)) => {
                        boxes.insert(a.clone());
                        for c in Corner::ALL {
                            lowered.push(cmp(
                                Some(coord_var(a, c)),
                                None,
                                CmpOp::Eq,
                                bx.coord(c).clone(),
                            ));
                        }
                    }
                    (CTerm::Const(ConstValue::Box(b1)), CTerm::Const(ConstValue::Box(b2))) => {
                        lowered.push(if b1 == b2 { Atom::True } else { Atom::False });
                    }
                    _ => return Err(RclError::NotRectangle(atom.to_string())),
                }
            }
            other => return Err(RclError::NotRectangle(other.to_string())),
        }
    }
    // Split equalities into two bounds at this level so callers see the
    // advertised shape.
    let mut out: Vec<Atom> = Vec::new();
    for a in lowered {
        match a {
            Atom::Cmp {
                lhs,
                rhs,
                op: CmpOp::Eq,
                bound,
            } => {
                out.push(cmp(lhs.clone(), rhs.clone(), CmpOp::Le, bound.clone()));
                out.push(cmp(lhs, rhs, CmpOp::Ge, bound));
            }
            other => out.push(other),
        }
    }
    for b in &boxes {
        out.push(cmp(
            Some(coord_var(b, Corner::Llx)),
            Some(coord_var(b, Corner::Urx)),
            CmpOp::Lt,
            Rat::zero(),
        ));
        out.push(cmp(
            Some(coord_var(b, Corner::Lly)),
            Some(coord_var(b, Corner::Ury)),
            CmpOp::Lt,
            Rat::zero(),
        ));
    }
    Ok(out)
}

pub fn rcl_sat(atoms: &[Atom]) -> Result<bool, RclError> {
    let lowered = rcl_lower(atoms, &BTreeSet::new())?;
    Ok(diff::diff_sat(&lowered, NumSort::Rat)?)
}

pub fn rcl_solve(atoms: &[Atom]) -> Result<Option<BTreeMap<EName, BoxC>>, RclError> {
    let lowered = rcl_lower(atoms, &BTreeSet::new())?;
    let scalars = match diff::diff_solve(&lowered, NumSort::Rat)? {
        None => return Ok(None),
        Some(s) => s,
    };
    let mut boxes: BTreeSet<EName> = BTreeSet::new();
    for v in scalars.keys() {
        if let ScalarVar::Coord(e, _) = v {
            boxes.insert(e.clone());
        }
    }
    let mut out = BTreeMap::new();
    for b in boxes {
        let get = |c: Corner| scalars[&coord_var(&b, c)].clone();
        let bx = BoxC::new(get(Corner::Llx), get(Corner::Lly), get(Corner::Urx), get(Corner::Ury))
            .expect("well-formedness bounds enforce a proper box");
        out.insert(b, bx);
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_frac};

    fn r(name: &str) -> EName {
        EName::new(name)
    }

    #[test]
    fn lowering_adds_well_formedness() {
        let atoms = vec![cmp(
            Some(coord_var(&r("r2"), Corner::Llx)),
            Some(coord_var(&r("r1"), Corner::Llx)),
            CmpOp::Lt,
            rat(0),
        )];
        let lowered = rcl_lower(&atoms, &BTreeSet::new()).unwrap();
        // original atom + 2 well-formedness atoms per box
        assert_eq!(lowered.len(), 1 + 4);
    }

    #[test]
    fn equality_splits_into_two_bounds() {
        let atoms = vec![cmp(
            Some(coord_var(&r("r1"), Corner::Ury)),
            Some(coord_var(&r("r2"), Corner::Lly)),
            CmpOp::Eq,
            rat_frac(5, 2),
        )];
        let lowered = rcl_lower(&atoms, &BTreeSet::new()).unwrap();
        assert_eq!(lowered.len(), 2 + 4);
    }

    #[test]
    fn empty_conjunction_lowers_to_well_formedness_only() {
        let declared: BTreeSet<EName> = [r("b")].into_iter().collect();
        let lowered = rcl_lower(&[], &declared).unwrap();
        assert_eq!(lowered.len(), 2);
        assert!(diff::diff_sat(&lowered, NumSort::Rat).unwrap());
    }

    #[test]
    fn box_equality_to_constant_pins_witness() {
        let bx = BoxC::new(rat(0), rat(0), rat(2), rat(3)).unwrap();
        let atoms = vec![Atom::Eq {
            l: CTerm::Lit(r("b")),
            r: CTerm::Const(ConstValue::Box(bx.clone())),
            neg: false,
        }];
        let w = rcl_solve(&atoms).unwrap().unwrap();
        assert_eq!(w[&r("b")], bx);
    }

    #[test]
    fn inverted_box_is_unsatisfiable() {
        // URx - LLx <= -1 contradicts well-formedness.
        let atoms = vec![cmp(
            Some(coord_var(&r("b"), Corner::Urx)),
            Some(coord_var(&r("b"), Corner::Llx)),
            CmpOp::Le,
            rat(-1),
        )];
        assert!(!rcl_sat(&atoms).unwrap());
    }
}
