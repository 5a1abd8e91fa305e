//! Per-language decision procedures for conjunctions of (possibly negated)
//! atoms, behind one dispatch surface.

pub mod diff;
pub mod ecl;
pub mod rcc8;
pub mod rcl;

use crate::constraint::{Conjunction, ScalarVar};
use crate::geom::Rat;
use crate::term::{ConstValue, EName, Lang};
use diff::NumSort;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    #[error("constraint atom does not belong to language {lang}: {atom}")]
    LanguageMismatch { lang: Lang, atom: String },
    #[error("no witness found at the search resolution")]
    NoWitness,
}

fn mismatch(lang: Lang, msg: impl ToString) -> BackendError {
    BackendError::LanguageMismatch {
        lang,
        atom: msg.to_string(),
    }
}

/// Satisfiability of one conjunction under the language's intended
/// structure.
pub fn sat_conjunction(conj: &Conjunction, lang: Lang) -> Result<bool, BackendError> {
    if conj.is_false() {
        return Ok(false);
    }
    let atoms = conj.atoms();
    match lang {
        Lang::Ecl => ecl::ecl_sat(atoms).map_err(|e| mismatch(lang, e)),
        Lang::DiPcl => diff::diff_sat(atoms, NumSort::Int).map_err(|e| mismatch(lang, e)),
        Lang::DePcl => diff::diff_sat(atoms, NumSort::Rat).map_err(|e| mismatch(lang, e)),
        Lang::Rcl => rcl::rcl_sat(atoms).map_err(|e| mismatch(lang, e)),
        Lang::Pcl | Lang::Tcl => rcc8::pcl_sat(atoms).map_err(|e| mismatch(lang, e)),
    }
}

/// A satisfying assignment for the conjunction's own e-literals, or `None`
/// if unsatisfiable.
pub fn solve_conjunction(
    conj: &Conjunction,
    lang: Lang,
) -> Result<Option<BTreeMap<EName, ConstValue>>, BackendError> {
    if conj.is_false() {
        return Ok(None);
    }
    let atoms = conj.atoms();
    match lang {
        Lang::Ecl => {
            let w = ecl::ecl_solve(atoms).map_err(|e| mismatch(lang, e))?;
            Ok(w.map(|m| {
                m.into_iter()
                    .map(|(k, v)| (k, ConstValue::Str(v)))
                    .collect()
            }))
        }
        Lang::DiPcl | Lang::DePcl => {
            let sort = if lang == Lang::DiPcl {
                NumSort::Int
            } else {
                NumSort::Rat
            };
            let w = diff::diff_solve(atoms, sort).map_err(|e| mismatch(lang, e))?;
            Ok(w.map(|m| {
                m.into_iter()
                    .map(|(k, v)| (point_name(k), to_number(v, sort)))
                    .collect()
            }))
        }
        Lang::Rcl => {
            let w = rcl::rcl_solve(atoms).map_err(|e| mismatch(lang, e))?;
            Ok(w.map(|m| {
                m.into_iter()
                    .map(|(k, v)| (k, ConstValue::Box(v)))
                    .collect()
            }))
        }
        Lang::Pcl | Lang::Tcl => match rcc8::pcl_solve(atoms) {
            Ok(w) => Ok(w.map(|m| {
                m.into_iter()
                    .map(|(k, v)| (k, ConstValue::Poly(v)))
                    .collect()
            })),
            Err(rcc8::Rcc8Error::NoWitness) => Err(BackendError::NoWitness),
            Err(e) => Err(mismatch(lang, e)),
        },
    }
}

fn point_name(v: ScalarVar) -> EName {
    match v {
        ScalarVar::Point(e) => e,
        ScalarVar::Coord(e, _) => e,
    }
}

fn to_number(v: Rat, sort: NumSort) -> ConstValue {
    match sort {
        NumSort::Int => ConstValue::Int(v.to_integer()),
        NumSort::Rat => ConstValue::Rat(v),
    }
}

/// The default constant used to extend a partial witness to unconstrained
/// e-literals.
pub fn default_constant(lang: Lang, taken: &mut usize) -> ConstValue {
    match lang {
        Lang::Ecl => {
            let v = ConstValue::Str(format!("fresh:default:{}", taken));
            *taken += 1;
            v
        }
        Lang::DiPcl => ConstValue::Int(0.into()),
        Lang::DePcl => ConstValue::Rat(Rat::from_integer(0.into())),
        Lang::Rcl => ConstValue::Box(
            crate::geom::BoxC::new(
                crate::geom::rat(0),
                crate::geom::rat(0),
                crate::geom::rat(1),
                crate::geom::rat(1),
            )
            .expect("unit box"),
        ),
        Lang::Pcl | Lang::Tcl => ConstValue::Poly(
            crate::geom::Polygon::rect_i(0, 0, 1, 1).expect("unit square"),
        ),
    }
}
