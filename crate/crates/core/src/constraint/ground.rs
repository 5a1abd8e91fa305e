//! Ground evaluation of constraint formulas under a total valuation of
//! their e-literals. Used when applying valuations to databases and by the
//! possible-worlds oracle.

use super::solve::Valuation;
use super::{Atom, BoolExpr, CTerm, Condition, Expr, ScalarVar};
use crate::backend::rcc8;
use crate::geom::Rat;
use crate::term::{ConstValue, EName};
use num::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundEvalError {
    #[error("valuation does not cover e-literal {0}")]
    Uncovered(EName),
    #[error("sort mismatch when evaluating ground atom: {0}")]
    SortMismatch(String),
}

fn lookup<'a>(v: &'a Valuation, e: &EName) -> Result<&'a ConstValue, GroundEvalError> {
    v.get(e).ok_or_else(|| GroundEvalError::Uncovered(e.clone()))
}

fn term_value(t: &CTerm, v: &Valuation) -> Result<ConstValue, GroundEvalError> {
    match t {
        CTerm::Const(c) => Ok(c.clone()),
        CTerm::Lit(e) => lookup(v, e).cloned(),
    }
}

fn scalar_value(s: &ScalarVar, v: &Valuation) -> Result<Rat, GroundEvalError> {
    match s {
        ScalarVar::Point(e) => lookup(v, e)?
            .as_rat()
            .ok_or_else(|| GroundEvalError::SortMismatch(s.to_string())),
        ScalarVar::Coord(e, corner) => match lookup(v, e)? {
            ConstValue::Box(b) => Ok(b.coord(*corner).clone()),
            other => Err(GroundEvalError::SortMismatch(format!(
                "{} bound to {}",
                s, other
            ))),
        },
    }
}

pub fn eval_atom_ground(atom: &Atom, v: &Valuation) -> Result<bool, GroundEvalError> {
    match atom {
        Atom::True => Ok(true),
        Atom::False => Ok(false),
        Atom::Eq { l, r, neg } => {
            let lv = term_value(l, v)?;
            let rv = term_value(r, v)?;
            Ok((lv == rv) != *neg)
        }
        Atom::Topo { rel, l, r, neg } => {
            let lv = term_value(l, v)?;
            let rv = term_value(r, v)?;
            match (lv, rv) {
                (ConstValue::Poly(p), ConstValue::Poly(q)) => {
                    Ok(rcc8::surface_holds(*rel, &p, &q) != *neg)
                }
                (a, b) => Err(GroundEvalError::SortMismatch(format!("{} vs {}", a, b))),
            }
        }
        Atom::Cmp {
            lhs,
            rhs,
            op,
            bound,
        } => {
            let side = |s: &Option<ScalarVar>| -> Result<Rat, GroundEvalError> {
                match s {
                    Some(sv) => scalar_value(sv, v),
                    None => Ok(Rat::zero()),
                }
            };
            let val = side(lhs)? - side(rhs)?;
            Ok(op.eval(&val, bound))
        }
    }
}

pub fn eval_expr_ground(expr: &BoolExpr, v: &Valuation) -> Result<bool, GroundEvalError> {
    match expr {
        Expr::Atom(a) => eval_atom_ground(a, v),
        Expr::And(es) => {
            for e in es {
                if !eval_expr_ground(e, v)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Expr::Or(es) => {
            for e in es {
                if eval_expr_ground(e, v)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Expr::Not(e) => Ok(!eval_expr_ground(e, v)?),
    }
}

/// Whether a (possibly disjunctive) condition holds under the valuation.
pub fn holds_ground(cond: &Condition, v: &Valuation) -> Result<bool, GroundEvalError> {
    for d in cond.disjuncts() {
        let mut all = true;
        for a in d.atoms() {
            if !eval_atom_ground(a, v)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}
