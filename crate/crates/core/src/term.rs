//! Terms of the data model: IRIs, blank nodes, plain literals, constraint
//! constants, and existential literals (e-literals).

use crate::geom::{format_rat, BoxC, Polygon, Rat};
use num::BigInt;
use std::fmt;

/// Identifier of an e-literal, stored without any sigil. Rendered with a
/// leading underscore (`_R1`) in paper-style output and as `_e:R1` in the
/// textual formats.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EName(pub String);

impl EName {
    pub fn new(s: impl Into<String>) -> Self {
        EName(s.into())
    }
}

impl fmt::Display for EName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_e:{}", self.0)
    }
}

/// The constraint languages supported by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lang {
    /// Equality/disequality over an infinite domain of symbolic constants.
    Ecl,
    /// Difference constraints over the integers.
    DiPcl,
    /// Difference constraints over the rationals.
    DePcl,
    /// Coordinate difference constraints over axis-aligned boxes.
    Rcl,
    /// RCC-8 topology over regions, with polygon landmarks.
    Pcl,
    /// RCC-8 topology over regions, variables only (no landmarks).
    Tcl,
}

impl Lang {
    pub fn id(self) -> &'static str {
        match self {
            Lang::Ecl => "ecl",
            Lang::DiPcl => "dipcl",
            Lang::DePcl => "depcl",
            Lang::Rcl => "rcl",
            Lang::Pcl => "pcl",
            Lang::Tcl => "tcl",
        }
    }

    pub fn from_id(s: &str) -> Option<Lang> {
        match s {
            "ecl" => Some(Lang::Ecl),
            "dipcl" => Some(Lang::DiPcl),
            "depcl" => Some(Lang::DePcl),
            "rcl" => Some(Lang::Rcl),
            "pcl" => Some(Lang::Pcl),
            "tcl" => Some(Lang::Tcl),
            _ => None,
        }
    }

    /// The datatype of this language's constraint constants and e-literals.
    pub fn datatype(self) -> Datatype {
        match self {
            Lang::Ecl => Datatype::Symbol,
            Lang::DiPcl => Datatype::Integer,
            Lang::DePcl => Datatype::Rational,
            Lang::Rcl => Datatype::BoxRect,
            Lang::Pcl | Lang::Tcl => Datatype::Region,
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Datatypes for which e-literals exist; one per constraint language sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    Symbol,
    Integer,
    Rational,
    BoxRect,
    Region,
}

/// A constant of a constraint language; the value spaces of the different
/// languages are kept disjoint by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstValue {
    Str(String),
    Int(BigInt),
    Rat(Rat),
    Box(BoxC),
    Poly(Polygon),
}

impl ConstValue {
    pub fn datatype(&self) -> Datatype {
        match self {
            ConstValue::Str(_) => Datatype::Symbol,
            ConstValue::Int(_) => Datatype::Integer,
            ConstValue::Rat(_) => Datatype::Rational,
            ConstValue::Box(_) => Datatype::BoxRect,
            ConstValue::Poly(_) => Datatype::Region,
        }
    }

    pub fn as_rat(&self) -> Option<Rat> {
        match self {
            ConstValue::Int(i) => Some(Rat::from_integer(i.clone())),
            ConstValue::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for ConstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstValue::Str(s) => write!(f, "@{:?}", s),
            ConstValue::Int(i) => write!(f, "{}", i),
            ConstValue::Rat(r) => write!(f, "{}", format_rat(r)),
            ConstValue::Box(b) => write!(f, "{}", b),
            ConstValue::Poly(p) => write!(f, "\"{}\"", p),
        }
    }
}

/// A term of the data model; the five variants partition the term space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal {
        lexical: String,
        datatype: Option<String>,
    },
    CLit(ConstValue),
    ELit(EName),
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Term {
        Term::Iri(s.into())
    }

    pub fn blank(s: impl Into<String>) -> Term {
        Term::Blank(s.into())
    }

    pub fn elit(s: impl Into<String>) -> Term {
        Term::ELit(EName::new(s))
    }

    pub fn poly(p: Polygon) -> Term {
        Term::CLit(ConstValue::Poly(p))
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_elit(&self) -> bool {
        matches!(self, Term::ELit(_))
    }

    pub fn is_clit(&self) -> bool {
        matches!(self, Term::CLit(_))
    }

    /// IRI, blank node, or plain literal: the value range of normal query
    /// variables.
    pub fn is_rdf_term(&self) -> bool {
        matches!(self, Term::Iri(_) | Term::Blank(_) | Term::Literal { .. })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(s) => write!(f, "<{}>", s),
            Term::Blank(s) => write!(f, "_:{}", s),
            Term::Literal { lexical, datatype } => match datatype {
                Some(dt) => write!(f, "{:?}^^<{}>", lexical, dt),
                None => write!(f, "{:?}", lexical),
            },
            Term::CLit(c) => write!(f, "{}", c),
            Term::ELit(e) => write!(f, "{}", e),
        }
    }
}

/// A triple of the extended data model; e-literals may appear in the object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ETriple {
    pub s: Term,
    pub p: Term,
    pub o: Term,
}

impl ETriple {
    pub fn new(s: Term, p: Term, o: Term) -> ETriple {
        ETriple { s, p, o }
    }

    pub fn is_ground(&self) -> bool {
        !self.o.is_elit()
    }
}

impl fmt::Display for ETriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.s, self.p, self.o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_variants_are_disjoint() {
        let same_text = [
            Term::Iri("a".into()),
            Term::Blank("a".into()),
            Term::Literal {
                lexical: "a".into(),
                datatype: None,
            },
            Term::CLit(ConstValue::Str("a".into())),
            Term::elit("a"),
        ];
        for (i, x) in same_text.iter().enumerate() {
            for (j, y) in same_text.iter().enumerate() {
                assert_eq!(x == y, i == j);
            }
        }
    }

    #[test]
    fn blank_labels_are_significant() {
        assert_ne!(Term::blank("a"), Term::blank("b"));
    }
}
