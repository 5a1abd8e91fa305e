//! Conditional graphs and databases: a set of conditional triples together
//! with a global constraint over the e-literals.

use crate::constraint::{Atom, BoolExpr, Condition};
use crate::term::{Datatype, EName, ETriple, Lang, Term};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("ill-formed triple: {0}")]
    IllFormedTriple(String),
    #[error("constraint atom does not belong to language {lang}: {atom}")]
    LanguageMismatch { lang: Lang, atom: String },
    #[error("term datatype {found:?} does not match the {lang} sort {expected:?}")]
    UnknownDatatype {
        lang: Lang,
        expected: Datatype,
        found: Datatype,
    },
}

/// A triple paired with the condition under which it holds. Conditions are
/// conjunctions as built; normalization introduces disjunctions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConditionalTriple {
    pub triple: ETriple,
    pub condition: Condition,
}

impl ConditionalTriple {
    pub fn new(triple: ETriple, condition: Condition) -> ConditionalTriple {
        ConditionalTriple { triple, condition }
    }

    pub fn unconditional(triple: ETriple) -> ConditionalTriple {
        ConditionalTriple {
            triple,
            condition: Condition::truth(),
        }
    }
}

impl fmt::Display for ConditionalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.condition.is_true() {
            write!(f, "{} .", self.triple)
        } else {
            write!(f, "{} {{{}}} .", self.triple, self.condition)
        }
    }
}

/// A database: a conditional graph plus a global constraint, all constraint
/// atoms drawn from one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    pub graph: Vec<ConditionalTriple>,
    pub global: BoolExpr,
    pub lang: Lang,
}

/// Validating constructor: checks triple positions, constraint-language
/// membership, and datatype agreement, and deduplicates identical
/// conditional triples.
pub fn mk_database(
    triples: Vec<ConditionalTriple>,
    global: BoolExpr,
    lang: Lang,
) -> Result<Database, ModelError> {
    let mut graph: Vec<ConditionalTriple> = Vec::new();
    for ct in triples {
        validate_triple(&ct.triple, lang)?;
        for disjunct in ct.condition.disjuncts() {
            for atom in disjunct.atoms() {
                check_atom(atom, lang)?;
            }
        }
        if !graph.contains(&ct) {
            graph.push(ct);
        }
    }
    for atom in global.atoms() {
        check_atom(atom, lang)?;
    }
    Ok(Database {
        graph,
        global,
        lang,
    })
}

fn validate_triple(t: &ETriple, lang: Lang) -> Result<(), ModelError> {
    if !matches!(t.s, Term::Iri(_) | Term::Blank(_)) {
        return Err(ModelError::IllFormedTriple(format!(
            "subject must be an IRI or blank node: {}",
            t
        )));
    }
    if !matches!(t.p, Term::Iri(_)) {
        return Err(ModelError::IllFormedTriple(format!(
            "predicate must be an IRI: {}",
            t
        )));
    }
    if let Term::CLit(c) = &t.o {
        let expected = lang.datatype();
        if c.datatype() != expected {
            return Err(ModelError::UnknownDatatype {
                lang,
                expected,
                found: c.datatype(),
            });
        }
    }
    Ok(())
}

fn check_atom(atom: &Atom, lang: Lang) -> Result<(), ModelError> {
    if atom.fits_language(lang) {
        Ok(())
    } else {
        Err(ModelError::LanguageMismatch {
            lang,
            atom: atom.to_string(),
        })
    }
}

/// All e-literals occurring in triples, conditions, or the global
/// constraint.
pub fn e_literals_of(db: &Database) -> BTreeSet<EName> {
    let mut out = db.global.e_literals();
    for ct in &db.graph {
        if let Term::ELit(e) = &ct.triple.o {
            out.insert(e.clone());
        }
        ct.condition.e_literals(&mut out);
    }
    out
}

/// E-literals of the conditional graph only (triples and their conditions).
pub fn e_literals_of_graph(graph: &[ConditionalTriple]) -> BTreeSet<EName> {
    let mut out = BTreeSet::new();
    for ct in graph {
        if let Term::ELit(e) = &ct.triple.o {
            out.insert(e.clone());
        }
        ct.condition.e_literals(&mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{CTerm, Expr, TopoRel};
    use crate::geom::Polygon;
    use crate::term::ConstValue;

    pub fn rect_term(x1: i64, y1: i64, x2: i64, y2: i64) -> Term {
        Term::poly(Polygon::rect_i(x1, y1, x2, y2).unwrap())
    }

    fn ntpp_global(lit: &str, x1: i64, y1: i64, x2: i64, y2: i64) -> BoolExpr {
        Expr::Atom(Atom::Topo {
            rel: TopoRel::Ntpp,
            l: CTerm::Lit(EName::new(lit)),
            r: CTerm::Const(ConstValue::Poly(Polygon::rect_i(x1, y1, x2, y2).unwrap())),
            neg: false,
        })
    }

    fn example_3_4() -> Database {
        let t = |s: &str, p: &str, o: Term| {
            ConditionalTriple::unconditional(ETriple::new(Term::iri(s), Term::iri(p), o))
        };
        mk_database(
            vec![
                t("hotspot1", "type", Term::iri("Hotspot")),
                t("fire1", "type", Term::iri("Fire")),
                t("hotspot1", "correspondsTo", Term::iri("fire1")),
                t("fire1", "occurredIn", Term::elit("R1")),
            ],
            ntpp_global("R1", 6, 8, 23, 19),
            Lang::Pcl,
        )
        .unwrap()
    }

    #[test]
    fn example_database_is_valid() {
        let db = example_3_4();
        assert_eq!(db.graph.len(), 4);
    }

    #[test]
    fn empty_database_is_valid() {
        let db = mk_database(vec![], BoolExpr::truth(), Lang::Pcl).unwrap();
        assert!(db.graph.is_empty());
        assert!(e_literals_of(&db).is_empty());
    }

    #[test]
    fn e_literal_subject_rejected() {
        let bad = ConditionalTriple::unconditional(ETriple::new(
            Term::elit("R1"),
            Term::iri("p"),
            Term::iri("o"),
        ));
        let err = mk_database(vec![bad], BoolExpr::truth(), Lang::Pcl).unwrap_err();
        assert!(matches!(err, ModelError::IllFormedTriple(_)));
    }

    #[test]
    fn literal_predicate_rejected() {
        let bad = ConditionalTriple::unconditional(ETriple::new(
            Term::iri("s"),
            Term::blank("p"),
            Term::iri("o"),
        ));
        assert!(mk_database(vec![bad], BoolExpr::truth(), Lang::Pcl).is_err());
    }

    #[test]
    fn foreign_language_atom_rejected() {
        let topo = ntpp_global("R1", 0, 0, 1, 1);
        let err = mk_database(vec![], topo, Lang::Ecl).unwrap_err();
        assert!(matches!(err, ModelError::LanguageMismatch { .. }));
    }

    #[test]
    fn wrong_constant_sort_rejected() {
        let bad = ConditionalTriple::unconditional(ETriple::new(
            Term::iri("s"),
            Term::iri("p"),
            Term::CLit(ConstValue::Str("c".into())),
        ));
        let err = mk_database(vec![bad], BoolExpr::truth(), Lang::Pcl).unwrap_err();
        assert!(matches!(err, ModelError::UnknownDatatype { .. }));
    }

    #[test]
    fn duplicate_conditional_triples_collapse() {
        let t = ConditionalTriple::unconditional(ETriple::new(
            Term::iri("s"),
            Term::iri("p"),
            Term::iri("o"),
        ));
        let db = mk_database(vec![t.clone(), t], BoolExpr::truth(), Lang::Pcl).unwrap();
        assert_eq!(db.graph.len(), 1);
    }

    #[test]
    fn rebuilding_from_parts_is_identity() {
        let db = example_3_4();
        let again = mk_database(db.graph.clone(), db.global.clone(), db.lang).unwrap();
        assert_eq!(db, again);
    }

    #[test]
    fn e_literals_collects_graph_and_global() {
        let db = example_3_4();
        let lits = e_literals_of(&db);
        assert_eq!(lits.len(), 1);
        assert!(lits.contains(&EName::new("R1")));
        // a literal appearing only in the global constraint is still collected
        let db2 = mk_database(vec![], ntpp_global("only", 0, 0, 4, 4), Lang::Pcl).unwrap();
        assert!(e_literals_of(&db2).contains(&EName::new("only")));
    }

    #[test]
    fn rect_object_allowed_in_pcl() {
        let t = ConditionalTriple::unconditional(ETriple::new(
            Term::iri("fire2"),
            Term::iri("occurredIn"),
            rect_term(6, 8, 23, 19),
        ));
        assert!(mk_database(vec![t], BoolExpr::truth(), Lang::Pcl).is_ok());
    }
}
