//! Textual formats: the database document, the s-expression query syntax,
//! domain specifications, ground graphs, and the serializers for each.

mod lex;
mod parse;
mod write;

pub use parse::{parse_database, parse_domain, parse_graph, parse_polygon, parse_query};
pub use write::{
    construct_answer_json, db_to_doc, pattern_to_text, query_to_text, rows_text,
    select_answer_json, select_answer_text, triples_text, worlds_text,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{Atom, TopoRel};
    use crate::term::{Lang, Term};

    const EXAMPLE_3_4: &str = r#"#lang pcl
#global _e:R1 NTPP "x >= 6 && x <= 23 && y >= 8 && y <= 19" .
<hotspot1> <type> <Hotspot> .
<fire1> <type> <Fire> .
<hotspot1> <correspondsTo> <fire1> .
<fire1> <occurredIn> _e:R1 .
"#;

    #[test]
    fn example_database_round_trips() {
        let db = parse_database(EXAMPLE_3_4).unwrap();
        assert_eq!(db.lang, Lang::Pcl);
        assert_eq!(db.graph.len(), 4);
        let doc = db_to_doc(&db);
        let again = parse_database(&doc).unwrap();
        assert_eq!(db, again);
    }

    #[test]
    fn unicode_operators_accepted() {
        let doc = "#lang pcl\n#global _e:R1 NTPP \"x ≥ 6 ∧ x ≤ 23 ∧ y ≥ 8 ∧ y ≤ 19\" .\n";
        let db = parse_database(doc).unwrap();
        match &db.global {
            crate::constraint::Expr::Atom(Atom::Topo { rel, .. }) => {
                assert_eq!(*rel, TopoRel::Ntpp)
            }
            other => panic!("unexpected global {:?}", other),
        }
    }

    #[test]
    fn missing_dot_is_an_error() {
        let doc = "#lang pcl\n<a> <b> <c>";
        let err = parse_database(doc).unwrap_err();
        assert!(err.msg.contains("'.'"), "{}", err);
    }

    #[test]
    fn pcl_atom_in_ecl_document_rejected() {
        let doc = "#lang ecl\n#global _e:x NTPP _e:y .\n";
        assert!(parse_database(doc).is_err());
    }

    #[test]
    fn conditional_triple_with_condition() {
        let doc = concat!(
            "#lang pcl\n",
            "<fire1> <occurredIn> _e:R1 {_e:R1 NTPP \"x >= 0 && x <= 10 && y >= 0 && y <= 10\"} .\n"
        );
        let db = parse_database(doc).unwrap();
        assert_eq!(db.graph.len(), 1);
        assert!(!db.graph[0].condition.is_true());
        let again = parse_database(&db_to_doc(&db)).unwrap();
        assert_eq!(db, again);
    }

    #[test]
    fn disjunctive_global_round_trips() {
        let doc = concat!(
            "#lang pcl\n",
            "#global (_e:R1 NTPP \"x >= 6 && x <= 23 && y >= 8 && y <= 19\" && ",
            "_e:R1 NTPP \"x >= 10 && x <= 21 && y >= 12 && y <= 17\") || ",
            "_e:R1 PO \"x >= 2 && x <= 6 && y >= 4 && y <= 8\" .\n",
            "<fire1> <occurredIn> _e:R1 .\n"
        );
        let db = parse_database(doc).unwrap();
        let again = parse_database(&db_to_doc(&db)).unwrap();
        assert_eq!(db, again);
    }

    #[test]
    fn ecl_document_and_constants() {
        let doc = concat!(
            "#lang ecl\n",
            "#global _e:x = @\"alpha\" || _e:x != @\"beta\" .\n",
            "<s> <p> _e:x .\n",
            "<s> <q> @\"alpha\" .\n",
            "<s> <r> \"just a literal\" .\n"
        );
        let db = parse_database(doc).unwrap();
        assert!(matches!(
            db.graph[1].triple.o,
            Term::CLit(crate::term::ConstValue::Str(_))
        ));
        assert!(matches!(db.graph[2].triple.o, Term::Literal { .. }));
        let again = parse_database(&db_to_doc(&db)).unwrap();
        assert_eq!(db, again);
    }

    #[test]
    fn depcl_document_round_trips() {
        let doc = concat!(
            "#lang depcl\n",
            "#global _e:t1 - _e:t2 <= 5/2 && _e:t1 >= 1 .\n",
            "<e> <at> _e:t1 .\n",
            "<f> <at> 7/2 .\n"
        );
        let db = parse_database(doc).unwrap();
        let again = parse_database(&db_to_doc(&db)).unwrap();
        assert_eq!(db, again);
    }

    #[test]
    fn dipcl_rejects_fractional_constants() {
        let doc = "#lang dipcl\n<e> <at> 5/2 .\n";
        assert!(parse_database(doc).is_err());
    }

    #[test]
    fn rcl_document_round_trips() {
        let doc = concat!(
            "#lang rcl\n",
            "#global LLx(_e:b) - URx(_e:c) < 0 && _e:b EQ [0, 0, 2, 3] .\n",
            "<s> <boundedBy> _e:b .\n",
            "<s> <boundedBy2> [1, 1, 4, 4] .\n"
        );
        let db = parse_database(doc).unwrap();
        let again = parse_database(&db_to_doc(&db)).unwrap();
        assert_eq!(db, again);
    }

    #[test]
    fn query_round_trips() {
        let q = "(select (?F) (filter (and (triple ?F <type> <Fire>) (triple ?F <occurredIn> ?R!s)) (?R!s NTPP \"x >= 10 && x <= 21 && y >= 12 && y <= 17\")))";
        let parsed = parse_query(q, Lang::Pcl).unwrap();
        let rendered = query_to_text(&parsed);
        let reparsed = parse_query(&rendered, Lang::Pcl).unwrap();
        assert_eq!(parsed, reparsed);
    }

    #[test]
    fn construct_query_parses() {
        let q = "(construct ((?F <type> <Fire>)) (triple ?F <occurredIn> ?R!s))";
        let parsed = parse_query(q, Lang::Pcl).unwrap();
        match &parsed {
            crate::query::Query::Construct(cq) => assert_eq!(cq.template.len(), 1),
            _ => panic!("expected construct"),
        }
        let reparsed = parse_query(&query_to_text(&parsed), Lang::Pcl).unwrap();
        assert_eq!(parsed, reparsed);
    }

    #[test]
    fn unknown_relation_is_parse_error() {
        let q = "(select (?F) (filter (triple ?F <p> ?R!s) (?R!s NTPPI ?R!s)))";
        assert!(parse_query(q, Lang::Pcl).is_err());
    }

    #[test]
    fn domain_spec_parses() {
        let text = concat!(
            "_e:R1 = \"x >= 11 && x <= 15 && y >= 13 && y <= 15\" ",
            "| \"x >= 10 && x <= 21 && y >= 12 && y <= 17\" ",
            "| \"x >= 0 && x <= 1 && y >= 0 && y <= 1\"\n"
        );
        let dom = parse_domain(text, Lang::Pcl).unwrap();
        assert_eq!(dom[&crate::term::EName::new("R1")].len(), 3);
    }

    #[test]
    fn ground_graph_parses_and_rejects_elits() {
        let ok = parse_graph("<fire1> <type> <Fire> .\n", Lang::Pcl).unwrap();
        assert_eq!(ok.len(), 1);
        assert!(parse_graph("<fire1> <occurredIn> _e:R1 .\n", Lang::Pcl).is_err());
    }

    #[test]
    fn strict_polygon_bounds_rejected() {
        let doc = "#lang pcl\n#global _e:R1 NTPP \"x > 6 && x <= 23 && y >= 8 && y <= 19\" .\n";
        assert!(parse_database(doc).is_err());
    }
}
