//! Serializers for databases, queries, answers, worlds, and certain-answer
//! triple sets. All output is deterministic: solutions are ordered
//! lexicographically by rendered binding and condition.

use crate::algebra::{FilterAtom, FilterExpr, GraphPattern, PatternTerm, PlainMapping};
use crate::constraint::Expr;
use crate::model::Database;
use crate::oracle::World;
use crate::query::{ConstructQuery, Query, SelectAnswer, SelectQuery, Template};
use crate::term::ETriple;
use serde_json::{json, Value};

/// Render a database as a parseable document.
pub fn db_to_doc(db: &Database) -> String {
    let mut out = String::new();
    out.push_str(&format!("#lang {}\n", db.lang.id()));
    if !matches!(&db.global, Expr::Atom(crate::constraint::Atom::True)) {
        out.push_str(&format!("#global {} .\n", db.global));
    }
    for ct in &db.graph {
        out.push_str(&ct.to_string());
        out.push('\n');
    }
    out
}

pub fn query_to_text(q: &Query) -> String {
    match q {
        Query::Select(sq) => select_to_text(sq),
        Query::Construct(cq) => construct_query_to_text(cq),
    }
}

fn select_to_text(q: &SelectQuery) -> String {
    let vars: Vec<String> = q.projection.iter().map(|v| v.to_string()).collect();
    format!(
        "(select ({}) {})",
        vars.join(" "),
        pattern_to_text(&q.pattern)
    )
}

fn construct_query_to_text(q: &ConstructQuery) -> String {
    format!(
        "(construct ({}) {})",
        template_to_text(&q.template),
        pattern_to_text(&q.pattern)
    )
}

fn template_to_text(t: &Template) -> String {
    t.iter()
        .map(|tt| {
            format!(
                "({} {} {})",
                pattern_term(&tt.s),
                pattern_term(&tt.p),
                pattern_term(&tt.o)
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn pattern_term(pt: &PatternTerm) -> String {
    pt.to_string()
}

pub fn pattern_to_text(p: &GraphPattern) -> String {
    match p {
        GraphPattern::Triple(t) => format!(
            "(triple {} {} {})",
            pattern_term(&t.s),
            pattern_term(&t.p),
            pattern_term(&t.o)
        ),
        GraphPattern::And(l, r) => {
            format!("(and {} {})", pattern_to_text(l), pattern_to_text(r))
        }
        GraphPattern::Union(l, r) => {
            format!("(union {} {})", pattern_to_text(l), pattern_to_text(r))
        }
        GraphPattern::Opt(l, r) => {
            format!("(opt {} {})", pattern_to_text(l), pattern_to_text(r))
        }
        GraphPattern::Filter(inner, cond) => format!(
            "(filter {} {})",
            pattern_to_text(inner),
            filter_to_text(cond)
        ),
    }
}

fn filter_to_text(e: &FilterExpr) -> String {
    match e {
        Expr::Atom(a) => filter_atom_to_text(a),
        Expr::And(es) => fold_connective("and", es),
        Expr::Or(es) => fold_connective("or", es),
        Expr::Not(inner) => format!("(not {})", filter_to_text(inner)),
    }
}

fn fold_connective(name: &str, es: &[FilterExpr]) -> String {
    // binary nesting keeps the reader simple
    match es.len() {
        0 => format!("({})", if name == "and" { "true" } else { "false" }),
        1 => filter_to_text(&es[0]),
        _ => {
            let mut acc = filter_to_text(&es[es.len() - 1]);
            for e in es[..es.len() - 1].iter().rev() {
                acc = format!("({} {} {})", name, filter_to_text(e), acc);
            }
            acc
        }
    }
}

fn filter_atom_to_text(a: &FilterAtom) -> String {
    match a {
        FilterAtom::Topo { rel, l, r, neg } if *neg => {
            let positive = FilterAtom::Topo {
                rel: *rel,
                l: l.clone(),
                r: r.clone(),
                neg: false,
            };
            format!("(not ({}))", positive)
        }
        other => format!("({})", other),
    }
}

/// Answer rendering.
pub fn select_answer_text(ans: &SelectAnswer) -> String {
    let mut lines: Vec<String> = ans
        .solutions
        .iter()
        .map(|m| {
            let bindings: Vec<String> = m
                .binding
                .iter()
                .map(|(v, t)| format!("{} -> {}", v, t))
                .collect();
            format!("{{{}}} {{{}}}", bindings.join(", "), m.condition)
        })
        .collect();
    lines.sort();
    let mut out = format!("global: {}\n", ans.global);
    if lines.is_empty() {
        out.push_str("no solutions\n");
    }
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub fn select_answer_json(ans: &SelectAnswer) -> Value {
    let mut solutions: Vec<Value> = ans
        .solutions
        .iter()
        .map(|m| {
            let bindings: serde_json::Map<String, Value> = m
                .binding
                .iter()
                .map(|(v, t)| (v.to_string(), Value::String(t.to_string())))
                .collect();
            json!({
                "bindings": bindings,
                "condition": m.condition.to_string(),
            })
        })
        .collect();
    solutions.sort_by_key(|v| v.to_string());
    json!({
        "global": ans.global.to_string(),
        "solutions": solutions,
    })
}

pub fn construct_answer_json(db: &Database) -> Value {
    let mut triples: Vec<Value> = db
        .graph
        .iter()
        .map(|ct| {
            json!({
                "s": ct.triple.s.to_string(),
                "p": ct.triple.p.to_string(),
                "o": ct.triple.o.to_string(),
                "condition": ct.condition.to_string(),
            })
        })
        .collect();
    triples.sort_by_key(|v| v.to_string());
    json!({
        "lang": db.lang.id(),
        "global": db.global.to_string(),
        "triples": triples,
    })
}

/// Certain answers: sorted plain triple lines.
pub fn triples_text(triples: impl IntoIterator<Item = ETriple>) -> String {
    let mut lines: Vec<String> = triples.into_iter().map(|t| format!("{} .", t)).collect();
    lines.sort();
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// Certain rows of a SELECT query.
pub fn rows_text(rows: &[PlainMapping]) -> String {
    let mut lines: Vec<String> = rows
        .iter()
        .map(|m| {
            let bindings: Vec<String> = m.iter().map(|(v, t)| format!("{} -> {}", v, t)).collect();
            format!("{{{}}}", bindings.join(", "))
        })
        .collect();
    lines.sort();
    let mut out = String::new();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub fn worlds_text(worlds: &[World]) -> String {
    let mut out = String::new();
    for (i, w) in worlds.iter().enumerate() {
        out.push_str(&format!("# world {}\n", i));
        for t in w {
            out.push_str(&format!("{} .\n", t));
        }
    }
    out.push_str(&format!("{} worlds\n", worlds.len()));
    out
}
