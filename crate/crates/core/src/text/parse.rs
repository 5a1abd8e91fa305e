//! Recursive-descent parsers for the database document, s-expression query,
//! domain specification, and ground graph formats.

use super::lex::{lex, Spanned, Tok};
use super::ParseError;
use crate::algebra::{FilterAtom, FilterExpr, GraphPattern, PatternTerm, QScalar, QTerm, TriplePattern, Variable};
use crate::constraint::{
    Atom, BoolExpr, CTerm, CmpOp, Condition, Conjunction, Corner, Expr, ScalarVar, TopoRel,
};
use crate::geom::{BoxC, HalfPlane, Polygon, Rat};
use crate::model::{mk_database, ConditionalTriple, Database};
use crate::oracle::DomainSpec;
use crate::query::{ConstructQuery, Query, SelectQuery, TemplateTriple};
use crate::term::{ConstValue, EName, ETriple, Lang, Term};
use num::Zero;
use std::collections::BTreeMap;

pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    pub lang: Lang,
}

impl Parser {
    pub fn new(text: &str, lang: Lang) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            lang,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .or_else(|| self.toks.last().map(|s| (s.line, s.col + 1)))
            .unwrap_or((1, 1))
    }

    pub fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.next();
            Ok(())
        } else {
            self.fail(format!("expected {}", what))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

/// Parse a database document: `#lang` pragma, optional `#global` constraint,
/// then conditional triples.
pub fn parse_database(text: &str) -> Result<Database, ParseError> {
    let mut p = Parser::new(text, Lang::Pcl)?;
    match p.next() {
        Some(Spanned {
            tok: Tok::Pragma(name),
            ..
        }) if name == "lang" => {}
        _ => return p.fail("document must start with #lang"),
    }
    let lang = match p.next() {
        Some(Spanned {
            tok: Tok::Ident(id),
            ..
        }) => match Lang::from_id(&id) {
            Some(l) => l,
            None => return p.fail(format!("unknown constraint language {:?}", id)),
        },
        _ => return p.fail("expected language id after #lang"),
    };
    p.lang = lang;
    let mut global: BoolExpr = Expr::Atom(Atom::True);
    if let Some(Tok::Pragma(name)) = p.peek() {
        if name == "lang" {
            return p.fail("duplicate #lang pragma");
        }
        if name != "global" {
            return p.fail(format!("unknown pragma #{}", name));
        }
        p.next();
        global = parse_bool_expr(&mut p)?;
        p.expect(Tok::Dot, "'.' after global constraint")?;
    }
    let mut triples = Vec::new();
    while !p.at_end() {
        if let Some(Tok::Pragma(_)) = p.peek() {
            return p.fail("pragmas must precede triples");
        }
        let s = parse_term(&mut p)?;
        let pr = parse_term(&mut p)?;
        let o = parse_term(&mut p)?;
        let condition = if p.peek() == Some(&Tok::LBrace) {
            p.next();
            let c = parse_condition(&mut p)?;
            p.expect(Tok::RBrace, "'}' closing condition")?;
            c
        } else {
            Condition::truth()
        };
        p.expect(Tok::Dot, "'.' terminating triple")?;
        triples.push(ConditionalTriple::new(ETriple::new(s, pr, o), condition));
    }
    mk_database(triples, global, lang).map_err(|e| ParseError {
        line: 1,
        col: 1,
        msg: e.to_string(),
    })
}

fn parse_term(p: &mut Parser) -> Result<Term, ParseError> {
    let lang = p.lang;
    match p.next() {
        Some(Spanned { tok: Tok::Iri(s), .. }) => Ok(Term::Iri(s)),
        Some(Spanned {
            tok: Tok::Blank(b), ..
        }) => Ok(Term::Blank(b)),
        Some(Spanned {
            tok: Tok::ELit(e), ..
        }) => Ok(Term::ELit(EName::new(e))),
        Some(Spanned {
            tok: Tok::EclConst(s),
            ..
        }) => Ok(Term::CLit(ConstValue::Str(s))),
        Some(Spanned { tok: Tok::Str(s), .. }) => {
            if p.peek() == Some(&Tok::DtSep) {
                p.next();
                match p.next() {
                    Some(Spanned {
                        tok: Tok::Iri(dt), ..
                    }) => Ok(Term::Literal {
                        lexical: s,
                        datatype: Some(dt),
                    }),
                    _ => p.fail("expected datatype IRI after '^^'"),
                }
            } else if matches!(lang, Lang::Pcl | Lang::Tcl) {
                // In the topology languages a quoted linear-constraint
                // conjunction denotes a polygon constant.
                match parse_polygon(&s) {
                    Ok(poly) => Ok(Term::CLit(ConstValue::Poly(poly))),
                    Err(_) => Ok(Term::Literal {
                        lexical: s,
                        datatype: None,
                    }),
                }
            } else {
                Ok(Term::Literal {
                    lexical: s,
                    datatype: None,
                })
            }
        }
        Some(Spanned { tok: Tok::Num(n), .. }) => num_const(p, n, false),
        Some(Spanned {
            tok: Tok::Minus, ..
        }) => match p.next() {
            Some(Spanned { tok: Tok::Num(n), .. }) => num_const(p, n, true),
            _ => p.fail("expected number after '-'"),
        },
        Some(Spanned {
            tok: Tok::LBracket,
            ..
        }) => {
            let b = parse_box_body(p)?;
            Ok(Term::CLit(ConstValue::Box(b)))
        }
        _ => p.fail("expected a term"),
    }
}

fn num_const(p: &mut Parser, n: Rat, negate: bool) -> Result<Term, ParseError> {
    let n = if negate { -n } else { n };
    match p.lang {
        Lang::DiPcl => {
            if !n.is_integer() {
                p.fail("dipcl constants must be integers")
            } else {
                Ok(Term::CLit(ConstValue::Int(n.to_integer())))
            }
        }
        Lang::DePcl => Ok(Term::CLit(ConstValue::Rat(n))),
        other => p.fail(format!("numeric constants are not terms of {}", other)),
    }
}

fn parse_box_body(p: &mut Parser) -> Result<BoxC, ParseError> {
    let mut nums = Vec::new();
    for k in 0..4 {
        if k > 0 {
            p.expect(Tok::Comma, "',' in box constant")?;
        }
        let neg = if p.peek() == Some(&Tok::Minus) {
            p.next();
            true
        } else {
            false
        };
        match p.next() {
            Some(Spanned { tok: Tok::Num(n), .. }) => {
                nums.push(if neg { -n } else { n });
            }
            _ => return p.fail("expected number in box constant"),
        }
    }
    p.expect(Tok::RBracket, "']' closing box constant")?;
    let mut it = nums.into_iter();
    let (x1, y1, x2, y2) = (
        it.next().expect("4 items"),
        it.next().expect("4 items"),
        it.next().expect("4 items"),
        it.next().expect("4 items"),
    );
    BoxC::new(x1, y1, x2, y2).map_err(|e| {
        let (line, col) = p.here();
        ParseError {
            line,
            col,
            msg: e.to_string(),
        }
    })
}

/// Boolean combination with `!` > `&&` > `||` and parentheses.
pub fn parse_bool_expr(p: &mut Parser) -> Result<BoolExpr, ParseError> {
    let mut disjuncts = vec![parse_bool_and(p)?];
    while p.peek() == Some(&Tok::OrOr) {
        p.next();
        disjuncts.push(parse_bool_and(p)?);
    }
    Ok(if disjuncts.len() == 1 {
        disjuncts.pop().expect("len checked")
    } else {
        Expr::Or(disjuncts)
    })
}

fn parse_bool_and(p: &mut Parser) -> Result<BoolExpr, ParseError> {
    let mut conjuncts = vec![parse_bool_unary(p)?];
    while p.peek() == Some(&Tok::AndAnd) {
        p.next();
        conjuncts.push(parse_bool_unary(p)?);
    }
    Ok(if conjuncts.len() == 1 {
        conjuncts.pop().expect("len checked")
    } else {
        Expr::And(conjuncts)
    })
}

fn parse_bool_unary(p: &mut Parser) -> Result<BoolExpr, ParseError> {
    match p.peek() {
        Some(Tok::Bang) => {
            p.next();
            Ok(Expr::not(parse_bool_unary(p)?))
        }
        Some(Tok::LParen) => {
            p.next();
            let e = parse_bool_expr(p)?;
            p.expect(Tok::RParen, "')'")?;
            Ok(e)
        }
        _ => Ok(Expr::Atom(parse_atom(p)?)),
    }
}

/// A condition: conjunctions of atoms, disjoined by `||` on normalized
/// documents.
pub fn parse_condition(p: &mut Parser) -> Result<Condition, ParseError> {
    let mut disjuncts = vec![parse_conjunction(p)?];
    while p.peek() == Some(&Tok::OrOr) {
        p.next();
        disjuncts.push(parse_conjunction(p)?);
    }
    Ok(Condition::of_disjuncts(disjuncts))
}

fn parse_conjunction(p: &mut Parser) -> Result<Conjunction, ParseError> {
    let mut conj = Conjunction::truth();
    let mut falsified = false;
    loop {
        let atom = if p.peek() == Some(&Tok::Bang) {
            p.next();
            let inner = if p.peek() == Some(&Tok::LParen) {
                p.next();
                let a = parse_atom(p)?;
                p.expect(Tok::RParen, "')'")?;
                a
            } else {
                parse_atom(p)?
            };
            negated_atom(p, inner)?
        } else {
            parse_atom(p)?
        };
        if atom == Atom::False {
            falsified = true;
        }
        conj.push(atom);
        if p.peek() == Some(&Tok::AndAnd) {
            p.next();
        } else {
            break;
        }
    }
    if falsified {
        return Ok(Conjunction::falsity());
    }
    Ok(conj)
}

fn negated_atom(p: &Parser, atom: Atom) -> Result<Atom, ParseError> {
    match atom {
        Atom::True => Ok(Atom::False),
        Atom::False => Ok(Atom::True),
        Atom::Eq { l, r, neg } => Ok(Atom::Eq { l, r, neg: !neg }),
        Atom::Topo { rel, l, r, neg } => Ok(Atom::Topo {
            rel,
            l,
            r,
            neg: !neg,
        }),
        Atom::Cmp { .. } => p.fail("'!' is not a condition connective for difference atoms"),
    }
}

/// One constraint atom in the active language.
pub fn parse_atom(p: &mut Parser) -> Result<Atom, ParseError> {
    if let Some(Tok::Ident(id)) = p.peek() {
        if id == "true" {
            p.next();
            return Ok(Atom::True);
        }
        if id == "false" {
            p.next();
            return Ok(Atom::False);
        }
    }
    match p.lang {
        Lang::Pcl | Lang::Tcl => parse_topo_atom(p),
        Lang::Ecl => parse_ecl_atom(p),
        Lang::DiPcl | Lang::DePcl | Lang::Rcl => parse_cmp_atom(p),
    }
}

fn parse_topo_atom(p: &mut Parser) -> Result<Atom, ParseError> {
    let l = parse_cterm_topo(p)?;
    let rel = match p.next() {
        Some(Spanned {
            tok: Tok::Ident(id),
            ..
        }) => match TopoRel::from_name(&id) {
            Some(r) => r,
            None => return p.fail(format!("unknown topology relation {:?}", id)),
        },
        _ => return p.fail("expected a topology relation"),
    };
    let r = parse_cterm_topo(p)?;
    if p.lang == Lang::Tcl
        && (matches!(l, CTerm::Const(_)) || matches!(r, CTerm::Const(_)))
    {
        return p.fail("tcl constraints take variables only");
    }
    Ok(Atom::Topo {
        rel,
        l,
        r,
        neg: false,
    })
}

fn parse_cterm_topo(p: &mut Parser) -> Result<CTerm, ParseError> {
    match p.next() {
        Some(Spanned {
            tok: Tok::ELit(e), ..
        }) => Ok(CTerm::Lit(EName::new(e))),
        Some(Spanned { tok: Tok::Str(s), .. }) => match parse_polygon(&s) {
            Ok(poly) => Ok(CTerm::Const(ConstValue::Poly(poly))),
            Err(msg) => p.fail(format!("invalid polygon constant: {}", msg)),
        },
        _ => p.fail("expected e-literal or polygon constant"),
    }
}

fn parse_ecl_atom(p: &mut Parser) -> Result<Atom, ParseError> {
    let l = parse_cterm_ecl(p)?;
    let neg = match p.next() {
        Some(Spanned { tok: Tok::Eq, .. }) => false,
        Some(Spanned { tok: Tok::Neq, .. }) => true,
        _ => return p.fail("expected '=' or '!='"),
    };
    let r = parse_cterm_ecl(p)?;
    Ok(Atom::Eq { l, r, neg })
}

fn parse_cterm_ecl(p: &mut Parser) -> Result<CTerm, ParseError> {
    match p.next() {
        Some(Spanned {
            tok: Tok::ELit(e), ..
        }) => Ok(CTerm::Lit(EName::new(e))),
        Some(Spanned {
            tok: Tok::EclConst(s),
            ..
        }) => Ok(CTerm::Const(ConstValue::Str(s))),
        _ => p.fail("expected e-literal or @\"constant\""),
    }
}

/// Difference atoms: `side op side` where one side is a constant and the
/// other is `x`, `x - y`, or (for rcl) coordinate selectors; also rcl box
/// equalities `b EQ b'`.
fn parse_cmp_atom(p: &mut Parser) -> Result<Atom, ParseError> {
    // rcl box equality? (written `b EQ b'` or `b = b'`); a bare box constant
    // or an e-literal followed by an equality can start nothing else
    if p.lang == Lang::Rcl {
        let elit_eq_head = matches!(p.peek(), Some(Tok::ELit(_)))
            && (matches!(p.peek2(), Some(Tok::Ident(id)) if id == "EQ")
                || matches!(p.peek2(), Some(Tok::Eq)));
        if elit_eq_head || matches!(p.peek(), Some(Tok::LBracket)) {
            let l = parse_boxterm(p)?;
            match p.next() {
                Some(Spanned { tok: Tok::Eq, .. }) => {}
                Some(Spanned {
                    tok: Tok::Ident(id),
                    ..
                }) if id == "EQ" => {}
                _ => return p.fail("expected 'EQ' between box terms"),
            }
            let r = parse_boxterm(p)?;
            return Ok(Atom::Eq { l, r, neg: false });
        }
    }
    let lhs = parse_cmp_side(p)?;
    let op = match p.next() {
        Some(Spanned { tok: Tok::Lt, .. }) => CmpOp::Lt,
        Some(Spanned { tok: Tok::Le, .. }) => CmpOp::Le,
        Some(Spanned { tok: Tok::Eq, .. }) => CmpOp::Eq,
        Some(Spanned { tok: Tok::Ge, .. }) => CmpOp::Ge,
        Some(Spanned { tok: Tok::Gt, .. }) => CmpOp::Gt,
        _ => return p.fail("expected comparison operator"),
    };
    let rhs = parse_cmp_side(p)?;
    build_cmp(p, lhs, op, rhs)
}

fn parse_boxterm(p: &mut Parser) -> Result<CTerm, ParseError> {
    match p.next() {
        Some(Spanned {
            tok: Tok::ELit(e), ..
        }) => Ok(CTerm::Lit(EName::new(e))),
        Some(Spanned {
            tok: Tok::LBracket,
            ..
        }) => Ok(CTerm::Const(ConstValue::Box(parse_box_body(p)?))),
        _ => p.fail("expected box e-literal or box constant"),
    }
}

/// One side of a difference comparison: a constant, a scalar variable, or a
/// difference of two scalar variables (with optional constant offsets folded
/// by `build_cmp`).
enum CmpSide {
    Const(Rat),
    Vars {
        pos: Option<ScalarVar>,
        neg: Option<ScalarVar>,
        offset: Rat,
    },
}

fn parse_cmp_side(p: &mut Parser) -> Result<CmpSide, ParseError> {
    let first_neg = if p.peek() == Some(&Tok::Minus) {
        p.next();
        true
    } else {
        false
    };
    let first = parse_cmp_operand(p)?;
    let mut side = match first {
        Operand::Num(n) => CmpSide::Const(if first_neg { -n } else { n }),
        Operand::Var(v) => {
            if first_neg {
                CmpSide::Vars {
                    pos: None,
                    neg: Some(v),
                    offset: Rat::zero(),
                }
            } else {
                CmpSide::Vars {
                    pos: Some(v),
                    neg: None,
                    offset: Rat::zero(),
                }
            }
        }
    };
    while matches!(p.peek(), Some(Tok::Minus) | Some(Tok::Plus)) {
        let subtract = p.peek() == Some(&Tok::Minus);
        p.next();
        let operand = parse_cmp_operand(p)?;
        side = combine_side(p, side, operand, subtract)?;
    }
    Ok(side)
}

fn combine_side(
    p: &Parser,
    side: CmpSide,
    operand: Operand,
    subtract: bool,
) -> Result<CmpSide, ParseError> {
    match (side, operand) {
        (CmpSide::Const(c), Operand::Num(n)) => {
            Ok(CmpSide::Const(if subtract { c - n } else { c + n }))
        }
        (CmpSide::Const(c), Operand::Var(v)) => Ok(if subtract {
            CmpSide::Vars {
                pos: None,
                neg: Some(v),
                offset: c,
            }
        } else {
            CmpSide::Vars {
                pos: Some(v),
                neg: None,
                offset: c,
            }
        }),
        (
            CmpSide::Vars {
                pos,
                neg,
                offset,
            },
            Operand::Num(n),
        ) => Ok(CmpSide::Vars {
            pos,
            neg,
            offset: if subtract { offset - n } else { offset + n },
        }),
        (
            CmpSide::Vars {
                pos,
                neg,
                offset,
            },
            Operand::Var(v),
        ) => {
            if subtract {
                if neg.is_some() {
                    return p.fail("at most two variables in a difference term");
                }
                Ok(CmpSide::Vars {
                    pos,
                    neg: Some(v),
                    offset,
                })
            } else {
                if pos.is_some() {
                    return p.fail("difference terms combine variables with '-'");
                }
                Ok(CmpSide::Vars {
                    pos: Some(v),
                    neg,
                    offset,
                })
            }
        }
    }
}

enum Operand {
    Num(Rat),
    Var(ScalarVar),
}

fn parse_cmp_operand(p: &mut Parser) -> Result<Operand, ParseError> {
    match p.next() {
        Some(Spanned { tok: Tok::Num(n), .. }) => Ok(Operand::Num(n)),
        Some(Spanned {
            tok: Tok::ELit(e), ..
        }) => {
            if p.lang == Lang::Rcl {
                p.fail("rcl terms are coordinates: LLx(b), URy(b), ...")
            } else {
                Ok(Operand::Var(ScalarVar::Point(EName::new(e))))
            }
        }
        Some(Spanned {
            tok: Tok::Ident(id),
            ..
        }) => {
            let corner = match id.as_str() {
                "LLx" => Corner::Llx,
                "LLy" => Corner::Lly,
                "URx" => Corner::Urx,
                "URy" => Corner::Ury,
                other => return p.fail(format!("unknown coordinate function {:?}", other)),
            };
            if p.lang != Lang::Rcl {
                return p.fail("coordinate functions belong to rcl");
            }
            p.expect(Tok::LParen, "'('")?;
            let inner = match p.next() {
                Some(Spanned {
                    tok: Tok::ELit(e), ..
                }) => ScalarVar::Coord(EName::new(e), corner),
                Some(Spanned {
                    tok: Tok::LBracket,
                    ..
                }) => {
                    let b = parse_box_body(p)?;
                    p.expect(Tok::RParen, "')'")?;
                    return Ok(Operand::Num(b.coord(corner).clone()));
                }
                _ => return p.fail("expected box variable or constant"),
            };
            p.expect(Tok::RParen, "')'")?;
            Ok(Operand::Var(inner))
        }
        _ => p.fail("expected number, e-literal, or coordinate term"),
    }
}

fn build_cmp(p: &Parser, lhs: CmpSide, op: CmpOp, rhs: CmpSide) -> Result<Atom, ParseError> {
    // Normalize to: vars-side OP constant.
    let (vars, op, bound) = match (lhs, rhs) {
        (CmpSide::Vars { pos, neg, offset }, CmpSide::Const(c)) => ((pos, neg), op, c - offset),
        (CmpSide::Const(c), CmpSide::Vars { pos, neg, offset }) => {
            let flipped = match op {
                CmpOp::Lt => CmpOp::Gt,
                CmpOp::Le => CmpOp::Ge,
                CmpOp::Eq => CmpOp::Eq,
                CmpOp::Ge => CmpOp::Le,
                CmpOp::Gt => CmpOp::Lt,
            };
            ((pos, neg), flipped, c - offset)
        }
        (CmpSide::Const(a), CmpSide::Const(b)) => {
            return Ok(if op.eval(&a, &b) { Atom::True } else { Atom::False });
        }
        (CmpSide::Vars { .. }, CmpSide::Vars { .. }) => {
            return p.fail("one side of a difference constraint must be a constant")
        }
    };
    if p.lang == Lang::DiPcl && !bound.is_integer() {
        return p.fail("dipcl bounds must be integers");
    }
    Ok(Atom::Cmp {
        lhs: vars.0,
        rhs: vars.1,
        op,
        bound,
    })
}

/// Parse a quoted linear-constraint conjunction into a polygon.
pub fn parse_polygon(body: &str) -> Result<Polygon, String> {
    let toks = lex(body).map_err(|e| e.msg)?;
    let mut i = 0usize;
    let mut halves: Vec<HalfPlane> = Vec::new();
    loop {
        let (h, consumed) = parse_linatom(&toks[i..])?;
        halves.extend(h);
        i += consumed;
        match toks.get(i).map(|s| &s.tok) {
            Some(Tok::AndAnd) => i += 1,
            None => break,
            Some(other) => return Err(format!("unexpected token {:?}", other)),
        }
    }
    Polygon::new(halves).map_err(|e| e.to_string())
}

/// `affine cmp affine` normalized to half-planes.
fn parse_linatom(toks: &[Spanned]) -> Result<(Vec<HalfPlane>, usize), String> {
    let (a1, b1, c1, n1) = parse_affine(toks)?;
    let op = match toks.get(n1).map(|s| &s.tok) {
        Some(Tok::Le) => CmpOp::Le,
        Some(Tok::Ge) => CmpOp::Ge,
        Some(Tok::Eq) => CmpOp::Eq,
        Some(Tok::Lt) | Some(Tok::Gt) => {
            return Err("polygon constants are closed: use <= or >=".into())
        }
        _ => return Err("expected comparison in polygon constant".into()),
    };
    let (a2, b2, c2, n2) = parse_affine(&toks[n1 + 1..])?;
    // (a1-a2) x + (b1-b2) y OP (c2-c1)
    let (a, b, c) = (a1 - a2, b1 - b2, c2 - c1);
    let halves = match op {
        CmpOp::Le => vec![HalfPlane::new(a, b, c)],
        CmpOp::Ge => vec![HalfPlane::new(-a, -b, -c)],
        CmpOp::Eq => vec![
            HalfPlane::new(a.clone(), b.clone(), c.clone()),
            HalfPlane::new(-a, -b, -c),
        ],
        _ => unreachable!(),
    };
    Ok((halves, n1 + 1 + n2))
}

/// An affine form over x and y: returns (a, b, c) for `a x + b y + c` and
/// the number of tokens consumed.
fn parse_affine(toks: &[Spanned]) -> Result<(Rat, Rat, Rat, usize), String> {
    let mut a = Rat::zero();
    let mut b = Rat::zero();
    let mut c = Rat::zero();
    let mut i = 0usize;
    let mut sign = Rat::from_integer(1.into());
    let mut expect_term = true;
    loop {
        match toks.get(i).map(|s| &s.tok) {
            Some(Tok::Minus) if expect_term => {
                sign = -sign;
                i += 1;
            }
            Some(Tok::Plus) if expect_term => {
                i += 1;
            }
            Some(Tok::Num(n)) if expect_term => {
                let coef = sign.clone() * n;
                i += 1;
                match toks.get(i).map(|s| &s.tok) {
                    Some(Tok::Ident(id)) if id == "x" => {
                        a += &coef;
                        i += 1;
                    }
                    Some(Tok::Ident(id)) if id == "y" => {
                        b += &coef;
                        i += 1;
                    }
                    _ => c += &coef,
                }
                sign = Rat::from_integer(1.into());
                expect_term = false;
            }
            Some(Tok::Ident(id)) if expect_term && (id == "x" || id == "y") => {
                if id == "x" {
                    a += &sign;
                } else {
                    b += &sign;
                }
                sign = Rat::from_integer(1.into());
                i += 1;
                expect_term = false;
            }
            Some(Tok::Plus) if !expect_term => {
                i += 1;
                expect_term = true;
            }
            Some(Tok::Minus) if !expect_term => {
                sign = -Rat::from_integer(1.into());
                i += 1;
                expect_term = true;
            }
            _ if !expect_term => return Ok((a, b, c, i)),
            other => return Err(format!("unexpected token in affine term: {:?}", other)),
        }
    }
}

/// Parse an s-expression query under the database's language.
pub fn parse_query(text: &str, lang: Lang) -> Result<Query, ParseError> {
    let mut p = Parser::new(text, lang)?;
    p.expect(Tok::LParen, "'('")?;
    let head = match p.next() {
        Some(Spanned {
            tok: Tok::Ident(id),
            ..
        }) => id,
        _ => return p.fail("expected 'select' or 'construct'"),
    };
    let q = match head.as_str() {
        "select" => {
            p.expect(Tok::LParen, "'(' opening projection")?;
            let mut projection = std::collections::BTreeSet::new();
            while let Some(Tok::Var { .. }) = p.peek() {
                let Some(Spanned {
                    tok: Tok::Var { name, special },
                    ..
                }) = p.next()
                else {
                    unreachable!()
                };
                projection.insert(mk_var(name, special));
            }
            p.expect(Tok::RParen, "')' closing projection")?;
            let pattern = parse_pattern(&mut p)?;
            Query::Select(SelectQuery {
                projection,
                pattern,
            })
        }
        "construct" => {
            p.expect(Tok::LParen, "'(' opening template")?;
            let mut template = Vec::new();
            while p.peek() == Some(&Tok::LParen) {
                p.next();
                let s = parse_qterm(&mut p)?;
                let pr = parse_qterm(&mut p)?;
                let o = parse_qterm(&mut p)?;
                p.expect(Tok::RParen, "')' closing template triple")?;
                template.push(TemplateTriple { s, p: pr, o });
            }
            p.expect(Tok::RParen, "')' closing template")?;
            let pattern = parse_pattern(&mut p)?;
            Query::Construct(ConstructQuery { template, pattern })
        }
        other => return p.fail(format!("unknown query form {:?}", other)),
    };
    p.expect(Tok::RParen, "')' closing query")?;
    if !p.at_end() {
        return p.fail("trailing input after query");
    }
    Ok(q)
}

fn mk_var(name: String, special: bool) -> Variable {
    if special {
        Variable::special(name)
    } else {
        Variable::normal(name)
    }
}

fn parse_qterm(p: &mut Parser) -> Result<PatternTerm, ParseError> {
    if let Some(Tok::Var { .. }) = p.peek() {
        let Some(Spanned {
            tok: Tok::Var { name, special },
            ..
        }) = p.next()
        else {
            unreachable!()
        };
        return Ok(PatternTerm::Var(mk_var(name, special)));
    }
    Ok(PatternTerm::Term(parse_term(p)?))
}

fn parse_pattern(p: &mut Parser) -> Result<GraphPattern, ParseError> {
    p.expect(Tok::LParen, "'(' opening pattern")?;
    let head = match p.next() {
        Some(Spanned {
            tok: Tok::Ident(id),
            ..
        }) => id,
        _ => return p.fail("expected pattern operator"),
    };
    let out = match head.as_str() {
        "triple" => {
            let s = parse_qterm(p)?;
            let pr = parse_qterm(p)?;
            let o = parse_qterm(p)?;
            if matches!(s, PatternTerm::Term(Term::Blank(_)))
                || matches!(pr, PatternTerm::Term(Term::Blank(_)))
                || matches!(o, PatternTerm::Term(Term::Blank(_)))
            {
                return p.fail("blank nodes are not allowed in triple patterns");
            }
            GraphPattern::Triple(TriplePattern { s, p: pr, o })
        }
        "and" => {
            let l = parse_pattern(p)?;
            let r = parse_pattern(p)?;
            GraphPattern::and(l, r)
        }
        "union" => {
            let l = parse_pattern(p)?;
            let r = parse_pattern(p)?;
            GraphPattern::union(l, r)
        }
        "opt" => {
            let l = parse_pattern(p)?;
            let r = parse_pattern(p)?;
            GraphPattern::opt(l, r)
        }
        "filter" => {
            let inner = parse_pattern(p)?;
            let cond = parse_filter_expr(p)?;
            GraphPattern::filter(inner, cond)
        }
        other => return p.fail(format!("unknown pattern operator {:?}", other)),
    };
    p.expect(Tok::RParen, "')' closing pattern")?;
    Ok(out)
}

fn parse_filter_expr(p: &mut Parser) -> Result<FilterExpr, ParseError> {
    p.expect(Tok::LParen, "'(' opening filter expression")?;
    // connective forms (and e e) (or e e) (not e); anything else is an atom
    if let Some(Tok::Ident(id)) = p.peek() {
        let id = id.clone();
        if id == "and" || id == "or" || id == "not" {
            p.next();
            let out = match id.as_str() {
                "and" => Expr::and(parse_filter_expr(p)?, parse_filter_expr(p)?),
                "or" => Expr::or(parse_filter_expr(p)?, parse_filter_expr(p)?),
                _ => Expr::not(parse_filter_expr(p)?),
            };
            p.expect(Tok::RParen, "')'")?;
            return Ok(out);
        }
        if id == "true" || id == "false" {
            p.next();
            let atom = if id == "true" {
                FilterAtom::True
            } else {
                FilterAtom::False
            };
            p.expect(Tok::RParen, "')'")?;
            return Ok(Expr::Atom(atom));
        }
    }
    let atom = parse_filter_atom(p)?;
    p.expect(Tok::RParen, "')' closing filter atom")?;
    Ok(Expr::Atom(atom))
}

fn parse_filter_atom(p: &mut Parser) -> Result<FilterAtom, ParseError> {
    match p.lang {
        Lang::Pcl | Lang::Tcl => {
            let l = parse_filter_topo_term(p)?;
            let rel = match p.next() {
                Some(Spanned {
                    tok: Tok::Ident(id),
                    ..
                }) => TopoRel::from_name(&id)
                    .ok_or(())
                    .or_else(|_| p.fail(format!("unknown topology relation {:?}", id)))?,
                _ => return p.fail("expected topology relation"),
            };
            let r = parse_filter_topo_term(p)?;
            Ok(FilterAtom::Topo {
                rel,
                l,
                r,
                neg: false,
            })
        }
        Lang::Ecl => {
            let l = parse_filter_ecl_term(p)?;
            let neg = match p.next() {
                Some(Spanned { tok: Tok::Eq, .. }) => false,
                Some(Spanned { tok: Tok::Neq, .. }) => true,
                _ => return p.fail("expected '=' or '!='"),
            };
            let r = parse_filter_ecl_term(p)?;
            Ok(FilterAtom::Eq { l, r, neg })
        }
        Lang::DiPcl | Lang::DePcl | Lang::Rcl => parse_filter_cmp(p),
    }
}

fn parse_filter_topo_term(p: &mut Parser) -> Result<QTerm, ParseError> {
    match p.next() {
        Some(Spanned {
            tok: Tok::Var { name, special },
            ..
        }) => {
            if !special {
                return p.fail("constraint atoms take special variables (?name!s)");
            }
            Ok(QTerm::Var(mk_var(name, true)))
        }
        Some(Spanned {
            tok: Tok::ELit(e), ..
        }) => Ok(QTerm::Lit(EName::new(e))),
        Some(Spanned { tok: Tok::Str(s), .. }) => match parse_polygon(&s) {
            Ok(poly) => Ok(QTerm::Const(ConstValue::Poly(poly))),
            Err(msg) => p.fail(format!("invalid polygon constant: {}", msg)),
        },
        _ => p.fail("expected variable, e-literal, or polygon constant"),
    }
}

fn parse_filter_ecl_term(p: &mut Parser) -> Result<QTerm, ParseError> {
    match p.next() {
        Some(Spanned {
            tok: Tok::Var { name, special },
            ..
        }) => {
            if !special {
                return p.fail("constraint atoms take special variables (?name!s)");
            }
            Ok(QTerm::Var(mk_var(name, true)))
        }
        Some(Spanned {
            tok: Tok::ELit(e), ..
        }) => Ok(QTerm::Lit(EName::new(e))),
        Some(Spanned {
            tok: Tok::EclConst(s),
            ..
        }) => Ok(QTerm::Const(ConstValue::Str(s))),
        _ => p.fail("expected variable, e-literal, or @\"constant\""),
    }
}

enum FOperand {
    Num(Rat),
    Scalar(QScalar),
}

fn parse_filter_scalar(p: &mut Parser) -> Result<FOperand, ParseError> {
    match p.next() {
        Some(Spanned { tok: Tok::Num(n), .. }) => Ok(FOperand::Num(n)),
        Some(Spanned {
            tok: Tok::Var { name, special },
            ..
        }) => {
            if !special {
                return p.fail("constraint atoms take special variables (?name!s)");
            }
            if p.lang == Lang::Rcl {
                return p.fail("rcl filter terms are coordinates: LLx(?b!s), ...");
            }
            Ok(FOperand::Scalar(QScalar {
                base: QTerm::Var(mk_var(name, true)),
                corner: None,
            }))
        }
        Some(Spanned {
            tok: Tok::ELit(e), ..
        }) => {
            if p.lang == Lang::Rcl {
                return p.fail("rcl filter terms are coordinates: LLx(_e:b), ...");
            }
            Ok(FOperand::Scalar(QScalar {
                base: QTerm::Lit(EName::new(e)),
                corner: None,
            }))
        }
        Some(Spanned {
            tok: Tok::Ident(id),
            ..
        }) => {
            let corner = match id.as_str() {
                "LLx" => Corner::Llx,
                "LLy" => Corner::Lly,
                "URx" => Corner::Urx,
                "URy" => Corner::Ury,
                other => return p.fail(format!("unknown coordinate function {:?}", other)),
            };
            if p.lang != Lang::Rcl {
                return p.fail("coordinate functions belong to rcl");
            }
            p.expect(Tok::LParen, "'('")?;
            let base = match p.next() {
                Some(Spanned {
                    tok: Tok::Var { name, special },
                    ..
                }) => {
                    if !special {
                        return p.fail("constraint atoms take special variables (?name!s)");
                    }
                    QTerm::Var(mk_var(name, true))
                }
                Some(Spanned {
                    tok: Tok::ELit(e), ..
                }) => QTerm::Lit(EName::new(e)),
                Some(Spanned {
                    tok: Tok::LBracket,
                    ..
                }) => {
                    let b = parse_box_body(p)?;
                    p.expect(Tok::RParen, "')'")?;
                    return Ok(FOperand::Num(b.coord(corner).clone()));
                }
                _ => return p.fail("expected box variable or constant"),
            };
            p.expect(Tok::RParen, "')'")?;
            Ok(FOperand::Scalar(QScalar {
                base,
                corner: Some(corner),
            }))
        }
        _ => p.fail("expected number, variable, or coordinate term"),
    }
}

fn parse_filter_cmp(p: &mut Parser) -> Result<FilterAtom, ParseError> {
    // side := [-] operand ("-" operand | "+" operand)*
    let parse_side = |p: &mut Parser| -> Result<(Option<QScalar>, Option<QScalar>, Rat), ParseError> {
        let mut pos: Option<QScalar> = None;
        let mut neg: Option<QScalar> = None;
        let mut offset = Rat::zero();
        let mut negate_next = if p.peek() == Some(&Tok::Minus) {
            p.next();
            true
        } else {
            false
        };
        loop {
            match parse_filter_scalar(p)? {
                FOperand::Num(n) => {
                    if negate_next {
                        offset -= n;
                    } else {
                        offset += n;
                    }
                }
                FOperand::Scalar(s) => {
                    if negate_next {
                        if neg.is_some() {
                            return p.fail("at most two variables in a difference term");
                        }
                        neg = Some(s);
                    } else {
                        if pos.is_some() {
                            return p.fail("difference terms combine variables with '-'");
                        }
                        pos = Some(s);
                    }
                }
            }
            match p.peek() {
                Some(Tok::Minus) => {
                    p.next();
                    negate_next = true;
                }
                Some(Tok::Plus) => {
                    p.next();
                    negate_next = false;
                }
                _ => break,
            }
        }
        Ok((pos, neg, offset))
    };
    let (lpos, lneg, loff) = parse_side(p)?;
    let op = match p.next() {
        Some(Spanned { tok: Tok::Lt, .. }) => CmpOp::Lt,
        Some(Spanned { tok: Tok::Le, .. }) => CmpOp::Le,
        Some(Spanned { tok: Tok::Eq, .. }) => CmpOp::Eq,
        Some(Spanned { tok: Tok::Ge, .. }) => CmpOp::Ge,
        Some(Spanned { tok: Tok::Gt, .. }) => CmpOp::Gt,
        _ => return p.fail("expected comparison operator"),
    };
    let (rpos, rneg, roff) = parse_side(p)?;
    // lhs - rhs op bound with all constants folded
    if rpos.is_none() && rneg.is_none() {
        if lpos.is_none() && lneg.is_none() {
            let l = loff;
            return Ok(if op.eval(&l, &roff) {
                FilterAtom::True
            } else {
                FilterAtom::False
            });
        }
        return Ok(FilterAtom::Cmp {
            lhs: lpos,
            rhs: lneg,
            op,
            bound: roff - loff,
        });
    }
    if lpos.is_none() && lneg.is_none() {
        let flipped = match op {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
        };
        return Ok(FilterAtom::Cmp {
            lhs: rpos,
            rhs: rneg,
            op: flipped,
            bound: loff - roff,
        });
    }
    p.fail("one side of a difference constraint must be a constant")
}

/// Domain specification: one line per e-literal, `_e:name = c1 | c2 | ...`.
pub fn parse_domain(text: &str, lang: Lang) -> Result<DomainSpec, ParseError> {
    let mut p = Parser::new(text, lang)?;
    let mut out: DomainSpec = BTreeMap::new();
    while !p.at_end() {
        let name = match p.next() {
            Some(Spanned {
                tok: Tok::ELit(e), ..
            }) => EName::new(e),
            _ => return p.fail("expected e-literal at start of domain line"),
        };
        p.expect(Tok::Eq, "'='")?;
        let mut candidates = Vec::new();
        loop {
            candidates.push(parse_const(&mut p)?);
            if p.peek() == Some(&Tok::Pipe) {
                p.next();
            } else {
                break;
            }
        }
        out.insert(name, candidates);
    }
    Ok(out)
}

fn parse_const(p: &mut Parser) -> Result<ConstValue, ParseError> {
    match parse_term(p)? {
        Term::CLit(c) => Ok(c),
        other => p.fail(format!("expected a constraint constant, got {}", other)),
    }
}

/// A ground graph: triples without conditions, used by the certainty
/// decision.
pub fn parse_graph(text: &str, lang: Lang) -> Result<Vec<ETriple>, ParseError> {
    let mut p = Parser::new(text, lang)?;
    let mut out = Vec::new();
    while !p.at_end() {
        let s = parse_term(&mut p)?;
        let pr = parse_term(&mut p)?;
        let o = parse_term(&mut p)?;
        p.expect(Tok::Dot, "'.' terminating triple")?;
        let t = ETriple::new(s, pr, o);
        if !t.is_ground() {
            return p.fail("graph triples must be ground (no e-literals)");
        }
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}
