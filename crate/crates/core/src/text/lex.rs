//! Tokenizer shared by the database, query, domain, and graph formats.

use super::ParseError;
use crate::geom::Rat;
use num::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Iri(String),
    Blank(String),
    ELit(String),
    Str(String),
    EclConst(String),
    Num(Rat),
    Ident(String),
    Var { name: String, special: bool },
    Pragma(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Dot,
    Comma,
    AndAnd,
    OrOr,
    Pipe,
    Bang,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Minus,
    Plus,
    DtSep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let mut line = 1usize;
    let mut col = 1usize;
    let err = |line: usize, col: usize, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let push = |tok: Tok, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: tline,
                col: tcol,
            })
        };
        macro_rules! advance {
            ($n:expr) => {{
                for k in 0..$n {
                    if chars[i + k] == '\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                }
                i += $n;
            }};
        }
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                advance!(1);
            }
            '<' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    push(Tok::Le, &mut out);
                    advance!(2);
                } else {
                    // IRI reference or bare less-than
                    let mut j = i + 1;
                    let mut body = String::new();
                    let mut closed = false;
                    while j < chars.len() {
                        if chars[j] == '>' {
                            closed = true;
                            break;
                        }
                        if chars[j] == '\n' || chars[j] == ' ' {
                            break;
                        }
                        body.push(chars[j]);
                        j += 1;
                    }
                    if closed {
                        push(Tok::Iri(body), &mut out);
                        advance!(j + 1 - i);
                    } else {
                        push(Tok::Lt, &mut out);
                        advance!(1);
                    }
                }
            }
            '≤' => {
                push(Tok::Le, &mut out);
                advance!(1);
            }
            '≥' => {
                push(Tok::Ge, &mut out);
                advance!(1);
            }
            '∧' => {
                push(Tok::AndAnd, &mut out);
                advance!(1);
            }
            '∨' => {
                push(Tok::OrOr, &mut out);
                advance!(1);
            }
            '¬' => {
                push(Tok::Bang, &mut out);
                advance!(1);
            }
            '>' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    push(Tok::Ge, &mut out);
                    advance!(2);
                } else {
                    push(Tok::Gt, &mut out);
                    advance!(1);
                }
            }
            '&' => {
                if i + 1 < chars.len() && chars[i + 1] == '&' {
                    push(Tok::AndAnd, &mut out);
                    advance!(2);
                } else {
                    return Err(err(line, col, "expected '&&'".into()));
                }
            }
            '|' => {
                if i + 1 < chars.len() && chars[i + 1] == '|' {
                    push(Tok::OrOr, &mut out);
                    advance!(2);
                } else {
                    push(Tok::Pipe, &mut out);
                    advance!(1);
                }
            }
            '!' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    push(Tok::Neq, &mut out);
                    advance!(2);
                } else {
                    push(Tok::Bang, &mut out);
                    advance!(1);
                }
            }
            '=' => {
                push(Tok::Eq, &mut out);
                advance!(1);
            }
            '(' => {
                push(Tok::LParen, &mut out);
                advance!(1);
            }
            ')' => {
                push(Tok::RParen, &mut out);
                advance!(1);
            }
            '{' => {
                push(Tok::LBrace, &mut out);
                advance!(1);
            }
            '}' => {
                push(Tok::RBrace, &mut out);
                advance!(1);
            }
            '[' => {
                push(Tok::LBracket, &mut out);
                advance!(1);
            }
            ']' => {
                push(Tok::RBracket, &mut out);
                advance!(1);
            }
            ',' => {
                push(Tok::Comma, &mut out);
                advance!(1);
            }
            '+' => {
                push(Tok::Plus, &mut out);
                advance!(1);
            }
            '-' => {
                push(Tok::Minus, &mut out);
                advance!(1);
            }
            '.' => {
                push(Tok::Dot, &mut out);
                advance!(1);
            }
            '^' => {
                if i + 1 < chars.len() && chars[i + 1] == '^' {
                    push(Tok::DtSep, &mut out);
                    advance!(2);
                } else {
                    return Err(err(line, col, "expected '^^'".into()));
                }
            }
            '#' => {
                let mut j = i + 1;
                let mut name = String::new();
                while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                    name.push(chars[j]);
                    j += 1;
                }
                if name.is_empty() {
                    return Err(err(line, col, "expected pragma name after '#'".into()));
                }
                push(Tok::Pragma(name), &mut out);
                advance!(j - i);
            }
            '"' => {
                let (s, consumed) = lex_string(&chars, i, line, col)?;
                push(Tok::Str(s), &mut out);
                advance!(consumed);
            }
            '@' => {
                if i + 1 < chars.len() && chars[i + 1] == '"' {
                    let (s, consumed) = lex_string(&chars, i + 1, line, col + 1)?;
                    push(Tok::EclConst(s), &mut out);
                    advance!(consumed + 1);
                } else {
                    return Err(err(line, col, "expected '\"' after '@'".into()));
                }
            }
            '?' => {
                let mut j = i + 1;
                let mut name = String::new();
                while j < chars.len() && ident_char(chars[j]) {
                    name.push(chars[j]);
                    j += 1;
                }
                if name.is_empty() {
                    return Err(err(line, col, "expected variable name after '?'".into()));
                }
                let special = j + 1 < chars.len() && chars[j] == '!' && chars[j + 1] == 's';
                if special {
                    j += 2;
                }
                push(
                    Tok::Var {
                        name,
                        special,
                    },
                    &mut out,
                );
                advance!(j - i);
            }
            '_' => {
                if chars.get(i + 1) == Some(&':') {
                    let mut j = i + 2;
                    let mut name = String::new();
                    while j < chars.len() && ident_char(chars[j]) {
                        name.push(chars[j]);
                        j += 1;
                    }
                    if name.is_empty() {
                        return Err(err(line, col, "expected blank node label".into()));
                    }
                    push(Tok::Blank(name), &mut out);
                    advance!(j - i);
                } else if chars.get(i + 1) == Some(&'e') && chars.get(i + 2) == Some(&':') {
                    let mut j = i + 3;
                    let mut name = String::new();
                    while j < chars.len() && ident_char(chars[j]) {
                        name.push(chars[j]);
                        j += 1;
                    }
                    if name.is_empty() {
                        return Err(err(line, col, "expected e-literal name".into()));
                    }
                    push(Tok::ELit(name), &mut out);
                    advance!(j - i);
                } else {
                    return Err(err(line, col, "expected '_:' or '_e:'".into()));
                }
            }
            d if d.is_ascii_digit() => {
                let (num, consumed) = lex_number(&chars, i);
                push(Tok::Num(num), &mut out);
                advance!(consumed);
            }
            a if a.is_ascii_alphabetic() => {
                let mut j = i;
                let mut name = String::new();
                while j < chars.len() && ident_char(chars[j]) {
                    name.push(chars[j]);
                    j += 1;
                }
                push(Tok::Ident(name), &mut out);
                advance!(j - i);
            }
            other => {
                return Err(err(line, col, format!("unexpected character {:?}", other)));
            }
        }
    }
    Ok(out)
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == ':' || c == '.'
}

fn lex_string(
    chars: &[char],
    start: usize,
    line: usize,
    col: usize,
) -> Result<(String, usize), ParseError> {
    debug_assert_eq!(chars[start], '"');
    let mut s = String::new();
    let mut j = start + 1;
    while j < chars.len() {
        match chars[j] {
            '"' => return Ok((s, j + 1 - start)),
            '\\' => {
                let next = chars.get(j + 1).ok_or(ParseError {
                    line,
                    col,
                    msg: "unterminated escape".into(),
                })?;
                match next {
                    '"' => s.push('"'),
                    '\\' => s.push('\\'),
                    'n' => s.push('\n'),
                    other => {
                        return Err(ParseError {
                            line,
                            col,
                            msg: format!("unknown escape \\{}", other),
                        })
                    }
                }
                j += 2;
            }
            c => {
                s.push(c);
                j += 1;
            }
        }
    }
    Err(ParseError {
        line,
        col,
        msg: "unterminated string literal".into(),
    })
}

/// Integer, exact decimal, or fraction `p/q`.
fn lex_number(chars: &[char], start: usize) -> (Rat, usize) {
    let mut j = start;
    let mut int_part = String::new();
    while j < chars.len() && chars[j].is_ascii_digit() {
        int_part.push(chars[j]);
        j += 1;
    }
    // fraction
    if chars.get(j) == Some(&'/') && chars.get(j + 1).is_some_and(|c| c.is_ascii_digit()) {
        let mut denom = String::new();
        let mut k = j + 1;
        while k < chars.len() && chars[k].is_ascii_digit() {
            denom.push(chars[k]);
            k += 1;
        }
        let num: BigInt = int_part.parse().expect("digits");
        let den: BigInt = denom.parse().expect("digits");
        return (Rat::new(num, den), k - start);
    }
    // exact decimal
    if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|c| c.is_ascii_digit()) {
        let mut frac = String::new();
        let mut k = j + 1;
        while k < chars.len() && chars[k].is_ascii_digit() {
            frac.push(chars[k]);
            k += 1;
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let whole: BigInt = int_part.parse().expect("digits");
        let fpart: BigInt = frac.parse().expect("digits");
        return (Rat::new(whole * &scale + fpart, scale), k - start);
    }
    let num: BigInt = int_part.parse().expect("digits");
    (Rat::from_integer(num), j - start)
}
