//! Canonical prefix text form.
//!
//! ```text
//! term  := atom | "(" op term* ")" | "(" "fold" binop term term ")"
//! atom  := var | PVAR | integer | "[]" | prim
//! var   := x | y | z | p | q | r | xs | ys
//! PVAR  := [A-Z][0-9]*          (A = index 0, ..., Z = 25, A1 = 26, ...)
//! binop := + | - | *
//! ```
//!
//! Boolean constants print as `0` and `1`; a numeral parses as a boolean
//! exactly when its position expects sort `Bool`. A pattern variable takes its
//! sort from its argument position, or from an earlier occurrence.

use std::collections::HashMap;
use std::fmt;

use super::{BinOp, Const, Kind, Op, Prim, Sort, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected end of input")]
    Eof,
    #[error("unexpected token `{0}`")]
    Unexpected(String),
    #[error("unknown symbol `{0}`")]
    Unknown(String),
    #[error("sort mismatch at `{token}`: expected {expected}, found {found}")]
    Sort { token: String, expected: Sort, found: Sort },
    #[error("cannot infer the sort of pattern variable `{0}`")]
    AmbiguousPattern(String),
    #[error("trailing input after term: `{0}`")]
    Trailing(String),
    #[error("rule must have the form `lhs => rhs`")]
    RuleShape,
}

fn pvar_name(index: u16) -> String {
    let letter = (b'A' + (index % 26) as u8) as char;
    match index / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

fn parse_pvar_name(s: &str) -> Option<u16> {
    let mut chars = s.chars();
    let first = chars.next()?;
    if !first.is_ascii_uppercase() {
        return None;
    }
    let rest = chars.as_str();
    let round: u16 = if rest.is_empty() { 0 } else { rest.parse().ok().filter(|&n| n > 0)? };
    Some(round * 26 + (first as u8 - b'A') as u16)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Var(v) => f.write_str(v.name()),
            Kind::PVar(i) => f.write_str(&pvar_name(*i)),
            Kind::Const(Const::Int(v)) => write!(f, "{v}"),
            Kind::Const(Const::Bool(b)) => f.write_str(if *b { "1" } else { "0" }),
            Kind::Const(Const::Nil) => f.write_str("[]"),
            Kind::Prim(p) => f.write_str(p.name()),
            Kind::App(op, args) => {
                write!(f, "({}", op.symbol())?;
                if let Op::Fold(b) = op {
                    write!(f, " {}", b.symbol())?;
                }
                for a in args.iter() {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn tokenize(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' | ')' => {
                if let Some(s) = start.take() {
                    out.push(&text[s..i]);
                }
                out.push(&text[i..i + 1]);
            }
            c if c.is_whitespace() => {
                if let Some(s) = start.take() {
                    out.push(&text[s..i]);
                }
            }
            _ => {
                if start.is_none() {
                    start = Some(i);
                }
            }
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

fn op_from_symbol(s: &str) -> Option<Op> {
    Some(match s {
        "+" => Op::Add,
        "-" => Op::Sub,
        "*" => Op::Mul,
        "and" => Op::And,
        "or" => Op::Or,
        "not" => Op::Not,
        "map" => Op::Map,
        "filter" => Op::Filter,
        "fold" => Op::Fold(BinOp::Add),
        "reverse" => Op::Reverse,
        "length" => Op::Length,
        "append" => Op::Append,
        "cons" => Op::Cons,
        _ => return None,
    })
}

fn binop_from_symbol(s: &str) -> Option<BinOp> {
    BinOp::ALL.into_iter().find(|b| b.symbol() == s)
}

fn var_from_name(s: &str) -> Option<Var> {
    Var::ALL.into_iter().find(|v| v.name() == s)
}

fn prim_from_name(s: &str) -> Option<Prim> {
    Prim::FUNS.into_iter().chain(Prim::PREDS).find(|p| p.name() == s)
}

struct Parser<'a> {
    tokens: Vec<&'a str>,
    pos: usize,
    pvar_sorts: HashMap<u16, Sort>,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Result<&'a str, ParseError> {
        let t = self.tokens.get(self.pos).copied().ok_or(ParseError::Eof)?;
        self.pos += 1;
        Ok(t)
    }

    fn check(token: &str, expected: Option<Sort>, found: Sort) -> Result<(), ParseError> {
        match expected {
            Some(e) if e != found => Err(ParseError::Sort { token: token.to_string(), expected: e, found }),
            _ => Ok(()),
        }
    }

    fn term(&mut self, expected: Option<Sort>) -> Result<Term, ParseError> {
        let tok = self.next()?;
        if tok == "(" {
            let head = self.next()?;
            let mut op = op_from_symbol(head).ok_or_else(|| ParseError::Unknown(head.to_string()))?;
            if let Op::Fold(_) = op {
                let sym = self.next()?;
                op = Op::Fold(binop_from_symbol(sym).ok_or_else(|| ParseError::Unexpected(sym.to_string()))?);
            }
            Self::check(head, expected, op.result_sort())?;
            let args = op
                .arg_sorts()
                .iter()
                .map(|&s| self.term(Some(s)))
                .collect::<Result<Vec<_>, _>>()?;
            match self.next()? {
                ")" => Ok(Term::app_unchecked(op, args)),
                other => Err(ParseError::Unexpected(other.to_string())),
            }
        } else if tok == ")" {
            Err(ParseError::Unexpected(tok.to_string()))
        } else {
            self.atom(tok, expected)
        }
    }

    fn atom(&mut self, tok: &str, expected: Option<Sort>) -> Result<Term, ParseError> {
        if tok == "[]" {
            Self::check(tok, expected, Sort::IntList)?;
            return Ok(Term::nil());
        }
        if let Some(v) = var_from_name(tok) {
            Self::check(tok, expected, v.sort())?;
            return Ok(Term::var(v));
        }
        if let Some(p) = prim_from_name(tok) {
            Self::check(tok, expected, p.sort())?;
            return Ok(Term::prim(p));
        }
        if let Ok(n) = tok.parse::<i64>() {
            return match expected {
                Some(Sort::Bool) if n == 0 || n == 1 => Ok(Term::boolean(n == 1)),
                Some(Sort::Int) | None => Ok(Term::int(n)),
                Some(e) => Err(ParseError::Sort { token: tok.to_string(), expected: e, found: Sort::Int }),
            };
        }
        if let Some(idx) = parse_pvar_name(tok) {
            let sort = match (self.pvar_sorts.get(&idx).copied(), expected) {
                (Some(known), e) => {
                    Self::check(tok, e, known)?;
                    known
                }
                (None, Some(e)) => e,
                (None, None) => return Err(ParseError::AmbiguousPattern(tok.to_string())),
            };
            self.pvar_sorts.insert(idx, sort);
            return Ok(Term::pvar(idx, sort));
        }
        Err(ParseError::Unknown(tok.to_string()))
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(ParseError::Trailing(t.to_string())),
        }
    }
}

/// Parses one term. `expected` resolves bare pattern variables and boolean numerals at the root.
pub fn parse_term(text: &str, expected: Option<Sort>) -> Result<Term, ParseError> {
    let mut p = Parser { tokens: tokenize(text), pos: 0, pvar_sorts: HashMap::new() };
    let t = p.term(expected)?;
    p.finish()?;
    Ok(t)
}

/// Parses `lhs => rhs`; the right side inherits the left side's sort and pattern variable sorts.
pub fn parse_rule(text: &str, expected: Option<Sort>) -> Result<(Term, Term), ParseError> {
    let (l, r) = text.split_once("=>").ok_or(ParseError::RuleShape)?;
    let mut p = Parser { tokens: tokenize(l), pos: 0, pvar_sorts: HashMap::new() };
    let lhs = p.term(expected)?;
    p.finish()?;
    let mut q = Parser { tokens: tokenize(r), pos: 0, pvar_sorts: p.pvar_sorts };
    let rhs = q.term(Some(lhs.sort()))?;
    q.finish()?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_canonical_forms() {
        let t = parse_term("(+ x (* y 1))", None).unwrap();
        assert_eq!(t.to_string(), "(+ x (* y 1))");
        let t = parse_term("(fold - 0 (map inc xs))", None).unwrap();
        assert_eq!(t.op(), Some(Op::Fold(BinOp::Sub)));
        assert_eq!(t.to_string(), "(fold - 0 (map inc xs))");
    }

    #[test]
    fn boolean_numerals_follow_position() {
        let t = parse_term("(and p 1)", None).unwrap();
        assert_eq!(t.args()[1], Term::boolean(true));
        assert_eq!(parse_term("0", Some(Sort::Bool)).unwrap(), Term::boolean(false));
        assert_eq!(parse_term("0", None).unwrap(), Term::int(0));
    }

    #[test]
    fn pattern_variable_sorts() {
        let (l, r) = parse_rule("(and A (not A)) => 0", None).unwrap();
        assert_eq!(l.args()[0].sort(), Sort::Bool);
        assert_eq!(r, Term::boolean(false));
        let (_, r) = parse_rule("(reverse (reverse A)) => A", None).unwrap();
        assert_eq!(r.sort(), Sort::IntList);
        assert!(matches!(parse_term("A", None), Err(ParseError::AmbiguousPattern(_))));
        assert_eq!(pvar_name(27), "B1");
        assert_eq!(parse_pvar_name("B1"), Some(27));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(parse_term("(+ x)", None), Err(ParseError::Unexpected(_))));
        assert!(matches!(parse_term("(+ x p)", None), Err(ParseError::Sort { .. })));
        assert!(matches!(parse_term("(frob x)", None), Err(ParseError::Unknown(_))));
        assert!(matches!(parse_term("x y", None), Err(ParseError::Trailing(_))));
        assert!(matches!(parse_term("(+ x", None), Err(ParseError::Eof)));
        assert!(matches!(parse_rule("(+ x 0)", None), Err(ParseError::RuleShape)));
    }
}
