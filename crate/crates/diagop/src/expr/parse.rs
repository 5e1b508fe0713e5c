//! Recursive-descent parser for generator expressions.

use std::collections::BTreeSet;

use super::{GenExpr, Pred};
use crate::DiagopError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Le,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> DiagopError {
        DiagopError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, DiagopError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                    continue;
                }
                b'+' => out.push((start, Tok::Plus)),
                b'-' => out.push((start, Tok::Minus)),
                b'*' => out.push((start, Tok::Star)),
                b'/' => out.push((start, Tok::Slash)),
                b'^' => out.push((start, Tok::Caret)),
                b'(' => out.push((start, Tok::LParen)),
                b')' => out.push((start, Tok::RParen)),
                b'{' => out.push((start, Tok::LBrace)),
                b'}' => out.push((start, Tok::RBrace)),
                b',' => out.push((start, Tok::Comma)),
                b'<' => {
                    if self.src.get(self.pos + 1) == Some(&b'=') {
                        out.push((start, Tok::Le));
                        self.pos += 1;
                    } else {
                        return Err(self.err("expected '<='"));
                    }
                }
                b'0'..=b'9' | b'.' => {
                    let mut end = self.pos;
                    let mut seen_dot = false;
                    while end < self.src.len() {
                        match self.src[end] {
                            b'0'..=b'9' => end += 1,
                            b'.' if !seen_dot => {
                                seen_dot = true;
                                end += 1;
                            }
                            _ => break,
                        }
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    let v: f64 = text
                        .parse()
                        .map_err(|_| self.err(format!("bad number `{text}`")))?;
                    out.push((start, Tok::Num(v)));
                    self.pos = end;
                    continue;
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut end = self.pos;
                    while end < self.src.len()
                        && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                    {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    out.push((start, Tok::Ident(text.to_string())));
                    self.pos = end;
                    continue;
                }
                other => {
                    return Err(self.err(format!("unexpected character `{}`", other as char)));
                }
            }
            self.pos += 1;
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    src_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> DiagopError {
        DiagopError::Syntax { pos: self.pos(), msg: msg.into() }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), DiagopError> {
        match self.peek() {
            Some(t) if t == want => {
                self.idx += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<GenExpr, DiagopError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    lhs = GenExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.idx += 1;
                    lhs = GenExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<GenExpr, DiagopError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.idx += 1;
                    lhs = GenExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.idx += 1;
                    lhs = GenExpr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<GenExpr, DiagopError> {
        if self.peek() == Some(&Tok::Minus) {
            self.idx += 1;
            let inner = self.factor()?;
            // Fold negated literals so printing round-trips the AST.
            return Ok(match inner {
                GenExpr::Const(c) => GenExpr::Const(-c),
                other => GenExpr::Neg(Box::new(other)),
            });
        }
        let base = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.idx += 1;
            let exp = self.factor()?; // right-associative
            return Ok(GenExpr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<GenExpr, DiagopError> {
        let pos = self.pos();
        let err_at = |msg: &str| DiagopError::Syntax { pos, msg: msg.into() };
        match self.bump() {
            Some(Tok::Num(v)) => Ok(GenExpr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "n" => Ok(GenExpr::Index),
                "k" | "m" => {
                    self.expect(&Tok::LParen, "`(` after pair accessor")?;
                    match self.bump() {
                        Some(Tok::Ident(arg)) if arg == "n" => {}
                        _ => return Err(self.err("pair accessor takes `n`")),
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(if name == "k" { GenExpr::PairK } else { GenExpr::PairM })
                }
                "exp2" => {
                    self.expect(&Tok::LParen, "`(` after exp2")?;
                    let e = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(GenExpr::Exp2(Box::new(e)))
                }
                "if" => {
                    let pred = self.pred()?;
                    match self.bump() {
                        Some(Tok::Ident(kw)) if kw == "then" => {}
                        _ => return Err(self.err("expected `then`")),
                    }
                    let then = self.expr()?;
                    match self.bump() {
                        Some(Tok::Ident(kw)) if kw == "else" => {}
                        _ => return Err(self.err("expected `else`")),
                    }
                    let els = self.expr()?;
                    Ok(GenExpr::If {
                        pred,
                        then: Box::new(then),
                        els: Box::new(els),
                    })
                }
                other => Err(DiagopError::UnknownSymbol { name: other.to_string() }),
            },
            _ => Err(err_at("expected an expression")),
        }
    }

    fn pred(&mut self) -> Result<Pred, DiagopError> {
        match self.bump() {
            Some(Tok::Ident(name)) => match name.as_str() {
                "n" => {
                    if self.peek() == Some(&Tok::Le) {
                        self.idx += 1;
                        let bound = self.int("bound of `n <=`")?;
                        return Ok(Pred::Le(bound));
                    }
                    match self.bump() {
                        Some(Tok::Ident(kw)) if kw == "in" => {}
                        _ => return Err(self.err("expected `<=` or `in` after `n`")),
                    }
                    self.expect(&Tok::LBrace, "`{`")?;
                    let mut set = BTreeSet::new();
                    if self.peek() != Some(&Tok::RBrace) {
                        loop {
                            set.insert(self.int("set element")?);
                            if self.peek() == Some(&Tok::Comma) {
                                self.idx += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(&Tok::RBrace, "`}`")?;
                    Ok(Pred::In(set))
                }
                "even" | "odd" => {
                    self.expect(&Tok::LParen, "`(`")?;
                    match self.bump() {
                        Some(Tok::Ident(arg)) if arg == "n" => {}
                        _ => return Err(self.err("parity predicate takes `n`")),
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(if name == "even" { Pred::Even } else { Pred::Odd })
                }
                other => Err(DiagopError::UnknownSymbol { name: other.to_string() }),
            },
            _ => Err(self.err("expected a predicate")),
        }
    }

    fn int(&mut self, what: &str) -> Result<u64, DiagopError> {
        match self.bump() {
            Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => {
                Ok(v as u64)
            }
            _ => Err(self.err(format!("expected integer {what}"))),
        }
    }
}

/// Parses a generator expression string into its AST.
pub fn parse_generator(text: &str) -> Result<GenExpr, DiagopError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, idx: 0, src_len: text.len() };
    let e = p.expr()?;
    if p.idx != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_paper_family_generators() {
        // A_{1/2}
        let a = parse_generator("2^(n^0.5)").unwrap();
        assert_eq!(a.eval(4), 4.0);
        // constant zero
        assert_eq!(parse_generator("0").unwrap(), GenExpr::Const(0.0));
        // B_1
        let b1 = parse_generator("k(n) + 1/(m(n)+2)").unwrap();
        assert!((b1.eval(1) - 4.0 / 3.0).abs() < 1e-15);
        assert!((b1.eval(6) - (2.0 + 0.25)).abs() < 1e-15); // <2,2> = 6
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse_generator("2^n^0.5").unwrap();
        // 2^(n^0.5), not (2^n)^0.5: at n = 4 both give 4; at n = 9 they differ.
        assert_eq!(e.eval(9), 8.0);
    }

    #[test]
    fn unary_minus_folds_constants() {
        assert_eq!(parse_generator("-2").unwrap(), GenExpr::Const(-2.0));
        let e = parse_generator("-n").unwrap();
        assert_eq!(e, GenExpr::Neg(Box::new(GenExpr::Index)));
        assert_eq!(e.eval(3), -3.0);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_generator("1 + ") {
            Err(DiagopError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_generator("2 ** 3") {
            Err(DiagopError::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_symbols_are_semantic_errors() {
        match parse_generator("x + 1") {
            Err(DiagopError::UnknownSymbol { name }) => assert_eq!(name, "x"),
            other => panic!("expected unknown symbol, got {other:?}"),
        }
    }

    #[test]
    fn trailing_input_rejected() {
        assert!(parse_generator("1 2").is_err());
        assert!(parse_generator("(1))").is_err());
    }
}
