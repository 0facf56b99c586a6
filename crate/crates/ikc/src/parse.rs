//! S-expression readers for indexes, terms, types, environments and judgments.

use crate::env::{Env, Judgment};
use crate::error::{Error, Result};
use crate::index::Index;
use crate::term::{Term, VarKey};
use crate::types::{canonicalize, CanonType, TypeRaw};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    Word(String),
}

pub(crate) struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

fn lex(src: &str) -> Vec<(usize, Tok)> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'(' => out.push((i, Tok::LParen)),
            b')' => out.push((i, Tok::RParen)),
            b'[' => out.push((i, Tok::LBrack)),
            b']' => out.push((i, Tok::RBrack)),
            b';' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_whitespace() => {}
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && !matches!(bytes[i], b'(' | b')' | b'[' | b']' | b';')
                {
                    i += 1;
                }
                out.push((start, Tok::Word(src[start..i].to_string())));
                continue;
            }
        }
        i += 1;
    }
    out
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Parser {
    pub(crate) fn new(src: &str) -> Self {
        Parser { toks: lex(src), pos: 0, len: src.len() }
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len)
    }

    pub(crate) fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.here(), msg: msg.into() })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn expect(&mut self, t: Tok) -> Result<()> {
        match self.peek() {
            Some(x) if *x == t => {
                self.pos += 1;
                Ok(())
            }
            other => {
                let msg = format!("expected {t:?}, found {other:?}");
                self.err(msg)
            }
        }
    }

    pub(crate) fn word(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            other => {
                let msg = format!("expected a word, found {other:?}");
                self.err(msg)
            }
        }
    }

    pub(crate) fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            other => {
                let msg = format!("expected `{kw}`, found {other:?}");
                self.err(msg)
            }
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        let w = self.word()?;
        if !is_ident(&w) {
            self.pos -= 1;
            return self.err(format!("`{w}` is not an identifier"));
        }
        Ok(w)
    }

    pub(crate) fn nat(&mut self) -> Result<u32> {
        let w = self.word()?;
        match w.parse::<u32>() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos -= 1;
                self.err(format!("`{w}` is not a natural number"))
            }
        }
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            return self.err("trailing input");
        }
        Ok(())
    }

    pub(crate) fn index(&mut self) -> Result<Index> {
        self.expect(Tok::LBrack)?;
        let mut v = Vec::new();
        while self.peek() != Some(&Tok::RBrack) {
            if self.peek().is_none() {
                return self.err("unterminated index");
            }
            v.push(self.nat()?);
        }
        self.bump();
        Ok(Index::from(v))
    }

    pub(crate) fn term(&mut self) -> Result<Term> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
                let head = self.word()?;
                let t = match head.as_str() {
                    "lam" => {
                        let x = self.ident()?;
                        let l = self.index()?;
                        let body = self.term()?;
                        Term::abs(VarKey::new(&x, l), body)?
                    }
                    "app" => {
                        let m = self.term()?;
                        let n = self.term()?;
                        Term::app(m, n)?
                    }
                    other => return self.err(format!("unknown term form `{other}`")),
                };
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Word(_)) => {
                let x = self.ident()?;
                let l = self.index()?;
                Ok(Term::var(&x, l))
            }
            other => {
                let msg = format!("expected a term, found {other:?}");
                self.err(msg)
            }
        }
    }

    pub(crate) fn type_raw(&mut self) -> Result<TypeRaw> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
                let head = self.word()?;
                let t = match head.as_str() {
                    "w" => TypeRaw::Omega(self.index()?),
                    "->" => {
                        let a = self.type_raw()?;
                        let b = self.type_raw()?;
                        TypeRaw::arrow(a, b)
                    }
                    "^" => {
                        let mut acc = self.type_raw()?;
                        let b = self.type_raw()?;
                        acc = TypeRaw::inter(acc, b);
                        while self.peek() != Some(&Tok::RParen) && self.peek().is_some() {
                            let c = self.type_raw()?;
                            acc = TypeRaw::inter(acc, c);
                        }
                        acc
                    }
                    "e" => {
                        let i = self.nat()?;
                        let b = self.type_raw()?;
                        TypeRaw::exp(i, b)
                    }
                    other => return self.err(format!("unknown type form `{other}`")),
                };
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Word(_)) => Ok(TypeRaw::Atom(Arc::from(self.ident()?.as_str()))),
            other => {
                let msg = format!("expected a type, found {other:?}");
                self.err(msg)
            }
        }
    }

    pub(crate) fn canon_type(&mut self) -> Result<CanonType> {
        let raw = self.type_raw()?;
        canonicalize(&raw)
    }

    pub(crate) fn env(&mut self) -> Result<Env> {
        self.expect(Tok::LParen)?;
        let mut g = Env::new();
        while self.peek() == Some(&Tok::LParen) {
            self.bump();
            let x = self.ident()?;
            let l = self.index()?;
            let u = self.canon_type()?;
            self.expect(Tok::RParen)?;
            let k = VarKey::new(&x, l);
            if g.contains(&k) {
                return self.err(format!("variable {k} bound twice"));
            }
            g.insert(k, u);
        }
        self.expect(Tok::RParen)?;
        Ok(g)
    }

    pub(crate) fn judgment(&mut self) -> Result<Judgment> {
        self.expect(Tok::LParen)?;
        self.keyword("judg")?;
        let m = self.term()?;
        let g = self.env()?;
        let u = self.canon_type()?;
        self.expect(Tok::RParen)?;
        Ok(Judgment::new(m, g, u))
    }
}

pub fn parse_index(src: &str) -> Result<Index> {
    let mut p = Parser::new(src);
    let l = p.index()?;
    p.finish()?;
    Ok(l)
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser::new(src);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_type_raw(src: &str) -> Result<TypeRaw> {
    let mut p = Parser::new(src);
    let t = p.type_raw()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<CanonType> {
    canonicalize(&parse_type_raw(src)?)
}

pub fn parse_env(src: &str) -> Result<Env> {
    let mut p = Parser::new(src);
    let g = p.env()?;
    p.finish()?;
    Ok(g)
}

pub fn parse_judgment(src: &str) -> Result<Judgment> {
    let mut p = Parser::new(src);
    let j = p.judgment()?;
    p.finish()?;
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_term_examples() {
        let t = parse_term("(lam y [] y[])").unwrap();
        assert_eq!(t, Term::abs(VarKey::new("y", Index::empty()), Term::var("y", Index::empty())).unwrap());
        assert_eq!(parse_term("(app x[] x[1])").unwrap_err().kind(), "JoinabilityError");
        assert_eq!(parse_term("(app x[2] y[1])").unwrap_err().kind(), "DegreeError");
        assert_eq!(parse_term("(lam x [] y[]").unwrap_err().kind(), "SyntaxError");
    }

    #[test]
    fn whitespace_and_comments() {
        let a = parse_term("; identity\n(lam  y\n[ ]  y [])").unwrap();
        assert_eq!(a.to_string(), "(lam y [] y[])");
    }

    #[test]
    fn abs_degree_checked() {
        assert_eq!(parse_term("(lam x [] y[1])").unwrap_err().kind(), "DegreeError");
        assert!(parse_term("(lam x [1] y[])").is_ok());
    }

    #[test]
    fn term_round_trip() {
        let s = "(lam x [3 2] (lam y [3] (app y[3] (app x[3 2] (lam u [3 2 1] u[3 2 1])))))";
        assert_eq!(parse_term(s).unwrap().to_string(), s);
    }

    #[test]
    fn env_rejects_duplicates() {
        assert_eq!(parse_env("((x [] a) (x [] b))").unwrap_err().kind(), "SyntaxError");
    }

    #[test]
    fn judgment_round_trip() {
        let s = "(judg (app f[] x[]) ((f [] (-> a b)) (x [] a)) b)";
        assert_eq!(parse_judgment(s).unwrap().to_string(), s);
    }
}
