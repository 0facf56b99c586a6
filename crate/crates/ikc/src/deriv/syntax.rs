use super::Derivation;
use crate::error::Result;
use crate::parse::{Parser, Tok};
use std::fmt::{self, Write};
use std::sync::Arc;

impl Parser {
    pub(crate) fn derivation(&mut self) -> Result<Derivation> {
        self.expect(Tok::LParen)?;
        let head = self.word()?;
        let d = match head.as_str() {
            "ax" => {
                let x = self.ident()?;
                Derivation::Ax(Arc::from(x.as_str()), self.canon_type()?)
            }
            "ax'" => {
                let x = self.ident()?;
                Derivation::AxMacro(Arc::from(x.as_str()), self.canon_type()?)
            }
            "w" => Derivation::Omega(self.term()?),
            "arrI" => {
                let x = self.ident()?;
                let l = self.index()?;
                let u = self.canon_type()?;
                let p = self.derivation()?;
                Derivation::arr_i(Arc::from(x.as_str()), l, u, p)
            }
            "arrIW" => {
                let x = self.ident()?;
                let l = self.index()?;
                let p = self.derivation()?;
                Derivation::arr_iw(Arc::from(x.as_str()), l, p)
            }
            "arrE" => {
                let a = self.derivation()?;
                Derivation::arr_e(a, self.derivation()?)
            }
            "interI" => {
                let a = self.derivation()?;
                Derivation::inter_i(a, self.derivation()?)
            }
            "interI'" => {
                let a = self.derivation()?;
                Derivation::InterIMacro(Box::new(a), Box::new(self.derivation()?))
            }
            "exp" => {
                let j = self.nat()?;
                Derivation::exp(j, self.derivation()?)
            }
            "sub" => {
                let p = self.derivation()?;
                let g = self.env()?;
                let u = self.canon_type()?;
                Derivation::sub(p, g, u)
            }
            other => return self.err(format!("unknown derivation rule `{other}`")),
        };
        self.expect(Tok::RParen)?;
        Ok(d)
    }
}

pub fn parse_derivation(src: &str) -> Result<Derivation> {
    let mut p = Parser::new(src);
    let d = p.derivation()?;
    p.finish()?;
    Ok(d)
}

fn pretty(d: &Derivation, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    out.push_str(&pad);
    let _ = match d {
        Derivation::Ax(x, t) => write!(out, "(ax {x} {t})"),
        Derivation::AxMacro(x, t) => write!(out, "(ax' {x} {t})"),
        Derivation::Omega(m) => write!(out, "(w {m})"),
        Derivation::ArrI(x, l, u, p) => {
            let _ = writeln!(out, "(arrI {x} {l} {u}");
            pretty(p, depth + 1, out);
            write!(out, ")")
        }
        Derivation::ArrIW(x, l, p) => {
            let _ = writeln!(out, "(arrIW {x} {l}");
            pretty(p, depth + 1, out);
            write!(out, ")")
        }
        Derivation::ArrE(a, b) | Derivation::InterI(a, b) | Derivation::InterIMacro(a, b) => {
            let _ = writeln!(out, "({}", d.rule_name());
            pretty(a, depth + 1, out);
            out.push('\n');
            pretty(b, depth + 1, out);
            write!(out, ")")
        }
        Derivation::Exp(j, p) => {
            let _ = writeln!(out, "(exp {j}");
            pretty(p, depth + 1, out);
            write!(out, ")")
        }
        Derivation::Sub(p, g, u) => {
            out.push_str("(sub\n");
            pretty(p, depth + 1, out);
            write!(out, "\n{pad}  {g}\n{pad}  {u})")
        }
    };
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        pretty(self, 0, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let src = "(sub (arrE (arrI y [] (-> a a) (ax y (-> a a))) (arrI z [] a (ax z a))) () (-> a a))";
        let d = parse_derivation(src).unwrap();
        let again = parse_derivation(&d.to_string()).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn macros_and_errors() {
        assert!(parse_derivation("(interI' (ax' x (^ a b)) (w x[]))").is_ok());
        assert_eq!(parse_derivation("(foo x a)").unwrap_err().kind(), "SyntaxError");
        assert_eq!(parse_derivation("(exp x (ax x a))").unwrap_err().kind(), "SyntaxError");
    }
}
