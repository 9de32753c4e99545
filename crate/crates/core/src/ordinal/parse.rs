//! Text syntax for ordinals: `w^(w)*3 + w*2 + 5`.
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' factor)?      base of '^' must be w
//! atom   := 'w' | 'ω' | natural | '(' expr ')'
//! ```

use super::Ordinal;

const MAX_NESTING: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

pub fn parse_ordinal(src: &str) -> Result<Ordinal, ParseError> {
    let mut p = Parser {
        src,
        pos: 0,
        depth: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.err("nesting too deep"));
        }
        Ok(())
    }

    fn overflow(&self) -> ParseError {
        self.err("coefficient overflow")
    }

    fn expr(&mut self) -> Result<Ordinal, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        while self.eat('+') {
            let rhs = self.term()?;
            acc = acc.checked_add(&rhs).ok_or_else(|| self.overflow())?;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let rhs = self.factor()?;
            acc = acc.checked_mul(&rhs).ok_or_else(|| self.overflow())?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Ordinal, ParseError> {
        self.enter()?;
        let start = self.pos;
        let (base, is_omega) = self.atom()?;
        let out = if self.eat('^') {
            if !is_omega {
                return Err(ParseError {
                    pos: start,
                    msg: "only w may be raised to a power".to_string(),
                });
            }
            Ordinal::omega_pow(self.factor()?)
        } else {
            base
        };
        self.depth -= 1;
        Ok(out)
    }

    fn atom(&mut self) -> Result<(Ordinal, bool), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('w') | Some('ω') => {
                let c = self.peek().expect("peeked");
                self.pos += c.len_utf8();
                Ok((Ordinal::omega(), true))
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                let is_omega = v == Ordinal::omega();
                Ok((v, is_omega))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let n: u64 = self.src[start..self.pos]
                    .parse()
                    .map_err(|_| ParseError {
                        pos: start,
                        msg: "natural number too large".to_string(),
                    })?;
                Ok((Ordinal::nat(n), false))
            }
            Some(_) => Err(self.err("expected w, a natural number or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
