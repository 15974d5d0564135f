//! The expression language for describing sets.
//!
//! ```text
//! expr  := atom | op '(' expr (',' expr)* ')' | 'times' '(' int ',' expr ')'
//! atom  := 'empty' | 'inf' | 'N' | 'omega' | 'PN' | 'PPN'
//!        | 'A' '(' int ')' | 'z' '(' int ')' | 'v' '(' int ')' | 'hf"' word '"'
//! op    := 'union' | 'inter' | 'diff' | 'pair' | 'opair' | 'prod' | 'pow' | 'sum'
//! ```
//!
//! Whitespace between tokens is ignored. [`Expr`]'s `Display` is the
//! canonical form: no spaces, literals in bare brace words.

use std::fmt;

use thiserror::Error;

use crate::hf_kernel::{self, Hf, HfError, NOrdinal, ZNat};
use crate::set_rep::{Builtin, SetError, SetRef, Universe};

/// Largest von Neumann numeral accepted by `v(k)`; its word has `2^(k+1)` bytes.
pub const MAX_NEUMANN: u64 = 20;
pub const MAX_ZERMELO: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown name `{name}` at byte {pos}")]
    UnknownName { pos: usize, name: String },
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: String, got: usize },
    #[error("bad argument to `{name}`: {msg}")]
    BadArgument { name: String, msg: String },
    #[error("in hf literal: {0}")]
    Hf(#[from] HfError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Empty,
    Inf,
    Nat,
    Omega,
    PN,
    PPN,
    A(u32),
    Zermelo(u64),
    Neumann(u64),
    Lit(Hf),
    Union(Box<Expr>, Box<Expr>),
    Inter(Box<Expr>, Box<Expr>),
    /// `diff(b, a)`: the elements of `b` not in `a`.
    Diff(Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    OPair(Box<Expr>, Box<Expr>),
    Prod(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>),
    Sum(Vec<Expr>),
    Times(u64, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut fmt::Formatter<'_>, name: &str, a: &Expr, b: &Expr| write!(f, "{name}({a},{b})");
        match self {
            Expr::Empty => f.write_str("empty"),
            Expr::Inf => f.write_str("inf"),
            Expr::Nat => f.write_str("N"),
            Expr::Omega => f.write_str("omega"),
            Expr::PN => f.write_str("PN"),
            Expr::PPN => f.write_str("PPN"),
            Expr::A(i) => write!(f, "A({i})"),
            Expr::Zermelo(k) => write!(f, "z({k})"),
            Expr::Neumann(k) => write!(f, "v({k})"),
            Expr::Lit(h) => write!(f, "hf\"{h}\""),
            Expr::Union(a, b) => bin(f, "union", a, b),
            Expr::Inter(a, b) => bin(f, "inter", a, b),
            Expr::Diff(a, b) => bin(f, "diff", a, b),
            Expr::Pair(a, b) => bin(f, "pair", a, b),
            Expr::OPair(a, b) => bin(f, "opair", a, b),
            Expr::Prod(a, b) => bin(f, "prod", a, b),
            Expr::Pow(a) => write!(f, "pow({a})"),
            Expr::Sum(xs) => {
                f.write_str("sum(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Expr::Times(n, a) => write!(f, "times({n},{a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => self.err(format!("expected `{c}`, found `{d}`")),
            None => self.err(format!("expected `{c}`, found end of input")),
        }
    }

    fn ident(&mut self) -> Result<(usize, &'a str), ExprError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.src.len() - start);
        if len == 0 {
            return self.err("expected a name");
        }
        self.pos += len;
        Ok((start, &self.src[start..start + len]))
    }

    fn int(&mut self) -> Result<u64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..].find(|c: char| !c.is_ascii_digit()).unwrap_or(self.src.len() - start);
        if len == 0 {
            return self.err("expected a non-negative integer");
        }
        self.pos += len;
        self.src[start..self.pos].parse().or_else(|_| {
            self.pos = start;
            self.err("integer out of range")
        })
    }

    fn args(&mut self) -> Result<Vec<Expr>, ExprError> {
        self.expect('(')?;
        let mut out = vec![self.expr()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn int_arg(&mut self) -> Result<u64, ExprError> {
        self.expect('(')?;
        let k = self.int()?;
        self.expect(')')?;
        Ok(k)
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let (start, name) = self.ident()?;
        if name == "hf" && self.src[self.pos..].starts_with('"') {
            let body = self.pos + 1;
            let Some(len) = self.src[body..].find('"') else {
                return self.err("unterminated hf literal");
            };
            let h = hf_kernel::parse(&self.src[body..body + len]).map_err(|e| match e {
                HfError::MalformedWord { pos, reason } => {
                    ExprError::Syntax { pos: body + pos, msg: reason.to_string() }
                }
                e => e.into(),
            })?;
            self.pos = body + len + 1;
            return Ok(Expr::Lit(h));
        }
        let bad = |msg: String| ExprError::BadArgument { name: name.to_string(), msg };
        Ok(match name {
            "empty" => Expr::Empty,
            "inf" => Expr::Inf,
            "N" => Expr::Nat,
            "omega" => Expr::Omega,
            "PN" => Expr::PN,
            "PPN" => Expr::PPN,
            "A" => {
                let i = self.int_arg()?;
                match u32::try_from(i) {
                    Ok(i) if i >= 1 => Expr::A(i),
                    _ => return Err(bad(format!("index must be in 1..=2^32-1, got {i}"))),
                }
            }
            "z" => {
                let k = self.int_arg()?;
                if k > MAX_ZERMELO {
                    return Err(bad(format!("numeral {k} exceeds {MAX_ZERMELO}")));
                }
                Expr::Zermelo(k)
            }
            "v" => {
                let k = self.int_arg()?;
                if k > MAX_NEUMANN {
                    return Err(bad(format!("numeral {k} exceeds {MAX_NEUMANN}")));
                }
                Expr::Neumann(k)
            }
            "times" => {
                self.expect('(')?;
                let n = self.int()?;
                self.expect(',')?;
                let a = self.expr()?;
                self.expect(')')?;
                Expr::Times(n, Box::new(a))
            }
            "union" | "inter" | "diff" | "pair" | "opair" | "prod" | "pow" | "sum" => {
                let mut xs = self.args()?;
                let want = match name {
                    "pow" => 1,
                    "sum" => return Ok(Expr::Sum(xs)),
                    _ => 2,
                };
                if xs.len() != want {
                    return Err(ExprError::Arity { name: name.to_string(), expected: want.to_string(), got: xs.len() });
                }
                let a = Box::new(xs.remove(0));
                if name == "pow" {
                    return Ok(Expr::Pow(a));
                }
                let b = Box::new(xs.remove(0));
                match name {
                    "union" => Expr::Union(a, b),
                    "inter" => Expr::Inter(a, b),
                    "diff" => Expr::Diff(a, b),
                    "pair" => Expr::Pair(a, b),
                    "opair" => Expr::OPair(a, b),
                    _ => Expr::Prod(a, b),
                }
            }
            _ => return Err(ExprError::UnknownName { pos: start, name: name.to_string() }),
        })
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl Expr {
    /// Materializes the expression in `u`.
    pub fn build(&self, u: &Universe) -> Result<SetRef, SetError> {
        Ok(match self {
            Expr::Empty => u.builtin(Builtin::Empty)?,
            Expr::Inf => u.builtin(Builtin::Infinity)?,
            Expr::Nat => u.builtin(Builtin::N)?,
            Expr::Omega => u.builtin(Builtin::Omega)?,
            Expr::PN => u.builtin(Builtin::PowerN)?,
            Expr::PPN => u.builtin(Builtin::PerfectPN)?,
            Expr::A(i) => u.builtin(Builtin::PairsA(*i))?,
            Expr::Zermelo(k) => u.literal(ZNat::new(*k).value().clone()),
            Expr::Neumann(k) => u.literal(NOrdinal::new(*k).value().clone()),
            Expr::Lit(h) => u.literal(h.clone()),
            Expr::Union(a, b) => u.union(a.build(u)?, b.build(u)?),
            Expr::Inter(a, b) => u.intersection(a.build(u)?, b.build(u)?),
            Expr::Diff(b, a) => u.rel_complement(b.build(u)?, a.build(u)?),
            Expr::Pair(a, b) => u.pair(a.build(u)?, b.build(u)?),
            Expr::OPair(a, b) => u.ordered_pair(a.build(u)?, b.build(u)?),
            Expr::Prod(a, b) => u.cartesian(a.build(u)?, b.build(u)?),
            Expr::Pow(a) => u.power(a.build(u)?),
            Expr::Sum(xs) => {
                let parts = xs.iter().map(|x| x.build(u)).collect::<Result<Vec<_>, _>>()?;
                u.sum_indexed(&parts)
            }
            Expr::Times(n, a) => u.n_times(*n, a.build(u)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        for src in [
            "union(N, omega)",
            "times(3,  omega)",
            "sum(A(1),hf\"{ {}, {{}} }\",z(4))",
            "diff(PN,PPN)",
            "pow(v(3))",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
        assert_eq!(parse("hf\"{{},{{}}}\"").unwrap().to_string(), "hf\"{{}{{}}}\"");
    }

    #[test]
    fn rejects() {
        assert!(matches!(parse("foo"), Err(ExprError::UnknownName { .. })));
        assert!(matches!(parse("union(N)"), Err(ExprError::Arity { .. })));
        assert!(matches!(parse("A(0)"), Err(ExprError::BadArgument { .. })));
        assert!(matches!(parse("N N"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("hf\"{{}\""), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn builds() {
        let u = Universe::default();
        let n = parse("N").unwrap().build(&u).unwrap();
        assert_eq!(u.approx_of(n, 3).unwrap().to_string(), "{{}{{}}{{{}}}}");
    }
}
