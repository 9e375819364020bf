//! A small expression language for q-products.
//!
//! ```text
//! expr    = term { ("+"|"-") term } ;
//! term    = factor { ("*"|"/") factor } ;
//! factor  = [ "-" ] atom [ "^" ["-"] int ] ;
//! atom    = poch | theta | named | qpow | int | "(" expr ")" ;
//! poch    = "(" arg { "," arg } ";" qpow ")" ;
//! arg     = [ "-" ] qpow ;
//! qpow    = "q" [ "^" int ] ;
//! theta   = ("T" | "TA") "[" int "," ["-"] int "]" ;
//! named   = "phi" | "psi" | "R" | "Rinv" | "E" int
//!         | "f" "(" int "," int [ "," sign "," sign ] ")" ;
//! sign    = "+" | "-" ;
//! ```
//!
//! A `(` opens a Pochhammer symbol exactly when a `;` appears at the same
//! nesting depth before its matching `)`. Every Pochhammer symbol is the
//! infinite product. Whitespace is ignored.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::error::Result;
use crate::series::TruncatedSeries;
use crate::theta::{self, Character, PochhammerFactor, Sign, ThetaSum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("value {value} at byte {position} is out of range (must be at least 1)")]
    OffsetOutOfRange { position: usize, value: i64 },
    #[error("integer literal at byte {position} does not fit in 64 bits")]
    IntegerOverflow { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::OffsetOutOfRange { position, .. }
            | ParseError::IntegerOverflow { position } => *position,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Named {
    Phi,
    Psi,
    R,
    Rinv,
    E(u64),
    F { x: u64, y: u64, sa: Sign, sb: Sign },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProductExpr {
    Int(u64),
    QPower(u64),
    /// Signed offsets (`-4` is `-q^4`) over a common modulus.
    Pochhammer {
        args: Vec<i64>,
        modulus: u64,
    },
    Theta {
        quad: u64,
        lin: i64,
        character: Character,
    },
    Named(Named),
    Neg(Box<ProductExpr>),
    Add(Box<ProductExpr>, Box<ProductExpr>),
    Sub(Box<ProductExpr>, Box<ProductExpr>),
    Mul(Box<ProductExpr>, Box<ProductExpr>),
    Div(Box<ProductExpr>, Box<ProductExpr>),
    Pow(Box<ProductExpr>, i64),
}

impl ProductExpr {
    fn precedence(&self) -> u8 {
        use ProductExpr::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(..) | Pow(..) => 3,
            _ => 4,
        }
    }

    /// Evaluates to a series of order `order`.
    pub fn eval(&self, order: usize) -> Result<TruncatedSeries> {
        use ProductExpr::*;
        if let Some(factors) = self.as_factors() {
            return Ok(theta::product(&factors?, order));
        }
        Ok(match self {
            Int(n) => TruncatedSeries::one(order).scale(&BigInt::from(*n)),
            QPower(c) => TruncatedSeries::monomial(*c as usize, order),
            Pochhammer { .. } => unreachable!("handled by the product path"),
            Theta {
                quad,
                lin,
                character,
            } => {
                let quad = i64::try_from(*quad).map_err(|_| {
                    crate::Error::InvalidArgument(format!("theta coefficient {quad} is too large"))
                })?;
                theta::theta_series(&ThetaSum::new(quad, *lin, *character)?, order)
            }
            Named(n) => match *n {
                self::Named::Phi => theta::phi(order),
                self::Named::Psi => theta::psi(order),
                self::Named::R => theta::rogers_ramanujan(order, false),
                self::Named::Rinv => theta::rogers_ramanujan(order, true),
                self::Named::E(j) => theta::eta_e(j, order)?,
                self::Named::F { x, y, sa, sb } => theta::theta_f(x, y, sa, sb, order)?,
            },
            Neg(x) => -x.eval(order)?,
            Add(a, b) => a.eval(order)? + b.eval(order)?,
            Sub(a, b) => a.eval(order)? - b.eval(order)?,
            Mul(a, b) => a.eval(order)? * b.eval(order)?,
            Div(a, b) => a.eval(order)? * b.eval(order)?.invert()?,
            Pow(x, e) => x.eval(order)?.pow(*e)?,
        })
    }

    /// Flattens pure products and quotients of Pochhammer symbols and `E_j`
    /// into one factor list, so they expand in a single in-place pass.
    fn as_factors(&self) -> Option<Result<Vec<PochhammerFactor>>> {
        use ProductExpr::*;
        let mut out: Vec<(i64, u64, i64)> = Vec::new();
        fn walk(e: &ProductExpr, power: i64, out: &mut Vec<(i64, u64, i64)>) -> bool {
            match e {
                Pochhammer { args, modulus } => {
                    out.extend(args.iter().map(|&a| (a, *modulus, power)));
                    true
                }
                Named(self::Named::E(j)) if *j >= 1 => {
                    out.push((*j as i64, *j, power));
                    true
                }
                Int(1) => true,
                Mul(a, b) => walk(a, power, out) && walk(b, power, out),
                Div(a, b) => walk(a, power, out) && walk(b, -power, out),
                Pow(x, e) => match power.checked_mul(*e) {
                    Some(p) => walk(x, p, out),
                    None => false,
                },
                _ => false,
            }
        }
        if !walk(self, 1, &mut out) || matches!(self, Int(_)) {
            return None;
        }
        Some(
            out.into_iter()
                .filter(|&(_, _, p)| p != 0)
                .map(|(a, m, p)| PochhammerFactor::signed(a, m, p))
                .collect(),
        )
    }

    /// Canonical text form; `parse(render(e)) == e`.
    pub fn render(&self) -> String {
        self.to_string()
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() >= min {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

impl fmt::Display for ProductExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ProductExpr::*;
        let qpow = |f: &mut fmt::Formatter<'_>, c: u64| {
            if c == 1 {
                f.write_str("q")
            } else {
                write!(f, "q^{c}")
            }
        };
        match self {
            Int(n) => write!(f, "{n}"),
            QPower(c) => qpow(f, *c),
            Pochhammer { args, modulus } => f.write_str(&theta::symbol_text(args, *modulus, 1)),
            Theta {
                quad,
                lin,
                character,
            } => {
                let tag = match character {
                    Character::Trivial => "T",
                    Character::Alternating => "TA",
                };
                write!(f, "{tag}[{quad},{lin}]")
            }
            Named(n) => match n {
                self::Named::Phi => f.write_str("phi"),
                self::Named::Psi => f.write_str("psi"),
                self::Named::R => f.write_str("R"),
                self::Named::Rinv => f.write_str("Rinv"),
                self::Named::E(j) => write!(f, "E{j}"),
                self::Named::F { x, y, sa, sb } => {
                    if *sa == Sign::Plus && *sb == Sign::Plus {
                        write!(f, "f({x},{y})")
                    } else {
                        let s = |s: &Sign| if *s == Sign::Plus { '+' } else { '-' };
                        write!(f, "f({x},{y},{},{})", s(sa), s(sb))
                    }
                }
            },
            Neg(x) => {
                // `-` binds to a single atom, optionally raised to a power.
                f.write_str("-")?;
                x.fmt_at(f, if matches!(**x, Pow(..)) { 3 } else { 4 })
            }
            Add(a, b) | Sub(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(if matches!(self, Add(..)) { "+" } else { "-" })?;
                b.fmt_at(f, 2)
            }
            Mul(a, b) | Div(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str(if matches!(self, Mul(..)) { "*" } else { "/" })?;
                b.fmt_at(f, 3)
            }
            Pow(x, e) => {
                // `q^2` already means the monomial, so a power of `q` itself
                // needs its base parenthesized.
                if **x == QPower(1) {
                    f.write_str("(q)")?;
                } else {
                    x.fmt_at(f, 4)?;
                }
                write!(f, "^{e}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i]
                .parse()
                .map_err(|_| ParseError::IntegerOverflow { position: start })?;
            out.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if b"+-*/^(),;[]".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            let found = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                position: i,
                expected: vec!["a token".into()],
                found: format!("`{found}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError::Syntax {
            position: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(&[&format!("`{c}`")])
        }
    }

    fn int(&mut self) -> PResult<u64> {
        match *self.peek() {
            Tok::Int(n) => {
                self.at += 1;
                Ok(n)
            }
            _ => self.error(&["an integer"]),
        }
    }

    fn signed_int(&mut self) -> PResult<i64> {
        let pos = self.pos();
        let neg = self.eat('-');
        let n = self.int()?;
        let n = i64::try_from(n).map_err(|_| ParseError::IntegerOverflow { position: pos })?;
        Ok(if neg { -n } else { n })
    }

    fn expr(&mut self) -> PResult<ProductExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = ProductExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = ProductExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<ProductExpr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = ProductExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = ProductExpr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> PResult<ProductExpr> {
        let neg = self.eat('-');
        let mut e = self.atom()?;
        if self.eat('^') {
            e = ProductExpr::Pow(Box::new(e), self.signed_int()?);
        }
        Ok(if neg {
            ProductExpr::Neg(Box::new(e))
        } else {
            e
        })
    }

    /// `q [^ int]`, returning the exponent and its position.
    fn qpow(&mut self) -> PResult<(u64, usize)> {
        let pos = self.pos();
        if *self.peek() != Tok::Ident("q".into()) {
            return self.error(&["`q`"]);
        }
        self.at += 1;
        if self.eat('^') {
            Ok((self.int()?, pos))
        } else {
            Ok((1, pos))
        }
    }

    fn positive(value: u64, position: usize) -> PResult<u64> {
        if value == 0 {
            Err(ParseError::OffsetOutOfRange { position, value: 0 })
        } else {
            Ok(value)
        }
    }

    fn opens_pochhammer(&self) -> bool {
        let mut depth = 0usize;
        for (t, _) in &self.toks[self.at..] {
            match t {
                Tok::Sym('(') | Tok::Sym('[') => depth += 1,
                Tok::Sym(')') | Tok::Sym(']') => {
                    depth -= 1;
                    if depth == 0 {
                        return false;
                    }
                }
                Tok::Sym(';') if depth == 1 => return true,
                Tok::End => return false,
                _ => {}
            }
        }
        false
    }

    fn atom(&mut self) -> PResult<ProductExpr> {
        const ATOM: &[&str] = &[
            "`(`",
            "an integer",
            "`q`",
            "`T`",
            "`TA`",
            "`phi`",
            "`psi`",
            "`R`",
            "`Rinv`",
            "`E`",
            "`f`",
        ];
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Sym('(') if self.opens_pochhammer() => {
                self.at += 1;
                let mut args = Vec::new();
                loop {
                    let neg = self.eat('-');
                    let (j, p) = self.qpow()?;
                    let j = Self::positive(j, p)? as i64;
                    args.push(if neg { -j } else { j });
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(';')?;
                let (m, p) = self.qpow()?;
                let modulus = Self::positive(m, p)?;
                self.expect(')')?;
                for &a in &args {
                    if a.unsigned_abs() > i64::MAX as u64 {
                        return Err(ParseError::IntegerOverflow { position: pos });
                    }
                }
                Ok(ProductExpr::Pochhammer { args, modulus })
            }
            Tok::Sym('(') => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Int(n) => {
                self.at += 1;
                Ok(ProductExpr::Int(n))
            }
            Tok::Ident(name) => match name.as_str() {
                "q" => Ok(ProductExpr::QPower(self.qpow()?.0)),
                "T" | "TA" => {
                    self.at += 1;
                    self.expect('[')?;
                    let quad = self.int()?;
                    self.expect(',')?;
                    let lin = self.signed_int()?;
                    self.expect(']')?;
                    let character = if name == "T" {
                        Character::Trivial
                    } else {
                        Character::Alternating
                    };
                    Ok(ProductExpr::Theta {
                        quad,
                        lin,
                        character,
                    })
                }
                "phi" | "psi" | "R" | "Rinv" => {
                    self.at += 1;
                    Ok(ProductExpr::Named(match name.as_str() {
                        "phi" => Named::Phi,
                        "psi" => Named::Psi,
                        "R" => Named::R,
                        _ => Named::Rinv,
                    }))
                }
                "E" => {
                    self.at += 1;
                    let p = self.pos();
                    let j = Self::positive(self.int()?, p)?;
                    Ok(ProductExpr::Named(Named::E(j)))
                }
                "f" => {
                    self.at += 1;
                    self.expect('(')?;
                    let p = self.pos();
                    let x = Self::positive(self.int()?, p)?;
                    self.expect(',')?;
                    let p = self.pos();
                    let y = Self::positive(self.int()?, p)?;
                    let (mut sa, mut sb) = (Sign::Plus, Sign::Plus);
                    if self.eat(',') {
                        sa = self.sign()?;
                        self.expect(',')?;
                        sb = self.sign()?;
                    }
                    self.expect(')')?;
                    Ok(ProductExpr::Named(Named::F { x, y, sa, sb }))
                }
                _ => self.error(ATOM),
            },
            _ => self.error(ATOM),
        }
    }

    fn sign(&mut self) -> PResult<Sign> {
        if self.eat('+') {
            Ok(Sign::Plus)
        } else if self.eat('-') {
            Ok(Sign::Minus)
        } else {
            self.error(&["`+`", "`-`"])
        }
    }
}

pub fn parse(text: &str) -> std::result::Result<ProductExpr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error(&["an operator", "end of input"]);
    }
    Ok(e)
}

impl std::str::FromStr for ProductExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        parse(s)
    }
}
