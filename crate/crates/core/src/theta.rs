//! Constructors for the named q-products and theta sums.
//!
//! Everything here returns a [`TruncatedSeries`]: q-Pochhammer symbols
//! `(±q^j; q^t)_∞`, the Euler products `E_j = (q^j; q^j)_∞`, one-dimensional
//! theta sums `Σ ε(n) q^{An²+Bn}`, Ramanujan's `f(a, b)` at monomial
//! arguments, `φ`, `ψ`, the Rogers–Ramanujan product quotient `R(q)`, and
//! the eight fixed products `a, b, a1, …, b3`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{ProductAccumulator, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Self {
        if v < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Sign character on a summation index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Character {
    #[default]
    Trivial,
    /// `(-1)^n`
    Alternating,
}

/// One symbol `(sign·q^offset; q^modulus)_∞` raised to `power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PochhammerFactor {
    sign: Sign,
    offset: u64,
    modulus: u64,
    power: i64,
}

impl PochhammerFactor {
    pub fn new(sign: Sign, offset: u64, modulus: u64, power: i64) -> Result<Self> {
        if offset == 0 {
            return Err(Error::InvalidFactor("offset must be at least 1".into()));
        }
        if modulus == 0 {
            return Err(Error::InvalidFactor("modulus must be at least 1".into()));
        }
        if power == 0 {
            return Err(Error::InvalidFactor("power must be nonzero".into()));
        }
        Ok(Self {
            sign,
            offset,
            modulus,
            power,
        })
    }

    /// Builds from a signed offset: `-4` means `(-q^4; q^t)_∞`.
    pub fn signed(offset: i64, modulus: u64, power: i64) -> Result<Self> {
        Self::new(
            Sign::from_i64(offset),
            offset.unsigned_abs(),
            modulus,
            power,
        )
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn power(&self) -> i64 {
        self.power
    }

    fn apply(&self, acc: &mut ProductAccumulator, order: usize) {
        // (sign·q^j; q^t)_∞ = Π_k (1 - sign·q^{j+tk})
        let x = -(self.sign.value() as i32);
        let mut degree = self.offset;
        while degree <= order as u64 {
            for _ in 0..self.power.unsigned_abs() {
                if self.power > 0 {
                    acc.mul_binomial(degree as usize, x);
                } else {
                    acc.div_binomial(degree as usize, x);
                }
            }
            degree += self.modulus;
        }
    }
}

/// Expands the product of all `factors` to order `order`.
pub fn product(factors: &[PochhammerFactor], order: usize) -> TruncatedSeries {
    let mut acc = ProductAccumulator::new(order);
    for f in factors {
        f.apply(&mut acc, order);
    }
    acc.finish()
}

pub fn pochhammer(factor: &PochhammerFactor, order: usize) -> TruncatedSeries {
    product(std::slice::from_ref(factor), order)
}

/// `E_j = (q^j; q^j)_∞`.
pub fn eta_e(j: u64, order: usize) -> Result<TruncatedSeries> {
    let f = PochhammerFactor::new(Sign::Plus, j, j, 1)
        .map_err(|_| Error::InvalidArgument(format!("E_j needs j >= 1, got {j}")))?;
    Ok(pochhammer(&f, order))
}

/// `Σ_{n∈ℤ} ε(n) q^{A n² + B n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThetaSum {
    quad: i64,
    lin: i64,
    character: Character,
}

impl ThetaSum {
    /// Rejects `A <= 0` and any form that takes a negative value on ℤ.
    pub fn new(quad: i64, lin: i64, character: Character) -> Result<Self> {
        if quad <= 0 {
            return Err(Error::InvalidArgument(format!(
                "theta sum needs a positive quadratic coefficient, got {quad}"
            )));
        }
        let min = min_quadratic(quad, lin);
        if min < 0 {
            return Err(Error::NegativeExponent { min });
        }
        Ok(Self {
            quad,
            lin,
            character,
        })
    }

    pub fn quad(&self) -> i64 {
        self.quad
    }

    pub fn lin(&self) -> i64 {
        self.lin
    }

    pub fn character(&self) -> Character {
        self.character
    }

    pub fn exponent(&self, n: i64) -> i64 {
        self.quad * n * n + self.lin * n
    }

    /// Every index that can contribute below `order`, padded by one on each
    /// side of the real roots.
    pub fn index_range(&self, order: usize) -> std::ops::RangeInclusive<i64> {
        index_bounds(2 * self.quad as i128, 2 * self.lin as i128, order)
    }
}

/// `min_{n∈ℤ} (a n² + b n)` for `a > 0`.
pub fn min_quadratic(a: i64, b: i64) -> i64 {
    let v = |n: i64| a * n * n + b * n;
    let vertex = Integer::div_floor(&-b, &(2 * a));
    v(vertex).min(v(vertex + 1))
}

/// Integer `n` range covering `(p n² + r n) / 2 <= order`, `p > 0`.
pub(crate) fn index_bounds(p: i128, r: i128, order: usize) -> std::ops::RangeInclusive<i64> {
    let disc = r * r + 8 * p * order as i128;
    let s = disc.sqrt();
    let lo = Integer::div_floor(&(-r - s - 1), &(2 * p)) - 1;
    let hi = Integer::div_ceil(&(-r + s + 1), &(2 * p)) + 1;
    (lo as i64)..=(hi as i64)
}

pub fn theta_series(theta: &ThetaSum, order: usize) -> TruncatedSeries {
    theta_series_over(theta, theta.index_range(order), order)
}

/// [`theta_series`] with an explicit summation range. Indices whose
/// exponent exceeds `order` are ignored.
pub fn theta_series_over(
    theta: &ThetaSum,
    range: std::ops::RangeInclusive<i64>,
    order: usize,
) -> TruncatedSeries {
    let mut coeffs = vec![BigInt::from(0); order + 1];
    for n in range {
        let e = theta.exponent(n);
        if e < 0 || e as u64 > order as u64 {
            continue;
        }
        let term = match theta.character {
            Character::Alternating if n.is_odd() => -1,
            _ => 1,
        };
        coeffs[e as usize] += term;
    }
    TruncatedSeries::from_coeffs(coeffs)
}

/// Ramanujan's `f(a, b)` at `a = sa·q^x`, `b = sb·q^y`, summed directly.
pub fn theta_f(x: u64, y: u64, sa: Sign, sb: Sign, order: usize) -> Result<TruncatedSeries> {
    if x == 0 || y == 0 {
        return Err(Error::InvalidArgument(format!(
            "f(q^x, q^y) needs positive exponents, got x={x}, y={y}"
        )));
    }
    let (x, y) = (x as i128, y as i128);
    let mut coeffs = vec![BigInt::from(0); order + 1];
    for n in index_bounds(x + y, x - y, order) {
        let n = n as i128;
        let up = n * (n + 1) / 2;
        let down = n * (n - 1) / 2;
        let e = x * up + y * down;
        if e > order as i128 {
            continue;
        }
        let mut term = 1;
        if sa == Sign::Minus && up.is_odd() {
            term = -term;
        }
        if sb == Sign::Minus && down.is_odd() {
            term = -term;
        }
        coeffs[e as usize] += term;
    }
    Ok(TruncatedSeries::from_coeffs(coeffs))
}

/// The Pochhammer factors of `(-a, -b, ab; ab)_∞` at `a = sa·q^x`,
/// `b = sb·q^y`.
///
/// When `sa·sb = -1` the base `ab` is negative, so the factor signs
/// alternate; those symbols are split into even and odd factors with
/// modulus `2(x+y)`.
pub fn triple_product_factors(x: u64, y: u64, sa: Sign, sb: Sign) -> Result<Vec<PochhammerFactor>> {
    if x == 0 || y == 0 {
        return Err(Error::InvalidArgument(format!(
            "f(q^x, q^y) needs positive exponents, got x={x}, y={y}"
        )));
    }
    let m = x + y;
    let mut out = Vec::with_capacity(6);
    if sa * sb == Sign::Plus {
        out.push(PochhammerFactor::new(sa.flip(), x, m, 1)?);
        out.push(PochhammerFactor::new(sb.flip(), y, m, 1)?);
        out.push(PochhammerFactor::new(Sign::Plus, m, m, 1)?);
    } else {
        for (s, j) in [(sa, x), (sb, y)] {
            // 1 + s(-1)^k q^{j+mk}
            out.push(PochhammerFactor::new(s.flip(), j, 2 * m, 1)?);
            out.push(PochhammerFactor::new(s, j + m, 2 * m, 1)?);
        }
        // 1 - (-1)^{k+1} q^{m(k+1)}
        out.push(PochhammerFactor::new(Sign::Minus, m, 2 * m, 1)?);
        out.push(PochhammerFactor::new(Sign::Plus, 2 * m, 2 * m, 1)?);
    }
    Ok(out)
}

/// `φ(q) = f(q, q)`.
pub fn phi(order: usize) -> TruncatedSeries {
    theta_f(1, 1, Sign::Plus, Sign::Plus, order).expect("valid arguments")
}

/// `ψ(q) = f(q, q³)`.
pub fn psi(order: usize) -> TruncatedSeries {
    theta_f(1, 3, Sign::Plus, Sign::Plus, order).expect("valid arguments")
}

/// `R(q) = (q, q⁴; q⁵)_∞ / (q², q³; q⁵)_∞`, or its reciprocal.
pub fn rogers_ramanujan(order: usize, inverted: bool) -> TruncatedSeries {
    let p = if inverted { -1 } else { 1 };
    let factors = [(1, p), (4, p), (2, -p), (3, -p)]
        .map(|(j, power)| PochhammerFactor::new(Sign::Plus, j, 5, power).expect("valid factor"));
    product(&factors, order)
}

/// The eight fixed products: Hirschhorn's `a`, `b` and the variants
/// `a1 … b3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedProduct {
    A,
    B,
    A1,
    B1,
    A2,
    B2,
    A3,
    B3,
}

/// `(signed offsets; q^modulus)_∞^power`
pub type SymbolSpec = (&'static [i64], u64, i64);

impl NamedProduct {
    pub const ALL: [NamedProduct; 8] = [
        NamedProduct::A,
        NamedProduct::B,
        NamedProduct::A1,
        NamedProduct::B1,
        NamedProduct::A2,
        NamedProduct::B2,
        NamedProduct::A3,
        NamedProduct::B3,
    ];

    pub fn symbols(self) -> [SymbolSpec; 2] {
        use NamedProduct::*;
        const A_SIDE: &[i64] = &[-1, -4];
        const B_SIDE: &[i64] = &[-2, -3];
        match self {
            A => [(A_SIDE, 5, 1), (&[1, 9], 10, 3)],
            B => [(B_SIDE, 5, 1), (&[3, 7], 10, 3)],
            A1 => [(A_SIDE, 5, 2), (&[4, 6], 10, 1)],
            B1 => [(B_SIDE, 5, 2), (&[2, 8], 10, 1)],
            A2 => [(A_SIDE, 5, 3), (&[2, 8], 10, 1)],
            B2 => [(B_SIDE, 5, 3), (&[4, 6], 10, 1)],
            A3 => [(A_SIDE, 5, 3), (&[3, 7], 10, 1)],
            B3 => [(B_SIDE, 5, 3), (&[1, 9], 10, 1)],
        }
    }

    pub fn factors(self) -> Vec<PochhammerFactor> {
        self.symbols()
            .iter()
            .flat_map(|&(args, modulus, power)| {
                args.iter().map(move |&a| {
                    PochhammerFactor::signed(a, modulus, power).expect("valid factor")
                })
            })
            .collect()
    }

    pub fn build(self, order: usize) -> TruncatedSeries {
        product(&self.factors(), order)
    }

    /// The product written in the expression language.
    pub fn expression(self) -> String {
        self.symbols()
            .iter()
            .map(|&(args, modulus, power)| symbol_text(args, modulus, power))
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn name(self) -> &'static str {
        use NamedProduct::*;
        match self {
            A => "a",
            B => "b",
            A1 => "a1",
            B1 => "b1",
            A2 => "a2",
            B2 => "b2",
            A3 => "a3",
            B3 => "b3",
        }
    }
}

pub(crate) fn symbol_text(args: &[i64], modulus: u64, power: i64) -> String {
    let qpow = |j: u64| {
        if j == 1 {
            "q".to_string()
        } else {
            format!("q^{j}")
        }
    };
    let args: Vec<String> = args
        .iter()
        .map(|&a| {
            let sign = if a < 0 { "-" } else { "" };
            format!("{sign}{}", qpow(a.unsigned_abs()))
        })
        .collect();
    let mut s = format!("({};{})", args.join(","), qpow(modulus));
    if power != 1 {
        s.push_str(&format!("^{power}"));
    }
    s
}

impl fmt::Display for NamedProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedProduct {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NamedProduct::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown named product `{s}`")))
    }
}
