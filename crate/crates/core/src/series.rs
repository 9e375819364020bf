//! Exact truncated power series in `q` with big-integer coefficients.
//!
//! A [`TruncatedSeries`] of order `N` stores the coefficients of `q^0..=q^N`.
//! Binary operations return a series whose order is the smaller of the two
//! input orders, so a result never claims more precision than its inputs.
//!
//! Coefficients are [`BigInt`]s. The multiplication, inversion and
//! product-accumulation kernels run on `i128` whenever a magnitude bound
//! proves the result fits, and fall back to big integers otherwise; either
//! way the answer is exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Headroom kept below `i128::MAX` by the small-integer kernels.
const SMALL_BITS: u64 = 126;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(0, order)
    }

    /// `q^exponent` truncated at `order`; the zero series if the exponent
    /// lies beyond the order.
    pub fn monomial(exponent: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if exponent <= order {
            s.coeffs[exponent] = BigInt::one();
        }
        s
    }

    /// Builds a series from its coefficient list; the order is `len - 1`.
    ///
    /// Panics if `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a truncated series needs at least one coefficient"
        );
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Highest reliable degree (inclusive).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&BigInt> {
        self.coeffs.get(n).ok_or(Error::IndexBeyondOrder {
            index: n,
            order: self.order(),
        })
    }

    /// Restricts to `min(order, self.order())`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Multiplies by `q^c`, keeping the order. Terms pushed past the order
    /// are dropped.
    pub fn shift(&self, c: usize) -> Self {
        let order = self.order();
        let mut out = Self::zero(order);
        if c <= order {
            out.coeffs[c..].clone_from_slice(&self.coeffs[..=order - c]);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Multiplicative inverse. The constant term must be `+1` or `-1`.
    pub fn invert(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.abs() != BigInt::one() {
            return Err(Error::NonUnitConstantTerm(c0.clone()));
        }
        let unit = if c0.is_positive() { 1 } else { -1 };
        if let Some(small) = to_small(&self.coeffs) {
            if let Some(inv) = invert_small(&small, unit) {
                return Ok(from_small(inv));
            }
        }
        Ok(Self {
            coeffs: invert_big(&self.coeffs, unit),
        })
    }

    /// Integer power; negative exponents go through [`invert`](Self::invert).
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let unit = mag.is_one();
            match n {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}")?;
                    }
                    if n == 1 {
                        f.write_str("q")?;
                    } else {
                        write!(f, "q^{n}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|n| &self.coeffs[n] + &rhs.coeffs[n])
                .collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|n| &self.coeffs[n] - &rhs.coeffs[n])
                .collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        let a = &self.coeffs[..=order];
        let b = &rhs.coeffs[..=order];
        // Outer loop over the sparser operand: theta sums and single
        // products are mostly zeros.
        let (a, b) = if nonzeros(a) <= nonzeros(b) {
            (a, b)
        } else {
            (b, a)
        };
        let bits = max_bits(a) + max_bits(b) + bit_len(order as u64 + 1);
        let coeffs = if bits <= SMALL_BITS {
            from_small(mul_small(&to_small(a).unwrap(), &to_small(b).unwrap())).into_coeffs()
        } else {
            mul_big(a, b)
        };
        TruncatedSeries { coeffs }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $method(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        -&self
    }
}

fn nonzeros(c: &[BigInt]) -> usize {
    c.iter().filter(|x| !x.is_zero()).count()
}

fn max_bits(c: &[BigInt]) -> u64 {
    c.iter().map(BigInt::bits).max().unwrap_or(0)
}

fn bit_len(x: u64) -> u64 {
    (u64::BITS - x.leading_zeros()) as u64
}

fn to_small(c: &[BigInt]) -> Option<Vec<i128>> {
    if max_bits(c) > SMALL_BITS {
        return None;
    }
    c.iter().map(ToPrimitive::to_i128).collect()
}

fn from_small(c: Vec<i128>) -> TruncatedSeries {
    TruncatedSeries {
        coeffs: c.into_iter().map(BigInt::from).collect(),
    }
}

fn mul_small(a: &[i128], b: &[i128]) -> Vec<i128> {
    let order = a.len() - 1;
    let mut out = vec![0i128; order + 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

fn mul_big(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let order = a.len() - 1;
    let mut out = vec![BigInt::zero(); order + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out[i..].iter_mut().zip(b) {
            if !y.is_zero() {
                *o += x * y;
            }
        }
    }
    out
}

fn invert_small(a: &[i128], unit: i128) -> Option<Vec<i128>> {
    let terms: Vec<(usize, i128)> = a
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| (k, c))
        .collect();
    let mut out = vec![0i128; a.len()];
    out[0] = unit;
    for n in 1..a.len() {
        let mut s = 0i128;
        for &(k, c) in &terms {
            if k > n {
                break;
            }
            s = s.checked_add(c.checked_mul(out[n - k])?)?;
        }
        out[n] = s.checked_mul(-unit)?;
    }
    Some(out)
}

fn invert_big(a: &[BigInt], unit: i128) -> Vec<BigInt> {
    let terms: Vec<(usize, &BigInt)> = a
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let mut out = vec![BigInt::zero(); a.len()];
    out[0] = BigInt::from(unit);
    for n in 1..a.len() {
        let mut s = BigInt::zero();
        for &(k, c) in &terms {
            if k > n {
                break;
            }
            s += c * &out[n - k];
        }
        out[n] = if unit == 1 { -s } else { s };
    }
    out
}

enum Buffer {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

/// In-place accumulator for long products of binomials `(1 ± q^d)^{±1}`.
///
/// Each multiplication or division by a binomial is a single O(N) sweep, so
/// a Pochhammer symbol with `N / t` factors costs O(N² / t) instead of a
/// chain of dense convolutions.
pub(crate) struct ProductAccumulator {
    buf: Buffer,
    /// Upper bound on the bit length of every stored coefficient.
    bits_bound: u64,
}

impl ProductAccumulator {
    pub(crate) fn new(order: usize) -> Self {
        let mut v = vec![0i128; order + 1];
        v[0] = 1;
        Self {
            buf: Buffer::Small(v),
            bits_bound: 1,
        }
    }

    fn order(&self) -> usize {
        match &self.buf {
            Buffer::Small(v) => v.len() - 1,
            Buffer::Big(v) => v.len() - 1,
        }
    }

    fn reserve_bits(&mut self, growth: u64) {
        if let Buffer::Small(v) = &self.buf {
            if self.bits_bound + growth > SMALL_BITS {
                self.bits_bound = v
                    .iter()
                    .map(|c| (u128::BITS - c.unsigned_abs().leading_zeros()) as u64)
                    .max()
                    .unwrap_or(0);
                if self.bits_bound + growth > SMALL_BITS {
                    self.buf = Buffer::Big(v.iter().map(|&c| BigInt::from(c)).collect());
                }
            }
        }
        self.bits_bound += growth;
    }

    /// Multiplies by `(1 + x q^degree)` with `x = ±1`.
    pub(crate) fn mul_binomial(&mut self, degree: usize, x: i32) {
        let order = self.order();
        if degree == 0 || degree > order {
            debug_assert!(degree > 0);
            return;
        }
        self.reserve_bits(1);
        match &mut self.buf {
            Buffer::Small(v) => {
                for n in (degree..=order).rev() {
                    let prev = v[n - degree];
                    if x > 0 {
                        v[n] += prev;
                    } else {
                        v[n] -= prev;
                    }
                }
            }
            Buffer::Big(v) => {
                for n in (degree..=order).rev() {
                    let (lo, hi) = v.split_at_mut(n);
                    if x > 0 {
                        hi[0] += &lo[n - degree];
                    } else {
                        hi[0] -= &lo[n - degree];
                    }
                }
            }
        }
    }

    /// Divides by `(1 + x q^degree)` with `x = ±1`.
    pub(crate) fn div_binomial(&mut self, degree: usize, x: i32) {
        let order = self.order();
        if degree == 0 || degree > order {
            debug_assert!(degree > 0);
            return;
        }
        self.reserve_bits(bit_len((order / degree) as u64 + 1));
        match &mut self.buf {
            Buffer::Small(v) => {
                for n in degree..=order {
                    let prev = v[n - degree];
                    if x > 0 {
                        v[n] -= prev;
                    } else {
                        v[n] += prev;
                    }
                }
            }
            Buffer::Big(v) => {
                for n in degree..=order {
                    let (lo, hi) = v.split_at_mut(n);
                    if x > 0 {
                        hi[0] -= &lo[n - degree];
                    } else {
                        hi[0] += &lo[n - degree];
                    }
                }
            }
        }
    }

    pub(crate) fn finish(self) -> TruncatedSeries {
        match self.buf {
            Buffer::Small(v) => from_small(v),
            Buffer::Big(v) => TruncatedSeries::from_coeffs(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_i64s(c)
    }

    #[test]
    fn one_and_identity() {
        assert_eq!(TruncatedSeries::one(3), s(&[1, 0, 0, 0]));
        assert_eq!(TruncatedSeries::one(0), s(&[1]));
        let a = s(&[3, -1, 4, 1]);
        assert_eq!(&TruncatedSeries::one(3) * &a, a);
    }

    #[test]
    fn add_sub_truncate_to_min_order() {
        assert_eq!(&s(&[1, 2]) + &s(&[0, 3]), s(&[1, 5]));
        let a = s(&[1, 2, 3, 4, 5, 6]);
        let b = s(&[1, 1, 1, 1]);
        assert_eq!((&a + &b).order(), 3);
        assert_eq!(&a - &b, s(&[0, 1, 2, 3]));
        assert_eq!(&a + &TruncatedSeries::zero(5), a);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&s(&[1, 1]) * &s(&[1, 1]), s(&[1, 2]));
        assert_eq!(&s(&[1, -1, 0, 0]) * &s(&[1, 1, 1, 1]), s(&[1, 0, 0, 0]));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(s(&[1, -1, 0, 0]).invert().unwrap(), s(&[1, 1, 1, 1]));
        assert_eq!(
            TruncatedSeries::one(4).invert().unwrap(),
            TruncatedSeries::one(4)
        );
        let neg = s(&[-1, 2, 0, 5]);
        assert_eq!(&neg * &neg.invert().unwrap(), TruncatedSeries::one(3));
    }

    #[test]
    fn invert_rejects_non_units() {
        assert_eq!(
            s(&[2, 1]).invert(),
            Err(Error::NonUnitConstantTerm(BigInt::from(2)))
        );
        assert!(matches!(
            s(&[0, 1]).invert(),
            Err(Error::NonUnitConstantTerm(_))
        ));
    }

    #[test]
    fn shift_examples() {
        let a = s(&[1, 2, 3]);
        assert_eq!(a.shift(1), s(&[0, 1, 2]));
        assert_eq!(a.shift(0), a);
        assert_eq!(a.shift(7), TruncatedSeries::zero(2));
        assert_eq!(a.shift(1).shift(1), a.shift(2));
    }

    #[test]
    fn pow_examples() {
        let a = s(&[1, 1]);
        assert_eq!(a.pow(0).unwrap(), TruncatedSeries::one(1));
        assert_eq!(a.pow(1).unwrap(), a);
        assert_eq!(a.pow(2).unwrap(), s(&[1, 2]));
        let b = s(&[1, -1, 0, 0, 0]);
        assert_eq!(b.pow(-2).unwrap(), s(&[1, 2, 3, 4, 5]));
        assert!(s(&[3, 1]).pow(-1).is_err());
    }

    #[test]
    fn coeff_bounds() {
        let one = TruncatedSeries::one(5);
        assert_eq!(one.coeff(0).unwrap(), &BigInt::one());
        assert_eq!(one.coeff(3).unwrap(), &BigInt::zero());
        assert_eq!(
            one.coeff(6),
            Err(Error::IndexBeyondOrder { index: 6, order: 5 })
        );
    }

    #[test]
    fn big_coefficients_take_the_exact_path() {
        let huge: BigInt = BigInt::from(1u8) << 100;
        let a = TruncatedSeries::from_coeffs(vec![BigInt::one(), huge.clone(), huge.clone()]);
        let sq = &a * &a;
        assert_eq!(sq.coeffs()[1], &huge * 2);
        assert_eq!(sq.coeffs()[2], &huge * 2 + &huge * &huge);
        let inv = a.invert().unwrap();
        assert_eq!(&a * &inv, TruncatedSeries::one(2));
    }

    #[test]
    fn accumulator_switches_to_big_integers() {
        // 1/(1-q)^k has coefficients C(n+k-1, k-1); push them past i128.
        let order = 60;
        let mut acc = ProductAccumulator::new(order);
        for _ in 0..120 {
            acc.div_binomial(1, -1);
        }
        let got = acc.finish();
        let geometric = s(&vec![1; order + 1]);
        assert_eq!(got, geometric.pow(120).unwrap());
        assert!(got.coeffs()[order].bits() > 127);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(s(&[1, -2, 0, 1]).to_string(), "1 - 2q + q^3 + O(q^4)");
        assert_eq!(TruncatedSeries::zero(1).to_string(), "0 + O(q^2)");
    }
}
