//! Residue-class dissection of power series and Hirschhorn-style
//! substitution proofs.
//!
//! [`h_kl`] keeps the terms whose exponent is `l (mod k)`. The rest of the
//! module deals with separable double sums
//! `Σ_{m,n} ε(m,n) q^{am·m² + bm·m + an·n² + bn·n}` and with proving that
//! `H_{k,l}(S₁ − q^e S₂) = 0` symbolically: the index pairs that land in the
//! residue class are parametrized by an affine map of ℤ², the two
//! resulting quadratics in `(r, s)` are matched by a unimodular change of
//! variables, and the whole argument is packaged as a
//! [`VanishingCertificate`] that [`verify_certificate`] re-checks from
//! scratch.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::theta::{index_bounds, min_quadratic, Character};

/// Keeps the coefficients at indices `≡ l (mod k)` and zeroes the rest.
///
/// Panics if `k == 0`.
pub fn h_kl(g: &TruncatedSeries, k: usize, l: usize) -> TruncatedSeries {
    assert!(k >= 1, "modulus must be positive");
    let l = l % k;
    let coeffs = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if n % k == l {
                c.clone()
            } else {
                BigInt::zero()
            }
        })
        .collect();
    TruncatedSeries::from_coeffs(coeffs)
}

/// Compressed view of one residue class: coefficient `n` of the result is
/// `g(kn + l)`.
pub fn extract(g: &TruncatedSeries, k: usize, l: usize) -> Result<TruncatedSeries> {
    assert!(k >= 1, "modulus must be positive");
    if l > g.order() {
        return Err(Error::ResidueBeyondOrder {
            residue: l,
            order: g.order(),
        });
    }
    Ok(TruncatedSeries::from_coeffs(
        g.coeffs()[l..].iter().step_by(k).cloned().collect(),
    ))
}

/// Inverse of [`extract`]: spreads `e` back out at stride `k` from offset
/// `l`, at order `order`.
pub fn embed(e: &TruncatedSeries, k: usize, l: usize, order: usize) -> TruncatedSeries {
    let mut coeffs = vec![BigInt::zero(); order + 1];
    for (n, c) in e.coeffs().iter().enumerate() {
        let at = k * n + l;
        if at > order {
            break;
        }
        coeffs[at] = c.clone();
    }
    TruncatedSeries::from_coeffs(coeffs)
}

/// `am·m² + bm·m + an·n² + bn·n` with a sign character on each index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadExponent {
    pub am: i64,
    pub bm: i64,
    pub an: i64,
    pub bn: i64,
    pub char_m: Character,
    pub char_n: Character,
}

impl QuadExponent {
    pub fn new(am: i64, bm: i64, an: i64, bn: i64) -> Result<Self> {
        Self::with_characters(am, bm, an, bn, Character::Trivial, Character::Trivial)
    }

    pub fn with_characters(
        am: i64,
        bm: i64,
        an: i64,
        bn: i64,
        char_m: Character,
        char_n: Character,
    ) -> Result<Self> {
        if am <= 0 || an <= 0 {
            return Err(Error::InvalidArgument(format!(
                "quadratic coefficients must be positive, got {am} and {an}"
            )));
        }
        Ok(Self {
            am,
            bm,
            an,
            bn,
            char_m,
            char_n,
        })
    }

    pub fn eval(&self, m: i64, n: i64) -> i64 {
        self.am * m * m + self.bm * m + self.an * n * n + self.bn * n
    }

    pub fn min_value(&self) -> i64 {
        min_quadratic(self.am, self.bm) + min_quadratic(self.an, self.bn)
    }

    /// `ε(m, n) ∈ {±1}`.
    pub fn sign(&self, m: i64, n: i64) -> i64 {
        let odd = (self.char_m == Character::Alternating && m.is_odd())
            ^ (self.char_n == Character::Alternating && n.is_odd());
        if odd {
            -1
        } else {
            1
        }
    }

    fn as_quadratic(&self) -> Quadratic2 {
        Quadratic2 {
            rr: self.am,
            rs: 0,
            ss: self.an,
            r: self.bm,
            s: self.bn,
            c: 0,
        }
    }

    fn as_parity(&self) -> Parity {
        Parity {
            r: self.char_m == Character::Alternating,
            s: self.char_n == Character::Alternating,
            c: false,
        }
    }
}

/// Text form `am,bm[:alt],an,bn[:alt]`; `:alt` marks an alternating index.
impl fmt::Display for QuadExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alt = |c: Character| {
            if c == Character::Alternating {
                ":alt"
            } else {
                ""
            }
        };
        write!(
            f,
            "{},{}{},{},{}{}",
            self.am,
            self.bm,
            alt(self.char_m),
            self.an,
            self.bn,
            alt(self.char_n)
        )
    }
}

impl FromStr for QuadExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected am,bm[:alt],an,bn[:alt], got `{s}`"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let linear = |p: &str| -> Result<(i64, Character)> {
            match p.split_once(':') {
                Some((v, "alt")) => {
                    Ok((v.trim().parse().map_err(|_| bad())?, Character::Alternating))
                }
                Some(_) => Err(bad()),
                None => Ok((p.parse().map_err(|_| bad())?, Character::Trivial)),
            }
        };
        let am = parts[0].parse().map_err(|_| bad())?;
        let (bm, char_m) = linear(parts[1])?;
        let an = parts[2].parse().map_err(|_| bad())?;
        let (bn, char_n) = linear(parts[3])?;
        Self::with_characters(am, bm, an, bn, char_m, char_n)
    }
}

/// `(r, s) ↦ M·(r, s)ᵀ + t` on ℤ².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AffineMap2 {
    pub matrix: [[i64; 2]; 2],
    pub translation: [i64; 2],
}

impl AffineMap2 {
    pub const IDENTITY: AffineMap2 = AffineMap2 {
        matrix: [[1, 0], [0, 1]],
        translation: [0, 0],
    };

    pub fn new(matrix: [[i64; 2]; 2], translation: [i64; 2]) -> Self {
        Self {
            matrix,
            translation,
        }
    }

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.matrix;
        a * d - b * c
    }

    pub fn apply(&self, r: i64, s: i64) -> (i64, i64) {
        let [[a, b], [c, d]] = self.matrix;
        let [t1, t2] = self.translation;
        (a * r + b * s + t1, c * r + d * s + t2)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap2) -> AffineMap2 {
        let [[a, b], [c, d]] = self.matrix;
        let [[e, f], [g, h]] = inner.matrix;
        let (t1, t2) = self.apply(inner.translation[0], inner.translation[1]);
        AffineMap2 {
            matrix: [
                [a * e + b * g, a * f + b * h],
                [c * e + d * g, c * f + d * h],
            ],
            translation: [t1, t2],
        }
    }

    fn max_abs(&self) -> i64 {
        let [[a, b], [c, d]] = self.matrix;
        let [t1, t2] = self.translation;
        [a, b, c, d, t1, t2].iter().map(|x| x.abs()).max().unwrap()
    }

    fn columns(&self) -> [(i64, i64); 2] {
        let [[a, b], [c, d]] = self.matrix;
        [(a, c), (b, d)]
    }
}

impl fmt::Display for AffineMap2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.matrix;
        let [t1, t2] = self.translation;
        write!(f, "{a},{b},{c},{d};{t1},{t2}")
    }
}

impl FromStr for AffineMap2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected a,b,c,d;t1,t2, got `{s}`"));
        let (m, t) = s.split_once(';').ok_or_else(bad)?;
        let m = parse_ints(m).ok_or_else(bad)?;
        let t = parse_ints(t).ok_or_else(bad)?;
        if m.len() != 4 || t.len() != 2 {
            return Err(bad());
        }
        Ok(Self::new([[m[0], m[1]], [m[2], m[3]]], [t[0], t[1]]))
    }
}

fn parse_ints(s: &str) -> Option<Vec<i64>> {
    s.split(',').map(|p| p.trim().parse().ok()).collect()
}

/// General quadratic `rr·r² + rs·rs + ss·s² + r·r + s·s + c` in `(r, s)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Quadratic2 {
    pub rr: i64,
    pub rs: i64,
    pub ss: i64,
    pub r: i64,
    pub s: i64,
    pub c: i64,
}

impl Quadratic2 {
    pub fn eval(&self, r: i64, s: i64) -> i64 {
        self.rr * r * r + self.rs * r * s + self.ss * s * s + self.r * r + self.s * s + self.c
    }

    /// `self ∘ map`, expanded.
    pub fn compose(&self, map: &AffineMap2) -> Quadratic2 {
        let [[a, b], [c, d]] = map.matrix;
        let [t1, t2] = map.translation;
        // x = a r + b s + t1, y = c r + d s + t2
        let Quadratic2 {
            rr: qx,
            rs: qxy,
            ss: qy,
            r: lx,
            s: ly,
            c: k,
        } = *self;
        Quadratic2 {
            rr: qx * a * a + qxy * a * c + qy * c * c,
            rs: 2 * qx * a * b + qxy * (a * d + b * c) + 2 * qy * c * d,
            ss: qx * b * b + qxy * b * d + qy * d * d,
            r: 2 * qx * a * t1 + qxy * (a * t2 + c * t1) + 2 * qy * c * t2 + lx * a + ly * c,
            s: 2 * qx * b * t1 + qxy * (b * t2 + d * t1) + 2 * qy * d * t2 + lx * b + ly * d,
            c: qx * t1 * t1 + qxy * t1 * t2 + qy * t2 * t2 + lx * t1 + ly * t2 + k,
        }
    }

    pub fn plus_constant(mut self, e: i64) -> Self {
        self.c += e;
        self
    }
}

impl fmt::Display for Quadratic2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (self.c, ""),
            (self.rr, "r^2"),
            (self.rs, "rs"),
            (self.ss, "s^2"),
            (self.r, "r"),
            (self.s, "s"),
        ];
        let mut first = true;
        for (v, mono) in terms {
            if v == 0 {
                continue;
            }
            let mag = v.abs();
            if first {
                if v < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if v < 0 { " - " } else { " + " })?;
            }
            first = false;
            if mag != 1 || mono.is_empty() {
                write!(f, "{mag}")?;
            }
            f.write_str(mono)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Sign character `(-1)^{r·[r] + s·[s] + [c]}` on the `(r, s)` lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Parity {
    pub r: bool,
    pub s: bool,
    pub c: bool,
}

impl Parity {
    fn compose(&self, map: &AffineMap2) -> Parity {
        let [[a, b], [c, d]] = map.matrix;
        let [t1, t2] = map.translation;
        let odd = |x: i64| x.is_odd();
        let bit = |flag: bool, v: i64| flag && odd(v);
        Parity {
            r: bit(self.r, a) ^ bit(self.s, c),
            s: bit(self.r, b) ^ bit(self.s, d),
            c: self.c ^ bit(self.r, t1) ^ bit(self.s, t2),
        }
    }
}

/// Exact expansion of `q^prefactor · Σ_{m,n} ε(m,n) q^{Q(m,n)}` by direct
/// enumeration of the index pairs.
pub fn lattice_sum(q: &QuadExponent, prefactor: u64, order: usize) -> Result<TruncatedSeries> {
    let min = q.min_value() + prefactor as i64;
    if min < 0 {
        return Err(Error::NegativeExponent { min });
    }
    let mut coeffs = vec![BigInt::zero(); order + 1];
    let budget = order as i64 - prefactor as i64;
    for m in indices_within(q.am, q.bm, budget - min_quadratic(q.an, q.bn)) {
        let em = q.am * m * m + q.bm * m;
        for n in indices_within(q.an, q.bn, budget - em) {
            let e = prefactor as i64 + em + q.an * n * n + q.bn * n;
            if (0..=order as i64).contains(&e) {
                coeffs[e as usize] += q.sign(m, n);
            }
        }
    }
    Ok(TruncatedSeries::from_coeffs(coeffs))
}

/// Indices `n` that can satisfy `a n² + b n <= room`; a superset, so callers
/// still filter by exponent.
fn indices_within(a: i64, b: i64, room: i64) -> std::ops::RangeInclusive<i64> {
    let floor = min_quadratic(a, b);
    if room < floor {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    // The part can dip below zero, so widen the budget by that dip.
    let widened = room - floor.min(0);
    index_bounds(2 * a as i128, 2 * b as i128, widened as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    pub vanishes: bool,
    /// First index in the residue class with a nonzero coefficient.
    pub first_violation: Option<usize>,
    #[serde(serialize_with = "crate::report::bigint_opt")]
    pub value: Option<BigInt>,
    pub order: usize,
}

/// Checks `H_{k,l}(S₁ − q^e S₂) = 0` up to `q^order` by expansion.
pub fn check_pair_numeric(
    q1: &QuadExponent,
    q2: &QuadExponent,
    e: u64,
    k: usize,
    l: usize,
    order: usize,
) -> Result<PairVerdict> {
    let diff = &lattice_sum(q1, 0, order)? - &lattice_sum(q2, e, order)?;
    let h = h_kl(&diff, k, l);
    let first = h.first_nonzero();
    Ok(PairVerdict {
        vanishes: first.is_none(),
        first_violation: first,
        value: first.map(|i| h.coeffs()[i].clone()),
        order,
    })
}

/// A double sum together with its `q`-power prefactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftedForm {
    pub form: QuadExponent,
    pub shift: u64,
}

impl ShiftedForm {
    pub fn new(form: QuadExponent, shift: u64) -> Self {
        Self { form, shift }
    }
}

/// Rewrites `H_{k,l}(q^a S₁ − q^b S₂)` as `H_{k,l'}(S − q^e S')` with `e ≥ 0`.
/// The two terms may swap, which only flips the overall sign.
pub fn normalize_pair(
    first: &ShiftedForm,
    second: &ShiftedForm,
    k: usize,
    l: usize,
) -> (QuadExponent, QuadExponent, u64, usize) {
    let (lo, hi) = if first.shift <= second.shift {
        (first, second)
    } else {
        (second, first)
    };
    let l = (l as i64 - lo.shift as i64).rem_euclid(k as i64) as usize;
    (lo.form, hi.form, hi.shift - lo.shift, l)
}

pub fn check_shifted_pair(
    first: &ShiftedForm,
    second: &ShiftedForm,
    k: usize,
    l: usize,
    order: usize,
) -> Result<PairVerdict> {
    let (q1, q2, e, l) = normalize_pair(first, second, k, l);
    check_pair_numeric(&q1, &q2, e, k, l, order)
}

pub fn prove_shifted_pair(
    first: &ShiftedForm,
    second: &ShiftedForm,
    k: usize,
    l: usize,
    bound: i64,
) -> Result<Option<VanishingCertificate>> {
    let (q1, q2, e, l) = normalize_pair(first, second, k, l);
    prove_pair(&q1, &q2, e, k, l, bound)
}

fn require_linear_mod_k(q: &QuadExponent, k: usize) -> Result<()> {
    let k = k as i64;
    if k < 1 || q.am % k != 0 || q.an % k != 0 {
        return Err(Error::PreconditionViolated(format!(
            "modulus {k} must divide both quadratic coefficients of {q}"
        )));
    }
    Ok(())
}

/// Index of the lattice `{(m, n): bm·m + bn·n ≡ 0 (mod k)}` in ℤ².
fn lattice_index(bm: i64, bn: i64, k: i64) -> i64 {
    k / bm.gcd(&bn).gcd(&k)
}

/// Parametrizes `{(m, n) : Q(m, n) ≡ l (mod k)}` as the image of an affine
/// map that is a bijection from ℤ².
///
/// Requires `k | am` and `k | an`, so the condition is linear:
/// `bm·m + bn·n ≡ l`. The returned basis has the smallest possible entries,
/// preferring positive determinant; the translation is the smallest
/// particular solution. Ties break lexicographically.
pub fn parametrize_congruence(q: &QuadExponent, k: usize, l: usize) -> Result<AffineMap2> {
    require_linear_mod_k(q, k)?;
    let k = k as i64;
    let b1 = q.bm.rem_euclid(k);
    let b2 = q.bn.rem_euclid(k);
    let l = (l as i64).rem_euclid(k);
    let g = b1.gcd(&b2).gcd(&k);
    if l % g != 0 {
        return Err(Error::Infeasible);
    }
    let index = lattice_index(b1, b2, k);
    let in_lattice = |m: i64, n: i64| (b1 * m + b2 * n).rem_euclid(k) == 0;

    // Triangular starting basis: (h, 0) and (m0, n0).
    let g1 = b1.gcd(&k);
    let h = k / g1;
    let n0 = g1 / g1.gcd(&b2);
    let m0 =
        solve_linear(b1, (-b2 * n0).rem_euclid(k), k).expect("n0 makes the congruence solvable");
    let (u, w) = gauss_reduce((h, 0), (m0, n0));
    debug_assert!(in_lattice(u.0, u.1) && in_lattice(w.0, w.1));

    let radius = [u.0, u.1, w.0, w.1].iter().map(|x| x.abs()).max().unwrap();
    let vectors: Vec<(i64, i64)> = (-radius..=radius)
        .flat_map(|m| (-radius..=radius).map(move |n| (m, n)))
        .filter(|&(m, n)| (m, n) != (0, 0) && in_lattice(m, n))
        .collect();
    type BasisKey = (i64, bool, i64, [i64; 4]);
    let mut best: Option<([[i64; 2]; 2], BasisKey)> = None;
    for &(a, c) in &vectors {
        for &(b, d) in &vectors {
            let det = a * d - b * c;
            if det.abs() != index {
                continue;
            }
            let entries = [a, b, c, d];
            let key = (
                entries.iter().map(|x| x.abs()).max().unwrap(),
                det < 0,
                entries.iter().map(|x| x.abs()).sum::<i64>(),
                entries.map(|x| -x),
            );
            if best.as_ref().is_none_or(|(_, k0)| key < *k0) {
                best = Some(([[a, b], [c, d]], key));
            }
        }
    }
    let matrix = best.expect("the reduced basis is itself a candidate").0;

    // Particular solution, then the smallest representative of its coset.
    let (pm, pn) = particular_solution(b1, b2, l, k);
    let cell = AffineMap2::new(matrix, [0, 0]);
    let reach = radius + 1;
    let mut translation = (pm, pn);
    let mut best_key = None;
    for x in -reach..=reach {
        for y in -reach..=reach {
            let (dm, dn) = cell.apply(x, y);
            let (m, n) = (pm + dm, pn + dn);
            let key = (m.abs().max(n.abs()), m.abs() + n.abs(), m, n);
            if best_key.is_none_or(|k0| key < k0) {
                best_key = Some(key);
                translation = (m, n);
            }
        }
    }
    Ok(AffineMap2::new(matrix, [translation.0, translation.1]))
}

/// Smallest nonnegative `x` with `a·x ≡ rhs (mod k)`, if any.
fn solve_linear(a: i64, rhs: i64, k: i64) -> Option<i64> {
    let eg = a.extended_gcd(&k);
    let g = eg.gcd;
    if rhs % g != 0 {
        return None;
    }
    let modulus = k / g;
    Some((eg.x * (rhs / g)).rem_euclid(modulus))
}

fn particular_solution(b1: i64, b2: i64, l: i64, k: i64) -> (i64, i64) {
    // b1·m + b2·n ≡ l: pick n so that gcd(b1, k) | l - b2·n, then solve for m.
    let g1 = b1.gcd(&k);
    for n in 0..k.max(1) {
        let rhs = (l - b2 * n).rem_euclid(k);
        if rhs % g1 == 0 {
            if let Some(m) = solve_linear(b1, rhs, k) {
                return (m, n);
            }
        }
    }
    unreachable!("feasibility was checked by the caller")
}

fn gauss_reduce(mut u: (i64, i64), mut w: (i64, i64)) -> ((i64, i64), (i64, i64)) {
    let dot = |x: (i64, i64), y: (i64, i64)| x.0 * y.0 + x.1 * y.1;
    if dot(u, u) > dot(w, w) {
        std::mem::swap(&mut u, &mut w);
    }
    loop {
        let nu = dot(u, u);
        let mu = Integer::div_floor(&(2 * dot(u, w) + nu), &(2 * nu));
        w = (w.0 - mu * u.0, w.1 - mu * u.1);
        if dot(w, w) >= nu {
            return (u, w);
        }
        std::mem::swap(&mut u, &mut w);
    }
}

/// Proof object for `H_{k,l}(S₁ − q^e S₂) = 0`.
///
/// `sigma1` maps ℤ² bijectively onto the index pairs of `S₁` whose exponent
/// is `≡ l (mod k)`, `sigma2` does the same for `S₂` with target `l − e`,
/// and both pull back to the same quadratic `matched_form` with the same
/// sign character. The two restricted sums are then term-by-term equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingCertificate {
    pub q1: QuadExponent,
    pub q2: QuadExponent,
    pub offset: u64,
    pub modulus: usize,
    pub residue: usize,
    pub sigma1: AffineMap2,
    pub sigma2: AffineMap2,
    pub matched_form: Quadratic2,
    pub matched_parity: Parity,
}

impl VanishingCertificate {
    /// Stable `key=value` text form, one field per line.
    pub fn to_text(&self) -> String {
        let p = |b: bool| u8::from(b);
        let m = &self.matched_form;
        let par = &self.matched_parity;
        format!(
            "modulus={}\nresidue={}\noffset={}\nq1={}\nq2={}\nsigma1={}\nsigma2={}\n\
             matched={},{},{},{},{},{}\nmatched_parity={},{},{}\n",
            self.modulus,
            self.residue,
            self.offset,
            self.q1,
            self.q2,
            self.sigma1,
            self.sigma2,
            m.rr,
            m.rs,
            m.ss,
            m.r,
            m.s,
            m.c,
            p(par.r),
            p(par.s),
            p(par.c)
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("certificate line `{line}` has no `=`"))
            })?;
            fields.insert(k.trim(), v.trim());
        }
        let get = |key: &str| {
            fields
                .get(key)
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("certificate is missing `{key}`")))
        };
        let num = |key: &str| -> Result<i64> {
            get(key)?.parse().map_err(|_| {
                Error::InvalidArgument(format!("certificate field `{key}` is not an integer"))
            })
        };
        let ints = |key: &str, len: usize| -> Result<Vec<i64>> {
            parse_ints(get(key)?)
                .filter(|v| v.len() == len)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("certificate field `{key}` is malformed"))
                })
        };
        let nonneg = |key: &str| -> Result<u64> {
            u64::try_from(num(key)?).map_err(|_| {
                Error::InvalidArgument(format!("certificate field `{key}` is negative"))
            })
        };
        let m = ints("matched", 6)?;
        let par = ints("matched_parity", 3)?;
        Ok(Self {
            q1: get("q1")?.parse()?,
            q2: get("q2")?.parse()?,
            offset: nonneg("offset")?,
            modulus: nonneg("modulus")? as usize,
            residue: nonneg("residue")? as usize,
            sigma1: get("sigma1")?.parse()?,
            sigma2: get("sigma2")?.parse()?,
            matched_form: Quadratic2 {
                rr: m[0],
                rs: m[1],
                ss: m[2],
                r: m[3],
                s: m[4],
                c: m[5],
            },
            matched_parity: Parity {
                r: par[0] != 0,
                s: par[1] != 0,
                c: par[2] != 0,
            },
        })
    }
}

/// Every unimodular affine map with entries in `[-bound, bound]`, in search
/// order: increasing largest absolute entry, then lexicographic on
/// `(a, b, c, d, t1, t2)`.
fn unimodular_candidates(bound: i64) -> Vec<AffineMap2> {
    let range = || -bound..=bound;
    let mut out = Vec::new();
    for a in range() {
        for b in range() {
            for c in range() {
                for d in range() {
                    if (a * d - b * c).abs() != 1 {
                        continue;
                    }
                    for t1 in range() {
                        for t2 in range() {
                            out.push(AffineMap2::new([[a, b], [c, d]], [t1, t2]));
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|m| {
        let [[a, b], [c, d]] = m.matrix;
        let [t1, t2] = m.translation;
        (m.max_abs(), [a, b, c, d, t1, t2])
    });
    out
}

/// Searches for a [`VanishingCertificate`] for `H_{k,l}(S₁ − q^e S₂) = 0`.
///
/// Returns `Ok(None)` when no change of variables with entries bounded by
/// `bound` identifies the two restricted sums. A `None` is not a disproof.
pub fn prove_pair(
    q1: &QuadExponent,
    q2: &QuadExponent,
    e: u64,
    k: usize,
    l: usize,
    bound: i64,
) -> Result<Option<VanishingCertificate>> {
    require_linear_mod_k(q1, k)?;
    require_linear_mod_k(q2, k)?;
    let l = l % k;
    let l2 = (l as i64 - e as i64).rem_euclid(k as i64) as usize;
    let sigma1 = match parametrize_congruence(q1, k, l) {
        Ok(s) => s,
        Err(Error::Infeasible) => return Ok(None),
        Err(err) => return Err(err),
    };
    let sigma2 = match parametrize_congruence(q2, k, l2) {
        Ok(s) => s,
        Err(Error::Infeasible) => return Ok(None),
        Err(err) => return Err(err),
    };
    let target = q1.as_quadratic().compose(&sigma1);
    let target_parity = q1.as_parity().compose(&sigma1);
    let base = q2.as_quadratic().compose(&sigma2).plus_constant(e as i64);
    let base_parity = q2.as_parity().compose(&sigma2);

    let found = unimodular_candidates(bound)
        .into_iter()
        .find(|tau| base.compose(tau) == target && base_parity.compose(tau) == target_parity);
    Ok(found.map(|tau| VanishingCertificate {
        q1: *q1,
        q2: *q2,
        offset: e,
        modulus: k,
        residue: l,
        sigma1,
        sigma2: sigma2.compose(&tau),
        matched_form: target,
        matched_parity: target_parity,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateFailure {
    /// `k` does not divide a quadratic coefficient, so the residue class is
    /// not cut out by a linear congruence.
    NotLinearModK {
        side: u8,
    },
    /// The map is not a bijection from ℤ² onto the residue class.
    WrongDeterminant {
        side: u8,
        det: i64,
        expected: i64,
    },
    /// Some image point has exponent outside the residue class.
    ImageLeavesResidueClass {
        side: u8,
    },
    /// The pulled-back quadratic differs from `matched_form`.
    FormMismatch {
        side: u8,
        actual: Quadratic2,
    },
    /// The pulled-back sign character differs from `matched_parity`.
    CharacterMismatch {
        side: u8,
    },
    /// A sampled point disagrees with the symbolic identities.
    SampleMismatch {
        r: i64,
        s: i64,
    },
    BadResidue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub failures: Vec<CertificateFailure>,
}

impl CertificateCheck {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

const SAMPLE_RADIUS: i64 = 6;

/// Re-derives everything a certificate claims, independently of
/// [`prove_pair`].
pub fn verify_certificate(cert: &VanishingCertificate) -> CertificateCheck {
    use CertificateFailure::*;
    let mut failures = Vec::new();
    let k = cert.modulus as i64;
    if k < 1 || cert.residue as i64 >= k {
        return CertificateCheck {
            failures: vec![BadResidue],
        };
    }
    let targets = [
        cert.residue as i64,
        (cert.residue as i64 - cert.offset as i64).rem_euclid(k),
    ];
    let sides = [
        (&cert.q1, &cert.sigma1, 0i64),
        (&cert.q2, &cert.sigma2, cert.offset as i64),
    ];
    for (i, (q, sigma, shift)) in sides.into_iter().enumerate() {
        let side = i as u8 + 1;
        if q.am % k != 0 || q.an % k != 0 {
            failures.push(NotLinearModK { side });
            continue;
        }
        let expected = lattice_index(q.bm.rem_euclid(k), q.bn.rem_euclid(k), k);
        if sigma.det().abs() != expected {
            failures.push(WrongDeterminant {
                side,
                det: sigma.det(),
                expected,
            });
        }
        let linear = |m: i64, n: i64| (q.bm * m + q.bn * n).rem_euclid(k);
        let columns_ok = sigma.columns().iter().all(|&(m, n)| linear(m, n) == 0);
        let [t1, t2] = sigma.translation;
        if !columns_ok || linear(t1, t2) != targets[i] {
            failures.push(ImageLeavesResidueClass { side });
        }
        let actual = q.as_quadratic().compose(sigma).plus_constant(shift);
        if actual != cert.matched_form {
            failures.push(FormMismatch { side, actual });
        }
        if q.as_parity().compose(sigma) != cert.matched_parity {
            failures.push(CharacterMismatch { side });
        }
    }
    if failures.is_empty() {
        'samples: for r in -SAMPLE_RADIUS..=SAMPLE_RADIUS {
            for s in -SAMPLE_RADIUS..=SAMPLE_RADIUS {
                let (m1, n1) = cert.sigma1.apply(r, s);
                let (m2, n2) = cert.sigma2.apply(r, s);
                let v1 = cert.q1.eval(m1, n1);
                let v2 = cert.offset as i64 + cert.q2.eval(m2, n2);
                let ok = v1 == v2
                    && v1 == cert.matched_form.eval(r, s)
                    && v1.rem_euclid(k) == cert.residue as i64
                    && cert.q1.sign(m1, n1) == cert.q2.sign(m2, n2);
                if !ok {
                    failures.push(SampleMismatch { r, s });
                    break 'samples;
                }
            }
        }
    }
    CertificateCheck { failures }
}
