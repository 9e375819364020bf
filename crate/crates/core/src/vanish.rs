//! The two-parameter product families, progression scans and sign scans.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::theta::{product, symbol_text, PochhammerFactor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Cube on the `(-q^r, -q^{t-r}; q^t)` side.
    A,
    /// Cube on the `(q^s, q^{2t-s}; q^{2t})` side.
    B,
}

impl FamilyKind {
    fn powers(self) -> (i64, i64) {
        match self {
            FamilyKind::A => (3, 1),
            FamilyKind::B => (1, 3),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::A => "a",
            FamilyKind::B => "b",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(FamilyKind::A),
            "b" => Ok(FamilyKind::B),
            _ => Err(Error::InvalidFamily(format!(
                "kind must be `a` or `b`, got `{s}`"
            ))),
        }
    }
}

/// `(-q^r, -q^{t-r}; q^t)_∞^i (q^s, q^{2t-s}; q^{2t})_∞^j` with
/// `(i, j) = (3, 1)` for kind `a` and `(1, 3)` for kind `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub r: u64,
    pub s: u64,
    pub t: u64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, r: u64, s: u64, t: u64) -> Result<Self> {
        if t < 5 {
            return Err(Error::InvalidFamily(format!(
                "t must be at least 5, got {t}"
            )));
        }
        if r == 0 || r >= t {
            return Err(Error::InvalidFamily(format!(
                "r must satisfy 0 < r < {t}, got {r}"
            )));
        }
        if s == 0 || s >= 2 * t || s == t {
            return Err(Error::InvalidFamily(format!(
                "s must satisfy 0 < s < {} and s != {t}, got {s}",
                2 * t
            )));
        }
        Ok(Self { kind, r, s, t })
    }

    /// Whether `t` is prime. Composite `t` is accepted for exploration.
    pub fn has_prime_modulus(&self) -> bool {
        let t = self.t;
        t >= 2
            && (2..)
                .take_while(|d| d * d <= t)
                .all(|d| !t.is_multiple_of(d))
    }

    pub fn factors(&self) -> Vec<PochhammerFactor> {
        let (i, j) = self.kind.powers();
        let (r, s, t) = (self.r as i64, self.s as i64, self.t);
        vec![
            PochhammerFactor::signed(-r, t, i).expect("validated"),
            PochhammerFactor::signed(-(t as i64 - r), t, i).expect("validated"),
            PochhammerFactor::signed(s, 2 * t, j).expect("validated"),
            PochhammerFactor::signed(2 * t as i64 - s, 2 * t, j).expect("validated"),
        ]
    }

    /// The product in the expression language.
    pub fn expression(&self) -> String {
        let (i, j) = self.kind.powers();
        let (r, s, t) = (self.r as i64, self.s as i64, self.t as i64);
        format!(
            "{}*{}",
            symbol_text(&[-r, -(t - r)], self.t, i),
            symbol_text(&[s, 2 * t - s], 2 * self.t, j)
        )
    }

    pub fn build(&self, order: usize) -> TruncatedSeries {
        product(&self.factors(), order)
    }

    /// All valid specs for one `t`, in `(kind, r, s)` order.
    pub fn enumerate(t: u64) -> Vec<FamilySpec> {
        let mut out = Vec::new();
        for kind in [FamilyKind::A, FamilyKind::B] {
            for r in 1..t {
                for s in (1..2 * t).filter(|&s| s != t) {
                    out.push(FamilySpec { kind, r, s, t });
                }
            }
        }
        out
    }
}

/// Written `a_{r,s,t}` as `a,r,s,t`.
impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.kind, self.r, self.s, self.t)
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let bad = || Error::InvalidFamily(format!("expected kind,r,s,t, got `{text}`"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let num = |p: &str| p.parse::<u64>().map_err(|_| bad());
        Self::new(
            parts[0].parse()?,
            num(parts[1])?,
            num(parts[2])?,
            num(parts[3])?,
        )
    }
}

pub fn build_family(spec: &FamilySpec, order: usize) -> Result<TruncatedSeries> {
    let checked = FamilySpec::new(spec.kind, spec.r, spec.s, spec.t)?;
    Ok(checked.build(order))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProofStatus {
    /// Every coefficient up to the order is zero; nothing more is claimed.
    NumericEvidence,
    /// Backed by a verified substitution certificate.
    Certified,
    NotVanishing,
}

impl fmt::Display for ProofStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofStatus::NumericEvidence => "numeric-evidence",
            ProofStatus::Certified => "certified",
            ProofStatus::NotVanishing => "not-vanishing",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueVerdict {
    pub residue: usize,
    pub all_zero: bool,
    pub first_nonzero: Option<usize>,
    pub proof_status: ProofStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgressionReport {
    pub description: String,
    pub modulus: usize,
    pub order: usize,
    pub residues: Vec<ResidueVerdict>,
}

impl ProgressionReport {
    pub fn vanishing_residues(&self) -> Vec<usize> {
        self.residues
            .iter()
            .filter(|v| v.all_zero)
            .map(|v| v.residue)
            .collect()
    }

    pub fn any_vanishing(&self) -> bool {
        self.residues.iter().any(|v| v.all_zero)
    }

    /// Upgrades a vanishing residue to [`ProofStatus::Certified`]. Returns
    /// false and changes nothing if the residue is not all-zero.
    pub fn certify(&mut self, residue: usize) -> bool {
        match self.residues.get_mut(residue) {
            Some(v) if v.all_zero => {
                v.proof_status = ProofStatus::Certified;
                true
            }
            _ => false,
        }
    }
}

/// Which residue classes mod `k` have only zero coefficients up to `order`.
pub fn scan_vanishing(
    g: &TruncatedSeries,
    k: usize,
    order: usize,
    description: &str,
) -> ProgressionReport {
    assert!(k >= 1, "modulus must be positive");
    let order = order.min(g.order());
    let mut first: Vec<Option<usize>> = vec![None; k];
    for (n, c) in g.coeffs()[..=order].iter().enumerate() {
        let slot = &mut first[n % k];
        if slot.is_none() && !c.is_zero() {
            *slot = Some(n);
        }
    }
    let residues = first
        .into_iter()
        .enumerate()
        .map(|(residue, first_nonzero)| ResidueVerdict {
            residue,
            all_zero: first_nonzero.is_none(),
            first_nonzero,
            proof_status: if first_nonzero.is_none() {
                ProofStatus::NumericEvidence
            } else {
                ProofStatus::NotVanishing
            },
        })
        .collect();
    ProgressionReport {
        description: description.to_string(),
        modulus: k,
        order,
        residues,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignVerdict {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "mixed")]
    Mixed,
    #[serde(rename = "zero")]
    Zero,
}

impl fmt::Display for SignVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignVerdict::Positive => "+",
            SignVerdict::Negative => "-",
            SignVerdict::Mixed => "mixed",
            SignVerdict::Zero => "zero",
        })
    }
}

/// Shortest run of same-sign coefficients that earns a `+` or `-` verdict.
pub const MIN_SIGN_RUN: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueSign {
    pub residue: usize,
    pub sign: SignVerdict,
    /// Start of the final constant-sign run (or zero tail), as a series
    /// index.
    pub stabilization_index: Option<usize>,
    /// How many coefficients of the class were looked at.
    pub examined: usize,
    /// Indices below the stabilization index whose sign is opposite to the
    /// verdict.
    pub opposite_before: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignReport {
    pub period: usize,
    pub order: usize,
    pub residues: Vec<ResidueSign>,
    /// Zero coefficients below the stabilization index of their class, in
    /// increasing order.
    pub exceptional_zeros: Vec<usize>,
}

/// Classifies the eventual sign of each residue class mod `period`.
///
/// A class gets `+` or `-` when its final run of strictly signed
/// coefficients has at least [`MIN_SIGN_RUN`] members; the run's first index
/// is the stabilization index. A class ending in zeros is `zero`, stabilized
/// where the zero tail starts. Anything else is `mixed`.
pub fn scan_signs(g: &TruncatedSeries, period: usize, order: usize) -> SignReport {
    assert!(period >= 1, "period must be positive");
    let order = order.min(g.order());
    let coeffs = &g.coeffs()[..=order];
    let mut residues = Vec::with_capacity(period);
    let mut exceptional_zeros = Vec::new();
    for residue in 0..period {
        let class: Vec<(usize, i8)> = (residue..=order)
            .step_by(period)
            .map(|n| (n, sign_of(&coeffs[n])))
            .collect();
        let examined = class.len();
        let Some(&(_, last)) = class.last() else {
            residues.push(ResidueSign {
                residue,
                sign: SignVerdict::Zero,
                stabilization_index: None,
                examined,
                opposite_before: Vec::new(),
            });
            continue;
        };
        let run = class.iter().rev().take_while(|&&(_, s)| s == last).count();
        let start = class.len() - run;
        let stabilization = class[start].0;
        let sign = match last {
            0 => SignVerdict::Zero,
            _ if run < MIN_SIGN_RUN => SignVerdict::Mixed,
            1 => SignVerdict::Positive,
            _ => SignVerdict::Negative,
        };
        let settled = matches!(sign, SignVerdict::Positive | SignVerdict::Negative);
        let opposite_before = if settled {
            class[..start]
                .iter()
                .filter(|&&(_, s)| s == -last)
                .map(|&(n, _)| n)
                .collect()
        } else {
            Vec::new()
        };
        if settled {
            exceptional_zeros.extend(
                class[..start]
                    .iter()
                    .filter(|&&(_, s)| s == 0)
                    .map(|&(n, _)| n),
            );
        }
        residues.push(ResidueSign {
            residue,
            sign,
            stabilization_index: (sign != SignVerdict::Mixed).then_some(stabilization),
            examined,
            opposite_before,
        });
    }
    exceptional_zeros.sort_unstable();
    SignReport {
        period,
        order,
        residues,
        exceptional_zeros,
    }
}

fn sign_of(c: &BigInt) -> i8 {
    if c.is_positive() {
        1
    } else if c.is_negative() {
        -1
    } else {
        0
    }
}

/// One `(spec, modulus)` cell of a grid search with at least one vanishing
/// residue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridHit {
    pub spec: FamilySpec,
    pub report: ProgressionReport,
}

/// Expands every valid spec for `t` and keeps the `(spec, modulus)` pairs
/// with a residue class that vanishes up to `order`. Moduli are `t·m` for
/// each `m` in `multipliers`. Output order is `(kind, r, s)`, then the
/// multiplier order, independent of thread scheduling.
pub fn grid_search(t: u64, order: usize, multipliers: &[u64]) -> Result<Vec<GridHit>> {
    if t < 5 {
        return Err(Error::InvalidFamily(format!(
            "t must be at least 5, got {t}"
        )));
    }
    let specs = FamilySpec::enumerate(t);
    let cells: Vec<Vec<GridHit>> = specs
        .par_iter()
        .map(|spec| {
            let series = spec.build(order);
            multipliers
                .iter()
                .map(|&m| (m * t) as usize)
                .map(|k| scan_vanishing(&series, k, order, &spec.to_string()))
                .filter(ProgressionReport::any_vanishing)
                .map(|report| GridHit {
                    spec: *spec,
                    report,
                })
                .collect()
        })
        .collect();
    Ok(cells.into_iter().flatten().collect())
}

pub const CSV_HEADER: [&str; 10] = [
    "kind",
    "r",
    "s",
    "t",
    "modulus",
    "residue",
    "N",
    "verdict",
    "first_nonzero",
    "proof_status",
];

/// Writes one row per residue of every hit.
pub fn write_grid_csv<W: std::io::Write>(hits: &[GridHit], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for hit in hits {
        for v in &hit.report.residues {
            w.write_record([
                hit.spec.kind.to_string(),
                hit.spec.r.to_string(),
                hit.spec.s.to_string(),
                hit.spec.t.to_string(),
                hit.report.modulus.to_string(),
                v.residue.to_string(),
                hit.report.order.to_string(),
                if v.all_zero { "vanishes" } else { "nonzero" }.to_string(),
                v.first_nonzero.map(|n| n.to_string()).unwrap_or_default(),
                v.proof_status.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
