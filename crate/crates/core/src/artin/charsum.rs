use std::f64::consts::TAU;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::Extension;
use crate::geometry::fold_points;
use crate::ratfunc::Value;

use super::Subject;

/// Histogram of `log_ζ g(ρ) mod δ` over `ρ ∈ R_g^{(n)}`. Every character of
/// order dividing δ is constant on these classes, so character sums are
/// exact functions of the counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterClassCounts {
    pub delta: u64,
    pub counts: Vec<u64>,
}

impl CharacterClassCounts {
    /// The trivial character sum, `#R_g^{(n)}`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `|Σ_c counts[c]·e(a·c/δ)|` for the character `χ_a`.
    pub fn magnitude(&self, a: u64) -> f64 {
        let d = self.delta;
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (c, &k) in self.counts.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let theta = TAU * (arith::mul_mod(a % d, c as u64, d) as f64) / d as f64;
            re += k as f64 * theta.cos();
            im += k as f64 * theta.sin();
        }
        re.hypot(im)
    }
}

/// The class histogram for characters of order dividing `δ | q^n − 1`.
pub fn class_counts(subject: &Subject, n: u32, delta: u64) -> Result<CharacterClassCounts> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if delta == 0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let ext = Extension::new(subject.field().clone(), n)?;
    let big = ext.ext().clone();
    let m = big.order() as u64 - 1;
    if m % delta != 0 {
        return Err(Error::InvalidArgument(format!(
            "delta = {delta} does not divide q^n - 1 = {m}"
        )));
    }
    let size = subject.variety().enumeration_size(m + 1);
    if size > subject.cap() as u128 {
        return Err(Error::CapExceeded {
            needed: size,
            cap: subject.cap(),
        });
    }
    let logs = big.log_table(subject.cap())?;
    let g = subject.g();
    let d = delta as usize;
    let counts = fold_points(
        subject.variety(),
        &ext,
        subject.cap(),
        || vec![0u64; d],
        |mut h, c| {
            if let Value::Unit(u) = g.value_at(&ext, c) {
                h[logs.log(u) as usize % d] += 1;
            }
            h
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )?;
    Ok(CharacterClassCounts { delta, counts })
}

/// One nontrivial character of exact order δ.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterRow {
    /// `χ_a(ζ) = e(a/δ)` with `gcd(a, δ) = 1`.
    pub a: u64,
    pub magnitude: f64,
    /// `|S| / q^(n(r − 1/2))`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharsumReport {
    pub n: u32,
    pub delta: u64,
    pub counts: CharacterClassCounts,
    /// The trivial character sum, equal to `#R_g^{(n)}`.
    pub trivial_sum: u64,
    pub rows: Vec<CharacterRow>,
    /// Whether some prime `ℓ | δ` has `g` geometric at `ℓ`.
    pub in_hypothesis: bool,
    pub max_ratio: f64,
}

/// Character sums `S = Σ_{ρ ∈ R_g^{(n)}} χ(g(ρ))` for all characters of
/// exact order `δ`. Requires some prime `ℓ | δ` at which `g` is geometric,
/// the hypothesis under which `|S| ≪ q^(n(r − 1/2))`.
pub fn charsum_experiment(subject: &Subject, n: u32, delta: u64) -> Result<CharsumReport> {
    let report = charsum_explore(subject, n, delta)?;
    if !report.in_hypothesis {
        return Err(Error::Inapplicable(format!(
            "g is geometric at no prime dividing delta = {delta}"
        )));
    }
    Ok(report)
}

/// As [`charsum_experiment`], but runs outside the hypothesis as well and
/// flags it instead of failing.
pub fn charsum_explore(subject: &Subject, n: u32, delta: u64) -> Result<CharsumReport> {
    if delta <= 1 {
        return Err(Error::InvalidArgument(
            "delta must exceed 1: only nontrivial characters are summed".into(),
        ));
    }
    let mut in_hypothesis = false;
    for l in arith::factor_integer(delta).primes() {
        if subject.geometricity(l)?.geometric {
            in_hypothesis = true;
            break;
        }
    }
    let counts = class_counts(subject, n, delta)?;
    let big_q = (subject.q() as f64).powi(n as i32);
    let scale = big_q.powf(subject.dim() as f64 - 0.5);
    let rows: Vec<CharacterRow> = (1..delta)
        .filter(|&a| arith::gcd(a, delta) == 1)
        .map(|a| {
            let magnitude = counts.magnitude(a);
            CharacterRow {
                a,
                magnitude,
                ratio: magnitude / scale,
            }
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(CharsumReport {
        n,
        delta,
        trivial_sum: counts.total(),
        counts,
        rows,
        in_hypothesis,
        max_ratio,
    })
}
