//! The splitting-probability heuristic: for each prime `ℓ | q^n − 1`, the
//! probability `P_ℓ` that a random prime of degree `n` splits completely in
//! `K(ζ_ℓ, g^(1/ℓ))`, the product `A = Π (1 − P_ℓ)`, and its closed form
//! `φ(q^n − 1)/(q^n − 1) · ρ_g(n)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::artin::{closed_tally, rho, Subject};
use crate::error::{Error, Result};
use crate::ratfunc::RationalFunction;

pub use crate::arith::mult_order_mod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitCase {
    /// `g` is geometric at ℓ: `P_ℓ = 1/ℓ`.
    Geometric,
    /// Non-geometric and `ℓ | ((q − 1)/r)·(1 + q + ⋯ + q^(n−1))`: every
    /// prime of degree `n` splits, `P_ℓ = 1`. When `ℓ | q − 1` and
    /// `ℓ ∤ (q − 1)/r` this is the condition `ℓ | n`.
    NonGeomDividesN,
    /// Non-geometric and the divisibility above fails: `P_ℓ = 0`.
    NonGeomCoprimeN,
    /// `ℓ ∤ q^n − 1`: no prime of degree `n` splits in `K(ζ_ℓ)`.
    NotDividing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitProbability {
    pub ell: u64,
    pub case: SplitCase,
    pub value: BigRational,
    /// Order of the unit μ in `g = μ·b^ℓ`, when a witness is available.
    pub r: Option<u64>,
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `q^n` as a 64-bit integer.
fn big_q(q: u64, n: u32) -> Result<u64> {
    arith::checked_pow(q, n)
}

/// `P_ℓ` for primes of degree `n`.
pub fn split_prob(subject: &Subject, ell: u64, n: u32) -> Result<SplitProbability> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let q = subject.q();
    if !arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if q % ell == 0 {
        return Err(Error::CharacteristicPrime(ell));
    }
    if subject.g().is_constant() {
        return Err(Error::ConstantFunction);
    }
    let geo = subject.geometricity(ell)?;
    if geo.full_power {
        return Err(Error::FullPower(ell));
    }
    let r = geo.unit_order();
    if arith::pow_mod(q, n as u64, ell) != 1 {
        return Ok(SplitProbability {
            ell,
            case: SplitCase::NotDividing,
            value: BigRational::zero(),
            r,
        });
    }
    if geo.geometric {
        return Ok(SplitProbability {
            ell,
            case: SplitCase::Geometric,
            value: ratio(1, ell),
            r,
        });
    }
    let s = arith::geometric_sum_mod(q, n as u64, ell);
    // Without a witness (forms), μ is known not to be an ℓ-th power when
    // ℓ | q − 1, so ℓ ∤ (q − 1)/r; otherwise S_n ≡ 0 already decides.
    let cofactor = match r {
        Some(r) => ((q - 1) / r) % ell,
        None => 1,
    };
    let splits = arith::mul_mod(cofactor, s, ell) == 0;
    Ok(SplitProbability {
        ell,
        case: if splits {
            SplitCase::NonGeomDividesN
        } else {
            SplitCase::NonGeomCoprimeN
        },
        value: if splits {
            BigRational::one()
        } else {
            BigRational::zero()
        },
        r,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub n: u32,
    /// One entry per prime `ℓ | q^n − 1`.
    pub factors: Vec<SplitProbability>,
    /// `A = Π (1 − P_ℓ)`.
    pub a: BigRational,
    /// `φ(q^n − 1)/(q^n − 1) · ρ_g(n)`.
    pub rhs: BigRational,
}

/// The heuristic density `A` and its closed form; the two must agree.
pub fn density(subject: &Subject, n: u32) -> Result<DensityReport> {
    let m = big_q(subject.q(), n)? - 1;
    let fac = arith::factor_integer(m);
    let mut a = BigRational::one();
    let mut factors = Vec::new();
    for ell in fac.primes() {
        let sp = split_prob(subject, ell, n)?;
        a *= BigRational::one() - &sp.value;
        factors.push(sp);
    }
    let rhs = ratio(fac.phi(), m) * rho(subject, n as u64)?.value;
    if a != rhs {
        return Err(Error::Internal(format!(
            "density A = {a} differs from phi(Q-1)/(Q-1)*rho = {rhs} at n = {n}"
        )));
    }
    Ok(DensityReport { n, factors, a, rhs })
}

/// Observed frequency of `g^((q^n − 1)/ℓ) ≡ 1 mod 𝔭` over the closed points
/// of degree `n` where `g` is a unit, next to the predicted `P_ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCheck {
    pub ell: u64,
    pub n: u32,
    pub hits: u64,
    pub total: u64,
    pub observed: BigRational,
    pub predicted: SplitProbability,
}

impl SplitCheck {
    /// `|observed − P_ℓ|`.
    pub fn deviation(&self) -> BigRational {
        let d = &self.observed - &self.predicted.value;
        if d < BigRational::zero() {
            -d
        } else {
            d
        }
    }
}

/// Counts the degree-`n` closed points of P¹ (∞ included when `n = 1`) at
/// which `g` is an ℓ-th power residue.
pub fn empirical_split_check(
    g: &RationalFunction,
    ell: u64,
    n: u32,
    cap: u64,
) -> Result<SplitCheck> {
    let subject = Subject::line(g.clone()).with_cap(cap);
    let m = big_q(subject.q(), n)? - 1;
    if !arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if m % ell != 0 {
        return Err(Error::InvalidArgument(format!(
            "{ell} does not divide q^n - 1 = {m}"
        )));
    }
    let predicted = split_prob(&subject, ell, n)?;
    let tally = closed_tally(g, n, cap, &[(m / ell) as u128])?;
    let (hits, total) = (tally.hits[0], tally.units);
    let observed = if total == 0 {
        BigRational::zero()
    } else {
        ratio(hits, total)
    };
    Ok(SplitCheck {
        ell,
        n,
        hits,
        total,
        observed,
        predicted,
    })
}
