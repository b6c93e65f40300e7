use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{self, ramanujan_sum};
use crate::error::{Error, Result};

use super::Subject;

/// One factor `1 − c_ℓ(1 + q + ⋯ + q^(n−1))/φ(ℓ)` of ρ_g(n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoFactor {
    pub ell: u64,
    /// `c_ℓ(1 + q + ⋯ + q^(n−1))`: `ℓ − 1` or `−1`.
    pub ramanujan: i64,
    /// `0` or `ℓ/(ℓ − 1)`.
    pub value: BigRational,
}

/// The correction factor ρ_g(n) with its per-prime decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoValue {
    pub n: u64,
    pub value: BigRational,
    pub factors: Vec<RhoFactor>,
}

impl RhoValue {
    pub fn is_positive(&self) -> bool {
        !self.value.is_zero()
    }
}

/// ρ_g(n): the product over `ℓ ∈ 𝒫_g` with `ℓ | q^n − 1` of
/// `1 − c_ℓ(1 + q + ⋯ + q^(n−1))/(ℓ − 1)`. Only the residue of the
/// geometric sum mod ℓ matters, so `n` may be large.
pub fn rho(subject: &Subject, n: u64) -> Result<RhoValue> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    subject.check_not_full_power()?;
    let q = subject.q();
    let mut value = BigRational::one();
    let mut factors = Vec::new();
    for &ell in &subject.nongeometric()?.primes {
        if arith::pow_mod(q, n, ell) != 1 {
            continue;
        }
        let s = arith::geometric_sum_mod(q, n, ell);
        let c = ramanujan_sum(ell, s as i64);
        let f = BigRational::one()
            - BigRational::new(BigInt::from(c), BigInt::from(ell - 1));
        value *= &f;
        factors.push(RhoFactor {
            ell,
            ramanujan: c,
            value: f,
        });
    }
    Ok(RhoValue { n, value, factors })
}

/// Positivity of ρ_g(n) by divisibility alone: every `ℓ ∈ 𝒫_g` dividing
/// `q^n − 1` must divide `q − 1` and not `n`.
pub fn rho_positive(subject: &Subject, n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    subject.check_not_full_power()?;
    let q = subject.q();
    Ok(subject
        .nongeometric()?
        .primes
        .iter()
        .filter(|&&ell| arith::pow_mod(q, n, ell) == 1)
        .all(|&ell| (q - 1) % ell == 0 && n % ell != 0))
}

/// `n_m = 1 + m·Π_{ℓ∈I} ℓ·Π_{ℓ∈J} (ℓ − 1)` for `m = 0..=m_max`, where `I`
/// holds the primes of 𝒫_g dividing `q − 1` and `J` the rest. No
/// precondition is checked.
pub fn generator_sequence(subject: &Subject, m_max: u64) -> Result<Vec<u64>> {
    let q = subject.q();
    let mut step = 1u64;
    for &ell in &subject.nongeometric()?.primes {
        let f = if (q - 1) % ell == 0 { ell } else { ell - 1 };
        step = step
            .checked_mul(f)
            .ok_or_else(|| Error::Overflow("generator step exceeds 64 bits".into()))?;
    }
    (0..=m_max)
        .map(|m| {
            m.checked_mul(step)
                .and_then(|x| x.checked_add(1))
                .ok_or_else(|| Error::Overflow(format!("n_{m} exceeds 64 bits")))
        })
        .collect()
}

/// The values of [`generator_sequence`], each checked to have ρ_g(n) > 0.
/// Fails when `g` is a full ℓ-th power for some `ℓ | q − 1`.
pub fn artin_n_generator(subject: &Subject, m_max: u64) -> Result<Vec<u64>> {
    subject.check_not_full_power()?;
    let ns = generator_sequence(subject, m_max)?;
    for &n in &ns {
        if !rho_positive(subject, n)? || !rho(subject, n)?.is_positive() {
            return Err(Error::Internal(format!("generated n = {n} has rho = 0")));
        }
    }
    Ok(ns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::ratfunc::RationalFunction;

    fn subject(p: u64, s: &str) -> Subject {
        Subject::line(RationalFunction::parse(&build_field(p, 1).unwrap(), s).unwrap())
    }

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn rho_examples() {
        let t = subject(2, "t");
        for n in 1..10 {
            assert_eq!(rho(&t, n).unwrap().value, frac(1, 1));
        }
        let g = subject(7, "3*t^3");
        assert_eq!(rho(&g, 1).unwrap().value, frac(3, 2));
        let r3 = rho(&g, 3).unwrap();
        assert_eq!(r3.value, frac(0, 1));
        assert_eq!(r3.factors[0].ramanujan, 2);
        for n in [1, 2, 4, 5, 7] {
            assert_eq!(rho(&g, n).unwrap().value, frac(3, 2));
        }
        assert_eq!(rho(&g, 6).unwrap().value, frac(0, 1));
    }

    #[test]
    fn positivity_examples() {
        let g = subject(7, "3*t^3");
        assert!(rho_positive(&g, 1).unwrap());
        assert!(!rho_positive(&g, 3).unwrap());
        assert!(rho_positive(&subject(3, "t"), 5).unwrap());
        for n in 1..200 {
            assert_eq!(rho_positive(&g, n).unwrap(), rho(&g, n).unwrap().is_positive());
        }
    }

    #[test]
    fn generator_examples() {
        assert_eq!(artin_n_generator(&subject(7, "3*t^3"), 3).unwrap(), vec![1, 4, 7, 10]);
        assert_eq!(artin_n_generator(&subject(2, "t"), 2).unwrap(), vec![1, 2, 3]);
        let full = subject(5, "t^6/(t+1)^6");
        assert_eq!(generator_sequence(&full, 1).unwrap(), vec![1, 5]);
        assert_eq!(artin_n_generator(&full, 1), Err(Error::FullPower(2)));
        assert_eq!(rho(&full, 1), Err(Error::FullPower(2)));
        assert_eq!(rho_positive(&full, 1), Err(Error::FullPower(2)));
    }

    #[test]
    fn non_geometric_prime_not_dividing_q_minus_one() {
        // g = t^3 over GF(2): 𝒫_g = {3} with 3 ∤ q − 1, so J = {3} and
        // n = 1 + 2m keeps 3 from dividing 2^n − 1.
        let g = subject(2, "t^3");
        assert_eq!(artin_n_generator(&g, 3).unwrap(), vec![1, 3, 5, 7]);
        assert_eq!(rho(&g, 2).unwrap().value, frac(0, 1));
        assert!(!rho_positive(&g, 2).unwrap());
        assert_eq!(rho(&g, 3).unwrap().value, frac(1, 1));
    }

    #[test]
    fn rho_structure() {
        for (p, s) in [(7, "3*t^3"), (7, "3*t^6"), (3, "2*t^2"), (2, "t^15"), (5, "2*t^4/(t+1)^2")] {
            let g = subject(p, s);
            for n in 1..40 {
                let r = rho(&g, n).unwrap();
                assert!(r.value.is_zero() || r.value >= BigRational::one(), "{s} {n}");
                let prod = r.factors.iter().fold(BigRational::one(), |a, f| a * &f.value);
                assert_eq!(prod, r.value);
            }
        }
    }
}
