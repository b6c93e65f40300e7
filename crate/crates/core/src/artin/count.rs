use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{Elem, Extension, FiniteField};
use crate::geometry::{fold_points, VarietyModel};
use crate::poly::{self, enumerate_irreducibles, Fp, Poly, Scalars};
use crate::ratfunc::{RationalFunction, Value};

use super::rho::{rho, RhoValue};
use super::Subject;

/// What happens to `g` at the closed points of degree `n` of P¹.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedTally {
    pub n: u32,
    /// Closed points of degree `n`, including ∞ when `n = 1`.
    pub points: u64,
    pub zeros: u64,
    pub poles: u64,
    /// Points where `g` reduces to a unit.
    pub units: u64,
    /// For each requested exponent `e`, the number of unit points with
    /// `g^e ≡ 1`.
    pub hits: Vec<u64>,
    /// Unit points at which no requested exponent gives 1.
    pub clear: u64,
}

impl ClosedTally {
    fn empty(n: u32, k: usize) -> Self {
        ClosedTally {
            n,
            points: 0,
            zeros: 0,
            poles: 0,
            units: 0,
            hits: vec![0; k],
            clear: 0,
        }
    }

    fn merge(mut self, o: Self) -> Self {
        self.points += o.points;
        self.zeros += o.zeros;
        self.poles += o.poles;
        self.units += o.units;
        for (a, b) in self.hits.iter_mut().zip(&o.hits) {
            *a += b;
        }
        self.clear += o.clear;
        self
    }

    fn record(&mut self, ones: impl Iterator<Item = bool>) {
        self.units += 1;
        let mut any = false;
        for (h, one) in self.hits.iter_mut().zip(ones) {
            if one {
                *h += 1;
                any = true;
            }
        }
        if !any {
            self.clear += 1;
        }
    }
}

/// Reduces `g = a/b` modulo every monic irreducible of degree `n` (and at
/// ∞ when `n = 1`) and tests `g^e ≡ 1` for each `e` in `exps`.
pub(crate) fn closed_tally(
    g: &RationalFunction,
    n: u32,
    cap: u64,
    exps: &[u128],
) -> Result<ClosedTally> {
    if g.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let field = g.field();
    let irreducibles = enumerate_irreducibles(field, n, cap)?;
    let mut tally = if field.degree() == 1 {
        let fp = Fp::new(field.order() as u64);
        let lift = |p: &Poly| -> Vec<u64> { p.coeffs().iter().map(|c| c.0 as u64).collect() };
        let (a, b) = (lift(g.num()), lift(g.den()));
        tally_with(&fp, &irreducibles, n, exps, |p| lift(p), &a, &b)
    } else {
        let lift = |p: &Poly| -> Vec<Elem> { p.coeffs().to_vec() };
        let (a, b) = (lift(g.num()), lift(g.den()));
        tally_with(&**field, &irreducibles, n, exps, lift, &a, &b)
    };
    if n == 1 {
        tally.points += 1;
        let ext = Extension::new(field.clone(), 1)?;
        match g.eval_at_infinity(&ext) {
            Value::Unit(u) => tally.record(exps.iter().map(|&e| pow_big(field, u, e) == Elem::ONE)),
            Value::Zero => tally.zeros += 1,
            Value::Pole => tally.poles += 1,
            Value::Indeterminate => unreachable!("a reduced quotient is determinate at infinity"),
        }
    }
    Ok(tally)
}

fn tally_with<S, L>(
    s: &S,
    irreducibles: &[Poly],
    n: u32,
    exps: &[u128],
    lift: L,
    a: &[S::C],
    b: &[S::C],
) -> ClosedTally
where
    S: Scalars + Sync,
    S::C: Send + Sync + Default,
    L: Fn(&Poly) -> Vec<S::C> + Sync,
{
    irreducibles
        .par_iter()
        .fold(
            || ClosedTally::empty(n, exps.len()),
            |mut t, p| {
                t.points += 1;
                let f = lift(p);
                let ar = poly::rem_monic(s, a.to_vec(), &f);
                let br = poly::rem_monic(s, b.to_vec(), &f);
                match (ar.is_empty(), br.is_empty()) {
                    (true, _) => t.zeros += 1,
                    (false, true) => t.poles += 1,
                    (false, false) => {
                        let inv = poly::inverse_mod(s, &br, &f).expect("P does not divide b");
                        let u = s.mulmod(&ar, &inv, &f);
                        let one = [s.one()];
                        t.record(exps.iter().map(|&e| poly::powmod(s, &u, e, &f) == one));
                    }
                }
                t
            },
        )
        .reduce(|| ClosedTally::empty(n, exps.len()), ClosedTally::merge)
}

fn pow_big(field: &FiniteField, x: Elem, e: u128) -> Elem {
    let m = field.order() as u128 - 1;
    field.pow(x, (e % m) as u64)
}

/// `q^n` and the exponents `(q^n − 1)/ℓ` over the primes `ℓ | q^n − 1`.
fn primitivity_exponents(q: u64, n: u32) -> Result<(u128, Vec<u128>)> {
    let big_q = (q as u128)
        .checked_pow(n)
        .filter(|&x| x <= u64::MAX as u128)
        .ok_or_else(|| Error::Overflow(format!("{q}^{n} exceeds 64 bits")))?;
    let m = big_q as u64 - 1;
    let exps = arith::factor_integer(m)
        .primes()
        .map(|l| (m / l) as u128)
        .collect();
    Ok((big_q, exps))
}

/// N(g, n) on P¹ from the definition: the closed points of degree `n` at
/// which `g` is regular, nonzero and reduces to a generator of
/// (F_q[t]/(P))^×.
pub fn count_artin_closed(g: &RationalFunction, n: u32, cap: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let (_, exps) = primitivity_exponents(g.field().order() as u64, n)?;
    Ok(closed_tally(g, n, cap, &exps)?.clear)
}

/// The outcome of counting primitive-root points of degree `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub q: u64,
    pub n: u32,
    /// Dimension of the variety.
    pub r: u32,
    /// The closed-point count, computed on P¹ only.
    pub n_closed: Option<u64>,
    /// `N_X(g, n)` from the rational points.
    pub n_points: u64,
    /// Rational points of degree dividing `n` where `g(ρ)` generates
    /// GF(q^n)^×; equals `n · n_points`.
    pub generating_points: u64,
    /// `#R_g^{(n)}`.
    pub restricted: u64,
    pub zeros: u64,
    pub poles: u64,
    pub excluded_indeterminate: u64,
    /// ρ_g(n); `None` when `g` is constant or a full power.
    pub rho: Option<RhoValue>,
    /// The prime ℓ for which `g` is a full ℓ-th power, if any.
    pub full_power: Option<u64>,
    /// `ρ_g(n)·φ(q^n − 1)·q^(n(r−1))/n`.
    pub main_term: Option<BigRational>,
    /// `|N − main_term| / q^(n(r − 1/2))`.
    pub error_ratio: Option<f64>,
}

#[derive(Clone, Copy, Default)]
struct PointTally {
    generating: u64,
    units: u64,
    zeros: u64,
    poles: u64,
    indeterminate: u64,
}

impl PointTally {
    fn merge(self, o: Self) -> Self {
        PointTally {
            generating: self.generating + o.generating,
            units: self.units + o.units,
            zeros: self.zeros + o.zeros,
            poles: self.poles + o.poles,
            indeterminate: self.indeterminate + o.indeterminate,
        }
    }
}

/// N_X(g, n) as `1/n` times the number of GF(q^n)-points `ρ` in `R_g` with
/// `⟨g(ρ)⟩ = GF(q^n)^×`, together with the main term of the asymptotic.
/// On P¹ the closed-point count is run as well and must agree.
pub fn count_artin_points(subject: &Subject, n: u32) -> Result<CountReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let field = subject.field();
    let cap = subject.cap();
    let ext = Extension::new(field.clone(), n)?;
    let big = ext.ext().clone();
    let m = big.order() as u64 - 1;
    let variety = subject.variety();
    let size = variety.enumeration_size(m + 1);
    if size > cap as u128 {
        return Err(Error::CapExceeded { needed: size, cap });
    }
    let logs = big.log_table(cap)?;
    let g = subject.g();
    let t = fold_points(
        variety,
        &ext,
        cap,
        PointTally::default,
        |mut t, c| {
            match g.value_at(&ext, c) {
                Value::Unit(u) => {
                    t.units += 1;
                    if arith::gcd(logs.log(u) as u64, m) == 1 {
                        t.generating += 1;
                    }
                }
                Value::Zero => t.zeros += 1,
                Value::Pole => t.poles += 1,
                Value::Indeterminate => t.indeterminate += 1,
            }
            t
        },
        PointTally::merge,
    )?;
    if t.generating % n as u64 != 0 {
        return Err(Error::Internal(format!(
            "{} generating points is not divisible by n = {n}",
            t.generating
        )));
    }
    let n_points = t.generating / n as u64;

    let n_closed = match (variety, g.as_line()) {
        (VarietyModel::ProjectiveLine, Some(line)) => {
            let c = count_artin_closed(line, n, cap)?;
            if c != n_points {
                return Err(Error::Internal(format!(
                    "closed-point count {c} differs from point count {n_points} at n = {n}"
                )));
            }
            Some(c)
        }
        _ => None,
    };

    let q = subject.q();
    let r = subject.dim();
    let (rho_value, full_power) = if g.is_constant() {
        (None, None)
    } else {
        match rho(subject, n as u64) {
            Ok(v) => (Some(v), None),
            Err(Error::FullPower(l)) => (None, Some(l)),
            Err(e) => return Err(e),
        }
    };
    let main_term = match (&rho_value, full_power) {
        (Some(v), _) => {
            let phi = BigInt::from(arith::euler_phi(m));
            let lift = BigInt::from(q).pow(n * (r - 1));
            Some(&v.value * BigRational::new(phi * lift, BigInt::from(n)))
        }
        (None, Some(_)) => Some(BigRational::zero()),
        (None, None) => None,
    };
    let error_ratio = main_term.as_ref().map(|main| {
        let diff = (BigRational::from_integer(n_points.into()) - main).abs();
        let scale = ((m + 1) as f64).powf(r as f64 - 0.5);
        diff.to_f64().unwrap_or(f64::INFINITY) / scale
    });

    Ok(CountReport {
        q,
        n,
        r,
        n_closed,
        n_points,
        generating_points: t.generating,
        restricted: t.units,
        zeros: t.zeros,
        poles: t.poles,
        excluded_indeterminate: t.indeterminate,
        rho: rho_value,
        full_power,
        main_term,
        error_ratio,
    })
}

/// The generator indicator of a unit `x` in its Möbius-expanded form
/// `φ(M)/M · Σ_{d | M} μ(d)/φ(d) · Σ_{ord χ = d} χ(x)`, `M = |GF(Q)^×|`.
/// The inner sum over characters of exact order `d` at `x = ζ^j` is the
/// Ramanujan sum `c_d(j)`. Returns 0 or 1.
pub fn mobius_expansion_check(field: &Arc<FiniteField>, x: Elem, cap: u64) -> Result<u8> {
    let j = field.log(x, cap)? as i64;
    let fac = field.unit_factorization();
    let m = fac.n();
    let mut sum = BigRational::zero();
    for (d, mu) in fac.squarefree_divisors() {
        let c = arith::ramanujan_sum(d, j);
        sum += BigRational::new(BigInt::from(mu as i64 * c), BigInt::from(arith::euler_phi(d)));
    }
    let value = sum * BigRational::new(BigInt::from(fac.phi()), BigInt::from(m));
    if value.is_zero() {
        Ok(0)
    } else if value == BigRational::from_integer(1.into()) {
        Ok(1)
    } else {
        Err(Error::Internal(format!("Möbius expansion evaluated to {value}")))
    }
}
