use crate::arith::{self, is_prime};
use crate::error::{Error, Result};
use crate::field::{Elem, Extension, FiniteField};
use crate::geometry::{fold_points, FunctionOnVariety};
use crate::poly::{factor_poly, Poly};
use crate::ratfunc::{rf_make, RationalFunction};

use super::Subject;

/// `g = μ·b^ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub mu: Elem,
    pub b: RationalFunction,
}

/// How a geometricity verdict was reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Method {
    /// Exact: multiplicities in the squarefree decomposition of `g` on P¹.
    Valuation,
    /// Empirical: `g(ρ)^((Q−1)/ℓ)` over the points of `R_g` for the listed
    /// extension degrees. Geometric verdicts are certain (the residue
    /// varies); non-geometric verdicts are heuristic.
    ResidueTest { degrees: Vec<u32>, points: u64 },
    /// `ℓ` exceeds the degree of the zero divisor of `g`, so `g` cannot be
    /// `μ·b^ℓ` with `b` nonconstant.
    DegreeBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricityReport {
    pub g: FunctionOnVariety,
    pub ell: u64,
    pub geometric: bool,
    /// Present for non-geometric rational functions on P¹.
    pub witness: Option<Witness>,
    /// `ℓ | q − 1` and `g` is a full ℓ-th power in K.
    pub full_power: bool,
    pub method: Method,
}

impl GeometricityReport {
    /// Order `r` of the witness unit μ in GF(q)^×, when known.
    pub fn unit_order(&self) -> Option<u64> {
        let w = self.witness.as_ref()?;
        w.b.field().mult_order(w.mu).ok()
    }
}

/// 𝒫_g: the primes `ℓ ≠ p` up to `deg g` at which `g` is not geometric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonGeometricPrimeSet {
    pub primes: Vec<u64>,
    pub search_bound: u64,
    /// One report per listed prime.
    pub reports: Vec<GeometricityReport>,
}

impl NonGeometricPrimeSet {
    pub fn contains(&self, ell: u64) -> bool {
        self.primes.binary_search(&ell).is_ok()
    }

    pub fn report(&self, ell: u64) -> Option<&GeometricityReport> {
        self.reports.iter().find(|r| r.ell == ell)
    }
}

fn check_prime(field: &FiniteField, ell: u64) -> Result<()> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell == field.characteristic() as u64 {
        return Err(Error::CharacteristicPrime(ell));
    }
    Ok(())
}

/// `μ` is an ℓ-th power in GF(q)^× iff `μ^((q−1)/gcd(ℓ, q−1)) = 1`.
fn is_lth_power(field: &FiniteField, mu: Elem, ell: u64) -> bool {
    let m = field.order() as u64 - 1;
    field.pow(mu, m / arith::gcd(ell, m)) == Elem::ONE
}

/// Geometricity of a nonconstant `g ∈ F_q(t)` at the prime `ℓ ≠ p`.
///
/// `g` fails to be geometric exactly when every multiplicity in the
/// factorization of its numerator and denominator is divisible by `ℓ`
/// (the valuation at infinity then is too). The witness is assembled from
/// the squarefree decomposition and checked before returning.
pub fn is_geometric_at(g: &RationalFunction, ell: u64) -> Result<GeometricityReport> {
    if g.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if g.is_constant() {
        return Err(Error::ConstantFunction);
    }
    let field = g.field();
    check_prime(field, ell)?;
    let num_parts = g.num().squarefree_decomposition();
    let den_parts = g.den().squarefree_decomposition();
    let divisible = num_parts
        .iter()
        .chain(&den_parts)
        .all(|(_, e)| *e as u64 % ell == 0);
    let report = |geometric, witness, full_power| GeometricityReport {
        g: FunctionOnVariety::Line(g.clone()),
        ell,
        geometric,
        witness,
        full_power,
        method: Method::Valuation,
    };
    if !divisible {
        return Ok(report(true, None, false));
    }
    let root = |parts: &[(Poly, u32)]| {
        parts.iter().fold(Poly::one(field), |acc, (f, e)| {
            acc.mul(&f.pow(e / ell as u32))
        })
    };
    let b = rf_make(&root(&num_parts), &root(&den_parts))?;
    let mu = g.num().lc();
    let rebuilt = b.pow(ell as i64)?.scale(mu);
    if rebuilt != *g {
        return Err(Error::Internal(format!(
            "witness {mu:?}·({b})^{ell} does not reproduce {g}"
        )));
    }
    let full_power = (field.order() as u64 - 1) % ell == 0 && is_lth_power(field, mu, ell);
    Ok(report(false, Some(Witness { mu, b }), full_power))
}

/// Brute-force geometricity: scans every `μ ∈ GF(q)^×` and tests whether
/// `μ⁻¹·g` is an ℓ-th power in F_q(t), reading exponents off a full
/// factorization. Returns a verified witness when one exists.
pub fn geometric_oracle(g: &RationalFunction, ell: u64) -> Result<Option<Witness>> {
    if g.is_constant() {
        return Err(Error::ConstantFunction);
    }
    let field = g.field();
    check_prime(field, ell)?;
    let num = factor_poly(g.num())?;
    let den = if g.den().is_constant() {
        None
    } else {
        Some(factor_poly(g.den())?)
    };
    let exps_ok = num
        .factors
        .iter()
        .chain(den.iter().flat_map(|d| d.factors.iter()))
        .all(|(_, e)| *e as u64 % ell == 0);
    if !exps_ok {
        return Ok(None);
    }
    let root = |fs: &[(Poly, u32)]| {
        fs.iter()
            .fold(Poly::one(field), |acc, (f, e)| acc.mul(&f.pow(e / ell as u32)))
    };
    let b0 = rf_make(
        &root(&num.factors),
        &den.map_or_else(|| Poly::one(field), |d| root(&d.factors)),
    )?;
    for mu in field.units() {
        // μ⁻¹g = (μ⁻¹·unit)·(monic part), an ℓ-th power iff the unit is.
        let u = field.div(num.unit, mu)?;
        if let Some(c) = field.units().find(|&c| field.pow(c, ell) == u) {
            let b = b0.scale(c);
            if b.pow(ell as i64)?.scale(mu) == *g {
                return Ok(Some(Witness { mu, b }));
            }
            return Err(Error::Internal(format!("oracle witness for {g} failed to verify")));
        }
    }
    Ok(None)
}

// Residue test for functions given by forms. If g = μ·b^ℓ then
// g(ρ)^((Q−1)/ℓ) = μ^((Q−1)/ℓ) at every point of R_g, so a varying residue
// proves geometricity.
const RESIDUE_POINTS: u64 = 64;

fn residue_test(subject: &Subject, ell: u64) -> Result<GeometricityReport> {
    let field = subject.field();
    check_prime(field, ell)?;
    if subject.g().is_constant() {
        return Err(Error::ConstantFunction);
    }
    let q = field.order() as u64;
    let n0 = arith::mult_order_mod(q, ell)? as u32;
    let mut degrees = Vec::new();
    let mut points = 0u64;
    // Residue constants observed at degrees n with ℓ ∤ n.
    let mut coprime_constants = Vec::new();
    let mut n = n0;
    let geometric = loop {
        let big = (q as u128).pow(n);
        if big > u32::MAX as u128
            || subject.variety().enumeration_size(big as u64) > subject.cap() as u128
        {
            if degrees.is_empty() {
                return Err(Error::CapExceeded {
                    needed: subject.variety().enumeration_size(big.min(u64::MAX as u128) as u64),
                    cap: subject.cap(),
                });
            }
            break false;
        }
        let ext = Extension::new(field.clone(), n)?;
        let e = (ext.ext().order() as u64 - 1) / ell;
        let g = subject.g();
        let big_field = ext.ext().clone();
        // (points with unit value, first residue, residue varies)
        let (count, first, varies) = fold_points(
            subject.variety(),
            &ext,
            subject.cap(),
            || (0u64, None::<Elem>, false),
            |(c, first, varies), pt| match g.value_at(&ext, pt).unit() {
                Some(v) => {
                    let r = big_field.pow(v, e);
                    let varies = varies || first.is_some_and(|f| f != r);
                    (c + 1, first.or(Some(r)), varies)
                }
                None => (c, first, varies),
            },
            |a, b| {
                let varies = a.2 || b.2 || matches!((a.1, b.1), (Some(x), Some(y)) if x != y);
                (a.0 + b.0, a.1.or(b.1), varies)
            },
        )?;
        degrees.push(n);
        points += count;
        if varies {
            break true;
        }
        if let (Some(r), true) = (first, n as u64 % ell != 0) {
            coprime_constants.push(r);
        }
        if points >= RESIDUE_POINTS {
            break false;
        }
        n += n0;
    };
    // With ℓ | q − 1 and ℓ ∤ n the observed constant μ^((Q−1)/ℓ) is 1 iff μ
    // is an ℓ-th power in GF(q).
    let full_power = !geometric
        && (q - 1) % ell == 0
        && coprime_constants.first().is_some_and(|&r| r == Elem::ONE);
    Ok(GeometricityReport {
        g: subject.g().clone(),
        ell,
        geometric,
        witness: None,
        full_power,
        method: Method::ResidueTest { degrees, points },
    })
}

/// For forms, `g = μ·b^ℓ` with `b` nonconstant forces the zero divisor of
/// `g`, of degree `deg g / 2`, to be divisible by ℓ, so larger primes are
/// geometric without any scan.
fn degree_bound(subject: &Subject, ell: u64) -> Result<Option<GeometricityReport>> {
    Ok((ell > subject.deg_g()? / 2).then(|| GeometricityReport {
        g: subject.g().clone(),
        ell,
        geometric: true,
        witness: None,
        full_power: false,
        method: Method::DegreeBound,
    }))
}

pub(super) fn geometricity(subject: &Subject, ell: u64) -> Result<GeometricityReport> {
    match subject.g() {
        FunctionOnVariety::Line(g) => is_geometric_at(g, ell),
        FunctionOnVariety::Forms { .. } => {
            check_prime(subject.field(), ell)?;
            if let Some(r) = degree_bound(subject, ell)? {
                return Ok(r);
            }
            if let Some(r) = subject.nongeometric()?.report(ell) {
                return Ok(r.clone());
            }
            residue_test(subject, ell)
        }
    }
}

/// Scans every prime `ℓ ≤ deg g`, `ℓ ≠ p`, and keeps the non-geometric ones.
pub fn nongeometric_primes(subject: &Subject) -> Result<NonGeometricPrimeSet> {
    let bound = subject.deg_g()?;
    let p = subject.field().characteristic() as u64;
    let mut primes = Vec::new();
    let mut reports = Vec::new();
    for ell in arith::primes_up_to(bound) {
        if ell == p {
            continue;
        }
        let rep = match subject.g() {
            FunctionOnVariety::Line(g) => is_geometric_at(g, ell)?,
            FunctionOnVariety::Forms { .. } => match degree_bound(subject, ell)? {
                Some(r) => r,
                None => residue_test(subject, ell)?,
            },
        };
        if !rep.geometric {
            primes.push(ell);
            reports.push(rep);
        }
    }
    Ok(NonGeometricPrimeSet {
        primes,
        search_bound: bound,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::ratfunc::RationalFunction;

    fn rf(p: u64, s: &str) -> RationalFunction {
        RationalFunction::parse(&build_field(p, 1).unwrap(), s).unwrap()
    }

    #[test]
    fn examples() {
        let g = rf(7, "3*t^3");
        let r = is_geometric_at(&g, 3).unwrap();
        assert!(!r.geometric);
        let w = r.witness.unwrap();
        assert_eq!(w.mu, Elem(3));
        assert_eq!(w.b, rf(7, "t"));
        // 3 is not a cube mod 7 (cubes are ±1).
        assert!(!r.full_power);

        for ell in [2, 3, 5, 7, 11] {
            assert!(is_geometric_at(&rf(3, "t"), ell).map_or(true, |r| r.geometric));
        }
        let r = is_geometric_at(&rf(3, "t^2"), 2).unwrap();
        assert!(!r.geometric);
        assert_eq!(r.witness.clone().unwrap().mu, Elem::ONE);
        assert_eq!(r.witness.unwrap().b, rf(3, "t"));
        assert!(r.full_power);
    }

    #[test]
    fn errors() {
        let f7 = build_field(7, 1).unwrap();
        assert_eq!(
            is_geometric_at(&RationalFunction::constant(&f7, Elem(3)), 2),
            Err(Error::ConstantFunction)
        );
        assert_eq!(is_geometric_at(&rf(7, "t"), 7), Err(Error::CharacteristicPrime(7)));
        assert_eq!(is_geometric_at(&rf(7, "t"), 4), Err(Error::NotPrime(4)));
        assert_eq!(
            is_geometric_at(&RationalFunction::zero(&f7), 2),
            Err(Error::ZeroFunction)
        );
    }

    #[test]
    fn prime_sets() {
        let set = nongeometric_primes(&Subject::line(rf(7, "3*t^3"))).unwrap();
        assert_eq!(set.primes, vec![3]);
        assert_eq!(set.search_bound, 6);
        assert!(nongeometric_primes(&Subject::line(rf(2, "t"))).unwrap().primes.is_empty());
        let set = nongeometric_primes(&Subject::line(rf(5, "t^6/(t+1)^6"))).unwrap();
        assert_eq!(set.primes, vec![2, 3]);
        assert!(set.report(2).unwrap().full_power);
        assert!(!set.report(3).unwrap().full_power);
    }

    #[test]
    fn characteristic_p_multiplicities() {
        // (t+1)^9 over GF(3): multiplicity 9 is divisible by ℓ = 3 = p, which
        // is excluded, but not by 2.
        let g = rf(3, "(t+1)^9");
        assert!(is_geometric_at(&g, 2).unwrap().geometric);
        let g = rf(3, "(t+1)^6/t^2");
        let r = is_geometric_at(&g, 2).unwrap();
        assert!(!r.geometric);
        assert_eq!(r.witness.unwrap().b, rf(3, "(t+1)^3/t"));
    }

    #[test]
    fn oracle_agrees_on_samples() {
        for (p, s) in [
            (7, "3*t^3"),
            (7, "t^2/(t+1)^4"),
            (5, "2*t^4"),
            (3, "(t^2+1)^2*t^4"),
            (5, "t^6/(t+1)^6"),
            (2, "t^3*(t+1)^6"),
        ] {
            let g = rf(p, s);
            for ell in [2u64, 3, 5, 7] {
                if ell == p {
                    continue;
                }
                let fast = is_geometric_at(&g, ell).unwrap();
                let slow = geometric_oracle(&g, ell).unwrap();
                assert_eq!(fast.geometric, slow.is_none(), "{s} at {ell}");
            }
        }
    }

    #[test]
    fn residue_test_on_plane() {
        let f2 = build_field(2, 1).unwrap();
        let s = Subject::parse(&f2, "P2", "x/y", 1_000_000).unwrap();
        assert!(s.nongeometric().unwrap().primes.is_empty());
        assert!(s.geometricity(3).unwrap().geometric);
        assert!(s.geometricity(7).unwrap().geometric);

        // (x/y)^2 over GF(3) is a square: non-geometric at 2, full power.
        let f3 = build_field(3, 1).unwrap();
        let s = Subject::parse(&f3, "P2", "x^2/y^2", 1_000_000).unwrap();
        let set = s.nongeometric().unwrap();
        assert_eq!(set.primes, vec![2]);
        assert!(set.reports[0].full_power);
        // 2x^2/y^2 over GF(3): 2 is a non-square, so not a full power.
        let s = Subject::parse(&f3, "P2", "2*x^2/y^2", 1_000_000).unwrap();
        let set = s.nongeometric().unwrap();
        assert_eq!(set.primes, vec![2]);
        assert!(!set.reports[0].full_power);
        assert!(s.check_not_full_power().is_ok());
    }

    #[test]
    fn residue_test_on_curve() {
        let f7 = build_field(7, 1).unwrap();
        let s = Subject::parse(&f7, "curve: x^3 + y^3 + z^3", "x/z", 1_000_000).unwrap();
        for ell in [2u64, 3, 5] {
            assert!(s.geometricity(ell).unwrap().geometric, "{ell}");
        }
        let s = Subject::parse(&f7, "curve: x^3 + y^3 + z^3", "x^3/z^3", 1_000_000).unwrap();
        assert!(!s.geometricity(3).unwrap().geometric);
    }
}
