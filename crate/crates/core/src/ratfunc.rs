//! Rational functions `g = a/b` in F_q(t) in canonical form: coprime, monic
//! denominator, units absorbed into the numerator.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Algebra, Expr};
use crate::field::{Elem, Extension, FiniteField};
use crate::poly::{self, factor_poly, is_irreducible, Poly};

/// Value of a function at a point or closed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Value {
    Unit(Elem),
    Zero,
    Pole,
    /// Numerator and denominator of a fixed representative both vanish.
    Indeterminate,
}

impl Value {
    pub fn unit(self) -> Option<Elem> {
        match self {
            Value::Unit(x) => Some(x),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

/// Builds the canonical form of `a/b`.
pub fn rf_make(a: &Poly, b: &Poly) -> Result<RationalFunction> {
    if b.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let field = a.field();
    if a.is_zero() {
        return Ok(RationalFunction::zero(field));
    }
    let g = a.gcd(b);
    let a = a.div_rem(&g)?.0;
    let b = b.div_rem(&g)?.0;
    let c = field.inv(b.lc())?;
    Ok(RationalFunction {
        num: a.scale(c),
        den: b.scale(c),
    })
}

impl RationalFunction {
    /// The distinguished zero element `0/1`.
    pub fn zero(field: &Arc<FiniteField>) -> Self {
        RationalFunction {
            num: Poly::zero(field),
            den: Poly::one(field),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.field());
        RationalFunction { num: p, den }
    }

    pub fn constant(field: &Arc<FiniteField>, c: Elem) -> Self {
        Self::from_poly(Poly::constant(field, c))
    }

    pub fn t(field: &Arc<FiniteField>) -> Self {
        Self::from_poly(Poly::t(field))
    }

    /// Parses an expression in `t` with integer coefficients reduced mod p.
    /// Over GF(p^k) with `k > 1` the letter `a` denotes the power-basis root.
    pub fn parse(field: &Arc<FiniteField>, src: &str) -> Result<Self> {
        let expr = Expr::parse(src)?;
        expr.fold(&RfAlgebra { field })
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Whether the function lies in F_q (zero included).
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add(&self, o: &Self) -> Self {
        rf_make(
            &self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            &self.den.mul(&o.den),
        )
        .expect("denominators are nonzero")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        rf_make(&self.num.mul(&o.num), &self.den.mul(&o.den)).expect("denominators are nonzero")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        rf_make(&self.den, &self.num)
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn scale(&self, c: Elem) -> Self {
        self.mul(&Self::constant(self.field(), c))
    }

    /// Integer power; negative exponents need a nonzero function.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = u32::try_from(e.unsigned_abs())
            .map_err(|_| Error::Overflow(format!("exponent {e} too large")))?;
        Ok(RationalFunction {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    fn require_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroFunction)
        } else {
            Ok(())
        }
    }

    /// `v_P(g)` for a monic irreducible `P`.
    pub fn valuation(&self, p: &Poly) -> Result<i64> {
        self.require_nonzero()?;
        if !p.is_monic() || !is_irreducible(p)? {
            return Err(Error::InvalidArgument(format!(
                "{p} is not a monic irreducible polynomial"
            )));
        }
        Ok(self.num.multiplicity(p) as i64 - self.den.multiplicity(p) as i64)
    }

    /// `v_∞(g) = deg b − deg a`.
    pub fn valuation_infinity(&self) -> Result<i64> {
        self.require_nonzero()?;
        Ok(self.den.degree().unwrap() as i64 - self.num.degree().unwrap() as i64)
    }

    /// The finite valuations: each monic irreducible dividing `a` or `b`
    /// with `v_P(g)`, in canonical order.
    pub fn divisor(&self) -> Result<Vec<(Poly, i64)>> {
        self.require_nonzero()?;
        let mut out: Vec<(Poly, i64)> = Vec::new();
        if !self.num.is_constant() {
            out.extend(factor_poly(&self.num)?.factors.into_iter().map(|(f, e)| (f, e as i64)));
        }
        if !self.den.is_constant() {
            out.extend(factor_poly(&self.den)?.factors.into_iter().map(|(f, e)| (f, -(e as i64))));
        }
        out.sort();
        Ok(out)
    }

    /// Degree of `g` as a divisor on P¹: the sum of `|v_Y(g)|·deg Y` over all
    /// places, including infinity. Equals `2·max(deg a, deg b)`.
    pub fn deg_g(&self) -> Result<u64> {
        let finite: u64 = self
            .divisor()?
            .iter()
            .map(|(f, v)| v.unsigned_abs() * f.degree().unwrap() as u64)
            .sum();
        Ok(finite + self.valuation_infinity()?.unsigned_abs())
    }

    /// `max(deg a, deg b)`, the degree of the map P¹ → P¹.
    pub fn height(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Value at the affine point `x` of GF(q^n), where `ext` embeds GF(q).
    pub fn eval_at(&self, ext: &Extension, x: Elem) -> Value {
        let a = eval_embedded(ext, &self.num, x);
        let b = eval_embedded(ext, &self.den, x);
        match (a.is_zero(), b.is_zero()) {
            (false, false) => Value::Unit(ext.ext().div(a, b).expect("nonzero denominator")),
            (true, false) => Value::Zero,
            (false, true) => Value::Pole,
            (true, true) => Value::Indeterminate,
        }
    }

    /// Value at the point at infinity, via the homogenization of `a/b`.
    pub fn eval_at_infinity(&self, ext: &Extension) -> Value {
        if self.is_zero() {
            return Value::Zero;
        }
        let (da, db) = (self.num.degree().unwrap(), self.den.degree().unwrap());
        match da.cmp(&db) {
            std::cmp::Ordering::Greater => Value::Pole,
            std::cmp::Ordering::Less => Value::Zero,
            std::cmp::Ordering::Equal => Value::Unit(ext.embed(self.num.lc())),
        }
    }

    /// Image of `g` in F_q[t]/(P) ≅ GF(q^n), `n = deg P`, under `t ↦` the
    /// least root of `P` in GF(q^n).
    pub fn reduce_mod(&self, p: &Poly) -> Result<Value> {
        let n = p.degree().filter(|&d| d >= 1).ok_or_else(|| {
            Error::InvalidArgument("reduction needs a nonconstant modulus".into())
        })?;
        let ext = Extension::new(self.field().clone(), n as u32)?;
        self.reduce_mod_in(p, &ext)
    }

    /// As [`reduce_mod`](Self::reduce_mod) with a prebuilt extension of
    /// degree `deg P`.
    pub fn reduce_mod_in(&self, p: &Poly, ext: &Extension) -> Result<Value> {
        self.require_nonzero()?;
        if !is_irreducible(p)? {
            return Err(Error::Reducible);
        }
        if p.degree() != Some(ext.degree() as usize) {
            return Err(Error::InvalidArgument(format!(
                "extension of degree {} does not match deg P = {}",
                ext.degree(),
                p.degree().unwrap()
            )));
        }
        let root = least_root(ext, p);
        Ok(self.eval_at(ext, root))
    }
}

/// The least root in the canonical order of a polynomial over GF(q) that
/// splits in `ext`.
pub fn least_root(ext: &Extension, p: &Poly) -> Elem {
    let coeffs: Vec<Elem> = p.coeffs().iter().map(|&c| ext.embed(c)).collect();
    let monic = poly::monic(&**ext.ext(), &coeffs);
    poly::roots(&**ext.ext(), &monic)[0]
}

fn eval_embedded(ext: &Extension, p: &Poly, x: Elem) -> Elem {
    let f = ext.ext();
    p.coeffs()
        .iter()
        .rev()
        .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), ext.embed(c)))
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            let s = p.to_string();
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 || s.contains('+') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

struct RfAlgebra<'a> {
    field: &'a Arc<FiniteField>,
}

impl Algebra for RfAlgebra<'_> {
    type V = RationalFunction;

    fn int(&self, n: u128) -> Result<RationalFunction> {
        let r = (n % self.field.characteristic() as u128) as i64;
        Ok(RationalFunction::constant(self.field, self.field.from_int(r)))
    }

    fn var(&self, name: char) -> Result<RationalFunction> {
        match (name, self.field.basis_root()) {
            ('t', _) => Ok(RationalFunction::t(self.field)),
            ('a', Some(root)) => Ok(RationalFunction::constant(self.field, root)),
            _ => Err(Error::Parse(format!(
                "unknown variable {name:?}; rational functions use t{}",
                if self.field.degree() > 1 { " and the field root a" } else { "" }
            ))),
        }
    }

    fn add(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        Ok(a.add(b))
    }

    fn sub(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        Ok(a.sub(b))
    }

    fn mul(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        Ok(a.mul(b))
    }

    fn div(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        a.div(b).map_err(|e| match e {
            Error::ZeroFunction => Error::ZeroDenominator,
            e => e,
        })
    }

    fn neg(&self, a: &RationalFunction) -> Result<RationalFunction> {
        Ok(a.neg())
    }

    fn pow(&self, a: &RationalFunction, e: i64) -> Result<RationalFunction> {
        a.pow(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use proptest::prelude::*;

    fn gf(p: u64) -> Arc<FiniteField> {
        build_field(p, 1).unwrap()
    }

    fn rf(field: &Arc<FiniteField>, s: &str) -> RationalFunction {
        RationalFunction::parse(field, s).unwrap()
    }

    #[test]
    fn canonical_forms() {
        let f2 = gf(2);
        let g = rf_make(&Poly::from_ints(&f2, &[0, 1, 1]), &Poly::t(&f2)).unwrap();
        assert_eq!(g, rf(&f2, "t+1"));
        assert!(g.den().is_one());

        let f7 = gf(7);
        let g = rf_make(&Poly::from_ints(&f7, &[0, 0, 0, 3]), &Poly::one(&f7)).unwrap();
        assert_eq!(g.num(), &Poly::from_ints(&f7, &[0, 0, 0, 3]));

        let f5 = gf(5);
        let g = rf_make(&Poly::from_ints(&f5, &[0, 2]), &Poly::from_ints(&f5, &[2])).unwrap();
        assert_eq!(g, RationalFunction::t(&f5));

        assert_eq!(
            rf_make(&Poly::t(&f5), &Poly::zero(&f5)),
            Err(Error::ZeroDenominator)
        );
        assert!(rf_make(&Poly::zero(&f5), &Poly::t(&f5)).unwrap().is_zero());
    }

    #[test]
    fn valuations() {
        let f7 = gf(7);
        let t7 = Poly::t(&f7);
        assert_eq!(rf(&f7, "t").valuation(&t7), Ok(1));
        assert_eq!(rf(&f7, "3*t^3").valuation(&t7), Ok(3));
        let f2 = gf(2);
        let tp1 = Poly::from_ints(&f2, &[1, 1]);
        assert_eq!(rf(&f2, "1/(t+1)").valuation(&tp1), Ok(-1));
        assert_eq!(rf(&f2, "t").valuation_infinity(), Ok(-1));
        assert_eq!(rf(&f7, "3*t^3").valuation_infinity(), Ok(-3));
        assert_eq!(rf(&f2, "1/(t+1)").valuation_infinity(), Ok(1));
        assert_eq!(RationalFunction::zero(&f2).valuation(&tp1), Err(Error::ZeroFunction));
        assert!(rf(&f2, "t").valuation(&Poly::from_ints(&f2, &[1, 0, 1])).is_err());
    }

    #[test]
    fn degrees() {
        let f7 = gf(7);
        assert_eq!(rf(&f7, "3").deg_g(), Ok(0));
        assert_eq!(rf(&f7, "t").deg_g(), Ok(2));
        assert_eq!(rf(&f7, "3*t^3").deg_g(), Ok(6));
        let f5 = gf(5);
        assert_eq!(rf(&f5, "t^6/(t+1)^6").deg_g(), Ok(12));
        // An irreducible quadratic contributes with its degree.
        let f2 = gf(2);
        assert_eq!(rf(&f2, "t^2+t+1").deg_g(), Ok(4));
    }

    #[test]
    fn reductions() {
        let f2 = gf(2);
        let p = Poly::from_ints(&f2, &[1, 1, 1]);
        let v = rf(&f2, "t").reduce_mod(&p).unwrap();
        let ext = Extension::new(f2.clone(), 2).unwrap();
        let x = v.unit().unwrap();
        assert_eq!(ext.ext().mult_order(x), Ok(3));
        // The least root of t^2+t+1 in GF(4) is a, index 2.
        assert_eq!(x, Elem(2));

        let t = Poly::t(&f2);
        assert_eq!(rf(&f2, "t").reduce_mod(&t), Ok(Value::Zero));
        assert_eq!(rf(&f2, "1/t").reduce_mod(&t), Ok(Value::Pole));
        assert_eq!(
            rf(&f2, "t").reduce_mod(&Poly::from_ints(&f2, &[1, 0, 1])),
            Err(Error::Reducible)
        );
    }

    #[test]
    fn reduction_matches_quotient_ring() {
        // Evaluating at the chosen root agrees with arithmetic mod P: the
        // image of a·b⁻¹ is a(ρ)/b(ρ), and P(ρ) = 0.
        let f3 = gf(3);
        let g = rf(&f3, "(t^2+2)/(t+1)");
        for p in crate::poly::enumerate_irreducibles(&f3, 3, 1000).unwrap() {
            let ext = Extension::new(f3.clone(), 3).unwrap();
            let rho = least_root(&ext, &p);
            assert!(eval_embedded(&ext, &p, rho).is_zero());
            let v = g.reduce_mod_in(&p, &ext).unwrap();
            let x = v.unit().unwrap();
            let b = eval_embedded(&ext, g.den(), rho);
            assert_eq!(ext.ext().mul(x, b), eval_embedded(&ext, g.num(), rho));
        }
    }

    #[test]
    fn parse_and_render() {
        let f7 = gf(7);
        for s in ["3*t^3", "(t^2 + 1)/(t + 2)", "t", "6", "1/t", "t/(t + 1)"] {
            let g = rf(&f7, s);
            assert_eq!(rf(&f7, &g.to_string()), g, "{s} -> {g}");
        }
        assert_eq!(rf(&f7, "3*t^3").to_string(), "3*t^3");
        assert_eq!(rf(&f7, "(t^2+1)/(t+2)").to_string(), "(t^2 + 1)/(t + 2)");
        assert_eq!(rf(&f7, "-t"), rf(&f7, "6*t"));
        assert_eq!(rf(&f7, "t^-1"), rf(&f7, "1/t"));
        assert_eq!(RationalFunction::parse(&f7, "1/(t-t)"), Err(Error::ZeroDenominator));
        assert!(RationalFunction::parse(&f7, "x").is_err());

        let f4 = build_field(2, 2).unwrap();
        let g = rf(&f4, "a*t + 1");
        assert_eq!(g.to_string(), "(a)*t + 1");
        assert_eq!(rf(&f4, &g.to_string()), g);
    }

    fn arb_rf(p: u64) -> impl Strategy<Value = RationalFunction> {
        (
            proptest::collection::vec(0..p as i64, 1..6),
            proptest::collection::vec(0..p as i64, 1..6),
        )
            .prop_filter_map("nonzero", move |(a, b)| {
                let f = gf(p);
                let (a, b) = (Poly::from_ints(&f, &a), Poly::from_ints(&f, &b));
                if a.is_zero() || b.is_zero() {
                    return None;
                }
                Some(rf_make(&a, &b).unwrap())
            })
    }

    proptest! {
        #[test]
        fn deg_g_invariants(g in arb_rf(5), m in 1i64..4) {
            let d = g.deg_g().unwrap();
            prop_assert_eq!(d, 2 * g.height() as u64);
            prop_assert_eq!(g.inv().unwrap().deg_g().unwrap(), d);
            prop_assert_eq!(g.pow(m).unwrap().deg_g().unwrap(), m as u64 * d);
        }

        #[test]
        fn principal_divisors_have_degree_zero(g in arb_rf(3)) {
            let finite: i64 = g
                .divisor()
                .unwrap()
                .iter()
                .map(|(f, v)| v * f.degree().unwrap() as i64)
                .sum();
            prop_assert_eq!(finite + g.valuation_infinity().unwrap(), 0);
        }

        #[test]
        fn field_axioms(a in arb_rf(7), b in arb_rf(7)) {
            prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a.clone());
            prop_assert_eq!(a.add(&b).sub(&b), a.clone());
            prop_assert!(a.sub(&a).is_zero());
        }
    }
}
