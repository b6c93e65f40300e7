//! The three concrete varieties (P¹, plane curves, P²), their rational
//! points over GF(q^n), and evaluation of functions at those points.
//!
//! Points are stored with normalized projective coordinates: the last
//! nonzero coordinate is 1. On P¹ the affine point `t = x` is `(x:1)` and
//! infinity is `(1:0)`. Canonical point order is lexicographic on the
//! coordinate indices.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{Algebra, Expr};
use crate::field::{Elem, Extension, FiniteField};
use crate::poly::{self, render_elem};
use crate::ratfunc::{RationalFunction, Value};

/// A polynomial in `x, y, z` over GF(q).
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    field: Arc<FiniteField>,
    // Exponents (x, y, z) -> nonzero coefficient.
    terms: BTreeMap<[u32; 3], Elem>,
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

impl std::hash::Hash for MPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl MPoly {
    pub fn zero(field: &Arc<FiniteField>) -> Self {
        MPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Arc<FiniteField>, c: Elem) -> Self {
        Self::monomial(field, c, [0, 0, 0])
    }

    pub fn monomial(field: &Arc<FiniteField>, c: Elem, exps: [u32; 3]) -> Self {
        let mut m = Self::zero(field);
        if !c.is_zero() {
            m.terms.insert(exps, c);
        }
        m
    }

    /// `x`, `y` or `z` for `i = 0, 1, 2`.
    pub fn var(field: &Arc<FiniteField>, i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Self::monomial(field, Elem::ONE, e)
    }

    /// Parses a polynomial in `x, y, z` (and the field root `a` when k > 1).
    pub fn parse(field: &Arc<FiniteField>, src: &str) -> Result<Self> {
        let frac = Expr::parse(src)?.fold(&FormAlgebra { field })?;
        if frac.den.terms.len() != 1 || frac.den.total_degree() != Some(0) {
            return Err(Error::Parse(format!("{src:?} is not a polynomial")));
        }
        Ok(frac.num)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], Elem)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree of a term; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// The common degree if every term has the same total degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&e, &c) in &o.terms {
            let v = out.field.add(out.terms.get(&e).copied().unwrap_or(Elem::ZERO), c);
            if v.is_zero() {
                out.terms.remove(&e);
            } else {
                out.terms.insert(e, v);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        MPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&e, &c)| (e, self.field.neg(c))).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(&self.field);
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &o.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                let term = Self::monomial(&self.field, self.field.mul(c1, c2), e);
                out = out.add(&term);
            }
        }
        out
    }

    pub fn scale(&self, c: Elem) -> Self {
        self.mul(&Self::constant(&self.field, c))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::constant(&self.field, Elem::ONE);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Value at a point of GF(q^n)³.
    pub fn eval(&self, ext: &Extension, pt: &[Elem]) -> Elem {
        let f = ext.ext();
        self.terms.iter().fold(Elem::ZERO, |acc, (e, &c)| {
            let mut m = ext.embed(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m = f.mul(m, f.pow(pt[i], k as u64));
                }
            }
            f.add(acc, m)
        })
    }

    /// Coefficients of `self(x0, y, z0)` as a polynomial in `y` over GF(q^n).
    fn restrict_y(&self, ext: &Extension, x0: Elem, z0: Elem) -> Vec<Elem> {
        let f = ext.ext();
        let mut out: Vec<Elem> = Vec::new();
        for (e, &c) in &self.terms {
            let j = e[1] as usize;
            if out.len() <= j {
                out.resize(j + 1, Elem::ZERO);
            }
            let m = f.mul(
                ext.embed(c),
                f.mul(f.pow(x0, e[0] as u64), f.pow(z0, e[2] as u64)),
            );
            out[j] = f.add(out[j], m);
        }
        poly::trim(&mut out);
        out
    }

    /// Coefficients of `self(x, y0, z0)` as a polynomial in `x`.
    fn restrict_x(&self, ext: &Extension, y0: Elem, z0: Elem) -> Vec<Elem> {
        let f = ext.ext();
        let mut out: Vec<Elem> = Vec::new();
        for (e, &c) in &self.terms {
            let i = e[0] as usize;
            if out.len() <= i {
                out.resize(i + 1, Elem::ZERO);
            }
            let m = f.mul(
                ext.embed(c),
                f.mul(f.pow(y0, e[1] as u64), f.pow(z0, e[2] as u64)),
            );
            out[i] = f.add(out[i], m);
        }
        poly::trim(&mut out);
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first, then lexicographically largest.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (n, (e, &c)) in terms.into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let mut parts = Vec::new();
            if c != Elem::ONE || e.iter().all(|&k| k == 0) {
                parts.push(render_elem(&self.field, c));
            }
            for (i, &k) in e.iter().enumerate() {
                let v = ['x', 'y', 'z'][i];
                match k {
                    0 => {}
                    1 => parts.push(v.to_string()),
                    _ => parts.push(format!("{v}^{k}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

// A quotient of polynomials in x, y, z, kept without cancellation.
#[derive(Clone)]
struct FormFraction {
    num: MPoly,
    den: MPoly,
}

impl FormFraction {
    fn normalized(num: MPoly, den: MPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if den.total_degree() == Some(0) {
            let c = den.terms[&[0, 0, 0]];
            let f = den.field.clone();
            return Ok(FormFraction {
                num: num.scale(f.inv(c)?),
                den: MPoly::constant(&f, Elem::ONE),
            });
        }
        Ok(FormFraction { num, den })
    }
}

struct FormAlgebra<'a> {
    field: &'a Arc<FiniteField>,
}

impl FormAlgebra<'_> {
    fn poly(&self, p: MPoly) -> FormFraction {
        FormFraction {
            num: p,
            den: MPoly::constant(self.field, Elem::ONE),
        }
    }
}

impl Algebra for FormAlgebra<'_> {
    type V = FormFraction;

    fn int(&self, n: u128) -> Result<FormFraction> {
        let r = (n % self.field.characteristic() as u128) as i64;
        Ok(self.poly(MPoly::constant(self.field, self.field.from_int(r))))
    }

    fn var(&self, name: char) -> Result<FormFraction> {
        let p = match (name, self.field.basis_root()) {
            ('x', _) => MPoly::var(self.field, 0),
            ('y', _) => MPoly::var(self.field, 1),
            ('z', _) => MPoly::var(self.field, 2),
            ('a', Some(root)) => MPoly::constant(self.field, root),
            _ => {
                return Err(Error::Parse(format!(
                    "unknown variable {name:?}; forms use x, y, z"
                )))
            }
        };
        Ok(self.poly(p))
    }

    fn add(&self, a: &FormFraction, b: &FormFraction) -> Result<FormFraction> {
        if a.den == b.den {
            return Ok(FormFraction {
                num: a.num.add(&b.num),
                den: a.den.clone(),
            });
        }
        FormFraction::normalized(a.num.mul(&b.den).add(&b.num.mul(&a.den)), a.den.mul(&b.den))
    }

    fn sub(&self, a: &FormFraction, b: &FormFraction) -> Result<FormFraction> {
        self.add(a, &self.neg(b)?)
    }

    fn mul(&self, a: &FormFraction, b: &FormFraction) -> Result<FormFraction> {
        FormFraction::normalized(a.num.mul(&b.num), a.den.mul(&b.den))
    }

    fn div(&self, a: &FormFraction, b: &FormFraction) -> Result<FormFraction> {
        FormFraction::normalized(a.num.mul(&b.den), a.den.mul(&b.num))
    }

    fn neg(&self, a: &FormFraction) -> Result<FormFraction> {
        Ok(FormFraction {
            num: a.num.neg(),
            den: a.den.clone(),
        })
    }

    fn pow(&self, a: &FormFraction, e: i64) -> Result<FormFraction> {
        let k = u32::try_from(e.unsigned_abs())
            .map_err(|_| Error::Overflow(format!("exponent {e} too large")))?;
        let (n, d) = (a.num.pow(k), a.den.pow(k));
        if e < 0 {
            FormFraction::normalized(d, n)
        } else {
            FormFraction::normalized(n, d)
        }
    }
}

/// One of the supported varieties over GF(q).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarietyModel {
    ProjectiveLine,
    /// The curve `f = 0` in P², `f` homogeneous of degree ≥ 1. Geometric
    /// integrality is the caller's assertion.
    PlaneCurve(MPoly),
    ProjectivePlane,
}

impl VarietyModel {
    /// Parses `P1`, `P2` or `curve: <form in x, y, z>`.
    pub fn parse(field: &Arc<FiniteField>, src: &str) -> Result<Self> {
        let s = src.trim();
        match s {
            "P1" => return Ok(VarietyModel::ProjectiveLine),
            "P2" => return Ok(VarietyModel::ProjectivePlane),
            _ => {}
        }
        let body = s
            .strip_prefix("curve:")
            .ok_or_else(|| Error::Parse(format!("unknown variety {src:?}; use P1, P2 or curve: f")))?;
        Self::curve(MPoly::parse(field, body)?)
    }

    pub fn curve(f: MPoly) -> Result<Self> {
        match f.homogeneous_degree() {
            Some(d) if d >= 1 => Ok(VarietyModel::PlaneCurve(f)),
            _ => Err(Error::InvalidArgument(format!(
                "curve equation {f} must be a nonzero form of degree >= 1"
            ))),
        }
    }

    pub fn dim(&self) -> u32 {
        match self {
            VarietyModel::ProjectivePlane => 2,
            _ => 1,
        }
    }

    /// Number of projective coordinates of a point.
    pub fn coordinates(&self) -> usize {
        match self {
            VarietyModel::ProjectiveLine => 2,
            _ => 3,
        }
    }

    /// Number of items an enumeration over GF(Q) touches, used against the
    /// cap. For curves this is the number of fibres scanned times the degree.
    pub fn enumeration_size(&self, big_q: u64) -> u128 {
        let q = big_q as u128;
        match self {
            VarietyModel::ProjectiveLine => q + 1,
            VarietyModel::ProjectivePlane => q * q + q + 1,
            VarietyModel::PlaneCurve(f) => (q + 1) * f.total_degree().unwrap_or(1).max(1) as u128,
        }
    }
}

impl fmt::Display for VarietyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarietyModel::ProjectiveLine => write!(f, "P1"),
            VarietyModel::ProjectivePlane => write!(f, "P2"),
            VarietyModel::PlaneCurve(c) => write!(f, "curve: {c}"),
        }
    }
}

/// A point with normalized projective coordinates over GF(q^n).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub coords: Vec<Elem>,
}

impl RationalPoint {
    /// Normalizes so that the last nonzero coordinate is 1.
    pub fn new(field: &FiniteField, coords: Vec<Elem>) -> Result<Self> {
        let last = coords
            .iter()
            .rposition(|c| !c.is_zero())
            .ok_or_else(|| Error::InvalidArgument("all coordinates are zero".into()))?;
        let s = field.inv(coords[last])?;
        Ok(RationalPoint {
            coords: coords.iter().map(|&c| field.mul(c, s)).collect(),
        })
    }

    pub fn render(&self, field: &FiniteField) -> String {
        let parts: Vec<String> = self.coords.iter().map(|&c| render_elem(field, c)).collect();
        format!("({})", parts.join(":"))
    }

    fn is_normalized(&self) -> bool {
        self.coords
            .iter()
            .rev()
            .find(|c| !c.is_zero())
            .is_some_and(|&c| c == Elem::ONE)
    }
}

/// A function on one of the varieties: a rational function in `t` on P¹,
/// or a fixed ratio `A/B` of forms of equal degree on P² and plane curves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunctionOnVariety {
    Line(RationalFunction),
    Forms { a: MPoly, b: MPoly },
}

impl FunctionOnVariety {
    pub fn forms(a: MPoly, b: MPoly) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if a.is_zero() {
            return Err(Error::ZeroFunction);
        }
        match (a.homogeneous_degree(), b.homogeneous_degree()) {
            (Some(da), Some(db)) if da == db => Ok(FunctionOnVariety::Forms { a, b }),
            _ => Err(Error::InvalidArgument(format!(
                "A = {a} and B = {b} must be forms of the same degree"
            ))),
        }
    }

    /// Parses a function for `variety`: an expression in `t` on P¹; on P²
    /// and curves either `A = ...; B = ...` or a quotient expression in
    /// `x, y, z` such as `x/y`.
    pub fn parse(field: &Arc<FiniteField>, variety: &VarietyModel, src: &str) -> Result<Self> {
        if let VarietyModel::ProjectiveLine = variety {
            return Ok(FunctionOnVariety::Line(RationalFunction::parse(field, src)?));
        }
        if src.contains('=') {
            let mut a = None;
            let mut b = None;
            for part in src.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected A = ... or B = ..., got {part:?}")))?;
                match k.trim() {
                    "A" => a = Some(MPoly::parse(field, v)?),
                    "B" => b = Some(MPoly::parse(field, v)?),
                    other => return Err(Error::Parse(format!("unknown key {other:?} in function spec"))),
                }
            }
            let a = a.ok_or_else(|| Error::Parse("function spec lacks A".into()))?;
            let b = b.ok_or_else(|| Error::Parse("function spec lacks B".into()))?;
            return Self::forms(a, b);
        }
        let frac = Expr::parse(src)?.fold(&FormAlgebra { field })?;
        Self::forms(frac.num, frac.den)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        match self {
            FunctionOnVariety::Line(g) => g.field(),
            FunctionOnVariety::Forms { a, .. } => a.field(),
        }
    }

    pub fn as_line(&self) -> Option<&RationalFunction> {
        match self {
            FunctionOnVariety::Line(g) => Some(g),
            _ => None,
        }
    }

    /// Whether the function is an element of F_q (for forms: `A = c·B`).
    pub fn is_constant(&self) -> bool {
        match self {
            FunctionOnVariety::Line(g) => g.is_constant(),
            FunctionOnVariety::Forms { a, b } => {
                let (ea, ca) = a.terms.iter().next_back().expect("A is nonzero");
                let Some(cb) = b.terms.get(ea) else {
                    return false;
                };
                let f = a.field();
                let c = f.div(*ca, *cb).expect("nonzero coefficient");
                a.sub(&b.scale(c)).is_zero()
            }
        }
    }

    fn check_variety(&self, variety: &VarietyModel) -> Result<()> {
        match (self, variety) {
            (FunctionOnVariety::Line(_), VarietyModel::ProjectiveLine) => Ok(()),
            (FunctionOnVariety::Forms { .. }, VarietyModel::ProjectiveLine) => Err(
                Error::InvalidArgument("P1 functions are rational functions in t".into()),
            ),
            (FunctionOnVariety::Line(_), _) => Err(Error::InvalidArgument(
                "functions on P2 and plane curves are quotients of forms in x, y, z".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Value at normalized coordinates already known to lie on the variety.
    #[inline]
    pub(crate) fn value_at(&self, ext: &Extension, c: &[Elem]) -> Value {
        match self {
            FunctionOnVariety::Line(g) => {
                if c[1].is_zero() {
                    g.eval_at_infinity(ext)
                } else {
                    g.eval_at(ext, c[0])
                }
            }
            FunctionOnVariety::Forms { a, b } => {
                let (va, vb) = (a.eval(ext, c), b.eval(ext, c));
                match (va.is_zero(), vb.is_zero()) {
                    (false, false) => Value::Unit(ext.ext().div(va, vb).expect("nonzero")),
                    (true, false) => Value::Zero,
                    (false, true) => Value::Pole,
                    (true, true) => Value::Indeterminate,
                }
            }
        }
    }
}

impl fmt::Display for FunctionOnVariety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionOnVariety::Line(g) => write!(f, "{g}"),
            FunctionOnVariety::Forms { a, b } => write!(f, "A = {a}; B = {b}"),
        }
    }
}

fn check_cap(variety: &VarietyModel, ext: &Extension, cap: u64) -> Result<()> {
    let needed = variety.enumeration_size(ext.ext().order() as u64);
    if needed > cap as u128 {
        return Err(Error::CapExceeded { needed, cap });
    }
    Ok(())
}

fn curve_points(f: &MPoly, ext: &Extension) -> Vec<RationalPoint> {
    let big = ext.ext();
    let mut out = Vec::new();
    let all: Vec<Elem> = big.elements().collect();
    let solve = |h: Vec<Elem>| -> Vec<Elem> {
        if h.is_empty() {
            all.clone()
        } else {
            poly::roots(&**big, &h)
        }
    };
    // z = 1: for each x, the y-roots of f(x, y, 1).
    let affine: Vec<Vec<RationalPoint>> = all
        .par_iter()
        .map(|&x| {
            solve(f.restrict_y(ext, x, Elem::ONE))
                .into_iter()
                .map(|y| RationalPoint {
                    coords: vec![x, y, Elem::ONE],
                })
                .collect()
        })
        .collect();
    out.extend(affine.into_iter().flatten());
    // z = 0, y = 1: the x-roots of f(x, 1, 0).
    for x in solve(f.restrict_x(ext, Elem::ONE, Elem::ZERO)) {
        out.push(RationalPoint {
            coords: vec![x, Elem::ONE, Elem::ZERO],
        });
    }
    if f.eval(ext, &[Elem::ONE, Elem::ZERO, Elem::ZERO]).is_zero() {
        out.push(RationalPoint {
            coords: vec![Elem::ONE, Elem::ZERO, Elem::ZERO],
        });
    }
    out.sort();
    out
}

/// All GF(q^n)-rational points of `variety`, in canonical order.
pub fn enumerate_points(
    variety: &VarietyModel,
    ext: &Extension,
    cap: u64,
) -> Result<Vec<RationalPoint>> {
    check_cap(variety, ext, cap)?;
    let q = ext.ext().order();
    let pt = |c: Vec<Elem>| RationalPoint { coords: c };
    let mut out: Vec<RationalPoint> = match variety {
        VarietyModel::ProjectiveLine => (0..q)
            .map(|x| pt(vec![Elem(x), Elem::ONE]))
            .chain(std::iter::once(pt(vec![Elem::ONE, Elem::ZERO])))
            .collect(),
        VarietyModel::ProjectivePlane => {
            let mut v = Vec::with_capacity((q as usize + 1) * q as usize + 1);
            for x in 0..q {
                for y in 0..q {
                    v.push(pt(vec![Elem(x), Elem(y), Elem::ONE]));
                }
            }
            for x in 0..q {
                v.push(pt(vec![Elem(x), Elem::ONE, Elem::ZERO]));
            }
            v.push(pt(vec![Elem::ONE, Elem::ZERO, Elem::ZERO]));
            v
        }
        VarietyModel::PlaneCurve(f) => return Ok(curve_points(f, ext)),
    };
    out.sort();
    Ok(out)
}

/// Folds `visit` over every rational point in parallel. The accumulator
/// merge must be associative and commutative; all uses here add integers.
pub(crate) fn fold_points<T, I, F, M>(
    variety: &VarietyModel,
    ext: &Extension,
    cap: u64,
    identity: I,
    visit: F,
    merge: M,
) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(T, &[Elem]) -> T + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    check_cap(variety, ext, cap)?;
    let q = ext.ext().order();
    Ok(match variety {
        VarietyModel::ProjectiveLine => {
            let affine = (0..q)
                .into_par_iter()
                .fold(&identity, |acc, x| visit(acc, &[Elem(x), Elem::ONE]))
                .reduce(&identity, &merge);
            visit(affine, &[Elem::ONE, Elem::ZERO])
        }
        VarietyModel::ProjectivePlane => {
            let affine = (0..q)
                .into_par_iter()
                .fold(&identity, |mut acc, x| {
                    for y in 0..q {
                        acc = visit(acc, &[Elem(x), Elem(y), Elem::ONE]);
                    }
                    acc
                })
                .reduce(&identity, &merge);
            let mut acc = affine;
            for x in 0..q {
                acc = visit(acc, &[Elem(x), Elem::ONE, Elem::ZERO]);
            }
            visit(acc, &[Elem::ONE, Elem::ZERO, Elem::ZERO])
        }
        VarietyModel::PlaneCurve(f) => curve_points(f, ext)
            .par_iter()
            .fold(&identity, |acc, p| visit(acc, &p.coords))
            .reduce(&identity, &merge),
    })
}

/// Checks that `rho` is a normalized point of `variety`.
pub fn contains(variety: &VarietyModel, ext: &Extension, rho: &RationalPoint) -> bool {
    if rho.coords.len() != variety.coordinates() || !rho.is_normalized() {
        return false;
    }
    let q = ext.ext().order();
    if rho.coords.iter().any(|c| c.0 >= q) {
        return false;
    }
    match variety {
        VarietyModel::PlaneCurve(f) => f.eval(ext, &rho.coords).is_zero(),
        _ => true,
    }
}

/// `g(ρ)` as in `ρ^#(a)/ρ^#(b)`: a unit, a zero, a pole or (for a fixed
/// representative of forms) indeterminate.
pub fn evaluate(
    g: &FunctionOnVariety,
    variety: &VarietyModel,
    ext: &Extension,
    rho: &RationalPoint,
) -> Result<Value> {
    g.check_variety(variety)?;
    if !contains(variety, ext, rho) {
        return Err(Error::NotOnVariety);
    }
    Ok(g.value_at(ext, &rho.coords))
}

/// The points of `R_g^{(n)}` together with the counts of excluded points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub points: Vec<RationalPoint>,
    pub zeros: u64,
    pub poles: u64,
    pub indeterminate: u64,
}

impl Restriction {
    pub fn total(&self) -> u64 {
        self.points.len() as u64 + self.zeros + self.poles + self.indeterminate
    }
}

/// The rational points at which `g` is a unit, canonical order.
pub fn restricted_points(
    g: &FunctionOnVariety,
    variety: &VarietyModel,
    ext: &Extension,
    cap: u64,
) -> Result<Restriction> {
    g.check_variety(variety)?;
    let mut r = Restriction {
        points: Vec::new(),
        zeros: 0,
        poles: 0,
        indeterminate: 0,
    };
    for p in enumerate_points(variety, ext, cap)? {
        match g.value_at(ext, &p.coords) {
            Value::Unit(_) => r.points.push(p),
            Value::Zero => r.zeros += 1,
            Value::Pole => r.poles += 1,
            Value::Indeterminate => r.indeterminate += 1,
        }
    }
    Ok(r)
}

/// Exact point count and its normalized deviation from `Q^r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCountReport {
    pub count: u64,
    /// `|count − Q^r| / Q^(r − 1/2)`.
    pub lang_weil_ratio: f64,
}

pub fn point_count_report(variety: &VarietyModel, ext: &Extension, cap: u64) -> Result<PointCountReport> {
    let count = fold_points(variety, ext, cap, || 0u64, |n, _| n + 1, |a, b| a + b)?;
    let q = ext.ext().order() as f64;
    let r = variety.dim() as i32;
    let main = q.powi(r);
    Ok(PointCountReport {
        count,
        lang_weil_ratio: (count as f64 - main).abs() / q.powf(r as f64 - 0.5),
    })
}

/// Coordinate-wise `q`-power Frobenius.
pub fn frobenius_point(ext: &Extension, rho: &RationalPoint) -> RationalPoint {
    RationalPoint {
        coords: rho.coords.iter().map(|&c| ext.frobenius(c)).collect(),
    }
}

/// Outcome of the point-count plausibility check for a plane curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSanity {
    /// `(n, #C(GF(q^n)), allowed deviation)` per tested degree.
    pub rows: Vec<(u32, u64, f64)>,
    pub plausible: bool,
}

/// Cheap evidence of absolute irreducibility: an absolutely irreducible
/// plane curve of degree `d` has `|#C(GF(Q)) − Q − 1| ≤ (d−1)(d−2)·√Q`,
/// while a curve splitting into several components over GF(Q) has about
/// `m·Q` points. Tests `n = 1..=max_n` within the cap. This is a necessary
/// condition only.
pub fn curve_sanity(f: &MPoly, max_n: u32, cap: u64) -> Result<CurveSanity> {
    let variety = VarietyModel::curve(f.clone())?;
    let d = f.total_degree().unwrap() as f64;
    let mut rows = Vec::new();
    let mut plausible = true;
    for n in 1..=max_n {
        let ext = Extension::new(f.field().clone(), n)?;
        let q = ext.ext().order() as f64;
        if variety.enumeration_size(q as u64) > cap as u128 {
            break;
        }
        let count = curve_points(f, &ext).len() as u64;
        let allowed = (d - 1.0) * (d - 2.0) * q.sqrt();
        plausible &= (count as f64 - q - 1.0).abs() <= allowed + 1e-9;
        rows.push((n, count, allowed));
    }
    if rows.is_empty() {
        return Err(Error::CapExceeded {
            needed: variety.enumeration_size(f.field().order() as u64),
            cap,
        });
    }
    Ok(CurveSanity { rows, plausible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, DEFAULT_CAP};

    fn ext(p: u64, n: u32) -> Extension {
        Extension::new(build_field(p, 1).unwrap(), n).unwrap()
    }

    #[test]
    fn point_counts() {
        let cases = [
            (VarietyModel::ProjectiveLine, 2, 1, 3),
            (VarietyModel::ProjectiveLine, 2, 2, 5),
            (VarietyModel::ProjectivePlane, 2, 1, 7),
            (VarietyModel::ProjectivePlane, 3, 1, 13),
            (VarietyModel::ProjectivePlane, 2, 2, 21),
        ];
        for (v, p, n, want) in cases {
            let e = ext(p, n);
            let pts = enumerate_points(&v, &e, DEFAULT_CAP).unwrap();
            assert_eq!(pts.len(), want);
            let mut sorted = pts.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, pts);
        }
    }

    #[test]
    fn lang_weil_reports() {
        let r = point_count_report(&VarietyModel::ProjectiveLine, &ext(2, 3), DEFAULT_CAP).unwrap();
        assert_eq!(r.count, 9);
        assert!((r.lang_weil_ratio - 1.0 / 8f64.sqrt()).abs() < 1e-12);
        let r = point_count_report(&VarietyModel::ProjectivePlane, &ext(3, 1), DEFAULT_CAP).unwrap();
        assert_eq!(r.count, 13);
        assert!((r.lang_weil_ratio - 4.0 / 27f64.sqrt()).abs() < 1e-12);
        for (p, n) in [(3, 2), (5, 1), (7, 2)] {
            let e = ext(p, n);
            let q = e.ext().order() as f64;
            let r = point_count_report(&VarietyModel::ProjectiveLine, &e, DEFAULT_CAP).unwrap();
            assert!((r.lang_weil_ratio - q.powf(-0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let e = ext(2, 10);
        assert!(matches!(
            enumerate_points(&VarietyModel::ProjectivePlane, &e, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn evaluation_examples() {
        let f2 = build_field(2, 1).unwrap();
        let e = ext(2, 1);
        let g = FunctionOnVariety::parse(&f2, &VarietyModel::ProjectiveLine, "t").unwrap();
        let inf = RationalPoint { coords: vec![Elem::ONE, Elem::ZERO] };
        let one = RationalPoint { coords: vec![Elem::ONE, Elem::ONE] };
        let p1 = VarietyModel::ProjectiveLine;
        assert_eq!(evaluate(&g, &p1, &e, &inf), Ok(Value::Pole));
        assert_eq!(evaluate(&g, &p1, &e, &one), Ok(Value::Unit(Elem::ONE)));

        let p2 = VarietyModel::ProjectivePlane;
        let h = FunctionOnVariety::parse(&f2, &p2, "x/y").unwrap();
        let ones = RationalPoint { coords: vec![Elem::ONE; 3] };
        assert_eq!(evaluate(&h, &p2, &e, &ones), Ok(Value::Unit(Elem::ONE)));
        let origin = RationalPoint { coords: vec![Elem::ZERO, Elem::ZERO, Elem::ONE] };
        assert_eq!(evaluate(&h, &p2, &e, &origin), Ok(Value::Indeterminate));
        let bad = RationalPoint { coords: vec![Elem::ONE, Elem::ONE, Elem::ZERO, Elem::ONE] };
        assert_eq!(evaluate(&h, &p2, &e, &bad), Err(Error::NotOnVariety));
    }

    #[test]
    fn restricted_examples() {
        let f2 = build_field(2, 1).unwrap();
        let p1 = VarietyModel::ProjectiveLine;
        let g = FunctionOnVariety::parse(&f2, &p1, "t").unwrap();
        let r = restricted_points(&g, &p1, &ext(2, 1), DEFAULT_CAP).unwrap();
        assert_eq!(r.points, vec![RationalPoint { coords: vec![Elem::ONE, Elem::ONE] }]);
        assert_eq!((r.zeros, r.poles), (1, 1));
        let r = restricted_points(&g, &p1, &ext(2, 2), DEFAULT_CAP).unwrap();
        assert_eq!(r.points.len(), 3);
        let f5 = build_field(5, 1).unwrap();
        let c = FunctionOnVariety::parse(&f5, &p1, "3").unwrap();
        let r = restricted_points(&c, &p1, &ext(5, 2), DEFAULT_CAP).unwrap();
        assert_eq!(r.points.len(), 26);
    }

    #[test]
    fn fermat_cubic_points() {
        // x^3 + y^3 + z^3 over GF(7); oracle: brute force over P².
        let f7 = build_field(7, 1).unwrap();
        let v = VarietyModel::parse(&f7, "curve: x^3 + y^3 + z^3").unwrap();
        let e = ext(7, 1);
        let pts = enumerate_points(&v, &e, DEFAULT_CAP).unwrap();
        let VarietyModel::PlaneCurve(f) = &v else { unreachable!() };
        let brute: Vec<RationalPoint> = enumerate_points(&VarietyModel::ProjectivePlane, &e, DEFAULT_CAP)
            .unwrap()
            .into_iter()
            .filter(|p| f.eval(&e, &p.coords).is_zero())
            .collect();
        assert_eq!(pts, brute);
        assert_eq!(pts.len(), 9);
        for p in &pts {
            assert!(contains(&v, &e, p));
        }
    }

    #[test]
    fn curve_points_match_brute_force_over_extensions() {
        for (p, spec, n) in [
            (2, "curve: y^2*z + y*z^2 + x^3", 3),
            (3, "curve: x^2 + y^2 + z^2", 2),
            (5, "curve: y^2*z - x^3 - x*z^2", 2),
            (2, "curve: x*y", 2),
        ] {
            let f = build_field(p, 1).unwrap();
            let v = VarietyModel::parse(&f, spec).unwrap();
            let e = ext(p, n);
            let VarietyModel::PlaneCurve(c) = &v else { unreachable!() };
            let brute: Vec<RationalPoint> =
                enumerate_points(&VarietyModel::ProjectivePlane, &e, DEFAULT_CAP)
                    .unwrap()
                    .into_iter()
                    .filter(|pt| c.eval(&e, &pt.coords).is_zero())
                    .collect();
            assert_eq!(enumerate_points(&v, &e, DEFAULT_CAP).unwrap(), brute, "{spec}");
        }
    }

    #[test]
    fn frobenius_permutes_points_and_commutes_with_evaluation() {
        let f3 = build_field(3, 1).unwrap();
        let cases = [
            (VarietyModel::ProjectiveLine, "(t^2+1)/(t+2)"),
            (VarietyModel::ProjectivePlane, "(x^2 + y*z)/(y^2)"),
            (VarietyModel::parse(&f3, "curve: y^2*z - x^3 + x*z^2").unwrap(), "x/z"),
        ];
        for (v, g) in cases {
            let g = FunctionOnVariety::parse(&f3, &v, g).unwrap();
            let e = ext(3, 3);
            let pts = enumerate_points(&v, &e, DEFAULT_CAP).unwrap();
            let mut image: Vec<_> = pts.iter().map(|p| frobenius_point(&e, p)).collect();
            image.sort();
            assert_eq!(image, pts);
            for p in &pts {
                let fp = frobenius_point(&e, p);
                let (a, b) = (g.value_at(&e, &p.coords), g.value_at(&e, &fp.coords));
                match (a, b) {
                    (Value::Unit(x), Value::Unit(y)) => assert_eq!(e.frobenius(x), y),
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }

    #[test]
    fn line_count_matches_closed_points() {
        // #P¹(GF(q^n)) = Σ_{d|n} d·(#irreducibles of degree d + [d = 1]).
        for (p, n) in [(2u64, 6u32), (3, 4), (5, 2)] {
            let f = build_field(p, 1).unwrap();
            let mut total = 0u64;
            for d in 1..=n {
                if n % d == 0 {
                    let closed = crate::poly::gauss_count(p, d).unwrap() + (d == 1) as u64;
                    total += d as u64 * closed;
                }
            }
            let e = Extension::new(f, n).unwrap();
            let count = point_count_report(&VarietyModel::ProjectiveLine, &e, DEFAULT_CAP).unwrap().count;
            assert_eq!(count, total);
        }
    }

    #[test]
    fn counter_consistency() {
        // |#R − Q^r| ≤ #excluded + |#X − Q^r|.
        let f2 = build_field(2, 1).unwrap();
        let v = VarietyModel::ProjectivePlane;
        let g = FunctionOnVariety::parse(&f2, &v, "A = x*z; B = y^2").unwrap();
        for n in 1..=3 {
            let e = ext(2, n);
            let r = restricted_points(&g, &v, &e, DEFAULT_CAP).unwrap();
            let q2 = (e.ext().order() as i64).pow(2);
            let total = r.total() as i64;
            let excluded = (r.zeros + r.poles + r.indeterminate) as i64;
            assert!((r.points.len() as i64 - q2).abs() <= excluded + (total - q2).abs());
        }
    }

    #[test]
    fn parsing_forms() {
        let f2 = build_field(2, 1).unwrap();
        let p2 = VarietyModel::ProjectivePlane;
        let g = FunctionOnVariety::parse(&f2, &p2, "A = x*z; B = y^2").unwrap();
        assert_eq!(g.to_string(), "A = x*z; B = y^2");
        assert!(FunctionOnVariety::parse(&f2, &p2, "A = x; B = y^2").is_err());
        assert!(FunctionOnVariety::parse(&f2, &p2, "x + 1").is_err());
        assert!(FunctionOnVariety::parse(&f2, &p2, "x/y").unwrap() != g);
        assert!(FunctionOnVariety::parse(&f2, &p2, "(x+y)/(y+x)").unwrap().is_constant());
        assert!(!FunctionOnVariety::parse(&f2, &p2, "x/y").unwrap().is_constant());
        assert!(VarietyModel::parse(&f2, "curve: x + 1").is_err());
        assert!(VarietyModel::parse(&f2, "P3").is_err());
        let f7 = build_field(7, 1).unwrap();
        let c = MPoly::parse(&f7, "x^3 + y^3 + z^3").unwrap();
        assert_eq!(c.to_string(), "x^3 + y^3 + z^3");
        assert_eq!(MPoly::parse(&f7, &c.to_string()).unwrap(), c);
    }

    #[test]
    fn sanity_check_separates_reducible_curves() {
        let f3 = build_field(3, 1).unwrap();
        let conic = MPoly::parse(&f3, "x^2 + y^2 + z^2").unwrap();
        assert!(curve_sanity(&conic, 4, DEFAULT_CAP).unwrap().plausible);
        let lines = MPoly::parse(&f3, "x*y").unwrap();
        assert!(!curve_sanity(&lines, 4, DEFAULT_CAP).unwrap().plausible);
        // x^2 + y^2 = (x + iy)(x − iy) splits over GF(9).
        let split = MPoly::parse(&f3, "x^2 + y^2").unwrap();
        assert!(!curve_sanity(&split, 4, DEFAULT_CAP).unwrap().plausible);
    }
}
