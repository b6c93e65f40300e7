//! Univariate polynomials over GF(q): arithmetic, irreducibility, the
//! canonical enumeration of monic irreducibles, factorization and roots.
//!
//! The algorithms are written once over little-endian coefficient slices
//! and the [`Scalars`] trait. Prime fields get a dedicated implementation
//! whose modular multiplication delays reduction mod p, which is what keeps
//! the exhaustive degree-n scans cheap.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{Elem, FiniteField};

/// Coefficient arithmetic used by the slice-level polynomial routines.
pub(crate) trait Scalars {
    type C: Copy + Eq + fmt::Debug;

    fn zero(&self) -> Self::C;
    fn one(&self) -> Self::C;
    fn add(&self, a: Self::C, b: Self::C) -> Self::C;
    fn sub(&self, a: Self::C, b: Self::C) -> Self::C;
    fn mul(&self, a: Self::C, b: Self::C) -> Self::C;
    /// Inverse of a nonzero scalar.
    fn inv(&self, a: Self::C) -> Self::C;
    /// Number of elements.
    fn size(&self) -> u64;
    fn characteristic(&self) -> u64;
    /// Draws a uniformly random scalar.
    fn random(&self, rng: &mut ChaCha8Rng) -> Self::C;
    /// Inverse of the absolute Frobenius `x ↦ x^p`.
    fn pth_root(&self, a: Self::C) -> Self::C;

    #[inline]
    fn is_zero(&self, a: Self::C) -> bool {
        a == self.zero()
    }

    /// `a * b mod f` for reduced `a`, `b` and monic `f`.
    fn mulmod(&self, a: &[Self::C], b: &[Self::C], f: &[Self::C]) -> Vec<Self::C>
    where
        Self: Sized,
    {
        let prod = mul(self, a, b);
        rem_monic(self, prod, f)
    }
}

impl Scalars for FiniteField {
    type C = Elem;

    #[inline]
    fn zero(&self) -> Elem {
        Elem::ZERO
    }
    #[inline]
    fn one(&self) -> Elem {
        Elem::ONE
    }
    #[inline]
    fn add(&self, a: Elem, b: Elem) -> Elem {
        FiniteField::add(self, a, b)
    }
    #[inline]
    fn sub(&self, a: Elem, b: Elem) -> Elem {
        FiniteField::sub(self, a, b)
    }
    #[inline]
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        FiniteField::mul(self, a, b)
    }
    fn inv(&self, a: Elem) -> Elem {
        FiniteField::inv(self, a).expect("inverse of zero")
    }
    fn size(&self) -> u64 {
        self.order() as u64
    }
    fn characteristic(&self) -> u64 {
        FiniteField::characteristic(self) as u64
    }
    fn random(&self, rng: &mut ChaCha8Rng) -> Elem {
        Elem(rng.gen_range(0..self.order()))
    }
    fn pth_root(&self, a: Elem) -> Elem {
        self.pow(a, self.order() as u64 / FiniteField::characteristic(self) as u64)
    }
}

/// GF(p) on plain integers with lazily reduced products.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Fp {
    p: u64,
}

impl Fp {
    pub(crate) fn new(p: u64) -> Self {
        Fp { p }
    }
}

impl Scalars for Fp {
    type C = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        arith::mul_mod(a, b, self.p)
    }
    fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        arith::pow_mod(a, self.p - 2, self.p)
    }
    fn size(&self) -> u64 {
        self.p
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn random(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn pth_root(&self, a: u64) -> u64 {
        a
    }

    fn mulmod(&self, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
        let n = f.len() - 1;
        let p = self.p;
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        // Accumulated terms stay below (2n + 2) p^2.
        if (2 * n as u128 + 2) * (p as u128) * (p as u128) >= 1u128 << 63 {
            return rem_monic(self, mul(self, a, b), f);
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] += x * y;
            }
        }
        for top in (n..r.len()).rev() {
            let c = r[top] % p;
            r[top] = 0;
            if c == 0 {
                continue;
            }
            let neg = p - c;
            let base = top - n;
            for (i, &fi) in f[..n].iter().enumerate() {
                r[base + i] += neg * fi;
            }
        }
        r.truncate(n);
        for c in r.iter_mut() {
            *c %= p;
        }
        trim(&mut r);
        r
    }
}

// ---------------------------------------------------------------------------
// Slice-level routines. Polynomials are little-endian with no trailing
// zeros; the zero polynomial is the empty slice.

pub(crate) fn trim<C: Copy + Eq + Default>(v: &mut Vec<C>) {
    while v.last().is_some_and(|&c| c == C::default()) {
        v.pop();
    }
}

fn trim_s<S: Scalars>(s: &S, v: &mut Vec<S::C>) {
    while v.last().is_some_and(|&c| s.is_zero(c)) {
        v.pop();
    }
}

pub(crate) fn add<S: Scalars>(s: &S, a: &[S::C], b: &[S::C]) -> Vec<S::C> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &c) in out.iter_mut().zip(short) {
        *o = s.add(*o, c);
    }
    trim_s(s, &mut out);
    out
}

pub(crate) fn sub<S: Scalars>(s: &S, a: &[S::C], b: &[S::C]) -> Vec<S::C> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), s.zero());
    }
    for (o, &c) in out.iter_mut().zip(b) {
        *o = s.sub(*o, c);
    }
    trim_s(s, &mut out);
    out
}

pub(crate) fn scale<S: Scalars>(s: &S, a: &[S::C], c: S::C) -> Vec<S::C> {
    if s.is_zero(c) {
        return Vec::new();
    }
    a.iter().map(|&x| s.mul(x, c)).collect()
}

pub(crate) fn mul<S: Scalars>(s: &S, a: &[S::C], b: &[S::C]) -> Vec<S::C> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![s.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if s.is_zero(x) {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = s.add(out[i + j], s.mul(x, y));
        }
    }
    trim_s(s, &mut out);
    out
}

/// Remainder modulo a monic `f`.
pub(crate) fn rem_monic<S: Scalars>(s: &S, mut a: Vec<S::C>, f: &[S::C]) -> Vec<S::C> {
    let n = f.len() - 1;
    while a.len() > n {
        let top = a.len() - 1;
        let c = a[top];
        if !s.is_zero(c) {
            let base = top - n;
            for i in 0..n {
                a[base + i] = s.sub(a[base + i], s.mul(c, f[i]));
            }
        }
        a.pop();
        trim_s(s, &mut a);
    }
    trim_s(s, &mut a);
    a
}

/// Quotient and remainder; `b` must be nonzero.
pub(crate) fn div_rem<S: Scalars>(
    s: &S,
    a: &[S::C],
    b: &[S::C],
) -> (Vec<S::C>, Vec<S::C>) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let db = b.len() - 1;
    if a.len() <= db {
        return (Vec::new(), a.to_vec());
    }
    let inv_lc = s.inv(b[db]);
    let mut r = a.to_vec();
    let mut q = vec![s.zero(); a.len() - db];
    for top in (db..r.len()).rev() {
        let c = s.mul(r[top], inv_lc);
        q[top - db] = c;
        if !s.is_zero(c) {
            for i in 0..=db {
                r[top - db + i] = s.sub(r[top - db + i], s.mul(c, b[i]));
            }
        }
    }
    r.truncate(db);
    trim_s(s, &mut r);
    trim_s(s, &mut q);
    (q, r)
}

pub(crate) fn monic<S: Scalars>(s: &S, a: &[S::C]) -> Vec<S::C> {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => scale(s, a, s.inv(lc)),
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub(crate) fn gcd<S: Scalars>(s: &S, a: &[S::C], b: &[S::C]) -> Vec<S::C> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let (_, r) = div_rem(s, &a, &b);
        a = b;
        b = r;
    }
    monic(s, &a)
}

/// Inverse of `a` modulo `f`, if `gcd(a, f) = 1`.
pub(crate) fn inverse_mod<S: Scalars>(s: &S, a: &[S::C], f: &[S::C]) -> Option<Vec<S::C>> {
    let (_, a) = div_rem(s, a, f);
    let (mut r0, mut r1) = (f.to_vec(), a);
    let (mut t0, mut t1): (Vec<S::C>, Vec<S::C>) = (Vec::new(), vec![s.one()]);
    while !r1.is_empty() {
        let (q, r) = div_rem(s, &r0, &r1);
        let t = sub(s, &t0, &mul(s, &q, &t1));
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t;
    }
    if r0.len() != 1 {
        return None;
    }
    let c = s.inv(r0[0]);
    let (_, t) = div_rem(s, &scale(s, &t0, c), f);
    Some(t)
}

pub(crate) fn powmod<S: Scalars>(s: &S, a: &[S::C], mut e: u128, f: &[S::C]) -> Vec<S::C> {
    let mut acc = rem_monic(s, vec![s.one()], f);
    let mut base = rem_monic(s, a.to_vec(), f);
    while e > 0 {
        if e & 1 == 1 {
            acc = s.mulmod(&acc, &base, f);
        }
        e >>= 1;
        if e > 0 {
            base = s.mulmod(&base, &base, f);
        }
    }
    acc
}

pub(crate) fn eval<S: Scalars>(s: &S, a: &[S::C], x: S::C) -> S::C {
    a.iter().rev().fold(s.zero(), |acc, &c| s.add(s.mul(acc, x), c))
}

fn derivative<S: Scalars>(s: &S, a: &[S::C]) -> Vec<S::C> {
    let p = s.characteristic();
    let mut out = Vec::with_capacity(a.len().saturating_sub(1));
    let mut k = s.zero();
    for (i, &c) in a.iter().enumerate() {
        if i > 0 {
            out.push(s.mul(c, k));
        }
        k = if (i as u64 + 1) % p == 0 { s.zero() } else { s.add(k, s.one()) };
    }
    trim_s(s, &mut out);
    out
}

fn t_mod<S: Scalars>(s: &S, f: &[S::C]) -> Vec<S::C> {
    rem_monic(s, vec![s.zero(), s.one()], f)
}

/// Rabin's test for a monic `f` of degree `n ≥ 1`.
pub(crate) fn rabin_irreducible<S: Scalars>(s: &S, f: &[S::C]) -> bool {
    let n = f.len() - 1;
    if n <= 1 {
        return n == 1;
    }
    let q = s.size() as u128;
    let t = t_mod(s, f);
    let prime_divs: Vec<usize> = arith::factor_integer(n as u64)
        .primes()
        .map(|r| n / r as usize)
        .collect();
    let mut x = t.clone();
    for i in 1..=n {
        x = powmod(s, &x, q, f);
        if prime_divs.contains(&i) {
            let d = gcd(s, &sub(s, &x, &t), f);
            if d.len() != 1 {
                return false;
            }
        }
    }
    x == t
}

fn has_root_in_prime_field(f: &[u64], p: u64) -> bool {
    (0..p).any(|x| {
        f.iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * x + c) % p)
            == 0
    })
}

/// Least monic irreducible of degree `k` over GF(p) in the canonical order.
pub(crate) fn least_irreducible_over_prime(p: u32, k: u32) -> Vec<u32> {
    let fp = Fp::new(p as u64);
    let count = (p as u64).pow(k);
    for low in 0..count {
        let f = monic_from_index(p as u64, k as usize, low);
        if (k < 2 || !has_root_in_prime_field(&f, p as u64)) && rabin_irreducible(&fp, &f) {
            return f.into_iter().map(|c| c as u32).collect();
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

/// Monic polynomial of degree `n` whose lower coefficients are the base-`q`
/// digits of `index`.
fn monic_from_index(q: u64, n: usize, mut index: u64) -> Vec<u64> {
    let mut f = Vec::with_capacity(n + 1);
    for _ in 0..n {
        f.push(index % q);
        index /= q;
    }
    f.push(1);
    f
}

fn seeded_rng<C: fmt::Debug>(f: &[C]) -> ChaCha8Rng {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    format!("{f:?}").hash(&mut h);
    ChaCha8Rng::seed_from_u64(h.finish())
}

/// Squarefree decomposition of a monic polynomial: monic squarefree,
/// pairwise coprime `g_i` with `f = Π g_i^{e_i}`.
pub(crate) fn squarefree_decomposition<S: Scalars>(s: &S, f: &[S::C]) -> Vec<(Vec<S::C>, u32)> {
    let mut out = Vec::new();
    if f.len() <= 1 {
        return out;
    }
    let p = s.characteristic();
    let fd = derivative(s, f);
    let mut c = gcd(s, f, &fd);
    let mut w = div_rem(s, f, &c).0;
    let mut i = 1u32;
    while w.len() > 1 {
        let y = gcd(s, &w, &c);
        let fac = div_rem(s, &w, &y).0;
        if fac.len() > 1 {
            out.push((monic(s, &fac), i));
        }
        w = y;
        c = div_rem(s, &c, &w).0;
        i += 1;
    }
    if c.len() > 1 {
        let root: Vec<S::C> = c
            .iter()
            .step_by(p as usize)
            .map(|&a| s.pth_root(a))
            .collect();
        for (g, e) in squarefree_decomposition(s, &root) {
            out.push((g, e * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree<S: Scalars>(s: &S, f: &[S::C]) -> Vec<(Vec<S::C>, usize)> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let q = s.size() as u128;
    let mut h = t_mod(s, &rest);
    let mut i = 1;
    while rest.len() - 1 >= 2 * i {
        h = powmod(s, &h, q, &rest);
        let t = t_mod(s, &rest);
        let d = gcd(s, &sub(s, &h, &t), &rest);
        if d.len() > 1 {
            rest = div_rem(s, &rest, &d).0;
            h = div_rem(s, &h, &rest).1;
            out.push((d, i));
        }
        i += 1;
    }
    if rest.len() > 1 {
        let d = rest.len() - 1;
        out.push((rest, d));
    }
    out
}

/// Splits a monic product of distinct irreducibles of degree `d`.
fn equal_degree<S: Scalars>(
    s: &S,
    f: &[S::C],
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<S::C>> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.to_vec()];
    }
    let q = s.size();
    let p = s.characteristic();
    loop {
        let a: Vec<S::C> = {
            let mut v: Vec<S::C> = (0..n).map(|_| s.random(rng)).collect();
            trim_s(s, &mut v);
            v
        };
        if a.len() <= 1 {
            continue;
        }
        let b = if p == 2 {
            // Absolute trace to GF(2): a + a^2 + ... + a^(2^(kd - 1)).
            let steps = (q.trailing_zeros() as usize) * d;
            let mut acc = a.clone();
            let mut cur = a.clone();
            for _ in 1..steps {
                cur = s.mulmod(&cur, &cur, f);
                acc = add(s, &acc, &cur);
            }
            acc
        } else {
            // a^((q^d - 1)/2) = (a · a^q ⋯ a^(q^(d-1)))^((q - 1)/2)
            let mut norm = a.clone();
            let mut cur = a.clone();
            for _ in 1..d {
                cur = powmod(s, &cur, q as u128, f);
                norm = s.mulmod(&norm, &cur, f);
            }
            let e = powmod(s, &norm, ((q - 1) / 2) as u128, f);
            sub(s, &e, &[s.one()])
        };
        let g = gcd(s, &b, f);
        if g.len() > 1 && g.len() < f.len() {
            let h = div_rem(s, f, &g).0;
            let mut out = equal_degree(s, &g, d, rng);
            out.extend(equal_degree(s, &monic(s, &h), d, rng));
            return out;
        }
    }
}

/// Roots in the coefficient field of a nonzero polynomial, ascending by
/// canonical index, without multiplicity.
pub(crate) fn roots<S: Scalars>(s: &S, f: &[S::C]) -> Vec<S::C>
where
    S::C: Ord,
{
    let f = monic(s, f);
    if f.len() <= 1 {
        return Vec::new();
    }
    let q = s.size() as u128;
    let t = t_mod(s, &f);
    let split = gcd(s, &sub(s, &powmod(s, &t, q, &f), &t), &f);
    if split.len() <= 1 {
        return Vec::new();
    }
    let mut rng = seeded_rng(&split);
    let mut out: Vec<S::C> = equal_degree(s, &split, 1, &mut rng)
        .into_iter()
        .map(|lin| s.sub(s.zero(), lin[0]))
        .collect();
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Owned polynomials.

/// A polynomial in `t` over GF(q).
#[derive(Clone)]
pub struct Poly {
    field: Arc<FiniteField>,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by degree, then by the coefficient vector read as a
/// little-endian base-q integer.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl Poly {
    pub fn from_coeffs(field: &Arc<FiniteField>, coeffs: Vec<Elem>) -> Self {
        let mut coeffs = coeffs;
        trim(&mut coeffs);
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    /// Coefficients given as integers, reduced into the prime subfield.
    pub fn from_ints(field: &Arc<FiniteField>, coeffs: &[i64]) -> Self {
        Self::from_coeffs(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Arc<FiniteField>) -> Self {
        Self::from_coeffs(field, Vec::new())
    }

    pub fn one(field: &Arc<FiniteField>) -> Self {
        Self::constant(field, Elem::ONE)
    }

    pub fn constant(field: &Arc<FiniteField>, c: Elem) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    /// `c·t^d`.
    pub fn monomial(field: &Arc<FiniteField>, c: Elem, d: usize) -> Self {
        let mut v = vec![Elem::ZERO; d + 1];
        v[d] = c;
        Self::from_coeffs(field, v)
    }

    /// The variable `t`.
    pub fn t(field: &Arc<FiniteField>) -> Self {
        Self::monomial(field, Elem::ONE, 1)
    }

    fn wrap(&self, coeffs: Vec<Elem>) -> Poly {
        Poly::from_coeffs(&self.field, coeffs)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Elem::ONE]
    }

    /// Leading coefficient, zero for the zero polynomial.
    pub fn lc(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == Elem::ONE
    }

    pub fn monic(&self) -> Poly {
        self.wrap(monic(&*self.field, &self.coeffs))
    }

    pub fn eval(&self, x: Elem) -> Elem {
        eval(&*self.field, &self.coeffs, x)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.wrap(add(&*self.field, &self.coeffs, &other.coeffs))
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.wrap(sub(&*self.field, &self.coeffs, &other.coeffs))
    }

    pub fn neg(&self) -> Poly {
        Poly::zero(&self.field).sub(self)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.wrap(mul(&*self.field, &self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, c: Elem) -> Poly {
        self.wrap(scale(&*self.field, &self.coeffs, c))
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
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

    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (q, r) = div_rem(&*self.field, &self.coeffs, &d.coeffs);
        Ok((self.wrap(q), self.wrap(r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.div_rem(d)?.1)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.wrap(gcd(&*self.field, &self.coeffs, &other.coeffs))
    }

    pub fn derivative(&self) -> Poly {
        self.wrap(derivative(&*self.field, &self.coeffs))
    }

    /// Exponent of the largest power of `p` dividing `self`; `p` must be a
    /// nonconstant polynomial and `self` nonzero.
    pub fn multiplicity(&self, p: &Poly) -> u32 {
        debug_assert!(!self.is_zero() && !p.is_constant());
        let mut cur = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = div_rem(&*self.field, &cur.coeffs, &p.coeffs);
            if !r.is_empty() {
                return m;
            }
            cur = self.wrap(q);
            m += 1;
        }
    }

    /// Roots in GF(q), ascending.
    pub fn roots(&self) -> Vec<Elem> {
        if self.is_zero() {
            return Vec::new();
        }
        roots(&*self.field, &self.coeffs)
    }

    /// Squarefree decomposition of the monic part: pairs `(g, e)` with `g`
    /// squarefree, monic and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, u32)> {
        let m = monic(&*self.field, &self.coeffs);
        let mut out: Vec<(Poly, u32)> = squarefree_decomposition(&*self.field, &m)
            .into_iter()
            .map(|(g, e)| (self.wrap(g), e))
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = render_elem(&self.field, c);
            match (i, c == Elem::ONE) {
                (0, _) => write!(f, "{cs}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{cs}*t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{cs}*t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Renders a field element: prime-subfield elements as integers, others as a
/// parenthesized polynomial in the power-basis root `a`.
pub fn render_elem(field: &FiniteField, x: Elem) -> String {
    if x.0 < field.characteristic() {
        return x.0.to_string();
    }
    let digits = field.coeffs(x);
    let mut terms = Vec::new();
    for (i, &d) in digits.iter().enumerate().rev() {
        if d == 0 {
            continue;
        }
        let coef = if d == 1 && i > 0 {
            String::new()
        } else if i > 0 {
            format!("{d}*")
        } else {
            d.to_string()
        };
        terms.push(match i {
            0 => coef,
            1 => format!("{coef}a"),
            _ => format!("{coef}a^{i}"),
        });
    }
    format!("({})", terms.join(" + "))
}

/// Whether `f` is irreducible over its coefficient field.
pub fn is_irreducible(f: &Poly) -> Result<bool> {
    if f.is_constant() {
        return Err(Error::InvalidArgument(
            "irreducibility is undefined for constants".into(),
        ));
    }
    Ok(rabin_irreducible(&*f.field, &monic(&*f.field, &f.coeffs)))
}

/// Number of monic irreducibles of degree `n` over GF(q), by Gauss's
/// formula `(1/n) Σ_{d | n} μ(d) q^(n/d)`.
pub fn gauss_count(q: u64, n: u32) -> Result<u64> {
    let mut total: i128 = 0;
    for d in arith::factor_integer(n as u64).divisors() {
        let term = arith::checked_pow(q, n / d as u32)? as i128;
        total += arith::mobius(d) as i128 * term;
    }
    Ok((total / n as i128) as u64)
}

/// All monic irreducibles of degree `n` over `field`, in canonical order.
/// Scans all `q^n` monic candidates, so `q^n` must not exceed `cap`. Scans
/// of moderate size are remembered for the rest of the process.
pub fn enumerate_irreducibles(field: &Arc<FiniteField>, n: u32, cap: u64) -> Result<Vec<Poly>> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be >= 1".into()));
    }
    let q = field.order() as u64;
    let total = (q as u128).pow(n);
    if total > cap as u128 {
        return Err(Error::CapExceeded { needed: total, cap });
    }
    let key = (field.characteristic(), field.degree(), n);
    let coeffs = {
        let cache = IRREDUCIBLES.get_or_init(Default::default);
        let hit = cache.lock().expect("cache lock").get(&key).cloned();
        match hit {
            Some(c) => c,
            None => {
                let c = Arc::new(scan_irreducibles(field, n, total as u64));
                if total <= CACHE_LIMIT {
                    cache.lock().expect("cache lock").insert(key, c.clone());
                }
                c
            }
        }
    };
    Ok(coeffs
        .iter()
        .map(|c| Poly::from_coeffs(field, c.clone()))
        .collect())
}

/// Enumerations of up to this many candidates are kept for reuse.
const CACHE_LIMIT: u128 = 1 << 22;

type IrreducibleCache = Mutex<HashMap<(u32, u32, u32), Arc<Vec<Vec<Elem>>>>>;

static IRREDUCIBLES: OnceLock<IrreducibleCache> = OnceLock::new();

fn scan_irreducibles(field: &Arc<FiniteField>, n: u32, total: u64) -> Vec<Vec<Elem>> {
    let q = field.order() as u64;
    let n = n as usize;
    // Indexed parallel iterators keep the canonical order on collect.
    if field.degree() == 1 {
        let fp = Fp::new(q);
        let prefilter = n >= 2 && q <= 64;
        (0..total)
            .into_par_iter()
            .filter_map(|low| {
                let f = monic_from_index(q, n, low);
                if prefilter && (f[0] == 0 || has_root_in_prime_field(&f, q)) {
                    return None;
                }
                rabin_irreducible(&fp, &f).then(|| f.into_iter().map(|c| Elem(c as u32)).collect())
            })
            .collect()
    } else {
        (0..total)
            .into_par_iter()
            .filter_map(|low| {
                let f: Vec<Elem> = monic_from_index(q, n, low)
                    .into_iter()
                    .map(|c| Elem(c as u32))
                    .collect();
                if n >= 2 && f[0].is_zero() {
                    return None;
                }
                rabin_irreducible(&**field, &f).then_some(f)
            })
            .collect()
    }
}

/// Factorization `unit · Π f_i^{e_i}` with monic irreducible `f_i` in
/// canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFactorization {
    pub unit: Elem,
    pub factors: Vec<(Poly, u32)>,
}

impl PolyFactorization {
    /// Multiplies everything back together.
    pub fn reconstruct(&self, field: &Arc<FiniteField>) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(field, self.unit), |acc, (f, e)| {
                acc.mul(&f.pow(*e))
            })
    }
}

/// Factors a nonzero polynomial: squarefree decomposition, then
/// distinct-degree and equal-degree splitting. The splitting randomness is a
/// ChaCha stream seeded from the input, so results are reproducible.
pub fn factor_poly(f: &Poly) -> Result<PolyFactorization> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let s = &*f.field;
    let unit = f.lc();
    let m = monic(s, &f.coeffs);
    let mut rng = seeded_rng(&m);
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for (g, e) in squarefree_decomposition(s, &m) {
        for (block, d) in distinct_degree(s, &g) {
            for irr in equal_degree(s, &block, d, &mut rng) {
                factors.push((f.wrap(irr), e));
            }
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(PolyFactorization { unit, factors })
}
