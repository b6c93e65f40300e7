//! Finite fields GF(p^k) with a canonical defining polynomial.
//!
//! Elements are stored as their canonical index: the coefficient vector in
//! the power basis `1, t, ..., t^(k-1)` read as a little-endian base-p
//! integer. Comparing indices is the canonical element order, and the
//! modulus is the least monic irreducible of degree `k` in the same order,
//! so every construction of GF(p^k) is identical.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::arith::{self, Factorization};
use crate::error::{Error, Result};

/// Default bound on the number of field elements or points any single
/// enumeration may touch.
pub const DEFAULT_CAP: u64 = 20_000_000;

/// An element of a [`FiniteField`], identified by its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Discrete logarithm and antilogarithm tables for a fixed generator.
#[derive(Debug)]
pub struct LogTable {
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl LogTable {
    /// `log_ζ(x)` in `[0, q-1)`. `x` must be nonzero.
    #[inline]
    pub fn log(&self, x: Elem) -> u32 {
        self.log[x.0 as usize]
    }

    /// `ζ^j` for `j` in `[0, q-1)`.
    #[inline]
    pub fn exp(&self, j: u32) -> Elem {
        Elem(self.exp[j as usize])
    }

    pub fn len(&self) -> usize {
        self.exp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exp.is_empty()
    }
}

/// The field GF(p^k).
pub struct FiniteField {
    p: u32,
    k: u32,
    order: u32,
    // Monic, little-endian, length k + 1.
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    unit_factors: Factorization,
    generator: OnceLock<Elem>,
    tables: OnceLock<LogTable>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.k, self.modulus)
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.k)
        }
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

/// Builds GF(p^k) with its canonical modulus.
pub fn build_field(p: u64, k: u32) -> Result<Arc<FiniteField>> {
    FiniteField::new(p, k).map(Arc::new)
}

impl FiniteField {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        let order = p
            .checked_pow(k)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or_else(|| Error::Overflow(format!("{p}^{k} exceeds 32 bits")))?;
        let p = p as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            crate::poly::least_irreducible_over_prime(p, k)
        };
        let mut pow_p = Vec::with_capacity(k as usize + 1);
        let mut acc = 1u64;
        for _ in 0..=k {
            pow_p.push(acc.min(u32::MAX as u64) as u32);
            acc *= p as u64;
        }
        Ok(FiniteField {
            p,
            k,
            order: order as u32,
            modulus,
            pow_p,
            unit_factors: arith::factor_integer(order - 1),
            generator: OnceLock::new(),
            tables: OnceLock::new(),
        })
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Number of elements `q = p^k`.
    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Defining polynomial over GF(p), little-endian, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Factorization of `q - 1`, the order of the unit group.
    pub fn unit_factorization(&self) -> &Factorization {
        &self.unit_factors
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    #[inline]
    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    /// The power-basis root `t`; prime fields have none.
    pub fn basis_root(&self) -> Option<Elem> {
        (self.k > 1).then_some(Elem(self.p))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.order).map(Elem)
    }

    pub fn units(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.order).map(Elem)
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        let mut v = x.0;
        (0..self.k)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidArgument(format!(
                "expected {} residues below {}",
                self.k, self.p
            )));
        }
        Ok(self.encode(coeffs))
    }

    fn encode(&self, digits: &[u32]) -> Elem {
        let mut idx = 0u32;
        for (i, &d) in digits.iter().enumerate() {
            idx += d * self.pow_p[i];
        }
        Elem(idx)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        for i in 0..self.k as usize {
            let mut s = x % self.p + y % self.p;
            if s >= self.p {
                s -= self.p;
            }
            out += s * self.pow_p[i];
            x /= self.p;
            y /= self.p;
        }
        Elem(out)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        if self.k == 1 {
            return Elem(self.p - a.0);
        }
        let mut x = a.0;
        let mut out = 0u32;
        for i in 0..self.k as usize {
            let d = x % self.p;
            if d != 0 {
                out += (self.p - d) * self.pow_p[i];
            }
            x /= self.p;
        }
        Elem(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.k == 1 {
            return Elem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        if let Some(t) = self.tables.get() {
            let s = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
            let m = (self.order - 1) as u64;
            return Elem(t.exp[(if s >= m { s - m } else { s }) as usize]);
        }
        self.mul_schoolbook(a, b)
    }

    fn mul_schoolbook(&self, a: Elem, b: Elem) -> Elem {
        let k = self.k as usize;
        let p = self.p as u64;
        let da = self.coeffs(a);
        let db = self.coeffs(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for top in (k..2 * k - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
            prod[top] = 0;
        }
        let digits: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        self.encode(&digits)
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        if let Some(t) = self.tables.get() {
            let m = (self.order - 1) as u64;
            let j = (t.log[a.0 as usize] as u128 * e as u128 % m as u128) as u32;
            return Elem(t.exp[j as usize]);
        }
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        if let Some(t) = self.tables.get() {
            let m = self.order - 1;
            let j = t.log[a.0 as usize];
            return Ok(Elem(t.exp[((m - j) % m) as usize]));
        }
        Ok(self.pow(a, self.order as u64 - 2))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self, x: Elem) -> Elem {
        self.pow(x, self.p as u64)
    }

    /// Multiplicative order of `x`, computed by stripping prime factors of
    /// `q - 1` from the exponent.
    pub fn mult_order(&self, x: Elem) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        let mut d = self.order as u64 - 1;
        for &(l, e) in self.unit_factors.factors() {
            for _ in 0..e {
                if self.pow(x, d / l) == Elem::ONE {
                    d /= l;
                } else {
                    break;
                }
            }
        }
        Ok(d)
    }

    /// Whether `x` generates the unit group. In GF(2) the group is trivial
    /// and its single element counts as a generator.
    pub fn is_primitive(&self, x: Elem) -> Result<bool> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        let m = self.order as u64 - 1;
        if let Some(t) = self.tables.get() {
            return Ok(arith::gcd(t.log[x.0 as usize] as u64, m) == 1);
        }
        Ok(self
            .unit_factors
            .primes()
            .all(|l| self.pow(x, m / l) != Elem::ONE))
    }

    /// Least primitive element in the canonical order.
    pub fn canonical_generator(&self) -> Elem {
        *self.generator.get_or_init(|| {
            let m = self.order as u64 - 1;
            self.units()
                .find(|&x| self.unit_factors.primes().all(|l| self.pow(x, m / l) != Elem::ONE))
                .expect("every finite field has a primitive element")
        })
    }

    pub fn has_log_table(&self) -> bool {
        self.tables.get().is_some()
    }

    /// Discrete logarithm tables for the canonical generator, built on first
    /// use. Fails when `q` exceeds `cap`.
    pub fn log_table(&self, cap: u64) -> Result<&LogTable> {
        if let Some(t) = self.tables.get() {
            return Ok(t);
        }
        if self.order as u64 > cap {
            return Err(Error::CapExceeded {
                needed: self.order as u128,
                cap,
            });
        }
        let zeta = self.canonical_generator();
        let table = self.build_tables(zeta);
        Ok(self.tables.get_or_init(|| table))
    }

    fn build_tables(&self, zeta: Elem) -> LogTable {
        let m = (self.order - 1) as usize;
        let mut exp = Vec::with_capacity(m);
        let mut log = vec![u32::MAX; self.order as usize];
        let k = self.k as usize;
        let p = self.p;
        let zd = self.coeffs(zeta);
        let zeta_deg = zd.iter().rposition(|&c| c != 0).unwrap_or(0);
        let mut cur = vec![0u32; k + zeta_deg + 1];
        cur[0] = 1;
        let mut scratch = vec![0u32; k + zeta_deg + 1];
        for j in 0..m {
            let idx = self.encode(&cur[..k]);
            exp.push(idx.0);
            log[idx.0 as usize] = j as u32;
            // cur *= zeta, then reduce modulo the defining polynomial.
            scratch.iter_mut().for_each(|s| *s = 0);
            for (i, &c) in cur[..k].iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (s, &z) in zd[..=zeta_deg].iter().enumerate() {
                    scratch[i + s] = (scratch[i + s] + c * z) % p;
                }
            }
            for top in (k..k + zeta_deg).rev() {
                let c = scratch[top];
                if c == 0 {
                    continue;
                }
                for i in 0..k {
                    let idx = top - k + i;
                    scratch[idx] = (scratch[idx] + (p - c) * self.modulus[i]) % p;
                }
                scratch[top] = 0;
            }
            std::mem::swap(&mut cur, &mut scratch);
        }
        debug_assert!(cur[0] == 1 && cur[1..].iter().all(|&c| c == 0));
        LogTable { exp, log }
    }

    /// `log_ζ(x)` for the canonical generator ζ, using the table.
    pub fn log(&self, x: Elem, cap: u64) -> Result<u32> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.log_table(cap)?.log(x))
    }

    /// Characteristic function of generators evaluated in its
    /// product form: `φ(M)/M · Π_{ℓ | M} (1 − c_ℓ(log x)/φ(ℓ))`, where the
    /// sum of the order-ℓ characters at `x = ζ^j` is the Ramanujan sum
    /// `c_ℓ(j)`. Returns 0 or 1.
    pub fn indicator_generates(&self, x: Elem, cap: u64) -> Result<u8> {
        let j = self.log(x, cap)? as i64;
        let m = self.order as u64 - 1;
        let mut num: i128 = self.unit_factors.phi() as i128;
        let mut den: i128 = m as i128;
        for l in self.unit_factors.primes() {
            let c = arith::ramanujan_sum(l, j) as i128;
            let phi_l = (l - 1) as i128;
            num *= phi_l - c;
            den *= phi_l;
            let g = gcd_i128(num, den);
            num /= g;
            den /= g;
        }
        match (num, den) {
            (0, _) => Ok(0),
            (a, b) if a == b => Ok(1),
            _ => Err(Error::Internal(format!(
                "generator indicator evaluated to {num}/{den}"
            ))),
        }
    }
}

pub(crate) fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    if a == 0 {
        1
    } else {
        a
    }
}

/// GF(q^n) together with a fixed embedding of GF(q).
///
/// The large field is GF(p^(kn)) with its own canonical modulus. The base
/// field's power-basis root is sent to the least root of the base modulus,
/// so the embedding is canonical too.
#[derive(Debug, Clone)]
pub struct Extension {
    base: Arc<FiniteField>,
    ext: Arc<FiniteField>,
    degree: u32,
    images: Arc<Vec<Elem>>,
}

impl Extension {
    pub fn new(base: Arc<FiniteField>, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        let k = base.degree();
        let ext = if n == 1 {
            base.clone()
        } else {
            build_field(base.characteristic() as u64, k * n)?
        };
        let images = if n == 1 {
            base.elements().collect()
        } else if k == 1 {
            base.elements().map(|x| ext.from_int(x.0 as i64)).collect()
        } else {
            let root = least_root_of_base_modulus(&base, &ext);
            let mut powers = Vec::with_capacity(k as usize);
            let mut acc = Elem::ONE;
            for _ in 0..k {
                powers.push(acc);
                acc = ext.mul(acc, root);
            }
            base.elements()
                .map(|x| {
                    base.coeffs(x)
                        .iter()
                        .zip(&powers)
                        .fold(Elem::ZERO, |s, (&c, &pw)| {
                            ext.add(s, ext.mul(ext.from_int(c as i64), pw))
                        })
                })
                .collect()
        };
        Ok(Extension {
            base,
            ext,
            degree: n,
            images: Arc::new(images),
        })
    }

    pub fn base(&self) -> &Arc<FiniteField> {
        &self.base
    }

    pub fn ext(&self) -> &Arc<FiniteField> {
        &self.ext
    }

    /// `n = [GF(q^n) : GF(q)]`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn embed(&self, x: Elem) -> Elem {
        self.images[x.0 as usize]
    }

    /// The `q`-power Frobenius of the large field.
    pub fn frobenius(&self, x: Elem) -> Elem {
        self.ext.pow(x, self.base.order() as u64)
    }
}

// The base field sits inside ext as {0} ∪ <w> with w = Z^((Q-1)/(q-1)).
fn least_root_of_base_modulus(base: &FiniteField, ext: &FiniteField) -> Elem {
    let q = base.order() as u64;
    let big = ext.order() as u64;
    let w = ext.pow(ext.canonical_generator(), (big - 1) / (q - 1));
    let m = base.modulus();
    let mut best: Option<Elem> = None;
    let mut y = Elem::ONE;
    for _ in 0..q - 1 {
        let val = m.iter().rev().fold(Elem::ZERO, |acc, &c| {
            ext.add(ext.mul(acc, y), ext.from_int(c as i64))
        });
        if val.is_zero() && best.is_none_or(|b| y < b) {
            best = Some(y);
        }
        y = ext.mul(y, w);
    }
    best.expect("the base modulus splits in every extension containing GF(q)")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64, k: u32) -> Arc<FiniteField> {
        build_field(p, k).unwrap()
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(field(2, 1).modulus(), &[0, 1]);
        assert_eq!(field(2, 2).modulus(), &[1, 1, 1]);
        assert_eq!(field(2, 3).modulus(), &[1, 1, 0, 1]);
        assert_eq!(field(3, 2).modulus(), &[1, 0, 1]);
        assert!(build_field(4, 1).is_err());
        assert!(build_field(2, 0).is_err());
        assert_eq!(*field(5, 3), *field(5, 3));
    }

    // Root-testing oracle: a monic quadratic or cubic is irreducible iff it
    // has no root in the prime field.
    #[test]
    fn small_moduli_match_root_scan() {
        for p in [2u32, 3, 5, 7] {
            for k in [2u32, 3] {
                let least = (0..p.pow(k))
                    .map(|low| {
                        let mut c: Vec<u32> = (0..k).map(|i| low / p.pow(i) % p).collect();
                        c.push(1);
                        c
                    })
                    .find(|c| {
                        (0..p).all(|x| {
                            c.iter().rev().fold(0u32, |acc, &a| (acc * x + a) % p) != 0
                        })
                    })
                    .unwrap();
                assert_eq!(field(p as u64, k).modulus(), least.as_slice());
            }
        }
    }

    #[test]
    fn orders_and_primitivity() {
        let f5 = field(5, 1);
        assert_eq!(f5.mult_order(Elem::ONE).unwrap(), 1);
        assert_eq!(f5.mult_order(Elem(2)).unwrap(), 4);
        assert!(f5.is_primitive(Elem(2)).unwrap());
        assert!(!f5.is_primitive(Elem(4)).unwrap());
        assert!(field(2, 1).is_primitive(Elem::ONE).unwrap());
        assert_eq!(f5.mult_order(Elem::ZERO), Err(Error::ZeroElement));
        let f4 = field(2, 2);
        assert_eq!(f4.mult_order(Elem(2)).unwrap(), 3);
    }

    #[test]
    fn generators_and_logs() {
        assert_eq!(field(2, 1).canonical_generator(), Elem::ONE);
        assert_eq!(field(5, 1).canonical_generator(), Elem(2));
        let f4 = field(2, 2);
        assert_eq!(f4.canonical_generator(), Elem(2));
        assert_eq!(f4.coeffs(Elem(2)), vec![0, 1]);
        assert_eq!(f4.log(Elem(3), DEFAULT_CAP).unwrap(), 2);
        let f5 = field(5, 1);
        assert_eq!(f5.log(Elem::ONE, DEFAULT_CAP).unwrap(), 0);
        assert_eq!(f5.log(Elem(4), DEFAULT_CAP).unwrap(), 2);
        assert!(matches!(
            field(3, 5).log_table(10),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn table_and_schoolbook_agree() {
        for (p, k) in [(2u64, 4u32), (3, 3), (5, 2), (7, 2)] {
            let plain = field(p, k);
            let tabled = field(p, k);
            tabled.log_table(DEFAULT_CAP).unwrap();
            for a in plain.elements() {
                for b in plain.elements() {
                    assert_eq!(plain.mul(a, b), tabled.mul(a, b));
                }
                if !a.is_zero() {
                    assert_eq!(plain.inv(a).unwrap(), tabled.inv(a).unwrap());
                    assert_eq!(plain.mul(a, plain.inv(a).unwrap()), Elem::ONE);
                }
                assert_eq!(plain.pow(a, 17), tabled.pow(a, 17));
            }
        }
    }

    #[test]
    fn log_table_is_a_bijection() {
        let f = field(3, 4);
        let t = f.log_table(DEFAULT_CAP).unwrap();
        let mut seen = vec![false; t.len()];
        for x in f.units() {
            let j = t.log(x) as usize;
            assert!(!seen[j]);
            seen[j] = true;
            assert_eq!(t.exp(j as u32), x);
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let base = field(2, 2);
        let ext = Extension::new(base.clone(), 3).unwrap();
        assert_eq!(ext.ext().order(), 64);
        for a in base.elements() {
            for b in base.elements() {
                let e = ext.ext();
                assert_eq!(ext.embed(base.add(a, b)), e.add(ext.embed(a), ext.embed(b)));
                assert_eq!(ext.embed(base.mul(a, b)), e.mul(ext.embed(a), ext.embed(b)));
            }
            // Image is fixed by the q-Frobenius.
            assert_eq!(ext.frobenius(ext.embed(a)), ext.embed(a));
        }
    }

    #[test]
    fn indicator_matches_primitivity() {
        for (p, k) in [(2u64, 1u32), (2, 4), (3, 2), (5, 1), (7, 2)] {
            let f = field(p, k);
            for x in f.units() {
                let ind = f.indicator_generates(x, DEFAULT_CAP).unwrap();
                assert_eq!(ind == 1, f.is_primitive(x).unwrap());
            }
        }
        let f5 = field(5, 1);
        assert_eq!(f5.indicator_generates(Elem(2), DEFAULT_CAP).unwrap(), 1);
        assert_eq!(f5.indicator_generates(Elem(4), DEFAULT_CAP).unwrap(), 0);
        assert_eq!(field(2, 1).indicator_generates(Elem::ONE, DEFAULT_CAP).unwrap(), 1);
    }
}
