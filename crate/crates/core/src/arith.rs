//! Exact integer arithmetic: factoring, primality, Euler's totient, the
//! Möbius function and multiplicative orders modulo an integer.
//!
//! Everything works on `u64`. Factoring uses trial division up to
//! [`TRIAL_DIVISION_LIMIT`] and then Brent's variant of Pollard rho with a
//! fixed seed sequence, so results are deterministic.

use std::fmt;

use crate::error::{Error, Result};

/// Trial division bound used before switching to Pollard rho.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Prime factorization of a positive integer, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn contains(&self, prime: u64) -> bool {
        self.factors.binary_search_by_key(&prime, |&(p, _)| p).is_ok()
    }

    /// Multiplies the factors back together.
    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    /// Euler's totient of `n`.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    /// Squarefree divisors `d` of `n` with their Möbius values, ascending.
    pub fn squarefree_divisors(&self) -> Vec<(u64, i8)> {
        let mut out = vec![(1u64, 1i8)];
        for p in self.primes() {
            let extra: Vec<_> = out.iter().map(|&(d, m)| (d * p, -m)).collect();
            out.extend(extra);
        }
        out.sort_unstable();
        out
    }

    /// All positive divisors of `n`, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `base^exp`, or an overflow error naming the expression.
pub fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::Overflow(format!("{base}^{exp} does not fit in 64 bits")))
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to and including `bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

// Brent's cycle finding with f(x) = x^2 + c. Returns a nontrivial factor of
// the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Exact prime factorization of `n ≥ 1`. `1` has no factors.
pub fn factor_integer(n: u64) -> Factorization {
    assert!(n >= 1, "factor_integer requires n >= 1");
    let mut rest = n;
    let mut primes = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        while *rest % p == 0 {
            primes.push(p);
            *rest /= p;
        }
    };
    push(2, &mut rest);
    let mut d = 3u64;
    while d <= TRIAL_DIVISION_LIMIT && d * d <= rest {
        push(d, &mut rest);
        d += 2;
    }
    if rest > 1 {
        if d * d > rest {
            primes.push(rest);
        } else {
            split_large(rest, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { n, factors }
}

pub fn euler_phi(n: u64) -> u64 {
    factor_integer(n).phi()
}

pub fn mobius(n: u64) -> i8 {
    let f = factor_integer(n);
    if f.factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Least `d ≥ 1` with `q^d ≡ 1 (mod m)`.
pub fn mult_order_mod(q: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if m == 1 {
        return Ok(1);
    }
    if gcd(q % m, m) != 1 {
        return Err(Error::InvalidArgument(format!(
            "{q} is not a unit modulo {m}"
        )));
    }
    let lambda = factor_integer(m)
        .factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .fold(1u64, |acc, t| acc / gcd(acc, t) * t);
    let mut order = lambda;
    for (p, _) in factor_integer(lambda).factors {
        while order % p == 0 && pow_mod(q, order / p, m) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// Ramanujan's sum `c_k(m) = Σ_{1≤a≤k, (a,k)=1} e(am/k)`, via the closed form
/// `Σ_{d | gcd(k, m)} μ(k/d)·d`.
pub fn ramanujan_sum(k: u64, m: i64) -> i64 {
    assert!(k >= 1, "ramanujan_sum requires k >= 1");
    let g = gcd(k, m.unsigned_abs());
    factor_integer(g)
        .divisors()
        .into_iter()
        .map(|d| mobius(k / d) as i64 * d as i64)
        .sum()
}

/// `1 + q + ... + q^(n-1)` reduced modulo `m`.
pub fn geometric_sum_mod(q: u64, n: u64, m: u64) -> u64 {
    // Doubling on (q^k, 1 + q + ... + q^(k-1)).
    fn go(q: u64, n: u64, m: u64) -> (u64, u64) {
        if n == 0 {
            return (1 % m, 0);
        }
        let (pw, s) = go(q, n / 2, m);
        let (mut pw2, mut s2) = (mul_mod(pw, pw, m), (s + mul_mod(pw, s, m)) % m);
        if n % 2 == 1 {
            s2 = (s2 + pw2) % m;
            pw2 = mul_mod(pw2, q % m, m);
        }
        (pw2, s2)
    }
    go(q, n, m).1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factor_examples() {
        assert!(factor_integer(1).factors().is_empty());
        assert_eq!(factor_integer(12).factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factor_integer(342).factors(), &[(2, 1), (3, 2), (19, 1)]);
        assert_eq!(factor_integer(342).factors(), trial_division(342).as_slice());
    }

    #[test]
    fn factor_round_trips_small() {
        for n in 1..=20_000u64 {
            let f = factor_integer(n);
            assert_eq!(f.product(), n as u128);
            assert_eq!(f.factors(), trial_division(n).as_slice());
        }
    }

    #[test]
    fn factor_large_semiprimes() {
        // Both factors above the trial division bound.
        let a = 1_000_003u64;
        let b = 4_294_967_291u64;
        let f = factor_integer(a * b);
        assert_eq!(f.factors(), &[(a, 1), (b, 1)]);
        let f = factor_integer(2u64.pow(64 - 1) - 1);
        assert_eq!(f.product(), (2u128.pow(63) - 1));
        assert!(f.primes().all(is_prime));
        let f = factor_integer(u64::MAX);
        assert_eq!(f.product(), u64::MAX as u128);
    }

    #[test]
    fn totient_and_mobius() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(36), 12);
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(6), 1);
    }

    #[test]
    fn orders_mod() {
        assert_eq!(mult_order_mod(7, 3).unwrap(), 1);
        assert_eq!(mult_order_mod(2, 3).unwrap(), 2);
        assert_eq!(mult_order_mod(2, 7).unwrap(), 3);
        assert!(mult_order_mod(6, 3).is_err());
        for m in 2..200u64 {
            for q in 1..m {
                if gcd(q, m) != 1 {
                    continue;
                }
                let brute = (1..).find(|&d| pow_mod(q, d, m) == 1).unwrap();
                assert_eq!(mult_order_mod(q, m).unwrap(), brute, "q={q} m={m}");
            }
        }
    }

    #[test]
    fn geometric_sums() {
        for q in 2..9u64 {
            for n in 0..12u64 {
                let exact: u64 = (0..n).map(|i| q.pow(i as u32)).sum();
                for m in 1..20 {
                    assert_eq!(geometric_sum_mod(q, n, m), exact % m);
                }
            }
        }
    }

    #[test]
    fn squarefree_divisor_signs() {
        let f = factor_integer(60);
        assert_eq!(
            f.squarefree_divisors(),
            vec![(1, 1), (2, -1), (3, -1), (5, -1), (6, 1), (10, 1), (15, 1), (30, -1)]
        );
        assert_eq!(f.divisors().len(), 12);
    }
}
