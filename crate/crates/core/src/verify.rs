//! The invariant battery: every structural identity the library relies on,
//! checked exhaustively at desk scale. Each suite reports how many checks it
//! ran, which failed, and which cases were skipped for exceeding the cap.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::artin::{self, Subject};
use crate::error::{Error, Result};
use crate::field::{build_field, Elem, Extension, FiniteField};
use crate::geometry::{self, FunctionOnVariety, VarietyModel};
use crate::heuristic::{self, SplitCase};
use crate::poly::{enumerate_irreducibles, factor_poly, gauss_count, Poly};
use crate::ratfunc::{RationalFunction, Value};

/// The functions on P¹ the suites run over, as `(p, g)`.
pub const BATTERY: [(u64, &str); 6] = [
    (2, "t"),
    (2, "t + 1"),
    (3, "t"),
    (3, "t^2 + t"),
    (7, "3*t^3"),
    (5, "t^6/(t+1)^6"),
];

/// Deliberate corruptions, used to check that the battery notices them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Flip the sign of one Ramanujan sum value.
    pub ramanujan: bool,
}

impl Faults {
    /// Parses a fault by the name of the suite it targets.
    pub fn inject(&mut self, name: &str) -> Result<()> {
        match name {
            "ramanujan_simple_property" => self.ramanujan = true,
            _ => return Err(Error::InvalidArgument(format!("no fault targets suite {name:?}"))),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Enumeration cap for every suite.
    pub cap: u64,
    pub faults: Faults,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            cap: 1_000_000,
            faults: Faults::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Nothing could run within the cap.
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: u64,
    pub failed: u64,
    /// The first few failure messages.
    pub failures: Vec<String>,
    pub skipped: Vec<String>,
}

impl SuiteOutcome {
    pub fn status(&self) -> Status {
        if self.failed > 0 {
            Status::Fail
        } else if self.checks == 0 {
            Status::Skipped
        } else {
            Status::Pass
        }
    }
}

struct Checker {
    out: SuiteOutcome,
}

impl Checker {
    fn new(name: &'static str) -> Self {
        Checker {
            out: SuiteOutcome {
                name,
                checks: 0,
                failed: 0,
                failures: Vec::new(),
                skipped: Vec::new(),
            },
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.out.checks += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, msg: String) {
        self.out.failed += 1;
        if self.out.failures.len() < 20 {
            self.out.failures.push(msg);
        }
    }

    /// Unwraps `r`; a cap violation becomes a skip, anything else a failure.
    fn run<T>(&mut self, ctx: impl fmt::Display, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e @ Error::CapExceeded { .. }) => {
                self.out.skipped.push(format!("{ctx}: {e}"));
                None
            }
            Err(e) => {
                self.out.checks += 1;
                self.fail(format!("{ctx}: {e}"));
                None
            }
        }
    }

    fn skip(&mut self, why: String) {
        self.out.skipped.push(why);
    }
}

type Suite = fn(&VerifyConfig) -> SuiteOutcome;

const SUITES: &[(&str, Suite)] = &[
    ("ramanujan_simple_property", ramanujan_simple_property),
    ("indicator_equivalence", indicator_equivalence),
    ("field_structure", field_structure),
    ("factor_integer_roundtrip", factor_integer_roundtrip),
    ("gauss_count", gauss_count_suite),
    ("affine_point_count", affine_point_count),
    ("factor_poly_roundtrip", factor_poly_roundtrip),
    ("principal_divisor", principal_divisor),
    ("frobenius_stability", frobenius_stability),
    ("p1_closed_point_count", p1_closed_point_count),
    ("curve_points_on_curve", curve_points_on_curve),
    ("restriction_consistency", restriction_consistency),
    ("algorithm_equivalence", algorithm_equivalence),
    ("frobenius_orbit_divisibility", frobenius_orbit_divisibility),
    ("rho_structure", rho_structure),
    ("vanishing_exact", vanishing_exact),
    ("rho_positivity_equivalence", rho_positivity_equivalence),
    ("generator_validity", generator_validity),
    ("witness_validity", witness_validity),
    ("trivial_character_sum", trivial_character_sum),
    ("density_identity", density_identity),
    ("nongeometric_split_deterministic", nongeometric_split_deterministic),
    ("not_dividing_zero", not_dividing_zero),
    ("unit_order_bookkeeping", unit_order_bookkeeping),
];

/// Names of all suites, in run order.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f(cfg))
        .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {name:?}")))
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<SuiteOutcome> {
    SUITES.iter().map(|(_, f)| f(cfg)).collect()
}

fn battery() -> Vec<Subject> {
    BATTERY
        .iter()
        .map(|&(p, s)| {
            let f = build_field(p, 1).expect("battery fields are prime");
            Subject::line(RationalFunction::parse(&f, s).expect("battery functions parse"))
        })
        .collect()
}

fn label(s: &Subject) -> String {
    format!("g = {} over GF({})", s.g(), s.q())
}

/// Largest `n` with `q^n ≤ bound`.
fn max_degree(q: u64, bound: u64) -> u32 {
    let mut n = 0;
    let mut x = 1u128;
    while x * q as u128 <= bound as u128 {
        x *= q as u128;
        n += 1;
    }
    n
}

/// Fields GF(p^k) with `p^k − 1 ≤ bound`, `p ∈ {2, 3, 5, 7}`.
fn small_fields(bound: u64) -> Vec<Arc<FiniteField>> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7] {
        for k in 1..=max_degree(p, bound + 1) {
            out.push(build_field(p, k).expect("prime power"));
        }
    }
    out
}

fn ramanujan_simple_property(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("ramanujan_simple_property");
    for ell in arith::primes_up_to(99) {
        for m in 0..1000i64 {
            let mut v = arith::ramanujan_sum(ell, m);
            if cfg.faults.ramanujan && ell == 7 && m == 10 {
                v = -v;
            }
            let expected = if m % ell as i64 == 0 { ell as i64 - 1 } else { -1 };
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for a in 1..ell {
                let th = TAU * ((a as i64 * m).rem_euclid(ell as i64)) as f64 / ell as f64;
                re += th.cos();
                im += th.sin();
            }
            c.check(
                v == expected && (re - v as f64).abs() < 1e-6 && im.abs() < 1e-6,
                || format!("c_{ell}({m}) = {v}, expected {expected}, direct sum {re:.6}"),
            );
        }
    }
    c.out
}

fn indicator_equivalence(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("indicator_equivalence");
    for f in small_fields(10_000) {
        let mut generators = 0u64;
        for x in f.units() {
            let Some(prim) = c.run(&f, f.is_primitive(x)) else { continue };
            let Some(ind) = c.run(&f, f.indicator_generates(x, cfg.cap)) else { continue };
            let Some(mob) = c.run(&f, artin::mobius_expansion_check(&f, x, cfg.cap)) else { continue };
            c.check((ind == 1) == prim && (mob == 1) == prim, || {
                format!("GF({}) x = {}: primitive {prim}, indicator {ind}, expansion {mob}", f.order(), x.0)
            });
            generators += prim as u64;
        }
        let m = f.order() as u64 - 1;
        c.check(generators == arith::euler_phi(m), || {
            format!("GF({}) has {generators} generators, phi = {}", f.order(), arith::euler_phi(m))
        });
    }
    c.out
}

fn field_structure(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("field_structure");
    for f in small_fields(10_000) {
        let m = f.order() as u64 - 1;
        for x in f.units() {
            if let Some(o) = c.run(&f, f.mult_order(x)) {
                c.check(m % o == 0, || format!("ord({}) = {o} does not divide {m} in GF({})", x.0, f.order()));
            }
        }
        let Some(t) = c.run(&f, f.log_table(cfg.cap)) else { continue };
        let mut seen = vec![false; m as usize];
        let mut bijective = t.len() as u64 == m;
        for x in f.units() {
            let j = t.log(x) as usize;
            bijective &= j < seen.len() && !seen[j] && t.exp(j as u32) == x;
            if j < seen.len() {
                seen[j] = true;
            }
        }
        c.check(bijective, || format!("log table of GF({}) is not a bijection", f.order()));
    }
    c.out
}

fn factor_integer_roundtrip(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("factor_integer_roundtrip");
    for n in 1..=1_000_000u64 {
        let f = arith::factor_integer(n);
        let ok = f.product() == n as u128 && f.primes().all(arith::is_prime);
        c.check(ok, || format!("factorization of {n} is {f}"));
    }
    for f in small_fields(1 << 20) {
        let m = f.order() as u64 - 1;
        c.check(arith::factor_integer(m).product() == m as u128, || format!("factorization of {m}"));
    }
    c.out
}

fn gauss_count_suite(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("gauss_count");
    for p in [2u64, 3, 5, 7] {
        let f = build_field(p, 1).unwrap();
        for n in 1..=8u32 {
            let ctx = format!("q = {p}, n = {n}");
            let Some(irr) = c.run(&ctx, enumerate_irreducibles(&f, n, cfg.cap)) else { continue };
            let Some(expected) = c.run(&ctx, gauss_count(p, n)) else { continue };
            c.check(irr.len() as u64 == expected, || format!("{ctx}: {} irreducibles, Gauss {expected}", irr.len()));
        }
    }
    c.out
}

fn affine_point_count(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("affine_point_count");
    for (p, k) in [(2, 1), (3, 1), (5, 1), (2, 2)] {
        let f = build_field(p, k).unwrap();
        let q = f.order() as u64;
        for n in 1..=max_degree(q, cfg.cap.min(1 << 16)) {
            let mut total = 0u64;
            let mut complete = true;
            for d in arith::factor_integer(n as u64).divisors() {
                match c.run(format!("GF({q}) degree {d}"), enumerate_irreducibles(&f, d as u32, cfg.cap)) {
                    Some(irr) => total += d * irr.len() as u64,
                    None => complete = false,
                }
            }
            if complete {
                let qn = q.pow(n);
                c.check(total == qn, || format!("GF({q}), n = {n}: sum d*I_d = {total}, q^n = {qn}"));
            }
        }
    }
    c.out
}

fn random_poly(rng: &mut ChaCha8Rng, f: &Arc<FiniteField>, max_deg: usize) -> Poly {
    let d = rng.gen_range(0..=max_deg);
    let coeffs = (0..=d).map(|_| Elem(rng.gen_range(0..f.order()))).collect();
    Poly::from_coeffs(f, coeffs)
}

fn random_nonconstant(rng: &mut ChaCha8Rng, f: &Arc<FiniteField>) -> RationalFunction {
    loop {
        let a = random_poly(rng, f, 6);
        let b = random_poly(rng, f, 6);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let Ok(g) = crate::ratfunc::rf_make(&a, &b) else { continue };
        if !g.is_constant() {
            return g;
        }
    }
}

fn factor_poly_roundtrip(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("factor_poly_roundtrip");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (p, k) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2)] {
        let f = build_field(p, k).unwrap();
        for _ in 0..10_000 {
            let a = random_poly(&mut rng, &f, 12);
            if a.is_zero() {
                continue;
            }
            let Some(fac) = c.run(&a, factor_poly(&a)) else { continue };
            let irreducible = fac
                .factors
                .iter()
                .all(|(g, _)| g.is_monic() && crate::poly::is_irreducible(g).unwrap_or(false));
            c.check(fac.reconstruct(&f) == a && irreducible, || format!("factorization of {a} over {f}"));
        }
    }
    c.out
}

fn principal_divisor(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("principal_divisor");
    let mut rng = ChaCha8Rng::seed_from_u64(0xd17);
    for (p, k) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2)] {
        let f = build_field(p, k).unwrap();
        for _ in 0..300 {
            let g = random_nonconstant(&mut rng, &f);
            let (Some(d), Some(inv)) = (c.run(&g, g.deg_g()), c.run(&g, g.inv().and_then(|h| h.deg_g()))) else {
                continue;
            };
            c.check(d == inv, || format!("deg({g}) = {d} but deg(1/g) = {inv}"));
            for m in 1..=3i64 {
                if let Some(dm) = c.run(&g, g.pow(m).and_then(|h| h.deg_g())) {
                    c.check(dm == m as u64 * d, || format!("deg(({g})^{m}) = {dm}, deg g = {d}"));
                }
            }
            if let (Some(div), Some(vinf)) = (c.run(&g, g.divisor()), c.run(&g, g.valuation_infinity())) {
                let sum: i64 = div.iter().map(|(p, v)| v * p.degree().unwrap() as i64).sum::<i64>() + vinf;
                c.check(sum == 0, || format!("divisor of {g} has degree {sum}"));
            }
        }
    }
    c.out
}

fn test_varieties() -> Vec<(Arc<FiniteField>, VarietyModel, FunctionOnVariety)> {
    let mut out = Vec::new();
    for (p, v, g) in [
        (2u64, "P1", "(t^2+t+1)/t"),
        (3, "P1", "t^2 + 2"),
        (2, "P2", "x/y"),
        (3, "P2", "(x^2 + y*z)/(y^2)"),
        (2, "curve: y^2*z + y*z^2 + x^3", "x/z"),
        (7, "curve: x^3 + y^3 + z^3", "(x + y)/z"),
    ] {
        let f = build_field(p, 1).unwrap();
        let variety = VarietyModel::parse(&f, v).unwrap();
        let g = FunctionOnVariety::parse(&f, &variety, g).unwrap();
        out.push((f, variety, g));
    }
    out
}

fn frobenius_stability(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("frobenius_stability");
    for (f, variety, g) in test_varieties() {
        for n in 1..=3u32 {
            let Some(ext) = c.run(&variety, Extension::new(f.clone(), n)) else { continue };
            let Some(points) = c.run(&variety, geometry::enumerate_points(&variety, &ext, cfg.cap.min(1 << 16))) else {
                continue;
            };
            let mut images: Vec<_> = points.iter().map(|p| geometry::frobenius_point(&ext, p)).collect();
            images.sort();
            c.check(images == points, || format!("Frobenius does not permute {variety} over GF({}^{n})", f.order()));
            let big = ext.ext();
            let q = f.order() as u64;
            for p in &points {
                let fp = geometry::frobenius_point(&ext, p);
                let (Some(a), Some(b)) = (
                    c.run(&variety, geometry::evaluate(&g, &variety, &ext, p)),
                    c.run(&variety, geometry::evaluate(&g, &variety, &ext, &fp)),
                ) else {
                    continue;
                };
                let ok = match (a, b) {
                    (Value::Unit(x), Value::Unit(y)) => big.pow(x, q) == y,
                    (x, y) => x == y,
                };
                c.check(ok, || format!("g(Frob ρ) ≠ g(ρ)^q at {} on {variety}", p.render(big)));
            }
        }
    }
    c.out
}

fn p1_closed_point_count(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("p1_closed_point_count");
    for (p, k) in [(2, 1), (3, 1), (5, 1), (2, 2)] {
        let f = build_field(p, k).unwrap();
        let q = f.order() as u64;
        for n in 1..=max_degree(q, cfg.cap.min(1 << 16)) {
            let Some(ext) = c.run(&f, Extension::new(f.clone(), n)) else { continue };
            let Some(points) = c.run(&f, geometry::enumerate_points(&VarietyModel::ProjectiveLine, &ext, cfg.cap)) else {
                continue;
            };
            let mut closed = 0u64;
            for d in arith::factor_integer(n as u64).divisors() {
                if let Some(irr) = c.run(&f, enumerate_irreducibles(&f, d as u32, cfg.cap)) {
                    closed += d * (irr.len() as u64 + (d == 1) as u64);
                }
            }
            c.check(closed == points.len() as u64, || {
                format!("#P1(GF({q}^{n})) = {}, closed-point sum {closed}", points.len())
            });
        }
    }
    c.out
}

fn curve_points_on_curve(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("curve_points_on_curve");
    for (f, variety, _) in test_varieties() {
        let VarietyModel::PlaneCurve(poly) = &variety else { continue };
        for n in 1..=3 {
            let Some(ext) = c.run(&variety, Extension::new(f.clone(), n)) else { continue };
            let Some(points) = c.run(&variety, geometry::enumerate_points(&variety, &ext, cfg.cap)) else { continue };
            for p in points {
                c.check(poly.eval(&ext, &p.coords).is_zero() && geometry::contains(&variety, &ext, &p), || {
                    format!("{} is not on {variety}", p.render(ext.ext()))
                });
            }
        }
    }
    c.out
}

fn restriction_consistency(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("restriction_consistency");
    for (f, variety, g) in test_varieties() {
        for n in 1..=3u32 {
            let Some(ext) = c.run(&variety, Extension::new(f.clone(), n)) else { continue };
            let Some(r) = c.run(&variety, geometry::restricted_points(&g, &variety, &ext, cfg.cap)) else { continue };
            let Some(count) = c.run(&variety, geometry::point_count_report(&variety, &ext, cfg.cap)) else { continue };
            let main = (ext.ext().order() as i128).pow(variety.dim());
            let lhs = (r.points.len() as i128 - main).abs();
            let excluded = (r.zeros + r.poles + r.indeterminate) as i128;
            let rhs = excluded + (count.count as i128 - main).abs();
            c.check(lhs <= rhs && r.total() == count.count, || {
                format!("{g} on {variety}, n = {n}: |R - Q^r| = {lhs} > {rhs}")
            });
        }
    }
    c.out
}

fn algorithm_equivalence(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("algorithm_equivalence");
    let bound = cfg.cap.min(100_000);
    for s in battery() {
        let s = s.with_cap(cfg.cap);
        for n in 1..=max_degree(s.q(), bound) {
            let g = s.g().as_line().unwrap();
            let ctx = format!("{}, n = {n}", label(&s));
            let (Some(closed), Some(rep)) =
                (c.run(&ctx, artin::count_artin_closed(g, n, cfg.cap)), c.run(&ctx, artin::count_artin_points(&s, n)))
            else {
                continue;
            };
            c.check(closed == rep.n_points, || format!("{ctx}: closed {closed}, points {}", rep.n_points));
        }
    }
    c.out
}

fn frobenius_orbit_divisibility(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("frobenius_orbit_divisibility");
    for (f, variety, g) in test_varieties() {
        let Some(s) = c.run(&variety, Subject::new(variety.clone(), g, cfg.cap)) else { continue };
        for n in 1..=4u32 {
            if variety.enumeration_size((f.order() as u64).pow(n)) > cfg.cap.min(1 << 18) as u128 {
                c.skip(format!("{} on {variety}, n = {n}: beyond desk scale", s.g()));
                continue;
            }
            if let Some(rep) = c.run(format!("{} on {variety}, n = {n}", s.g()), artin::count_artin_points(&s, n)) {
                c.check(rep.generating_points == n as u64 * rep.n_points, || {
                    format!("{} generating points at n = {n}", rep.generating_points)
                });
            }
        }
    }
    c.out
}

/// Battery members satisfying the full-power precondition of ρ.
fn rho_battery(c: &mut Checker) -> Vec<Subject> {
    let mut out = Vec::new();
    for s in battery() {
        match s.check_not_full_power() {
            Ok(()) => out.push(s),
            Err(e) => c.skip(format!("{}: {e}", label(&s))),
        }
    }
    out
}

fn rho_structure(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("rho_structure");
    for s in rho_battery(&mut c) {
        for n in 1..=60u64 {
            let Some(r) = c.run(label(&s), artin::rho(&s, n)) else { continue };
            let product = r.factors.iter().fold(BigRational::one(), |a, f| a * &f.value);
            let shapes = r.factors.iter().all(|f| {
                f.value.is_zero() || f.value == BigRational::new(f.ell.into(), (f.ell - 1).into())
            });
            let sized = r.value.is_zero() || r.value >= BigRational::one();
            c.check(product == r.value && shapes && sized, || {
                format!("{}: rho({n}) = {}", label(&s), r.value)
            });
        }
    }
    c.out
}

fn vanishing_exact(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("vanishing_exact");
    let f7 = build_field(7, 1).unwrap();
    let s = Subject::line(RationalFunction::parse(&f7, "3*t^3").unwrap()).with_cap(cfg.cap);
    for n in [3u32, 6] {
        let Some(r) = c.run(label(&s), artin::rho(&s, n as u64)) else { continue };
        c.check(!r.is_positive(), || format!("rho({n}) = {}", r.value));
        if let Some(count) = c.run(format!("{}, n = {n}", label(&s)), artin::count_artin_closed(s.g().as_line().unwrap(), n, cfg.cap)) {
            c.check(count == 0, || format!("N = {count} at n = {n} although rho vanishes"));
        }
    }
    c.out
}

fn rho_positivity_equivalence(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("rho_positivity_equivalence");
    for s in rho_battery(&mut c) {
        for n in 1..=200u64 {
            let (Some(pos), Some(r)) = (c.run(label(&s), artin::rho_positive(&s, n)), c.run(label(&s), artin::rho(&s, n))) else {
                continue;
            };
            c.check(pos == r.is_positive(), || format!("{}: n = {n}, rho_positive {pos}, rho {}", label(&s), r.value));
        }
    }
    c.out
}

fn generator_validity(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("generator_validity");
    for s in rho_battery(&mut c) {
        let Some(ns) = c.run(label(&s), artin::artin_n_generator(&s, 50)) else { continue };
        for n in ns {
            let pos = c.run(label(&s), artin::rho_positive(&s, n));
            c.check(pos == Some(true), || format!("{}: generated n = {n} has rho = 0", label(&s)));
        }
    }
    c.out
}

fn witness_validity(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("witness_validity");
    let mut rng = ChaCha8Rng::seed_from_u64(0x3175);
    let mut subjects: Vec<RationalFunction> = battery().iter().map(|s| s.g().as_line().unwrap().clone()).collect();
    for p in [2u64, 3, 5, 7] {
        let f = build_field(p, 1).unwrap();
        for _ in 0..10 {
            let g = random_nonconstant(&mut rng, &f);
            // Powers make the non-geometric branch reachable.
            let e = rng.gen_range(1..=6);
            subjects.push(g.pow(e).unwrap().scale(Elem(rng.gen_range(1..p as u32))));
        }
    }
    for g in subjects {
        let p = g.field().characteristic() as u64;
        for ell in [2u64, 3, 5, 7].into_iter().filter(|&l| l != p) {
            let ctx = format!("{g} over {}, l = {ell}", g.field());
            let (Some(rep), Some(oracle)) = (c.run(&ctx, artin::is_geometric_at(&g, ell)), c.run(&ctx, artin::geometric_oracle(&g, ell))) else {
                continue;
            };
            c.check(rep.geometric == oracle.is_none(), || format!("{ctx}: valuation {} vs oracle {}", rep.geometric, oracle.is_none()));
            if let Some(w) = &rep.witness {
                let rebuilt = w.b.pow(ell as i64).map(|b| b.scale(w.mu));
                c.check(rebuilt.as_ref() == Ok(&g), || format!("{ctx}: witness does not rebuild g"));
            }
        }
    }
    c.out
}

fn trivial_character_sum(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("trivial_character_sum");
    for (f, variety, g) in test_varieties() {
        let Some(s) = c.run(&variety, Subject::new(variety.clone(), g.clone(), cfg.cap)) else { continue };
        for n in 1..=3u32 {
            let Some(ext) = c.run(&variety, Extension::new(f.clone(), n)) else { continue };
            let Some(r) = c.run(&variety, geometry::restricted_points(&g, &variety, &ext, cfg.cap)) else { continue };
            let m = ext.ext().order() as u64 - 1;
            for delta in arith::factor_integer(m).divisors() {
                if let Some(h) = c.run(&variety, artin::class_counts(&s, n, delta)) {
                    c.check(h.total() == r.points.len() as u64, || {
                        format!("{g} on {variety}, n = {n}, delta = {delta}: {} vs {}", h.total(), r.points.len())
                    });
                }
            }
        }
    }
    c.out
}

fn density_identity(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("density_identity");
    for s in rho_battery(&mut c) {
        for n in 1..=max_degree(s.q(), 1 << 40) {
            if let Some(d) = c.run(label(&s), heuristic::density(&s, n)) {
                c.check(d.a == d.rhs, || format!("{}: A = {} vs {}", label(&s), d.a, d.rhs));
            }
        }
    }
    c.out
}

fn nongeometric_split_deterministic(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("nongeometric_split_deterministic");
    for s in battery() {
        let g = s.g().as_line().unwrap();
        let Some(set) = c.run(label(&s), s.nongeometric()) else { continue };
        for rep in set.reports.clone() {
            let ell = rep.ell;
            for n in 1..=max_degree(s.q(), cfg.cap.min(100_000)) {
                if arith::pow_mod(s.q(), n as u64, ell) != 1 {
                    continue;
                }
                match heuristic::empirical_split_check(g, ell, n, cfg.cap) {
                    Ok(chk) => c.check(chk.observed == chk.predicted.value, || {
                        format!("{}: l = {ell}, n = {n}: observed {} vs P = {}", label(&s), chk.observed, chk.predicted.value)
                    }),
                    Err(Error::FullPower(l)) => c.skip(format!("{}: full {l}-th power", label(&s))),
                    Err(e) => {
                        c.run::<()>(label(&s), Err(e));
                    }
                }
            }
        }
    }
    c.out
}

fn not_dividing_zero(_: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("not_dividing_zero");
    for s in rho_battery(&mut c) {
        for ell in arith::primes_up_to(50).into_iter().filter(|l| s.q() % l != 0) {
            for n in 1..=12u32 {
                let Some(sp) = c.run(label(&s), heuristic::split_prob(&s, ell, n)) else { continue };
                let divides = arith::pow_mod(s.q(), n as u64, ell) == 1;
                let zero = sp.value.is_zero();
                c.check((sp.case == SplitCase::NotDividing) == !divides && (divides || zero), || {
                    format!("{}: l = {ell}, n = {n}: {:?}", label(&s), sp.case)
                });
            }
        }
    }
    c.out
}

fn unit_order_bookkeeping(cfg: &VerifyConfig) -> SuiteOutcome {
    let mut c = Checker::new("unit_order_bookkeeping");
    for s in battery() {
        let Some(set) = c.run(label(&s), s.nongeometric()) else { continue };
        let f = s.field();
        for rep in &set.reports {
            let (Some(w), Some(r)) = (&rep.witness, rep.unit_order()) else { continue };
            let Some(j) = c.run(label(&s), f.log(w.mu, cfg.cap)) else { continue };
            let step = (s.q() - 1) / r;
            c.check(j as u64 % step == 0 && arith::gcd(j as u64 / step, r) == 1, || {
                format!("{}: mu = {} has log {j}, order {r}", label(&s), w.mu.0)
            });
        }
    }
    c.out
}
