//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Every criterion is checked as stated. The battery member t⁶/(t+1)⁶ over
//! GF(5) is a full square with 2 | q − 1, so its counts vanish for every n
//! and criteria 9 and 10 cannot hold for it; those two lines print FAIL.
//! The run as a whole succeeds only if that is the *sole* reason anything
//! fails, so any other regression still breaks the build.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use ffartin::arith::{euler_phi, factor_integer, pow_mod, primes_up_to, ramanujan_sum};
use ffartin::artin::{
    artin_n_generator, charsum_experiment, count_artin_closed, count_artin_points, geometric_oracle,
    is_geometric_at, mobius_expansion_check, rho, rho_positive,
};
use ffartin::heuristic::{density, empirical_split_check};
use ffartin::verify::BATTERY;
use ffartin::{build_field, Error, RationalFunction, Subject};

const CAP: u64 = 1 << 30;
const QN_LIMIT: u64 = 1_000_000;

/// Why a criterion did not hold.
#[derive(Debug)]
enum Problem {
    /// The known defect: a battery function that is a full ℓ-th power.
    FullPower { g: String, ell: u64 },
    Violation(String),
}

#[derive(Default)]
struct Tally {
    checks: u64,
    problems: Vec<Problem>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.problems.push(Problem::Violation(msg()));
        }
    }

    fn run<T>(&mut self, ctx: &str, r: ffartin::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(Error::FullPower(ell)) => {
                self.checks += 1;
                self.problems.push(Problem::FullPower { g: ctx.to_string(), ell });
                None
            }
            Err(e) => {
                self.checks += 1;
                self.problems.push(Problem::Violation(format!("{ctx}: {e}")));
                None
            }
        }
    }
}

fn battery() -> Vec<(u64, String, Subject)> {
    BATTERY
        .iter()
        .map(|&(p, g)| {
            let f = build_field(p, 1).unwrap();
            let rf = RationalFunction::parse(&f, g).unwrap();
            (p, format!("{g} over GF({p})"), Subject::line(rf))
        })
        .collect()
}

fn degrees(q: u64) -> impl Iterator<Item = u32> {
    (1u32..).take_while(move |&n| q.checked_pow(n).is_some_and(|v| v <= QN_LIMIT))
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn median3(mut v: [f64; 3]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[1]
}

/// The running maximum of `ratios` may exceed the median of `window`
/// by at most a factor of 4.
fn trend_ok(ratios: &[f64], window: [f64; 3]) -> (bool, f64, f64) {
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let base = median3(window);
    (max <= 4.0 * base, max, base)
}

fn exact_counts() -> Tally {
    let mut t = Tally::default();
    for (p, label, s) in battery() {
        let g = s.g().as_line().unwrap().clone();
        for n in degrees(p) {
            let ctx = format!("{label}, n = {n}");
            let (Some(closed), Some(rep)) = (t.run(&ctx, count_artin_closed(&g, n, CAP)), t.run(&ctx, count_artin_points(&s, n)))
            else {
                continue;
            };
            t.check(closed == rep.n_points, || format!("{ctx}: closed {closed} vs points {}", rep.n_points));
            t.check(rep.generating_points == n as u64 * rep.n_points, || {
                format!("{ctx}: {} generating points, N = {}", rep.generating_points, rep.n_points)
            });
        }
    }
    t
}

fn vanishing() -> Tally {
    let mut t = Tally::default();
    let f = build_field(7, 1).unwrap();
    let g = RationalFunction::parse(&f, "3*t^3").unwrap();
    let s = Subject::line(g.clone());
    for n in 1..=7u32 {
        let ctx = format!("3t^3 over GF(7), n = {n}");
        let (Some(count), Some(r)) = (t.run(&ctx, count_artin_closed(&g, n, CAP)), t.run(&ctx, rho(&s, n as u64))) else {
            continue;
        };
        if n % 3 == 0 {
            t.check(count == 0 && r.value.is_zero(), || format!("{ctx}: N = {count}, rho = {}", r.value));
        } else {
            t.check(count > 0 && r.value == ratio(3, 2), || format!("{ctx}: N = {count}, rho = {}", r.value));
        }
    }
    t
}

fn main_term_line() -> (Tally, String) {
    let mut t = Tally::default();
    let f = build_field(2, 1).unwrap();
    let g = RationalFunction::parse(&f, "t").unwrap();
    let mut ratios = Vec::new();
    for n in 4..=16u32 {
        let Some(count) = t.run(&format!("t over GF(2), n = {n}"), count_artin_closed(&g, n, CAP)) else {
            return (t, String::new());
        };
        let m = (1u64 << n) - 1;
        let main = ratio(euler_phi(m), n as u64);
        let err = (BigRational::from_integer(count.into()) - main).abs();
        ratios.push(err.to_f64().unwrap() / 2f64.powf(n as f64 / 2.0));
    }
    // ratios[i] belongs to n = i + 4.
    let (ok, max, base) = trend_ok(&ratios[4..], [ratios[4], ratios[5], ratios[6]]);
    t.check(ok, || format!("running max {max} vs baseline median {base}"));
    (t, format!("max ratio {max:.3e}, baseline {base:.3e}"))
}

fn main_term_plane() -> (Tally, String) {
    let mut t = Tally::default();
    let f = build_field(2, 1).unwrap();
    let s = Subject::parse(&f, "P2", "x/y", CAP).unwrap();
    let mut ratios = Vec::new();
    for n in 1..=5u32 {
        let ctx = format!("x/y on P2 over GF(2), n = {n}");
        let (Some(rep), Some(r)) = (t.run(&ctx, count_artin_points(&s, n)), t.run(&ctx, rho(&s, n as u64))) else {
            return (t, String::new());
        };
        t.check(rep.generating_points == n as u64 * rep.n_points, || {
            format!("{ctx}: {} generating points, N = {}", rep.generating_points, rep.n_points)
        });
        let qn = 1u64 << n;
        let main = r.value * ratio(euler_phi(qn - 1) * qn, n as u64);
        t.check(rep.main_term.as_ref() == Some(&main), || format!("{ctx}: main term {:?} vs {main}", rep.main_term));
        let err = (BigRational::from_integer(rep.n_points.into()) - main).abs();
        ratios.push(err.to_f64().unwrap() / 2f64.powf(1.5 * n as f64));
    }
    // Only n ≤ 5 is in range, so the baseline is the median of n = 1..3.
    let (ok, max, base) = trend_ok(&ratios, [ratios[0], ratios[1], ratios[2]]);
    t.check(ok, || format!("running max {max} vs baseline median {base}"));
    (t, format!("max ratio {max:.3e}, baseline {base:.3e}"))
}

fn character_sums() -> (Tally, String) {
    let mut t = Tally::default();
    let f = build_field(2, 1).unwrap();
    let s = Subject::line(RationalFunction::parse(&f, "t").unwrap());
    let mut worst: f64 = 0.0;
    for n in 2..=16u32 {
        let m = (1u64 << n) - 1;
        for delta in factor_integer(m).primes().collect::<Vec<_>>() {
            let ctx = format!("t over GF(2), n = {n}, delta = {delta}");
            let Some(rep) = t.run(&ctx, charsum_experiment(&s, n, delta)) else { continue };
            worst = worst.max(rep.max_ratio);
            t.check(rep.max_ratio <= 4.0, || format!("{ctx}: max |S|/2^(n/2) = {}", rep.max_ratio));
            // R_g consists of the nonzero elements of GF(2^n).
            t.check(rep.trivial_sum == m, || format!("{ctx}: trivial sum {} vs #R = {m}", rep.trivial_sum));
        }
    }
    (t, format!("max ratio {worst:.3e}"))
}

fn indicator_equivalence() -> Tally {
    let mut t = Tally::default();
    for p in [2u64, 3, 5, 7] {
        for k in (1u32..).take_while(|&k| p.pow(k) - 1 <= 10_000) {
            let f = build_field(p, k).unwrap();
            let ctx = format!("GF({p}^{k})");
            let mut generators = 0;
            for x in f.units() {
                let (Some(prim), Some(ind), Some(mob)) = (
                    t.run(&ctx, f.is_primitive(x)),
                    t.run(&ctx, f.indicator_generates(x, CAP)),
                    t.run(&ctx, mobius_expansion_check(&f, x, CAP)),
                ) else {
                    continue;
                };
                t.check((ind == 1) == prim && (mob == 1) == prim, || {
                    format!("{ctx}, x = {}: primitive {prim}, indicator {ind}, expansion {mob}", x.0)
                });
                generators += prim as u64;
            }
            let m = p.pow(k) - 1;
            t.check(generators == euler_phi(m), || format!("{ctx}: {generators} generators vs phi = {}", euler_phi(m)));
        }
    }
    t
}

fn ramanujan() -> Tally {
    let mut t = Tally::default();
    for ell in primes_up_to(99) {
        for m in 0..1000i64 {
            let v = ramanujan_sum(ell, m);
            let expected = if m % ell as i64 == 0 { ell as i64 - 1 } else { -1 };
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for a in 1..ell {
                let th = TAU * ((a as i64 * m) % ell as i64) as f64 / ell as f64;
                re += th.cos();
                im += th.sin();
            }
            t.check((re - v as f64).abs() < 1e-6 && im.abs() < 1e-6, || {
                format!("c_{ell}({m}) = {v}, direct sum {re:.9} + {im:.9}i")
            });
            t.check(v == expected && re.round() as i64 == v, || format!("c_{ell}({m}) = {v}, expected {expected}"));
        }
    }
    t
}

fn geometricity_oracle() -> Tally {
    let mut t = Tally::default();
    for (p, label, s) in battery() {
        let g = s.g().as_line().unwrap();
        for ell in [2u64, 3, 5, 7].into_iter().filter(|&l| l != p) {
            let ctx = format!("{label}, l = {ell}");
            let (Some(rep), Some(oracle)) = (t.run(&ctx, is_geometric_at(g, ell)), t.run(&ctx, geometric_oracle(g, ell))) else {
                continue;
            };
            t.check(rep.geometric == oracle.is_none(), || {
                format!("{ctx}: valuation says {}, oracle says {}", rep.geometric, oracle.is_none())
            });
            t.check(rep.geometric != rep.witness.is_some(), || format!("{ctx}: witness presence mismatch"));
            for w in rep.witness.iter().chain(oracle.iter()) {
                let rebuilt = w.b.pow(ell as i64).map(|b| b.scale(w.mu));
                t.check(rebuilt.as_ref() == Ok(g), || format!("{ctx}: mu * b^l does not rebuild g"));
            }
        }
    }
    t
}

fn density_identity() -> Tally {
    let mut t = Tally::default();
    for (p, label, s) in battery() {
        for n in degrees(p) {
            let ctx = format!("{label}, n = {n}");
            let (Some(d), Some(r)) = (t.run(&label, density(&s, n)), t.run(&label, rho(&s, n as u64))) else {
                break;
            };
            let m = p.pow(n) - 1;
            let closed = ratio(euler_phi(m), m) * r.value;
            t.check(d.a == closed && d.rhs == closed, || format!("{ctx}: A = {} vs {closed}", d.a));
        }
        let Some(set) = t.run(&label, s.nongeometric()).cloned() else { continue };
        let g = s.g().as_line().unwrap();
        for &ell in &set.primes {
            for n in degrees(p).filter(|&n| pow_mod(p, n as u64, ell) == 1) {
                let ctx = format!("{label}, l = {ell}, n = {n}");
                let Some(chk) = t.run(&label, empirical_split_check(g, ell, n, CAP)) else { break };
                let v = &chk.predicted.value;
                t.check(v.is_zero() || *v == ratio(1, 1), || format!("{ctx}: P = {v} is not 0 or 1"));
                t.check(chk.observed == *v, || format!("{ctx}: observed {} vs P = {v}", chk.observed));
            }
        }
    }
    t
}

fn constructive_infinitude() -> Tally {
    let mut t = Tally::default();
    for (p, label, s) in battery() {
        let g = s.g().as_line().unwrap().clone();
        let Some(ns) = t.run(&label, artin_n_generator(&s, 20)) else { continue };
        t.check(ns.len() == 21, || format!("{label}: {} values", ns.len()));
        for n in ns {
            let ctx = format!("{label}, n = {n}");
            let pos = t.run(&ctx, rho_positive(&s, n));
            t.check(pos == Some(true), || format!("{ctx}: rho_positive is false"));
            let small = u32::try_from(n).ok().and_then(|n| p.checked_pow(n)).is_some_and(|v| v <= QN_LIMIT);
            if small {
                if let Some(count) = t.run(&ctx, count_artin_closed(&g, n as u32, CAP)) {
                    t.check(count > 0, || format!("{ctx}: N = 0"));
                }
            }
        }
    }
    t
}

fn main() -> ExitCode {
    // Criteria whose only admissible failure is the full-power battery member.
    const KNOWN_DEFECT: [usize; 2] = [9, 10];
    let defect_g = BATTERY.iter().find(|(_, g)| g.contains('/')).map(|&(p, g)| format!("{g} over GF({p})")).unwrap();

    let criteria: [(&str, fn() -> (Tally, String)); 10] = [
        ("exact-count battery", || (exact_counts(), String::new())),
        ("vanishing for 3t^3 over GF(7)", || (vanishing(), String::new())),
        ("main-term tracking, t over GF(2)", main_term_line),
        ("main-term tracking, x/y on P2 over GF(2)", main_term_plane),
        ("character-sum bound", character_sums),
        ("indicator equivalence", || (indicator_equivalence(), String::new())),
        ("Ramanujan sums", || (ramanujan(), String::new())),
        ("geometricity oracle equivalence", || (geometricity_oracle(), String::new())),
        ("density identity and deterministic splitting", || (density_identity(), String::new())),
        ("constructive infinitude", || (constructive_infinitude(), String::new())),
    ];

    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let (tally, note) = run();
        let secs = start.elapsed().as_secs_f64();
        let status = if tally.problems.is_empty() { "PASS" } else { "FAIL" };
        let note = if note.is_empty() { String::new() } else { format!("; {note}") };
        println!("{status} criterion {id:>2}: {name} ({} checks, {secs:.1}s{note})", tally.checks);
        for p in tally.problems.iter().take(10) {
            match p {
                Problem::FullPower { g, ell } => println!("     {g} is a full power at l = {ell} with l | q - 1, so its counts vanish for every n"),
                Problem::Violation(msg) => println!("     violated: {msg}"),
            }
        }
        let admissible = |p: &Problem| match p {
            Problem::FullPower { g, ell } => KNOWN_DEFECT.contains(&id) && *ell == 2 && g.starts_with(&defect_g),
            Problem::Violation(_) => false,
        };
        if !tally.problems.iter().all(admissible) {
            unexpected.push(id);
        }
        if KNOWN_DEFECT.contains(&id) && tally.problems.is_empty() {
            println!("     note: the full-power battery member no longer blocks this criterion");
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: only the full-power battery member fails (criteria 9, 10)");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
