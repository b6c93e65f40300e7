use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ffartin::artin::{count_artin_closed, count_artin_points, rho};
use ffartin::{build_field, factor_poly, is_irreducible, Elem, FiniteField, Poly, RationalFunction, Subject};

/// Monic candidate number `i` of degree `n` (base-`q` digits of `i`).
fn candidate(field: &Arc<FiniteField>, n: u32, mut i: u64) -> Poly {
    let q = field.order() as u64;
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    for _ in 0..n {
        coeffs.push(Elem((i % q) as u32));
        i /= q;
    }
    coeffs.push(Elem(1));
    Poly::from_coeffs(field, coeffs)
}

// The library caches enumerations, so time the underlying scan directly.
fn irreducibility_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("irreducibility_scan");
    group.sample_size(10);
    for (p, n) in [(2u64, 12u32), (3, 7), (7, 4)] {
        let f = build_field(p, 1).unwrap();
        let total = p.pow(n);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{p}^{n}")), &n, |b, &n| {
            b.iter(|| (0..total).filter(|&i| is_irreducible(&candidate(&f, n, i)).unwrap()).count())
        });
    }
    group.finish();
}

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count");
    group.sample_size(10);
    for (p, g, n) in [(2u64, "t", 12u32), (3, "t^2 + t", 8), (7, "3*t^3", 5)] {
        let f = build_field(p, 1).unwrap();
        let g = RationalFunction::parse(&f, g).unwrap();
        let id = format!("q={p},n={n}");
        group.bench_with_input(BenchmarkId::new("closed", &id), &n, |b, &n| {
            b.iter(|| count_artin_closed(black_box(&g), n, 1 << 30).unwrap())
        });
        let subject = Subject::line(g.clone());
        group.bench_with_input(BenchmarkId::new("points", &id), &n, |b, &n| {
            b.iter(|| count_artin_points(black_box(&subject), n).unwrap())
        });
    }
    group.finish();
}

fn factoring(c: &mut Criterion) {
    let f = build_field(5, 1).unwrap();
    let polys: Vec<Poly> = (0..200).map(|i| candidate(&f, 24, 7919 * i + 12345)).collect();
    c.bench_function("factor_poly_deg24_gf5", |b| {
        b.iter(|| polys.iter().map(|p| factor_poly(p).unwrap().factors.len()).sum::<usize>())
    });
}

fn correction_factor(c: &mut Criterion) {
    let f = build_field(7, 1).unwrap();
    let subject = Subject::line(RationalFunction::parse(&f, "3*t^3").unwrap());
    c.bench_function("rho_n_1_to_200", |b| {
        b.iter(|| (1..=200u64).filter(|&n| rho(&subject, n).unwrap().is_positive()).count())
    });
}

criterion_group!(benches, irreducibility_scan, counting, factoring, correction_factor);
criterion_main!(benches);
