use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sparc_core::chi2::chi2_upper_tail;
use sparc_core::theory::{lambda_alpha, rate_fn_f, rate_fn_f_oracle, solve_d_alpha, theory_panel};
use sparc_core::{RateFnArgs, TheoryPoint};

fn rate_function(c: &mut Criterion) {
    let args = RateFnArgs::new(1.3, 0.7, 0.4).unwrap();
    c.bench_function("rate_fn_f", |b| b.iter(|| rate_fn_f(black_box(args)).unwrap()));
    c.bench_function("rate_fn_f_oracle", |b| b.iter(|| rate_fn_f_oracle(black_box(args)).unwrap()));
}

fn overlap_quantities(c: &mut Criterion) {
    let point = TheoryPoint::new(1.0, 0.5, 1.0, 1.0, 1.5).unwrap();
    c.bench_function("solve_d_alpha", |b| b.iter(|| solve_d_alpha(black_box(0.37), &point).unwrap()));
    c.bench_function("lambda_alpha", |b| b.iter(|| lambda_alpha(black_box(0.37), &point).unwrap()));
    c.bench_function("theory_panel_L64", |b| b.iter(|| theory_panel(&point, black_box(64), 3.0).unwrap()));
}

fn chi_square_tail(c: &mut Criterion) {
    c.bench_function("chi2_upper_tail_series", |b| b.iter(|| chi2_upper_tail(black_box(400), 380.0).unwrap()));
    c.bench_function("chi2_upper_tail_fraction", |b| b.iter(|| chi2_upper_tail(black_box(1600), 4800.0).unwrap()));
}

criterion_group!(benches, rate_function, overlap_quantities, chi_square_tail);
criterion_main!(benches);
