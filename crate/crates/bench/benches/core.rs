use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::hint::black_box;

use chsh_core::expose::{build_expose_lp, solve_expose_lp};
use chsh_core::extremality::{extremality_report, realizations_from_point, Method};
use chsh_core::spectrum::{bell_matrix, maximize_quantum_value, top_eigenpair};
use chsh_core::{Functional, Realization};
use criterion::{criterion_group, criterion_main, Criterion};

fn spectrum(c: &mut Criterion) {
    let f = Functional::new([0.3, 0.1, 0.0, 0.2, 1.0, 1.0, 1.0, -1.0]).unwrap();
    let w = bell_matrix(&f, [0.0, 1.1], [0.0, 0.7]);
    c.bench_function("top_eigenpair", |b| b.iter(|| top_eigenpair(black_box(&w))));
    c.bench_function("maximize_chsh", |b| {
        b.iter(|| maximize_quantum_value(black_box(&Functional::chsh()), 64, 1e-10).unwrap())
    });
}

fn extremality(c: &mut Criterion) {
    let r = Realization::new(1.2, 0.3, 1.9, -0.4, 1.1).unwrap();
    let p = r.point();
    c.bench_function("realizations_from_point", |b| {
        b.iter(|| realizations_from_point(black_box(&p)).unwrap())
    });
    c.bench_function("extremality_report", |b| {
        b.iter(|| extremality_report(black_box(&r), Method::Both))
    });
}

fn lp(c: &mut Criterion) {
    let r = Realization::new(FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4).unwrap();
    c.bench_function("expose_lp_chsh", |b| {
        b.iter(|| solve_expose_lp(&build_expose_lp(black_box(&r))))
    });
    let r = Realization::new(1.1, 0.2, 1.7, 0.9, -0.6).unwrap();
    c.bench_function("expose_lp_generic", |b| {
        b.iter(|| solve_expose_lp(&build_expose_lp(black_box(&r))))
    });
}

criterion_group!(benches, spectrum, extremality, lp);
criterion_main!(benches);
