//! Timings of the main computations on seeded instances.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use adelic_core::convexgeom::john_ellipsoid;
use adelic_core::minima::successive_minima;
use adelic_core::slopes::canonical_polygon;
use adelic_core::sympow::gamma_nl;
use adelic_core::tolerances::ELLIPSOID_TOL;
use adelic_core::verify::instances::{random_body_bundle, random_hermitian_bundle, rng};
use adelic_core::verify::run_suite;
use adelic_core::ArchMetric;

fn gamma(c: &mut Criterion) {
    for (n, l) in [(2, 8), (4, 6), (6, 4)] {
        c.bench_function(&format!("gamma_nl/{n}_{l}"), |b| {
            b.iter(|| gamma_nl(black_box(n), black_box(l)).unwrap())
        });
    }
}

fn polygon(c: &mut Criterion) {
    for n in [3, 4] {
        let bundle = random_hermitian_bundle(&mut rng(n as u64), n, 4);
        c.bench_function(&format!("canonical_polygon/{n}"), |b| {
            b.iter(|| canonical_polygon(&bundle, 1.0).unwrap())
        });
    }
}

fn minima(c: &mut Criterion) {
    for n in [3, 4] {
        let bundle = random_hermitian_bundle(&mut rng(10 + n as u64), n, 4);
        c.bench_function(&format!("successive_minima/{n}"), |b| {
            b.iter(|| successive_minima(&bundle).unwrap())
        });
    }
}

fn ellipsoid(c: &mut Criterion) {
    for n in [2, 3] {
        let bundle = random_body_bundle(&mut rng(20 + n as u64), n);
        let ArchMetric::Body(body) = bundle.arch() else {
            unreachable!("random body bundle")
        };
        c.bench_function(&format!("john_ellipsoid/{n}"), |b| {
            b.iter(|| john_ellipsoid(body, ELLIPSOID_TOL).unwrap())
        });
    }
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_suite");
    g.sample_size(10);
    for name in ["hermitian-exact", "body-brackets"] {
        g.bench_function(name, |b| b.iter(|| run_suite(name, 20, 1).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, gamma, polygon, minima, ellipsoid, suites);
criterion_main!(benches);
