use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stit_core::exact::qmc::{random_shift, shifted_halton};
use stit_core::exact::variance_exact;
use stit_core::{run_mnw, ConvexPolytope, FaceFunctional, Hyperplane, HyperplaneMeasureSpec, IntegratorConfig};

fn split(c: &mut Criterion) {
    let mut g = c.benchmark_group("split");
    let square = ConvexPolytope::unit_cube(2);
    let h = Hyperplane::from_unnormalized(vec![1.0, 0.3], 0.5).unwrap();
    g.bench_function("box_2d", |b| b.iter(|| black_box(&square).split(black_box(&h))));
    let ball = ConvexPolytope::icosphere(2, 1.0).unwrap();
    let h = Hyperplane::from_unnormalized(vec![0.2, 1.0, 0.4], 0.1).unwrap();
    g.bench_function("icosphere_3d", |b| b.iter(|| black_box(&ball).split(black_box(&h))));
    g.finish();
}

fn mnw(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_mnw");
    for (d, t) in [(2, 10.0), (2, 40.0), (3, 4.0)] {
        let spec = HyperplaneMeasureSpec::isotropic(d).unwrap();
        g.bench_with_input(BenchmarkId::new(format!("iso_d{d}"), t), &t, |b, &t| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            b.iter(|| run_mnw(ConvexPolytope::unit_cube(d), &spec, t, &mut rng).unwrap())
        });
    }
    g.finish();
}

fn qmc(c: &mut Criterion) {
    let mut g = c.benchmark_group("qmc");
    let shift = random_shift(8, &mut ChaCha8Rng::seed_from_u64(2));
    let mut out = [0.0; 8];
    g.bench_function("halton_8d", |b| {
        let mut i = 0u64;
        b.iter(|| {
            i += 1;
            shifted_halton(i, &shift, &mut out);
            black_box(out[7])
        })
    });
    let spec = HyperplaneMeasureSpec::isotropic(2).unwrap();
    let cfg = IntegratorConfig {
        points: 4096,
        ..Default::default()
    };
    let w = ConvexPolytope::unit_cube(2);
    g.sample_size(10);
    g.bench_function("variance_exact_iso2", |b| {
        b.iter(|| variance_exact(&spec, &w, 1.0, &FaceFunctional::surface(), &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, split, mnw, qmc);
criterion_main!(benches);
