//! Sequential against rayon-parallel execution on the three hot paths:
//! torsion kernel columns, per-place bound rows and a batch of preparations.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use drinfeld_core::base_field::{parse_poly, FieldParams, Place, RationalFunctions};
use drinfeld_core::config::Config;
use drinfeld_core::drinfeld::GlobalModule;
use drinfeld_core::exec::Execution;
use drinfeld_core::field::Fq;
use drinfeld_core::iwasawa::{weierstrass_prep, IwasawaSeries, ORing};
use drinfeld_core::selmer_bound::lambda_bound;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn torsion_kernel(c: &mut Criterion) {
    let fq = Fq::prime(3).unwrap();
    let rf = RationalFunctions::new(fq.clone());
    let phi = GlobalModule::parse(&rf, "T + (T^2+1)*t + (T+2)*t^2").unwrap();
    let red = phi.reduce(&Place::parse(&fq, "T^2+T+2").unwrap()).unwrap();
    let a = parse_poly(&fq, "T^3+2*T+1").unwrap();
    let mut g = c.benchmark_group("torsion_kernel");
    g.sample_size(10);
    for e in [6usize, 12] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, e), &e, |b, &e| b.iter(|| red.torsion_kernel(&a, e, 0, exec).unwrap()));
        }
    }
    g.finish();
}

fn bound_rows(c: &mut Criterion) {
    let fq = Fq::prime(3).unwrap();
    let rf = RationalFunctions::new(fq.clone());
    let phi = GlobalModule::parse(&rf, "T + T*(T+1)*t + (T^2+1)*(T+2)*t^2").unwrap();
    let p = Place::parse(&fq, "T").unwrap();
    let mut g = c.benchmark_group("lambda_bound");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = Config {
            execution: exec,
            ..Config::default()
        };
        g.bench_function(name, |b| b.iter(|| lambda_bound(&phi, &FieldParams::prime(3), &p, 0, "bench", &cfg).unwrap()));
    }
    g.finish();
}

fn weierstrass_batch(c: &mut Criterion) {
    let fq = Fq::prime(3).unwrap();
    let o = ORing::new(&fq, &Place::parse(&fq, "T^2+1").unwrap(), 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let batch: Vec<IwasawaSeries> = (0..64)
        .map(|i| {
            let g = IwasawaSeries::random_distinguished(&o, 1 + i % 5, &mut rng);
            let u = IwasawaSeries::random_unit(&o, 30, &mut rng);
            let f = u.mul(&g).unwrap();
            IwasawaSeries::new(&o, f.coeffs().to_vec(), 16, Some(24)).unwrap()
        })
        .collect();
    let mut g = c.benchmark_group("weierstrass_batch");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| exec.map(&batch, |f| weierstrass_prep(f).unwrap().lambda)));
    }
    g.finish();
}

criterion_group!(benches, torsion_kernel, bound_rows, weierstrass_batch);
criterion_main!(benches);
