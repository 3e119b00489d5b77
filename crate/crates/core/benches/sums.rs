//! Parallel against sequential evaluation of the three heavy sums. The
//! sequential mode is a one-thread pool; build with `--no-default-features`
//! to time the fallback without rayon. Before timing, each workload is run in
//! both modes and the results are required to agree bit for bit.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use thetalift::domain::{DomainPoint, IsotropicFrame};
use thetalift::examples;
use thetalift::field::FieldElement;
use thetalift::green::{GreenParams, GreenSum};
use thetalift::lattice::enumerate::Enumerator;
use thetalift::lattice::{DiscriminantGroup, OFLattice, QuadraticSpace};
use thetalift::par::with_threads;
use thetalift::qmat;
use thetalift::specfun::EvalPolicy;
use thetalift::theta::{siegel_theta_at_radius, SiegelPoint};

const MODES: [(&str, Option<usize>); 2] = [("sequential", Some(1)), ("parallel", None)];

fn assert_bit_identical(name: &str, f: impl Fn() -> Vec<u64> + Send + Sync) {
    let seq = with_threads(Some(1), &f);
    let par = with_threads(None, &f);
    assert_eq!(seq, par, "{name}: parallel and sequential results differ");
}

fn split_point() -> (DiscriminantGroup, DomainPoint) {
    let l = examples::split_rank3().unwrap();
    let dg = l.discriminant_group().unwrap();
    let frame = Arc::new(IsotropicFrame::find(l.space()).unwrap());
    let z = DomainPoint::on_reference_ray(frame, &[0.17], 0.9).unwrap();
    (dg, z)
}

fn theta(c: &mut Criterion) {
    let f = examples::sqrt3_field();
    let g = examples::direct_sum(
        2,
        &[examples::sqrt3_l1_gram(), vec![vec![FieldElement(vec![qmat::rat(2), qmat::rat(0)])]]],
    );
    let l = OFLattice::standard(Arc::new(QuadraticSpace::new(f, g, true).unwrap()));
    let dg = l.discriminant_group().unwrap();
    let frame = Arc::new(IsotropicFrame::find(l.space()).unwrap());
    let z = DomainPoint::on_reference_ray(frame, &vec![0.1; l.space().rank() - 2], 1.1).unwrap();
    let tau = SiegelPoint::new(vec![Complex64::new(0.2, 1.0), Complex64::new(-0.1, 0.9)]).unwrap();
    let run = || siegel_theta_at_radius(&dg, Some(&z), &tau, 25.0).unwrap();
    assert_bit_identical("theta", || {
        run().components.iter().flat_map(|c| [c.re.to_bits(), c.im.to_bits()]).collect()
    });
    let mut group = c.benchmark_group("theta_sum");
    for (mode, threads) in MODES {
        group.bench_function(BenchmarkId::from_parameter(mode), |b| b.iter(|| with_threads(threads, run)));
    }
    group.finish();
}

fn green(c: &mut Criterion) {
    let (dg, z) = split_point();
    let m = dg.lattice().field().from_int(1);
    let p = EvalPolicy::default();
    let params = GreenParams::new(1.2, 1e5);
    let run = || GreenSum::new(&dg, 0, &m, &z, &params, &p).unwrap().at(1.2, &p).unwrap();
    assert_bit_identical("green", || vec![run().value.to_bits()]);
    let mut group = c.benchmark_group("green_sum");
    for (mode, threads) in MODES {
        group.bench_function(BenchmarkId::from_parameter(mode), |b| b.iter(|| with_threads(threads, run)));
    }
    group.finish();
}

fn shards(c: &mut Criterion) {
    let l0 = examples::sqrt3_l0().unwrap();
    let form = qmat::mat_to_f64(l0.tr_gram());
    let en = Enumerator::new(&form, &vec![qmat::rat(0); form.len()]).unwrap();
    let quad = en.pull_quadratic(&form);
    // per shard: point count and Σ exp(−Q) over the shard
    let run = || {
        en.map_shards(
            8.0,
            None,
            || (0usize, 0.0f64),
            |acc, y| {
                acc.0 += 1;
                acc.1 += (-quad.eval(y)).exp();
            },
        )
        .unwrap()
    };
    assert_bit_identical("shards", || run().iter().flat_map(|(n, s)| [*n as u64, s.to_bits()]).collect());
    let mut group = c.benchmark_group("enumeration_shards");
    for (mode, threads) in MODES {
        group.bench_function(BenchmarkId::from_parameter(mode), |b| b.iter(|| with_threads(threads, run)));
    }
    group.finish();
}

criterion_group! {
    name = sums;
    config = Criterion::default().sample_size(10);
    targets = theta, green, shards
}
criterion_main!(sums);
