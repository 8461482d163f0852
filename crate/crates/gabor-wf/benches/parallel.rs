//! Parallel vs sequential detector and random-Q workloads.
//!
//! With the default `parallel` feature each workload runs on the global
//! rayon pool and on a one-thread pool. Built with `--no-default-features`
//! the same ids measure the plain-iterator fallback:
//!
//! ```text
//! cargo bench -p gabor-wf --bench parallel -- --save-baseline par
//! cargo bench -p gabor-wf --bench parallel --no-default-features -- --baseline par
//! ```

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gabor_wf::data::Datum;
use gabor_wf::detector::{estimate_wf, scan_directions, stft, DetectorConfig};
use gabor_wf::hamiltonian::{hamilton_map, singular_space};
use gabor_wf::linalg::DEFAULT_TOL;
use gabor_wf::{par, random};

fn variants() -> Vec<(&'static str, Option<usize>)> {
    if par::is_parallel() {
        vec![("pool", None), ("one_thread", Some(1))]
    } else {
        vec![("fallback", None)]
    }
}

fn run_with<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        return pool.install(f);
    }
    let _ = threads;
    f()
}

fn detector(c: &mut Criterion) {
    let u = Datum::parse("chirp(1)").unwrap().sample(40.0, 4096).unwrap();
    let cfg = DetectorConfig::default();
    let sp = stft(&u, 1.0).unwrap();
    let mut g = c.benchmark_group("detector");
    g.sample_size(10).measurement_time(Duration::from_secs(5));
    for (name, threads) in variants() {
        g.bench_function(BenchmarkId::new("stft", name), |b| {
            b.iter(|| run_with(threads, || stft(black_box(&u), 1.0).unwrap()))
        });
        g.bench_function(BenchmarkId::new("scan_directions", name), |b| {
            b.iter(|| run_with(threads, || scan_directions(black_box(&sp), &cfg).unwrap()))
        });
        g.bench_function(BenchmarkId::new("estimate_wf", name), |b| {
            b.iter(|| run_with(threads, || estimate_wf(black_box(&u), &cfg).unwrap()))
        });
    }
    g.finish();
}

fn singular_spaces(c: &mut Criterion) {
    let mut rng = random::rng(5);
    let qs: Vec<_> = (0..200).map(|k| random::random_q(&mut rng, 1 + k % 3)).collect();
    let mut g = c.benchmark_group("random_q");
    g.sample_size(10);
    for (name, threads) in variants() {
        g.bench_function(BenchmarkId::new("singular_space_x200", name), |b| {
            b.iter(|| {
                run_with(threads, || {
                    par::map_slice(&qs, |h| singular_space(&hamilton_map(h), DEFAULT_TOL).s.dim())
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, detector, singular_spaces);
criterion_main!(benches);
