//! Compares the rayon-backed batch helpers against their sequential
//! counterparts on the two sweeps that dominate the test suite: semantic
//! evaluation over random structures and small-model validity search.

use criterion::{criterion_group, criterion_main, Criterion};

fn bench_placeholder(_c: &mut Criterion) {}

criterion_group!(benches, bench_placeholder);
criterion_main!(benches);
