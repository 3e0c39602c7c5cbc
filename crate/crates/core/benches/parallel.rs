use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use nhspec_core::matching::{self, MatchQuery};
use nhspec_core::verify;
use nhspec_core::{DeformationModel, Execution, Family, Variant};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn root_scan(c: &mut Criterion) {
    let model = DeformationModel::new(Family::K6, Variant::Minus, 1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("root_scan");
    for points in [4096usize, 1 << 16] {
        let query = MatchQuery::new(model, 0.3).unwrap().with_grid_points(points).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, points), &query, |b, q| {
                b.iter(|| matching::numeric_roots_with(black_box(q), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("fock_d32", name), |b| b.iter(|| verify::fock_suite(32, exec)));
        group.bench_function(BenchmarkId::new("parity", name), |b| b.iter(|| verify::parity_suite(exec)));
        group.bench_function(BenchmarkId::new("matching", name), |b| b.iter(|| verify::matching_suite(exec)));
    }
    group.finish();
}

criterion_group!(benches, root_scan, suites);
criterion_main!(benches);
