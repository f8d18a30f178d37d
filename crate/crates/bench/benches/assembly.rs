use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use osc_core::derham::{ComplexAssembly, ConnectionSpec, TorusModel};
use osc_core::exterior::{self, ExteriorBasis};
use osc_core::oscillator;
use osc_core::{Metric, Sampler};

fn laplacian_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("complex_assembly");
    group.sample_size(10);
    for (dim2n, m, n) in [(2, 2, 2), (2, 4, 4), (4, 1, 2)] {
        let model = TorusModel::new(dim2n, m, n).unwrap();
        let id = format!("2n={dim2n},M={m},N={n}");
        group.bench_with_input(BenchmarkId::new("build", &id), &model, |b, model| {
            b.iter(|| ComplexAssembly::build(&ConnectionSpec::Trivial, model, 0).unwrap())
        });
        let asm = ComplexAssembly::build(&ConnectionSpec::Trivial, &model, 0).unwrap();
        group.bench_with_input(BenchmarkId::new("harmonic_report_k1", &id), &asm, |b, asm| {
            b.iter(|| asm.harmonic_report(1, 1e-8).unwrap())
        });
    }
    group.finish();
}

fn cartan(c: &mut Criterion) {
    let mut group = c.benchmark_group("cartan_report");
    for dim in [2, 4, 6, 8] {
        let basis = ExteriorBasis::new(dim).unwrap();
        let xi = Sampler::new(1).covector(dim);
        let g = Metric::identity(dim);
        group.bench_function(BenchmarkId::from_parameter(dim), |b| {
            b.iter(|| exterior::cartan_report(&basis, black_box(&xi), &g).unwrap())
        });
    }
    group.finish();
}

fn quantize(c: &mut Criterion) {
    let mut group = c.benchmark_group("quantize");
    for (dim, n) in [(2, 16), (2, 64), (4, 8)] {
        let ladders = oscillator::ladder_matrices(dim / 2, n).unwrap();
        let s = Sampler::new(2).sp_element(dim);
        group.bench_function(BenchmarkId::from_parameter(format!("2n={dim},N={n}")), |b| {
            b.iter(|| oscillator::quantize(black_box(&s), &ladders).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, laplacian_assembly, cartan, quantize);
criterion_main!(benches);
