use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fif_bench::tent_with_grid;
use fif_core::cwt::{DirectCwt, FourierCwt, WaveletTransform};
use fif_core::{sample_grid, CauchyWavelet, SpectrumEvaluator};

fn sampling(c: &mut Criterion) {
    let (problem, _) = tent_with_grid(1);
    let mut group = c.benchmark_group("sample_grid");
    for level in [12, 16, 20] {
        group.bench_with_input(BenchmarkId::from_parameter(level), &level, |b, &level| {
            b.iter(|| sample_grid(black_box(&problem), level).unwrap())
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let (problem, _) = tent_with_grid(1);
    let ev = SpectrumEvaluator::new(&problem, 40).unwrap();
    c.bench_function("ft_series/J=40", |b| b.iter(|| ev.series(black_box(123.4))));
    c.bench_function("ft_series_closed/J=40", |b| b.iter(|| ev.series_closed(black_box(123.4)).unwrap()));
}

fn wavelet(c: &mut Criterion) {
    let (problem, grid) = tent_with_grid(16);
    let w = CauchyWavelet::new(4).unwrap();
    let direct = DirectCwt::new(&grid, w);
    let mut group = c.benchmark_group("cwt_direct");
    for exp in [3, 6, 9] {
        let s = 2f64.powi(-exp);
        group.bench_with_input(BenchmarkId::from_parameter(format!("s=2^-{exp}")), &s, |b, &s| {
            b.iter(|| direct.transform(black_box(s), 0.37).unwrap())
        });
    }
    group.finish();
    let ev = SpectrumEvaluator::with_tail_tolerance(&problem, 1e-14).unwrap();
    let fourier = FourierCwt::new(&ev, w);
    c.bench_function("cwt_fourier/s=2^-5", |b| b.iter(|| fourier.transform(black_box(1.0 / 32.0), 0.37).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = sampling, spectrum, wavelet
}
criterion_main!(benches);
