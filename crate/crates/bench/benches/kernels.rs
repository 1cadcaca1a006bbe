use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bichromatic::oracle::{build_liouvillian_dicke, regression_spectrum, steady_state};
use bichromatic::susceptibility::{chi_closed_form, default_probe_grid};
use bichromatic::{collective_inversion, derive_dressed, derive_frames, dressed, linspace, SystemParams};

fn closed_form(c: &mut Criterion) {
    let ratios = linspace(-1.0, 1.0, 801);
    c.bench_function("inversion_sweep_801", |b| {
        b.iter(|| {
            ratios
                .iter()
                .map(|&r| dressed::bare_inversion_single(&derive_dressed(&SystemParams::reference(16.0, r)).unwrap()))
                .sum::<f64>()
        })
    });

    let (f, g) = derive_frames(&SystemParams::reference(16.0, 0.43)).unwrap();
    let rz = collective_inversion(g.ratio, 1).unwrap();
    let grid = default_probe_grid();
    c.bench_function("chi_closed_form_10001", |b| b.iter(|| chi_closed_form(&f, &g, black_box(rz), &grid).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let (f, g) = derive_frames(&SystemParams::reference(16.0, 0.43)).unwrap();
    let mut group = c.benchmark_group("dicke_steady_state");
    for n in [1, 4, 8] {
        let l = build_liouvillian_dicke(&g, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &l, |b, l| b.iter(|| steady_state(l).unwrap()));
    }
    group.finish();

    let grid = linspace(-250.0, 250.0, 1001);
    let mut group = c.benchmark_group("regression");
    group.sample_size(10);
    group.bench_function("spectrum_1001", |b| b.iter(|| regression_spectrum(&f, &g, &grid).unwrap()));
    group.finish();
}

criterion_group!(benches, closed_form, oracle);
criterion_main!(benches);
