use criterion::{criterion_group, criterion_main, Criterion};
use rdptors_core::algebra::{rdp_equation, Family};
use rdptors_core::cohomology::{compute_dieu_presentation, f_infinity_kernel, Box};
use rdptors_core::dnr::{valid_r2, DnrModel};
use rdptors_core::witt;

fn witt_laws(c: &mut Criterion) {
    c.bench_function("witt_selftest_5", |b| {
        b.iter(|| witt::self_test(5, 1).unwrap())
    });
}

fn w1_kernel(c: &mut Criterion) {
    let eq = rdp_equation(2, Family::D, 12, Some(0)).unwrap();
    let bx = Box::default_for(&eq);
    c.bench_function("f_infinity_kernel_d12", |b| {
        b.iter(|| f_infinity_kernel(&eq, &bx).unwrap())
    });
}

fn presentation_row(c: &mut Criterion) {
    let eq = rdp_equation(2, Family::E8, 8, Some(2)).unwrap();
    let bx = Box::default_for(&eq);
    let mut g = c.benchmark_group("presentation");
    g.sample_size(10);
    g.bench_function("e8_1_char2", |b| {
        b.iter(|| compute_dieu_presentation(&eq, &bx).unwrap())
    });
    g.finish();
}

fn dnr_grid(c: &mut Criterion) {
    c.bench_function("dnr_grid_n40", |b| {
        b.iter(|| {
            for n in 4..=40 {
                for r2 in valid_r2(n) {
                    let m = DnrModel::new(n, r2).unwrap();
                    let module = m.build_module().unwrap();
                    let (a, bb) = m.ab_decomposition();
                    assert_eq!(
                        a.iter().chain(&bb).sum::<u32>(),
                        module.length()
                    );
                }
            }
        })
    });
}

criterion_group!(benches, witt_laws, w1_kernel, presentation_row, dnr_grid);
criterion_main!(benches);
