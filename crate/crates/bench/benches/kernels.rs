use criterion::{black_box, criterion_group, criterion_main, Criterion};
use micz_core::coherent::{psi_closed_form, psi_fock_synthesis};
use micz_core::oracle::{displacement_matrix, matrix_exp};
use micz_core::su11::{build_generators, displace_number_state, normal_form_block};
use micz_core::{BargmannIndex, CoherentParams};

fn kernels(c: &mut Criterion) {
    let k = BargmannIndex::new(1.5).unwrap();
    let p = CoherentParams::new(0.8, 0.7).unwrap();

    c.bench_function("normal_form_block 60", |b| {
        b.iter(|| normal_form_block(black_box(&p), k, 60))
    });

    let gens = build_generators(k, 150);
    let a = gens.displacement_generator(&p);
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("matrix_exp 151", |b| b.iter(|| matrix_exp(black_box(&a)).unwrap()));
    g.bench_function("displacement_matrix 151", |b| {
        b.iter(|| displacement_matrix(black_box(&p), k, 150).unwrap())
    });
    g.finish();

    c.bench_function("displace_number_state n=4 cutoff 400", |b| {
        b.iter(|| displace_number_state(black_box(&p), k, 4, 400).unwrap())
    });

    let p = CoherentParams::new(0.9, 0.9).unwrap();
    let v = displace_number_state(&p, BargmannIndex::new(2.0).unwrap(), 2, 400).unwrap();
    c.bench_function("psi_closed_form", |b| {
        b.iter(|| psi_closed_form(black_box(7.3), 1.0, 2, &p).unwrap())
    });
    c.bench_function("psi_fock_synthesis cutoff 400", |b| {
        b.iter(|| psi_fock_synthesis(black_box(7.3), 1.0, &v))
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);
