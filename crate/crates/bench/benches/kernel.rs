use criterion::{criterion_group, criterion_main, Criterion};
use mfield_core::matchfield::MatchingField;
use mfield_core::mfpolytope::{flag_polytope, gt_polytope};
use mfield_core::mutation::{mutation_sequence_to_gt, ChainCache, VerifyMode};
use mfield_core::polytope::{ehrhart, normalized_volume, EhrhartMethod, VPolytope};
use mfield_core::Permutation;
use std::hint::black_box;

fn hull(c: &mut Criterion) {
    let gr36 = gt_polytope(&[3], 6).unwrap().polytope;
    let fl4 = gt_polytope(&[1, 2, 3], 4).unwrap().polytope;
    c.bench_function("hull gr36", |b| b.iter(|| VPolytope::hull(black_box(gr36.vertices())).unwrap()));
    c.bench_function("hull fl4", |b| b.iter(|| VPolytope::hull(black_box(fl4.vertices())).unwrap()));
    c.bench_function("face lattice gr36", |b| {
        b.iter(|| VPolytope::hull(black_box(gr36.vertices())).unwrap().f_vector())
    });
}

fn counting(c: &mut Criterion) {
    let sigma: Permutation = "615234".parse().unwrap();
    let field = MatchingField::bsigma_c(&sigma, 3, 7, &[3]).unwrap();
    let ctx = flag_polytope(&field, &[3]).unwrap();
    let mut g = c.benchmark_group("gr36 B_3^615234");
    g.sample_size(10);
    g.bench_function("ehrhart dilates", |b| {
        b.iter(|| ehrhart(&ctx.polytope, &ctx.lattice, EhrhartMethod::Dilates).unwrap())
    });
    g.bench_function("ehrhart reciprocal", |b| {
        b.iter(|| ehrhart(&ctx.polytope, &ctx.lattice, EhrhartMethod::Reciprocal).unwrap())
    });
    g.bench_function("triangulation volume", |b| b.iter(|| normalized_volume(&ctx.polytope, &ctx.lattice).unwrap()));
    g.finish();
}

fn chains(c: &mut Criterion) {
    let sigma = Permutation::identity(4);
    let mut g = c.benchmark_group("chain fl4 from 1234");
    g.sample_size(10);
    g.bench_function("full", |b| {
        b.iter(|| mutation_sequence_to_gt(&sigma, &[1, 2, 3], VerifyMode::Full, &ChainCache::new()).unwrap())
    });
    g.bench_function("fast", |b| {
        b.iter(|| mutation_sequence_to_gt(&sigma, &[1, 2, 3], VerifyMode::Fast, &ChainCache::new()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, hull, counting, chains);
criterion_main!(benches);
