use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use schober_core::arrangement::{Arrangement, BoxDomain};
use schober_core::builtin::plain;
use schober_core::ccc::compare_pair;
use schober_core::hom::rhom;
use schober_core::lattice::smith_normal_form;
use schober_core::linalg::q;
use schober_core::models::{skeleta, Example, ExampleKind, Side};
use schober_core::skeleton::fltz_skeleton;

fn lattice(c: &mut Criterion) {
    let m = vec![vec![4, 6, 2], vec![8, -2, 10], vec![3, 5, 7]];
    c.bench_function("smith normal form 3x3", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

fn skeleton(c: &mut Criterion) {
    let fan = plain("coni.ΣB");
    c.bench_function("fltz skeleton of the conifold blowup", |b| b.iter(|| fltz_skeleton(black_box(&fan))));
    let s = skeleta(ExampleKind::Conifold).unwrap();
    c.bench_function("conifold skeleton union", |b| b.iter(|| s.plus.union(black_box(&s.minus))));
    c.bench_function("conifold skeleton containment", |b| b.iter(|| s.blowup.contains(black_box(&s.union)).is_ok()));
}

fn sheaf(c: &mut Criterion) {
    let ex = Example::new(ExampleKind::Surface).unwrap();
    let r = ex.skyscraper(Side::Minus);
    let cx = r.complex();
    let arr = Arc::new(Arrangement::new(&cx.hyperplanes(), BoxDomain::cube(2, q(3))).unwrap());
    let f = cx.to_sheaf(&arr).unwrap();
    c.bench_function("rhom of the surface skyscraper", |b| b.iter(|| rhom(black_box(&f), black_box(&f)).unwrap()));
}

fn ccc(c: &mut Criterion) {
    let ex = Example::new(ExampleKind::Surface).unwrap();
    let gens = ex.chart_generators(Side::Plus);
    let x = ex.variety(Side::Plus);
    let (a, b) = (&gens[0], &gens[1]);
    let mut group = c.benchmark_group("ccc");
    group.sample_size(10);
    group.bench_function("surface generator pair, window 2", |bch| {
        bch.iter(|| compare_pair(x, (&a.0, &a.1), (&b.0, &b.1), 2).unwrap())
    });
    group.finish();
}

criterion_group!(benches, lattice, skeleton, sheaf, ccc);
criterion_main!(benches);
