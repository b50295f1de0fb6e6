use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

#[allow(dead_code)]
#[path = "../tests/common/mod.rs"]
mod common;

use symstat_core::numbridge::{eval_tree_at, CompiledTape};

fn budworm(c: &mut Criterion) {
    let e = common::log_lb_total();
    let params = common::syms(&["b_1", "b_2"]);
    let tape = CompiledTape::<f64>::compile(&e, Some(&params)).unwrap();
    let at = [-2.8, 1.25];
    let mut stack = Vec::with_capacity(tape.len());
    let mut out = [0.0];
    let mut g = c.benchmark_group("budworm_loglik");
    g.bench_function("tape", |b| {
        b.iter(|| {
            tape.eval_into(black_box(&at), &mut stack, &mut out).unwrap();
            out[0]
        })
    });
    g.bench_function("tree", |b| b.iter(|| eval_tree_at(&e, &params, black_box(&at)).unwrap()));
    g.finish();
}

criterion_group!(benches, budworm);
criterion_main!(benches);
