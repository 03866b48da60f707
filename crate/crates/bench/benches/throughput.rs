use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use std::hint::black_box;

use smiself::metrics::{morgan_fingerprint, DEFAULT_RADIUS, DEFAULT_WIDTH};
use smiself::{canonical_smiles, decode, default_table, encode, parse_lenient, smiself_correct};
use smiself_bench::{broken_smiles, molecules, selfies_strings, valid_smiles};

const N: usize = 1000;

fn parsing(c: &mut Criterion) {
    let valid = valid_smiles(N, 1);
    let broken = broken_smiles(N, 2);
    let mut g = c.benchmark_group("parse");
    g.throughput(Throughput::Elements(N as u64));
    g.bench_function("lenient/valid", |b| {
        b.iter(|| {
            valid
                .iter()
                .map(|s| parse_lenient(black_box(s)).graph.atom_count())
                .sum::<usize>()
        })
    });
    g.bench_function("lenient/broken", |b| {
        b.iter(|| {
            broken
                .iter()
                .map(|s| parse_lenient(black_box(s)).diagnostics.len())
                .sum::<usize>()
        })
    });
    g.finish();
}

fn selfies(c: &mut Criterion) {
    let t = default_table();
    let strings = selfies_strings(N, 60, 3);
    let graphs = molecules(N, 4);
    let mut g = c.benchmark_group("selfies");
    g.throughput(Throughput::Elements(N as u64));
    g.bench_function("decode", |b| {
        b.iter(|| {
            strings
                .iter()
                .map(|s| decode(black_box(s), t).graph.atom_count())
                .sum::<usize>()
        })
    });
    g.bench_function("encode", |b| {
        b.iter(|| {
            graphs
                .iter()
                .map(|m| encode(black_box(m), t).len())
                .sum::<usize>()
        })
    });
    g.finish();
}

fn canonical(c: &mut Criterion) {
    let t = default_table();
    let graphs = molecules(N, 5);
    let mut g = c.benchmark_group("canonical");
    g.throughput(Throughput::Elements(N as u64));
    g.bench_function("smiles", |b| {
        b.iter(|| {
            graphs
                .iter()
                .map(|m| canonical_smiles(black_box(m), t).len())
                .sum::<usize>()
        })
    });
    g.bench_function("fingerprint", |b| {
        b.iter(|| {
            graphs
                .iter()
                .map(|m| {
                    morgan_fingerprint(black_box(m), t, DEFAULT_RADIUS, DEFAULT_WIDTH).count_ones()
                })
                .sum::<u32>()
        })
    });
    g.finish();
}

fn correction(c: &mut Criterion) {
    let broken = broken_smiles(N, 6);
    let mut g = c.benchmark_group("correct");
    g.throughput(Throughput::Elements(N as u64));
    g.bench_function("broken corpus", |b| {
        b.iter_batched(
            || broken.clone(),
            |v| {
                v.iter()
                    .map(|s| smiself_correct(s).output.len())
                    .sum::<usize>()
            },
            BatchSize::LargeInput,
        )
    });
    g.finish();
}

criterion_group!(benches, parsing, selfies, canonical, correction);
criterion_main!(benches);
