use std::fs::File;
use std::hint::black_box;
use std::io::BufReader;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mwe_ccg::eval::{sig_test, Counts};
use mwe_ccg::exec::{self, Execution};
use mwe_ccg::parser::{parse, train};
use mwe_ccg::treebank::read_treebank;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sigtest(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut draw = || {
        let gold = rng.gen_range(10..40);
        Counts::new(rng.gen_range(0..=gold), gold + rng.gen_range(0..3), gold)
    };
    let x: Vec<Counts> = (0..500).map(|_| draw()).collect();
    let y: Vec<Counts> = (0..500).map(|_| draw()).collect();
    let mut group = c.benchmark_group("sigtest_500x10000");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sig_test(black_box(&x), black_box(&y), 10_000, 42, mode).unwrap())
        });
    }
    group.finish();
}

fn batch_parse(c: &mut Criterion) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/treebank.txt");
    let records = read_treebank(BufReader::new(File::open(path).unwrap())).unwrap();
    let model = train(&records, 0.1).unwrap();
    let sentences: Vec<Vec<String>> = records.iter().map(|r| r.tokens.clone()).collect();
    let mut group = c.benchmark_group("parse_treebank");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec::map(mode, black_box(&sentences), |s| parse(&model, s).log_prob))
        });
    }
    group.finish();
}

criterion_group!(benches, sigtest, batch_parse);
criterion_main!(benches);
