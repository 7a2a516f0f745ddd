//! End-to-end acceptance runner: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance`. The process exits
//! nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use compressive_sketch::classifier::correlation;
use compressive_sketch::datasets::synthetic::oracle_accuracy;
use compressive_sketch::datasets::{generate, ingest_csv, ingest_idx, stratified_split, LabelColumn, SyntheticFamily, SyntheticSpec};
use compressive_sketch::eval::{run_eval, EvalConfig, EvalReport, MapChoice};
use compressive_sketch::rng::derive_stream;
use compressive_sketch::{
    derive_seed, gaussian_kernel, sketch_stream, ClassSketchBank, CompressiveClassifier, ConvStage, FeatureMapSpec,
    ImageShape, LabeledDataset, PriorMode, RcnnArchitecture, RcnnMap, RffMap,
};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{data_dir, max_rel_diff, naive_rcnn, uniform_points};

const MASTER_SEED: u64 = 20180611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn kernel_approximation() -> Outcome {
    let start = Instant::now();
    let sigma = 1.0;
    let us = uniform_points(1, "ka-u", 100, 2);
    let vs = uniform_points(1, "ka-v", 100, 2);
    let mut errs = Vec::new();
    for m in [100usize, 1000, 10000] {
        let total: f64 = us
            .iter()
            .zip(&vs)
            .enumerate()
            .map(|(i, (u, v))| {
                let seed = derive_seed(MASTER_SEED, "ka-pair", i as u64);
                let map = RffMap::build(&FeatureMapSpec::rff(2, m, sigma, seed)).unwrap();
                let est = correlation(&map.eval(u).unwrap(), &map.eval(v).unwrap());
                (est - gaussian_kernel(u, v, sigma)).abs()
            })
            .sum();
        errs.push((m, total / 100.0));
    }
    let elapsed = start.elapsed();
    let bounded = errs.iter().all(|&(m, e)| e <= 5.0 / (m as f64).sqrt());
    let decreasing = errs.windows(2).all(|w| w[1].1 < w[0].1);
    let fast = elapsed < Duration::from_secs(10);
    let table: Vec<String> = errs.iter().map(|(m, e)| format!("m={m}: {e:.5} (bound {:.3})", 5.0 / (*m as f64).sqrt())).collect();
    outcome(
        bounded && decreasing && fast,
        format!("{}; decreasing={decreasing}; {:.2}s", table.join(", "), secs(elapsed)),
    )
}

fn parzen_identity() -> Outcome {
    let mut worst = 0.0f64;
    for case in 0..20u64 {
        let mut rng = derive_stream(MASTER_SEED, "parzen-case", case);
        let n = rng.random_range(1..6);
        let count = rng.random_range(1..40);
        let sigma = rng.random_range(0.2..3.0);
        let map = RffMap::build(&FeatureMapSpec::rff(n, 128, sigma, case)).unwrap();
        let class = uniform_points(case, "parzen-class", count, n);
        let bank = sketch_stream(&map, class.iter().map(|x| (x.as_slice(), 0)), 1, PriorMode::Uniform).unwrap();
        let clf = CompressiveClassifier::new(&bank).unwrap();
        let q = uniform_points(case, "parzen-query", 1, n).remove(0);
        let fq = map.eval(&q).unwrap();
        let cc = clf.correlations(&fq)[0];
        let pairwise: f64 =
            class.iter().map(|x| correlation(&fq, &map.eval(x).unwrap())).sum::<f64>() / count as f64;
        worst = worst.max((cc - pairwise).abs());
    }
    outcome(worst <= 1e-12, format!("max |difference| over 20 cases = {worst:.2e}"))
}

fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = a.iter().chain(b).map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

fn bank_diff(a: &ClassSketchBank, b: &ClassSketchBank) -> Option<f64> {
    (a.counts() == b.counts()).then(|| {
        a.sketches().iter().zip(b.sketches()).map(|(x, y)| rel_diff(x.sum(), y.sum())).fold(0.0, f64::max)
    })
}

fn merge_permutation() -> Outcome {
    let k = 4;
    let map = RffMap::build(&FeatureMapSpec::rff(3, 500, 0.8, MASTER_SEED)).unwrap();
    let data: Vec<(Vec<f64>, usize)> = uniform_points(MASTER_SEED, "merge", 1000, 3)
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, i % k))
        .collect();
    let run = |part: &[(Vec<f64>, usize)]| {
        sketch_stream(&map, part.iter().map(|(x, y)| (x.as_slice(), *y)), k, PriorMode::Empirical).unwrap()
    };
    let whole = run(&data);
    let mut merged = run(&data[..250]);
    for shard in data[250..].chunks(250) {
        merged.merge_from(&run(shard)).unwrap();
    }
    let mut shuffled = data.clone();
    shuffled.shuffle(&mut derive_stream(MASTER_SEED, "permute", 0));
    let (dm, dp) = (bank_diff(&whole, &merged), bank_diff(&whole, &run(&shuffled)));
    let pass = matches!((dm, dp), (Some(a), Some(b)) if a <= 1e-12 && b <= 1e-12);
    outcome(pass, format!("4-shard rel diff {dm:?}, permuted rel diff {dp:?}"))
}

fn uci_config(m: usize, bandwidth: f64) -> EvalConfig {
    EvalConfig {
        map: MapChoice::Rff { sigmas: vec![bandwidth] },
        m_values: vec![m],
        repetitions: 100,
        train_fraction: 2.0 / 3.0,
        seed: MASTER_SEED,
        prior_mode: PriorMode::Empirical,
        rescale: true,
    }
}

/// Frequencies drawn with standard deviation 2 correspond to a Gaussian
/// kernel of bandwidth 1/2.
const TABLE_BANDWIDTH: f64 = 0.5;

fn uci_band(file: &str, lo: f64, hi: f64) -> Outcome {
    let ds = ingest_csv(&data_dir().join("uci").join(file), LabelColumn::Last, true).unwrap();
    let start = Instant::now();
    let report = run_eval(&ds, file, &uci_config(1000, TABLE_BANDWIDTH)).unwrap();
    let elapsed = start.elapsed();
    let s = &report.summaries[0];
    let mean = 100.0 * s.test_mean;
    let pass = (lo..=hi).contains(&mean) && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "test error {mean:.2} ± {:.2}% (band [{lo}, {hi}]), train {:.2}%, {:.1}s",
            100.0 * s.test_std,
            100.0 * s.train_mean,
            secs(elapsed)
        ),
    )
}

fn gauss3_config(sigma: f64, m_values: Vec<usize>) -> EvalConfig {
    EvalConfig {
        map: MapChoice::Rff { sigmas: vec![sigma] },
        m_values,
        repetitions: 10,
        train_fraction: 2.0 / 3.0,
        seed: MASTER_SEED,
        prior_mode: PriorMode::Empirical,
        rescale: false,
    }
}

fn gauss3() -> LabeledDataset {
    generate(&SyntheticSpec { family: SyntheticFamily::Gauss3, n: 10_000, seed: MASTER_SEED }).unwrap()
}

/// Mean oracle accuracy over the same test splits the harness draws.
fn oracle_test_accuracy(ds: &LabeledDataset, cfg: &EvalConfig) -> f64 {
    (0..cfg.repetitions)
        .map(|r| {
            let (_, test) = stratified_split(ds, cfg.train_fraction, derive_seed(cfg.seed, "split", r as u64)).unwrap();
            oracle_accuracy(SyntheticFamily::Gauss3, &test).unwrap()
        })
        .sum::<f64>()
        / cfg.repetitions as f64
}

fn near_map() -> Outcome {
    let ds = gauss3();
    let cfg = gauss3_config(0.12, vec![10, 1000]);
    let report = run_eval(&ds, "gauss3", &cfg).unwrap();
    let acc = |m: usize| 100.0 * (1.0 - report.summaries.iter().find(|s| s.m == m).unwrap().test_mean);
    let oracle = 100.0 * oracle_test_accuracy(&ds, &cfg);
    let (a10, a1000) = (acc(10), acc(1000));
    outcome(
        oracle - a1000 <= 5.0 && a10 < a1000,
        format!("oracle {oracle:.2}%, CC m=1000 {a1000:.2}%, CC m=10 {a10:.2}%"),
    )
}

fn mismatch() -> Outcome {
    let ds = gauss3();
    let matched = run_eval(&ds, "gauss3", &gauss3_config(0.12, vec![1000])).unwrap();
    let wide = run_eval(&ds, "gauss3", &gauss3_config(12.0, vec![1000])).unwrap();
    let a = 100.0 * (1.0 - matched.summaries[0].test_mean);
    let b = 100.0 * (1.0 - wide.summaries[0].test_mean);
    outcome(a - b >= 10.0, format!("matched σ=0.12 {a:.2}%, σ=12 {b:.2}%, gap {:.2} points", a - b))
}

fn mnist() -> Outcome {
    let dir = data_dir().join("mnist-subset");
    let ds = ingest_idx(&dir.join("images-idx3-ubyte.gz"), &dir.join("labels-idx1-ubyte.gz")).unwrap();
    // 10000 available digits: 8000 train / 2000 test.
    let cfg = EvalConfig {
        map: MapChoice::Rcnn { stages: RcnnArchitecture::lenet(ImageShape::new(28, 28, 1)).stages },
        m_values: vec![250],
        repetitions: 3,
        train_fraction: 0.8,
        seed: MASTER_SEED,
        prior_mode: PriorMode::Empirical,
        rescale: false,
    };
    let start = Instant::now();
    let report = run_eval(&ds, "mnist-subset", &cfg).unwrap();
    let elapsed = start.elapsed();
    let s = &report.summaries[0];
    let err = 100.0 * s.test_mean;
    outcome(
        err < 35.0 && elapsed < Duration::from_secs(300),
        format!(
            "test error {err:.2} ± {:.2}% (bound 35%), train {:.2}%, {:.1}s",
            100.0 * s.test_std,
            100.0 * s.train_mean,
            secs(elapsed)
        ),
    )
}

fn rcnn_oracle() -> Outcome {
    let arch = RcnnArchitecture {
        input: ImageShape::new(8, 8, 1),
        stages: vec![ConvStage { kernel: 3, out_channels: 2, pool: 2 }],
    };
    let map = RcnnMap::build(&FeatureMapSpec::rcnn(arch, 4, MASTER_SEED)).unwrap();
    let worst = uniform_points(MASTER_SEED, "rcnn-oracle", 5, 64)
        .iter()
        .map(|x| max_rel_diff(&map.eval(x).unwrap(), &naive_rcnn(&map, x)))
        .fold(0.0, f64::max);
    outcome(worst <= 1e-6, format!("max relative difference {worst:.2e}"))
}

fn report_bytes(report: &EvalReport) -> Vec<u8> {
    let mut out = Vec::new();
    report.write_config(&mut out).unwrap();
    report.write_runs_csv(&mut out).unwrap();
    report.write_summary_csv(&mut out).unwrap();
    out
}

fn determinism() -> Outcome {
    let iris = ingest_csv(&data_dir().join("uci/iris.csv"), LabelColumn::Last, true).unwrap();
    let mut cfg = uci_config(200, 1.0);
    cfg.repetitions = 12;
    cfg.map = MapChoice::Rff { sigmas: vec![0.5, 2.0] };
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| report_bytes(&run_eval(&iris, "iris", &cfg).unwrap()))
    };
    let first = in_pool(1);
    let again = in_pool(1);
    let wide = in_pool(4);
    outcome(
        first == again && first == wide,
        format!(
            "{} report bytes; repeat identical={}, 1 vs 4 threads identical={}",
            first.len(),
            first == again,
            first == wide
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("kernel approximation", kernel_approximation),
        ("parzen identity", parzen_identity),
        ("merge and permutation", merge_permutation),
        ("iris table reproduction", || uci_band("iris.csv", 3.2, 9.2)),
        ("wine table reproduction", || uci_band("wine.csv", 5.2, 11.2)),
        ("breast cancer table reproduction", || uci_band("breast_cancer.csv", 3.2, 9.2)),
        ("synthetic near-MAP", near_map),
        ("kernel mismatch degradation", mismatch),
        ("mnist desk-scale", mnist),
        ("rcnn oracle equivalence", rcnn_oracle),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
