//! Repeated split → sketch → classify experiments with error-rate reports.
//!
//! Repetition `r` draws its split seed from `(master, "split", r)` and its map
//! seed from `(master, "map", r)`, so a whole experiment is reproduced by one
//! seed. Every output except the timing table is a pure function of the
//! dataset and the configuration, whatever the thread count.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::classifier::CompressiveClassifier;
use crate::datasets::{rescale_fit_apply, stratified_split};
use crate::error::{Error, Result};
use crate::feature_map::{AnyFeatureMap, FeatureMap};
use crate::rcnn::{ConvStage, RcnnArchitecture};
use crate::rng::derive_seed;
use crate::sketch::{ClassSketchBank, PriorMode};
use crate::types::{FeatureMapSpec, LabeledDataset};

/// Examples per parallel work unit when evaluating feature maps.
const CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum MapChoice {
    /// One run per bandwidth.
    Rff { sigmas: Vec<f64> },
    /// Conv stages applied to the dataset's image shape.
    Rcnn { stages: Vec<ConvStage> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub map: MapChoice,
    pub m_values: Vec<usize>,
    pub repetitions: usize,
    pub train_fraction: f64,
    pub seed: u64,
    pub prior_mode: PriorMode,
    /// Fit [-1, 1] rescaling on each train split. Ignored for image datasets.
    pub rescale: bool,
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return Err(Error::config("m list must be nonempty and positive"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::config("train fraction must lie in (0, 1)"));
        }
        if let MapChoice::Rff { sigmas } = &self.map {
            if sigmas.is_empty() || sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                return Err(Error::config("sigma list must be nonempty and positive"));
            }
        }
        Ok(())
    }

    /// `(m, σ)` grid in report order; σ is `None` for RCNN maps.
    fn grid(&self) -> Vec<(usize, Option<f64>)> {
        let mut out = Vec::new();
        for &m in &self.m_values {
            match &self.map {
                MapChoice::Rff { sigmas } => out.extend(sigmas.iter().map(|&s| (m, Some(s)))),
                MapChoice::Rcnn { .. } => out.push((m, None)),
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub m: usize,
    pub sigma: Option<f64>,
    pub rep: usize,
    pub split_seed: u64,
    pub map_seed: u64,
    pub train_error: f64,
    pub test_error: f64,
    pub sketch_seconds: f64,
    pub classify_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub m: usize,
    pub sigma: Option<f64>,
    pub repetitions: usize,
    pub train_mean: f64,
    pub train_std: f64,
    pub test_mean: f64,
    pub test_std: f64,
    /// False with a single repetition, where the std is reported as 0.
    pub std_defined: bool,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct EvalReport {
    pub dataset: String,
    pub n: usize,
    pub num_classes: usize,
    pub num_examples: usize,
    pub config: EvalConfig,
    /// Whether per-split [-1, 1] rescaling was applied.
    pub rescaled: bool,
    pub runs: Vec<RunRecord>,
    pub summaries: Vec<Summary>,
}

/// Mean and sample standard deviation (N − 1 denominator); std is 0 for one value.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn spec_for(ds: &LabeledDataset, cfg: &EvalConfig, m: usize, sigma: Option<f64>, seed: u64) -> Result<FeatureMapSpec> {
    match &cfg.map {
        MapChoice::Rff { .. } => Ok(FeatureMapSpec::rff(ds.dim(), m, sigma.expect("rff grid has sigma"), seed)),
        MapChoice::Rcnn { stages } => {
            let input = ds
                .shape
                .ok_or_else(|| Error::config("the rcnn map needs an image dataset (idx or cifar)"))?;
            Ok(FeatureMapSpec::rcnn(
                RcnnArchitecture {
                    input,
                    stages: stages.clone(),
                },
                m,
                seed,
            ))
        }
    }
}

/// Feature vectors of every example, flattened; evaluation is parallel but
/// the result is laid out in example order.
pub fn features_of<M: FeatureMap + ?Sized>(map: &M, ds: &LabeledDataset) -> Result<Vec<Complex64>> {
    let m = map.output_dim();
    let n = ds.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); ds.len() * m];
    out.par_chunks_mut(CHUNK * m)
        .zip(ds.values().par_chunks(CHUNK * n))
        .try_for_each(|(dst, src)| {
            for (f, x) in dst.chunks_exact_mut(m).zip(src.chunks_exact(n)) {
                map.eval_into(x, f)?;
            }
            Ok::<(), Error>(())
        })?;
    Ok(out)
}

fn error_rate(clf: &CompressiveClassifier, features: &[Complex64], m: usize, ds: &LabeledDataset) -> f64 {
    let wrong = features
        .par_chunks(m)
        .zip(ds.labels().par_iter())
        .filter(|(f, &y)| clf.classify_features(f) != y)
        .count();
    wrong as f64 / ds.len() as f64
}

fn run_one(
    train: &LabeledDataset,
    test: &LabeledDataset,
    spec: FeatureMapSpec,
    prior_mode: PriorMode,
) -> Result<(f64, f64, f64, f64)> {
    let start = Instant::now();
    let map = AnyFeatureMap::build(&spec)?;
    let m = spec.m;
    let train_features = features_of(&map, train)?;
    let mut bank = ClassSketchBank::new(spec, train.num_classes(), prior_mode);
    for (f, &y) in train_features.chunks_exact(m).zip(train.labels()) {
        bank.accumulate_features(f, y)?;
    }
    let sketch_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let clf = CompressiveClassifier::new(&bank)?;
    let train_error = error_rate(&clf, &train_features, m, train);
    drop(train_features);
    let test_features = features_of(&map, test)?;
    let test_error = error_rate(&clf, &test_features, m, test);
    Ok((train_error, test_error, sketch_seconds, start.elapsed().as_secs_f64()))
}

/// Runs every `(m, σ)` configuration for every repetition.
pub fn run_eval(ds: &LabeledDataset, dataset_name: &str, cfg: &EvalConfig) -> Result<EvalReport> {
    cfg.validate()?;
    if ds.is_empty() {
        return Err(Error::state("no examples"));
    }
    let grid = cfg.grid();
    let per_rep: Vec<Vec<RunRecord>> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| -> Result<Vec<RunRecord>> {
            let split_seed = derive_seed(cfg.seed, "split", rep as u64);
            let map_seed = derive_seed(cfg.seed, "map", rep as u64);
            let (mut train, mut test) = stratified_split(ds, cfg.train_fraction, split_seed)?;
            if cfg.rescale && ds.shape.is_none() {
                let (tr, te, _) = rescale_fit_apply(&train, &test)?;
                train = tr;
                test = te;
            }
            grid.iter()
                .map(|&(m, sigma)| {
                    let spec = spec_for(ds, cfg, m, sigma, map_seed)?;
                    let (train_error, test_error, sketch_seconds, classify_seconds) =
                        run_one(&train, &test, spec, cfg.prior_mode)?;
                    Ok(RunRecord {
                        m,
                        sigma,
                        rep,
                        split_seed,
                        map_seed,
                        train_error,
                        test_error,
                        sketch_seconds,
                        classify_seconds,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut runs = Vec::with_capacity(grid.len() * cfg.repetitions);
    for (g, _) in grid.iter().enumerate() {
        runs.extend(per_rep.iter().map(|r| r[g].clone()));
    }
    let summaries = grid
        .iter()
        .map(|&(m, sigma)| {
            let rows: Vec<&RunRecord> = runs.iter().filter(|r| r.m == m && r.sigma == sigma).collect();
            let train: Vec<f64> = rows.iter().map(|r| r.train_error).collect();
            let test: Vec<f64> = rows.iter().map(|r| r.test_error).collect();
            let (train_mean, train_std) = mean_std(&train);
            let (test_mean, test_std) = mean_std(&test);
            Summary {
                m,
                sigma,
                repetitions: rows.len(),
                train_mean,
                train_std,
                test_mean,
                test_std,
                std_defined: rows.len() > 1,
                seconds: rows.iter().map(|r| r.sketch_seconds + r.classify_seconds).sum(),
            }
        })
        .collect();

    Ok(EvalReport {
        dataset: dataset_name.to_string(),
        n: ds.dim(),
        num_classes: ds.num_classes(),
        num_examples: ds.len(),
        config: cfg.clone(),
        rescaled: cfg.rescale && ds.shape.is_none(),
        runs,
        summaries,
    })
}

fn sigma_field(sigma: Option<f64>) -> String {
    sigma.map(|s| s.to_string()).unwrap_or_default()
}

impl EvalReport {
    pub fn write_config<W: Write>(&self, mut w: W) -> Result<()> {
        let c = &self.config;
        writeln!(w, "dataset={}", self.dataset)?;
        writeln!(w, "examples={}", self.num_examples)?;
        writeln!(w, "n={}", self.n)?;
        writeln!(w, "classes={}", self.num_classes)?;
        match &c.map {
            MapChoice::Rff { sigmas } => {
                writeln!(w, "map=rff")?;
                let s: Vec<String> = sigmas.iter().map(|s| s.to_string()).collect();
                writeln!(w, "sigma={}", s.join(","))?;
            }
            MapChoice::Rcnn { stages } => {
                writeln!(w, "map=rcnn")?;
                let s: Vec<String> = stages
                    .iter()
                    .map(|st| format!("conv{}x{}:{}/pool{}", st.kernel, st.kernel, st.out_channels, st.pool))
                    .collect();
                writeln!(w, "stages={}", s.join(","))?;
            }
        }
        let ms: Vec<String> = c.m_values.iter().map(|m| m.to_string()).collect();
        writeln!(w, "m={}", ms.join(","))?;
        writeln!(w, "repetitions={}", c.repetitions)?;
        writeln!(w, "train_fraction={}", c.train_fraction)?;
        writeln!(w, "seed={}", c.seed)?;
        writeln!(w, "prior={:?}", c.prior_mode)?;
        writeln!(w, "rescale={}", self.rescaled)?;
        Ok(())
    }

    /// One row per repetition and configuration.
    pub fn write_runs_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "m,sigma,rep,split_seed,map_seed,train_error,test_error")?;
        for r in &self.runs {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.m,
                sigma_field(r.sigma),
                r.rep,
                r.split_seed,
                r.map_seed,
                r.train_error,
                r.test_error
            )?;
        }
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "m,sigma,repetitions,train_error_mean,train_error_std,test_error_mean,test_error_std,std_defined"
        )?;
        for s in &self.summaries {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                s.m,
                sigma_field(s.sigma),
                s.repetitions,
                s.train_mean,
                s.train_std,
                s.test_mean,
                s.test_std,
                s.std_defined
            )?;
        }
        Ok(())
    }

    /// Wall-clock seconds per phase; the only nondeterministic output.
    pub fn write_timing_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "m,sigma,rep,sketch_seconds,classify_seconds")?;
        for r in &self.runs {
            writeln!(
                w,
                "{},{},{},{:.6},{:.6}",
                r.m,
                sigma_field(r.sigma),
                r.rep,
                r.sketch_seconds,
                r.classify_seconds
            )?;
        }
        Ok(())
    }

    /// Writes `config.txt`, `runs.csv`, `summary.csv` and `timing.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut buf = Vec::new();
        self.write_config(&mut buf)?;
        std::fs::write(dir.join("config.txt"), &buf)?;
        buf.clear();
        self.write_runs_csv(&mut buf)?;
        std::fs::write(dir.join("runs.csv"), &buf)?;
        buf.clear();
        self.write_summary_csv(&mut buf)?;
        std::fs::write(dir.join("summary.csv"), &buf)?;
        buf.clear();
        self.write_timing_csv(&mut buf)?;
        std::fs::write(dir.join("timing.csv"), &buf)?;
        Ok(())
    }

    /// Error rates in percent, `mean ± std`, one line per configuration.
    pub fn human_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: N={} n={} K={} reps={}",
            self.dataset, self.num_examples, self.n, self.num_classes, self.config.repetitions
        );
        let _ = writeln!(
            out,
            "{:>8} {:>8} {:>18} {:>18} {:>10}",
            "m", "sigma", "train err %", "test err %", "time s"
        );
        for s in &self.summaries {
            let fmt = |mean: f64, std: f64| {
                if s.std_defined {
                    format!("{:.2} ± {:.2}", 100.0 * mean, 100.0 * std)
                } else {
                    format!("{:.2} ± n/a", 100.0 * mean)
                }
            };
            let _ = writeln!(
                out,
                "{:>8} {:>8} {:>18} {:>18} {:>10.2}",
                s.m,
                s.sigma.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                fmt(s.train_mean, s.train_std),
                fmt(s.test_mean, s.test_std),
                s.seconds
            );
        }
        out
    }
}
