//! Two-dimensional three-class synthetic datasets with known densities.
//!
//! `gauss3` places isotropic Gaussians (std 0.12) at unit-circle angles 90°,
//! 210° and 330°; `rings3` draws concentric annuli of radii 0.3, 0.6 and 0.9
//! with radial std 0.03 and uniform angle. Classes are equiprobable.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_stream, gaussian_draw};
use crate::types::{Label, LabeledDataset};

pub const NUM_CLASSES: usize = 3;
pub const GAUSS3_STD: f64 = 0.12;
pub const GAUSS3_ANGLES_DEG: [f64; 3] = [90.0, 210.0, 330.0];
pub const RINGS3_RADII: [f64; 3] = [0.3, 0.6, 0.9];
pub const RINGS3_STD: f64 = 0.03;

/// Log-density gaps below this count as ties in the MAP oracle.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntheticFamily {
    Gauss3,
    Rings3,
}

impl fmt::Display for SyntheticFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticFamily::Gauss3 => "gauss3",
            SyntheticFamily::Rings3 => "rings3",
        })
    }
}

impl FromStr for SyntheticFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss3" => Ok(SyntheticFamily::Gauss3),
            "rings3" => Ok(SyntheticFamily::Rings3),
            _ => Err(Error::config(format!("unknown synthetic family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub family: SyntheticFamily,
    pub n: usize,
    pub seed: u64,
}

pub fn gauss3_means() -> [[f64; 2]; 3] {
    GAUSS3_ANGLES_DEG.map(|deg| {
        let (s, c) = deg.to_radians().sin_cos();
        [c, s]
    })
}

pub fn generate(spec: &SyntheticSpec) -> Result<LabeledDataset> {
    if spec.n < NUM_CLASSES {
        return Err(Error::config(format!(
            "need at least {NUM_CLASSES} examples, got {}",
            spec.n
        )));
    }
    let mut stream = derive_stream(spec.seed, "synthetic", spec.family as u64);
    let means = gauss3_means();
    let mut values = Vec::with_capacity(2 * spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let k: usize = stream.random_range(0..NUM_CLASSES);
        let g = gaussian_draw(&mut stream, 2);
        match spec.family {
            SyntheticFamily::Gauss3 => {
                values.push(means[k][0] + GAUSS3_STD * g[0]);
                values.push(means[k][1] + GAUSS3_STD * g[1]);
            }
            SyntheticFamily::Rings3 => {
                let r = RINGS3_RADII[k] + RINGS3_STD * g[0];
                let theta = 2.0 * PI * stream.random::<f64>();
                let (s, c) = theta.sin_cos();
                values.push(r * c);
                values.push(r * s);
            }
        }
        labels.push(k);
    }
    let names = (0..NUM_CLASSES).map(|k| k.to_string()).collect();
    LabeledDataset::new(2, values, labels, names)
}

/// Class log-densities up to a shared additive constant.
fn log_densities(family: SyntheticFamily, x: &[f64]) -> [f64; 3] {
    match family {
        SyntheticFamily::Gauss3 => gauss3_means().map(|mu| {
            let d2 = (x[0] - mu[0]).powi(2) + (x[1] - mu[1]).powi(2);
            -d2 / (2.0 * GAUSS3_STD * GAUSS3_STD)
        }),
        SyntheticFamily::Rings3 => {
            // The polar Jacobian 1/(2πr) is common to all classes.
            let r = x[0].hypot(x[1]);
            RINGS3_RADII.map(|rk| -(r - rk).powi(2) / (2.0 * RINGS3_STD * RINGS3_STD))
        }
    }
}

/// Bayes-optimal label under the true generative densities; near-ties go to
/// the lowest class index.
pub fn map_oracle(family: SyntheticFamily, x: &[f64]) -> Result<Label> {
    if x.len() != 2 {
        return Err(Error::input(format!(
            "synthetic examples are 2-dimensional, got {}",
            x.len()
        )));
    }
    let logp = log_densities(family, x);
    let best = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(logp
        .iter()
        .position(|&l| l >= best - TIE_TOLERANCE)
        .expect("three finite log-densities"))
}

/// Fraction of `ds` the oracle labels correctly.
pub fn oracle_accuracy(family: SyntheticFamily, ds: &LabeledDataset) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::state("no examples"));
    }
    let mut correct = 0usize;
    for (x, y) in ds.iter() {
        if map_oracle(family, x)? == y {
            correct += 1;
        }
    }
    Ok(correct as f64 / ds.len() as f64)
}
