//! Compressive classifier: assign a query to the class maximizing
//! `p̂_k · Re[(1/m) ⟨f(x'), z_k⟩]`, where `z_k` is the class sketch mean.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::feature_map::FeatureMap;
use crate::rff::gaussian_kernel;
use crate::sketch::ClassSketchBank;
use crate::types::Label;

/// Prior-weighted class scores for one query.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector(pub Vec<f64>);

impl ScoreVector {
    /// Highest-scoring class; ties go to the lowest index.
    pub fn argmax(&self) -> Label {
        let mut best = 0;
        for (k, &s) in self.0.iter().enumerate().skip(1) {
            if s > self.0[best] {
                best = k;
            }
        }
        best
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `Re[(1/m) Σ_j a_j · conj(b_j)]`.
pub fn correlation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let re: f64 = a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum();
    re / a.len() as f64
}

/// A bank with class means and priors precomputed, ready to score queries.
#[derive(Clone, Debug)]
pub struct CompressiveClassifier {
    digest: u64,
    means: Vec<Vec<Complex64>>,
    priors: Vec<f64>,
}

impl CompressiveClassifier {
    pub fn new(bank: &ClassSketchBank) -> Result<Self> {
        Self::with_priors(bank, bank.priors()?)
    }

    /// Uses caller-supplied class weights instead of the bank's prior mode.
    pub fn with_priors(bank: &ClassSketchBank, priors: Vec<f64>) -> Result<Self> {
        if priors.len() != bank.num_classes() {
            return Err(Error::input(format!(
                "{} priors for {} classes",
                priors.len(),
                bank.num_classes()
            )));
        }
        let means = bank
            .sketches()
            .iter()
            .enumerate()
            .map(|(k, s)| {
                s.mean()
                    .ok_or_else(|| Error::state(format!("class {k} has no sketched examples")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompressiveClassifier {
            digest: bank.spec().digest(),
            means,
            priors,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.means.len()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Unweighted correlations `Re[(1/m) ⟨f(x'), z_k⟩]` from a query's features.
    pub fn correlations(&self, features: &[Complex64]) -> Vec<f64> {
        self.means.iter().map(|z| correlation(features, z)).collect()
    }

    pub fn score_features(&self, features: &[Complex64]) -> ScoreVector {
        ScoreVector(
            self.correlations(features)
                .into_iter()
                .zip(&self.priors)
                .map(|(c, p)| p * c)
                .collect(),
        )
    }

    pub fn classify_features(&self, features: &[Complex64]) -> Label {
        self.score_features(features).argmax()
    }

    pub fn score<M: FeatureMap + ?Sized>(&self, map: &M, x: &[f64]) -> Result<ScoreVector> {
        if map.digest() != self.digest {
            return Err(Error::Incompatible(
                "query map differs from the map the bank was built with".into(),
            ));
        }
        Ok(self.score_features(&map.eval(x)?))
    }

    pub fn classify<M: FeatureMap + ?Sized>(&self, map: &M, x: &[f64]) -> Result<Label> {
        Ok(self.score(map, x)?.argmax())
    }
}

/// Scores one query against a bank.
pub fn score<M: FeatureMap + ?Sized>(
    bank: &ClassSketchBank,
    map: &M,
    x: &[f64],
) -> Result<ScoreVector> {
    bank.check_map(map)?;
    CompressiveClassifier::new(bank)?.score(map, x)
}

/// Classifies one query; ties go to the lowest class index.
pub fn classify<M: FeatureMap + ?Sized>(bank: &ClassSketchBank, map: &M, x: &[f64]) -> Result<Label> {
    Ok(score(bank, map, x)?.argmax())
}

/// Parzen-window score `(1/N_k) Σ_i κ(x', x_i)` with the exact Gaussian
/// kernel: the value the compressive correlation approaches as m grows.
pub fn parzen_score<'a, I>(samples: I, sigma: f64, query: &[f64]) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::config(format!("sigma must be positive, got {sigma}")));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for x in samples {
        if x.len() != query.len() {
            return Err(Error::input(format!(
                "sample has dimension {}, query has {}",
                x.len(),
                query.len()
            )));
        }
        total += gaussian_kernel(query, x, sigma);
        count += 1;
    }
    if count == 0 {
        return Err(Error::state("parzen score of an empty class"));
    }
    Ok(total / count as f64)
}
