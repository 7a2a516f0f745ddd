//! Mergeable per-class sketches.
//!
//! A [`Sketch`] keeps the running sum of feature vectors and the number of
//! examples summed; the empirical sketch is `sum / count`. Sums of disjoint
//! shards add, so shards can be sketched independently and merged.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::feature_map::FeatureMap;
use crate::types::{FeatureMapSpec, Label};

#[derive(Clone, Debug, PartialEq)]
pub struct Sketch {
    spec_digest: u64,
    sum: Vec<Complex64>,
    count: u64,
}

impl Sketch {
    pub fn empty(spec_digest: u64, m: usize) -> Self {
        Sketch {
            spec_digest,
            sum: vec![Complex64::new(0.0, 0.0); m],
            count: 0,
        }
    }

    pub fn from_parts(spec_digest: u64, sum: Vec<Complex64>, count: u64) -> Self {
        Sketch {
            spec_digest,
            sum,
            count,
        }
    }

    pub fn spec_digest(&self) -> u64 {
        self.spec_digest
    }

    pub fn sum(&self) -> &[Complex64] {
        &self.sum
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn len(&self) -> usize {
        self.sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Adds one example's feature vector.
    pub fn accumulate(&mut self, features: &[Complex64]) {
        debug_assert_eq!(features.len(), self.sum.len());
        for (s, f) in self.sum.iter_mut().zip(features) {
            *s += f;
        }
        self.count += 1;
    }

    /// Empirical sketch `sum / count`; `None` for an empty sketch.
    pub fn mean(&self) -> Option<Vec<Complex64>> {
        if self.count == 0 {
            return None;
        }
        let inv = 1.0 / self.count as f64;
        Some(self.sum.iter().map(|s| s * inv).collect())
    }

    /// Folds `other` into `self`.
    pub fn merge_from(&mut self, other: &Sketch) -> Result<()> {
        if self.spec_digest != other.spec_digest || self.sum.len() != other.sum.len() {
            return Err(Error::Incompatible(format!(
                "sketch digests {:016x} and {:016x} differ",
                self.spec_digest, other.spec_digest
            )));
        }
        for (s, o) in self.sum.iter_mut().zip(&other.sum) {
            *s += o;
        }
        self.count += other.count;
        Ok(())
    }
}

/// Sum of two sketches of the same feature map.
pub fn merge(a: &Sketch, b: &Sketch) -> Result<Sketch> {
    let mut out = a.clone();
    out.merge_from(b)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PriorMode {
    /// `N_k / N`.
    Empirical,
    /// `1 / K`.
    Uniform,
}

impl PriorMode {
    pub(crate) fn tag(self) -> u8 {
        match self {
            PriorMode::Empirical => 0,
            PriorMode::Uniform => 1,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(PriorMode::Empirical),
            1 => Some(PriorMode::Uniform),
            _ => None,
        }
    }
}

/// One sketch per class plus the prior rule: everything the classifier keeps.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSketchBank {
    spec: FeatureMapSpec,
    sketches: Vec<Sketch>,
    pub prior_mode: PriorMode,
}

impl ClassSketchBank {
    pub fn new(spec: FeatureMapSpec, num_classes: usize, prior_mode: PriorMode) -> Self {
        let digest = spec.digest();
        let sketches = (0..num_classes).map(|_| Sketch::empty(digest, spec.m)).collect();
        ClassSketchBank {
            spec,
            sketches,
            prior_mode,
        }
    }

    pub fn from_sketches(
        spec: FeatureMapSpec,
        sketches: Vec<Sketch>,
        prior_mode: PriorMode,
    ) -> Result<Self> {
        let digest = spec.digest();
        for (k, s) in sketches.iter().enumerate() {
            if s.spec_digest != digest || s.len() != spec.m {
                return Err(Error::Incompatible(format!(
                    "class {k} sketch was not built with this feature map"
                )));
            }
        }
        Ok(ClassSketchBank {
            spec,
            sketches,
            prior_mode,
        })
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }

    pub fn num_classes(&self) -> usize {
        self.sketches.len()
    }

    pub fn sketches(&self) -> &[Sketch] {
        &self.sketches
    }

    pub fn sketch(&self, k: Label) -> &Sketch {
        &self.sketches[k]
    }

    pub fn counts(&self) -> Vec<u64> {
        self.sketches.iter().map(Sketch::count).collect()
    }

    /// Adds a precomputed feature vector to class `label`.
    pub fn accumulate_features(&mut self, features: &[Complex64], label: Label) -> Result<()> {
        let k = self.sketches.len();
        let sketch = self
            .sketches
            .get_mut(label)
            .ok_or_else(|| Error::input(format!("label {label} out of range for K={k}")))?;
        if features.len() != sketch.len() {
            return Err(Error::input(format!(
                "feature vector has length {}, expected {}",
                features.len(),
                sketch.len()
            )));
        }
        sketch.accumulate(features);
        Ok(())
    }

    /// Evaluates the map on `x` and adds it to class `label`. `scratch` must have length m.
    pub fn accumulate<M: FeatureMap + ?Sized>(
        &mut self,
        map: &M,
        x: &[f64],
        label: Label,
        scratch: &mut [Complex64],
    ) -> Result<()> {
        self.check_map(map)?;
        if label >= self.sketches.len() {
            return Err(Error::input(format!(
                "label {label} out of range for K={}",
                self.sketches.len()
            )));
        }
        map.eval_into(x, scratch)?;
        self.sketches[label].accumulate(scratch);
        Ok(())
    }

    /// Class-wise merge of two banks over the same map and classes.
    pub fn merge_from(&mut self, other: &ClassSketchBank) -> Result<()> {
        if other.sketches.len() != self.sketches.len() {
            return Err(Error::Incompatible(format!(
                "banks have {} and {} classes",
                self.sketches.len(),
                other.sketches.len()
            )));
        }
        if other.spec != self.spec {
            return Err(Error::Incompatible("banks use different feature maps".into()));
        }
        for (a, b) in self.sketches.iter_mut().zip(&other.sketches) {
            a.merge_from(b)?;
        }
        Ok(())
    }

    /// Estimated class probabilities under the bank's prior mode.
    pub fn priors(&self) -> Result<Vec<f64>> {
        let k = self.sketches.len();
        if k == 0 {
            return Err(Error::state("bank has no classes"));
        }
        match self.prior_mode {
            PriorMode::Uniform => Ok(vec![1.0 / k as f64; k]),
            PriorMode::Empirical => {
                let total: u64 = self.sketches.iter().map(Sketch::count).sum();
                if total == 0 {
                    return Err(Error::state("empirical priors need at least one sketched example"));
                }
                Ok(self
                    .sketches
                    .iter()
                    .map(|s| s.count as f64 / total as f64)
                    .collect())
            }
        }
    }

    pub(crate) fn check_map<M: FeatureMap + ?Sized>(&self, map: &M) -> Result<()> {
        if map.digest() != self.spec.digest() {
            return Err(Error::Incompatible(format!(
                "feature map digest {:016x} does not match bank digest {:016x}",
                map.digest(),
                self.spec.digest()
            )));
        }
        Ok(())
    }
}

/// Sketches a labeled stream in one pass. Memory use is O(K·m) regardless of
/// stream length.
pub fn sketch_stream<M, I, X>(
    map: &M,
    stream: I,
    num_classes: usize,
    prior_mode: PriorMode,
) -> Result<ClassSketchBank>
where
    M: FeatureMap + ?Sized,
    I: IntoIterator<Item = (X, Label)>,
    X: AsRef<[f64]>,
{
    let mut bank = ClassSketchBank::new(map.spec().clone(), num_classes, prior_mode);
    let mut scratch = vec![Complex64::new(0.0, 0.0); map.output_dim()];
    for (x, label) in stream {
        bank.accumulate(map, x.as_ref(), label, &mut scratch)?;
    }
    Ok(bank)
}
