use num_complex::Complex64;

use crate::error::Result;
use crate::rcnn::RcnnMap;
use crate::rff::RffMap;
use crate::types::{FeatureMapSpec, MapParams};

/// A frozen random feature map ℝⁿ → ℂᵐ.
///
/// Evaluation must be pure so one map can be shared across threads.
pub trait FeatureMap: Sync {
    fn spec(&self) -> &FeatureMapSpec;

    fn digest(&self) -> u64;

    /// Writes `f(x)` into `out`, which has length `m`.
    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) -> Result<()>;

    fn input_dim(&self) -> usize {
        self.spec().n
    }

    fn output_dim(&self) -> usize {
        self.spec().m
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.output_dim()];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }
}

impl FeatureMap for RffMap {
    fn spec(&self) -> &FeatureMapSpec {
        RffMap::spec(self)
    }

    fn digest(&self) -> u64 {
        RffMap::digest(self)
    }

    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) -> Result<()> {
        RffMap::eval_into(self, x, out)
    }
}

impl FeatureMap for RcnnMap {
    fn spec(&self) -> &FeatureMapSpec {
        RcnnMap::spec(self)
    }

    fn digest(&self) -> u64 {
        RcnnMap::digest(self)
    }

    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) -> Result<()> {
        RcnnMap::eval_into(self, x, out)
    }
}

/// Either map family, built from its spec.
#[derive(Clone, Debug)]
pub enum AnyFeatureMap {
    Rff(RffMap),
    Rcnn(RcnnMap),
}

impl AnyFeatureMap {
    pub fn build(spec: &FeatureMapSpec) -> Result<Self> {
        Ok(match spec.params {
            MapParams::Rff { .. } => AnyFeatureMap::Rff(RffMap::build(spec)?),
            MapParams::Rcnn { .. } => AnyFeatureMap::Rcnn(RcnnMap::build(spec)?),
        })
    }
}

impl FeatureMap for AnyFeatureMap {
    fn spec(&self) -> &FeatureMapSpec {
        match self {
            AnyFeatureMap::Rff(m) => m.spec(),
            AnyFeatureMap::Rcnn(m) => m.spec(),
        }
    }

    fn digest(&self) -> u64 {
        match self {
            AnyFeatureMap::Rff(m) => m.digest(),
            AnyFeatureMap::Rcnn(m) => m.digest(),
        }
    }

    fn eval_into(&self, x: &[f64], out: &mut [Complex64]) -> Result<()> {
        match self {
            AnyFeatureMap::Rff(m) => m.eval_into(x, out),
            AnyFeatureMap::Rcnn(m) => m.eval_into(x, out),
        }
    }
}
