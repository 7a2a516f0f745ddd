use crate::error::{Error, Result};
use crate::types::{LabeledDataset, Rescale};

impl Rescale {
    /// Per-coordinate min/max of `ds`.
    pub fn fit(ds: &LabeledDataset) -> Result<Self> {
        if ds.is_empty() {
            return Err(Error::state("cannot fit rescaling on an empty dataset"));
        }
        let mut lo = vec![f64::INFINITY; ds.dim()];
        let mut hi = vec![f64::NEG_INFINITY; ds.dim()];
        for (x, _) in ds.iter() {
            for (j, &v) in x.iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        Ok(Rescale { lo, hi })
    }

    /// `x ↦ 2(x - lo)/(hi - lo) - 1`; constant coordinates map to 0. No clamping.
    pub fn apply(&self, x: &mut [f64]) {
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = if hi > lo {
                2.0 * (*v - lo) / (hi - lo) - 1.0
            } else {
                0.0
            };
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn apply_dataset(&self, ds: &mut LabeledDataset) -> Result<()> {
        if ds.dim() != self.dim() {
            return Err(Error::input(format!(
                "rescaling fitted on dimension {}, dataset has {}",
                self.dim(),
                ds.dim()
            )));
        }
        let n = ds.dim();
        for x in ds.values_mut().chunks_exact_mut(n) {
            self.apply(x);
        }
        ds.rescale = Some(self.clone());
        Ok(())
    }
}

/// Fits the [-1, 1] rescaling on `train` and applies it to both halves.
pub fn rescale_fit_apply(
    train: &LabeledDataset,
    test: &LabeledDataset,
) -> Result<(LabeledDataset, LabeledDataset, Rescale)> {
    if train.shape.is_some() {
        return Err(Error::config("image datasets keep their [0, 1] pixel scale"));
    }
    let params = Rescale::fit(train)?;
    let mut train = train.clone();
    let mut test = test.clone();
    params.apply_dataset(&mut train)?;
    params.apply_dataset(&mut test)?;
    Ok((train, test, params))
}
