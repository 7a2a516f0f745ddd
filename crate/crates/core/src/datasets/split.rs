use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::derive_stream;
use crate::types::LabeledDataset;

/// Number of class-`k` examples sent to train: `fraction · N_k`, rounded half up.
pub fn train_count(fraction: f64, class_size: usize) -> usize {
    ((fraction * class_size as f64) + 0.5).floor() as usize
}

/// Stratified train/test split. Each class is shuffled with its own stream
/// derived from `seed`; both halves keep the original example order.
pub fn stratified_split(
    ds: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::config(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.num_classes()];
    for (i, &y) in ds.labels().iter().enumerate() {
        by_class[y].push(i);
    }
    let mut in_train = vec![false; ds.len()];
    for (k, idx) in by_class.iter_mut().enumerate() {
        let mut stream = derive_stream(seed, "split-class", k as u64);
        idx.shuffle(&mut stream);
        for &i in &idx[..train_count(train_fraction, idx.len())] {
            in_train[i] = true;
        }
    }
    let (train, test): (Vec<usize>, Vec<usize>) = (0..ds.len()).partition(|&i| in_train[i]);
    Ok((ds.subset(&train), ds.subset(&test)))
}
