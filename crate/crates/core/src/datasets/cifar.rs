//! CIFAR-10 binary batches: records of one label byte followed by 32×32
//! red, green and blue planes, each row-major.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{ImageShape, LabeledDataset};

use super::read_input;

pub const SIDE: usize = 32;
pub const PLANE: usize = SIDE * SIDE;
pub const RECORD_LEN: usize = 1 + 3 * PLANE;

pub fn shape() -> ImageShape {
    ImageShape::new(SIDE, SIDE, 3)
}

/// Parses one batch into a channel-last 32×32×3 dataset with pixels in [0, 1].
pub fn parse_cifar(bytes: &[u8]) -> Result<LabeledDataset> {
    if !bytes.len().is_multiple_of(RECORD_LEN) {
        return Err(Error::format(format!(
            "CIFAR batch length {} is not a multiple of {RECORD_LEN}",
            bytes.len()
        )));
    }
    let records = bytes.len() / RECORD_LEN;
    let mut values = Vec::with_capacity(records * 3 * PLANE);
    let mut symbols = Vec::with_capacity(records);
    for rec in bytes.chunks_exact(RECORD_LEN) {
        symbols.push(rec[0].to_string());
        let planes = &rec[1..];
        for p in 0..PLANE {
            for c in 0..3 {
                values.push(planes[c * PLANE + p] as f64 / 255.0);
            }
        }
    }
    LabeledDataset::from_symbols(3 * PLANE, values, &symbols)?.with_shape(shape())
}

/// Concatenates several batch files, in order.
pub fn ingest_cifar<P: AsRef<Path>>(batch_paths: &[P]) -> Result<LabeledDataset> {
    let mut out: Option<LabeledDataset> = None;
    for path in batch_paths {
        let batch = parse_cifar(&read_input(path.as_ref())?)?;
        match out.as_mut() {
            None => out = Some(batch),
            Some(ds) => ds.extend(&batch)?,
        }
    }
    out.ok_or_else(|| Error::config("no CIFAR batch files given"))
}

/// Encodes channel-last byte images back into CIFAR records.
pub fn encode_cifar(labels: &[u8], pixels_hwc: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(labels.len() * RECORD_LEN);
    for (i, &label) in labels.iter().enumerate() {
        out.push(label);
        let img = &pixels_hwc[i * 3 * PLANE..(i + 1) * 3 * PLANE];
        for c in 0..3 {
            out.extend((0..PLANE).map(|p| img[p * 3 + c]));
        }
    }
    out
}
