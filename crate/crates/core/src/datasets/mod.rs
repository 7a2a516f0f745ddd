//! Dataset generation, ingestion and preprocessing.

pub mod cifar;
pub mod csv_file;
pub mod idx;
pub mod rescale;
pub mod split;
pub mod synthetic;

use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::Result;

pub use cifar::{ingest_cifar, parse_cifar};
pub use csv_file::{ingest_csv, parse_csv_dataset, read_csv, CsvOptions, CsvTable, LabelColumn};
pub use idx::{ingest_idx, parse_idx};
pub use rescale::rescale_fit_apply;
pub use split::stratified_split;
pub use synthetic::{generate, map_oracle, SyntheticFamily, SyntheticSpec};

/// Reads a whole file, transparently inflating gzip.
pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    let raw = std::fs::read(path)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(&raw[..]).read_to_end(&mut out)?;
        Ok(out)
    } else {
        Ok(raw)
    }
}
