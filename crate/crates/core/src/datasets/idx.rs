//! IDX files (MNIST layout): big-endian magic, big-endian u32 dimensions,
//! then unsigned bytes.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{ImageShape, LabeledDataset};

use super::read_input;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], pos: usize, what: &str) -> Result<u32> {
    bytes
        .get(pos..pos + 4)
        .map(|b| u32::from_be_bytes(b.try_into().unwrap()))
        .ok_or_else(|| Error::format(format!("truncated {what} header")))
}

/// Returns `(count, rows, cols, pixels)`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, usize, &[u8])> {
    let magic = be_u32(bytes, 0, "image")?;
    if magic != IMAGES_MAGIC {
        return Err(Error::format(format!(
            "image file magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}"
        )));
    }
    let count = be_u32(bytes, 4, "image")? as usize;
    let rows = be_u32(bytes, 8, "image")? as usize;
    let cols = be_u32(bytes, 12, "image")? as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::format("image dimensions must be nonzero"));
    }
    let expected = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| Error::format("image dimensions overflow"))?;
    let payload = &bytes[16..];
    if payload.len() != expected {
        return Err(Error::format(format!(
            "image payload has {} bytes, header declares {expected}",
            payload.len()
        )));
    }
    Ok((count, rows, cols, payload))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<&[u8]> {
    let magic = be_u32(bytes, 0, "label")?;
    if magic != LABELS_MAGIC {
        return Err(Error::format(format!(
            "label file magic {magic:#010x}, expected {LABELS_MAGIC:#010x}"
        )));
    }
    let count = be_u32(bytes, 4, "label")? as usize;
    let payload = &bytes[8..];
    if payload.len() != count {
        return Err(Error::format(format!(
            "label payload has {} bytes, header declares {count}",
            payload.len()
        )));
    }
    Ok(payload)
}

/// Builds a `rows × cols × 1` image dataset with pixels scaled to [0, 1].
pub fn parse_idx(images: &[u8], labels: &[u8]) -> Result<LabeledDataset> {
    let (count, rows, cols, pixels) = parse_idx_images(images)?;
    let label_bytes = parse_idx_labels(labels)?;
    if label_bytes.len() != count {
        return Err(Error::format(format!(
            "{count} images but {} labels",
            label_bytes.len()
        )));
    }
    let values = pixels.iter().map(|&p| p as f64 / 255.0).collect();
    let symbols: Vec<String> = label_bytes.iter().map(|b| b.to_string()).collect();
    LabeledDataset::from_symbols(rows * cols, values, &symbols)?.with_shape(ImageShape::new(rows, cols, 1))
}

/// Reads an image/label file pair; either may be gzip-compressed.
pub fn ingest_idx(images_path: &Path, labels_path: &Path) -> Result<LabeledDataset> {
    parse_idx(&read_input(images_path)?, &read_input(labels_path)?)
}

/// Serializes byte images and labels as an IDX pair.
pub fn encode_idx(rows: usize, cols: usize, pixels: &[u8], labels: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let mut images = Vec::with_capacity(16 + pixels.len());
    for v in [IMAGES_MAGIC, labels.len() as u32, rows as u32, cols as u32] {
        images.extend_from_slice(&v.to_be_bytes());
    }
    images.extend_from_slice(pixels);
    let mut lab = Vec::with_capacity(8 + labels.len());
    lab.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    lab.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    lab.extend_from_slice(labels);
    (images, lab)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (Vec<u8>, Vec<u8>) {
        let pixels: Vec<u8> = (0..8).map(|i| (i * 36) as u8).collect();
        encode_idx(2, 2, &pixels, &[7, 3])
    }

    #[test]
    fn two_image_roundtrip() {
        let (img, lab) = fixture();
        let ds = parse_idx(&img, &lab).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.shape, Some(ImageShape::new(2, 2, 1)));
        assert_eq!(ds.class_names(), &["7", "3"]);
        for (i, v) in ds.values().iter().enumerate() {
            assert_eq!(*v, (i * 36) as f64 / 255.0);
        }
    }

    #[test]
    fn wrong_magic() {
        let (img, lab) = fixture();
        assert!(matches!(parse_idx(&lab, &lab), Err(Error::Format(_))));
        assert!(matches!(parse_idx(&img, &img), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_payload() {
        let (img, lab) = fixture();
        assert!(matches!(parse_idx(&img[..img.len() - 1], &lab), Err(Error::Format(_))));
        assert!(matches!(parse_idx(&img, &lab[..lab.len() - 1]), Err(Error::Format(_))));
        assert!(matches!(parse_idx(&img[..10], &lab), Err(Error::Format(_))));
    }

    #[test]
    fn count_mismatch() {
        let (img, _) = fixture();
        let (_, lab) = encode_idx(2, 2, &[], &[1, 2, 3]);
        assert!(matches!(parse_idx(&img, &lab), Err(Error::Format(_))));
    }

    #[test]
    fn overflowing_dimensions() {
        let mut img = Vec::new();
        for v in [IMAGES_MAGIC, u32::MAX, u32::MAX, u32::MAX] {
            img.extend_from_slice(&v.to_be_bytes());
        }
        assert!(parse_idx_images(&img).is_err());
    }
}
