#![no_main]
use compressive_sketch::datasets::idx::{parse_idx_images, parse_idx_labels};
use compressive_sketch::datasets::parse_idx;
use libfuzzer_sys::fuzz_target;

// First two bytes pick where the image file ends and the label file begins.
fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let cut = (u16::from_le_bytes([data[0], data[1]]) as usize).min(data.len() - 2);
    let (images, labels) = data[2..].split_at(cut);
    if let Ok((count, rows, cols, pixels)) = parse_idx_images(images) {
        assert_eq!(pixels.len(), count * rows * cols);
    }
    let _ = parse_idx_labels(labels);
    if let Ok(ds) = parse_idx(images, labels) {
        assert!(ds.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }
});
