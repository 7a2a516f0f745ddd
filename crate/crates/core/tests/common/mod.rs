//! Helpers shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::path::PathBuf;

use compressive_sketch::rng::derive_stream;
use compressive_sketch::RcnnMap;
use rand::Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// `count` points drawn uniformly from `[-1, 1]^n`.
pub fn uniform_points(seed: u64, tag: &str, count: usize, n: usize) -> Vec<Vec<f64>> {
    let mut rng = derive_stream(seed, tag, 0);
    (0..count)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect()
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = a.iter().chain(b).fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// Forward pass written as plain nested loops, straight from the definition:
/// valid convolution, ReLU, non-overlapping max-pool, then a dense layer.
/// Shares nothing with the library's im2col path except the weights.
pub fn naive_rcnn(map: &RcnnMap, x: &[f64]) -> Vec<f64> {
    let arch = map.architecture();
    let (mut h, mut w, mut c) = (arch.input.height, arch.input.width, arch.input.channels);
    let mut act = x.to_vec();
    for (s, st) in arch.stages.iter().enumerate() {
        let wts = map.conv_weights(s);
        let k = st.kernel;
        let (oh, ow, oc) = (h - k + 1, w - k + 1, st.out_channels);
        let mut conv = vec![0.0; oh * ow * oc];
        for y in 0..oh {
            for xx in 0..ow {
                for o in 0..oc {
                    let mut acc = 0.0;
                    for ky in 0..k {
                        for kx in 0..k {
                            for ci in 0..c {
                                let wv = wts[((o * k + ky) * k + kx) * c + ci];
                                let iv = act[((y + ky) * w + (xx + kx)) * c + ci];
                                acc += wv * iv;
                            }
                        }
                    }
                    conv[(y * ow + xx) * oc + o] = acc.max(0.0);
                }
            }
        }
        let p = st.pool;
        let (ph, pw) = (oh / p, ow / p);
        let mut pooled = vec![f64::NEG_INFINITY; ph * pw * oc];
        for y in 0..ph {
            for xx in 0..pw {
                for o in 0..oc {
                    let dst = &mut pooled[(y * pw + xx) * oc + o];
                    for dy in 0..p {
                        for dx in 0..p {
                            *dst = dst.max(conv[((y * p + dy) * ow + (xx * p + dx)) * oc + o]);
                        }
                    }
                }
            }
        }
        act = pooled;
        h = ph;
        w = pw;
        c = oc;
    }
    let d = act.len();
    map.dense_weights()
        .chunks_exact(d)
        .map(|row| (0..d).map(|i| row[i] * act[i]).sum())
        .collect()
}
