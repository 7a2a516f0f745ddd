//! Random convolutional feature map for images.
//!
//! Stages of valid `k × k` convolution → ReLU → `p × p` max-pool (stride `p`),
//! followed by a dense projection to `m` outputs. All weights are drawn once
//! from the map seed (He-scaled Gaussians, zero biases) and never trained.
//! Activations are channel-last throughout, matching the example layout.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{derive_stream, gaussian_draw};
use crate::types::{check_example, FeatureMapSpec, ImageShape, MapParams};

pub const CONV_TAG: &str = "rcnn-conv";
pub const DENSE_TAG: &str = "rcnn-dense";

const MAX_STAGES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvStage {
    pub kernel: usize,
    pub out_channels: usize,
    /// Max-pool window and stride; 1 disables pooling.
    pub pool: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcnnArchitecture {
    pub input: ImageShape,
    pub stages: Vec<ConvStage>,
}

impl RcnnArchitecture {
    /// Two 5×5 conv stages with 32 and 64 channels, each followed by ReLU and
    /// 2×2 max-pooling.
    pub fn lenet(input: ImageShape) -> Self {
        RcnnArchitecture {
            input,
            stages: vec![
                ConvStage {
                    kernel: 5,
                    out_channels: 32,
                    pool: 2,
                },
                ConvStage {
                    kernel: 5,
                    out_channels: 64,
                    pool: 2,
                },
            ],
        }
    }

    /// Shapes after each conv and each pool, in order: `[conv₁, pool₁, conv₂, pool₂, ...]`.
    pub fn stage_shapes(&self) -> Result<Vec<ImageShape>> {
        if self.input.is_empty() {
            return Err(Error::config("image shape must be nonempty"));
        }
        if self.stages.len() > MAX_STAGES {
            return Err(Error::config(format!("at most {MAX_STAGES} conv stages")));
        }
        let mut shapes = Vec::with_capacity(2 * self.stages.len());
        let mut cur = self.input;
        for (i, st) in self.stages.iter().enumerate() {
            if st.kernel == 0 || st.out_channels == 0 || st.pool == 0 {
                return Err(Error::config(format!("stage {i}: zero-sized kernel, channels or pool")));
            }
            if st.kernel > cur.height || st.kernel > cur.width {
                return Err(Error::config(format!(
                    "stage {i}: {}x{} kernel does not fit a {cur} input",
                    st.kernel, st.kernel
                )));
            }
            let conv = ImageShape::new(
                cur.height - st.kernel + 1,
                cur.width - st.kernel + 1,
                st.out_channels,
            );
            let pooled = ImageShape::new(conv.height / st.pool, conv.width / st.pool, st.out_channels);
            if pooled.height == 0 || pooled.width == 0 {
                return Err(Error::config(format!(
                    "stage {i}: pooling {conv} by {} leaves no spatial extent",
                    st.pool
                )));
            }
            shapes.push(conv);
            shapes.push(pooled);
            cur = pooled;
        }
        Ok(shapes)
    }

    /// Length of the flattened activation fed to the dense projection.
    pub fn dense_input_len(&self) -> Result<usize> {
        Ok(self.stage_shapes()?.last().copied().unwrap_or(self.input).len())
    }

    pub(crate) fn encode(&self, out: &mut Vec<u8>) {
        for d in [self.input.height, self.input.width, self.input.channels] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        out.push(self.stages.len() as u8);
        for st in &self.stages {
            for d in [st.kernel, st.out_channels, st.pool] {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
        }
    }

    /// Inverse of `encode`; returns the architecture and the bytes consumed.
    pub(crate) fn decode(bytes: &[u8]) -> Result<(Self, usize)> {
        let short = || Error::format("truncated architecture descriptor");
        let u32_at = |pos: usize| -> Result<usize> {
            let b = bytes.get(pos..pos + 4).ok_or_else(short)?;
            Ok(u32::from_le_bytes(b.try_into().unwrap()) as usize)
        };
        let input = ImageShape::new(u32_at(0)?, u32_at(4)?, u32_at(8)?);
        let count = *bytes.get(12).ok_or_else(short)? as usize;
        if count > MAX_STAGES {
            return Err(Error::format(format!("{count} conv stages exceeds limit {MAX_STAGES}")));
        }
        let mut stages = Vec::with_capacity(count);
        let mut pos = 13;
        for _ in 0..count {
            stages.push(ConvStage {
                kernel: u32_at(pos)?,
                out_channels: u32_at(pos + 4)?,
                pool: u32_at(pos + 8)?,
            });
            pos += 12;
        }
        Ok((RcnnArchitecture { input, stages }, pos))
    }
}

impl fmt::Display for RcnnArchitecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.input)?;
        for st in &self.stages {
            write!(f, " -> conv{k}x{k}x{c} relu pool{p}", k = st.kernel, c = st.out_channels, p = st.pool)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct ConvLayer {
    kernel: usize,
    in_channels: usize,
    out_channels: usize,
    pool: usize,
    /// out_channels × (kernel · kernel · in_channels), patch order (ky, kx, c).
    weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RcnnMap {
    spec: FeatureMapSpec,
    arch: RcnnArchitecture,
    convs: Vec<ConvLayer>,
    /// m × dense_in, row-major.
    dense: Vec<f64>,
    dense_in: usize,
    digest: u64,
}

fn he_weights(seed: u64, tag: &str, index: u64, count: usize, fan_in: usize) -> Vec<f64> {
    let scale = (2.0 / fan_in as f64).sqrt();
    let mut stream = derive_stream(seed, tag, index);
    gaussian_draw(&mut stream, count)
        .into_iter()
        .map(|g| g * scale)
        .collect()
}

impl RcnnMap {
    pub fn build(spec: &FeatureMapSpec) -> Result<Self> {
        let arch = match &spec.params {
            MapParams::Rcnn { arch } => arch.clone(),
            _ => return Err(Error::config("RCNN map requires an RCNN spec")),
        };
        spec.validate()?;
        let mut convs = Vec::with_capacity(arch.stages.len());
        let mut in_channels = arch.input.channels;
        for (i, st) in arch.stages.iter().enumerate() {
            let fan_in = st.kernel * st.kernel * in_channels;
            convs.push(ConvLayer {
                kernel: st.kernel,
                in_channels,
                out_channels: st.out_channels,
                pool: st.pool,
                weights: he_weights(spec.seed, CONV_TAG, i as u64, st.out_channels * fan_in, fan_in),
            });
            in_channels = st.out_channels;
        }
        let dense_in = arch.dense_input_len()?;
        let dense = he_weights(spec.seed, DENSE_TAG, 0, spec.m * dense_in, dense_in);
        Ok(RcnnMap {
            spec: spec.clone(),
            arch,
            convs,
            dense,
            dense_in,
            digest: spec.digest(),
        })
    }

    pub fn spec(&self) -> &FeatureMapSpec {
        &self.spec
    }

    pub fn architecture(&self) -> &RcnnArchitecture {
        &self.arch
    }

    pub fn digest(&self) -> u64 {
        self.digest
    }

    /// Weights of conv stage `i`, laid out `[out][ky][kx][in]`.
    pub fn conv_weights(&self, i: usize) -> &[f64] {
        &self.convs[i].weights
    }

    /// Dense projection, `m × dense_input_len`, row-major.
    pub fn dense_weights(&self) -> &[f64] {
        &self.dense
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_example(x, self.spec.n)?;
        let mut act = x.to_vec();
        let mut shape = self.arch.input;
        for layer in &self.convs {
            let (conv, conv_shape) = conv_valid(&act, shape, layer);
            let pooled = relu_max_pool(&conv, conv_shape, layer.pool);
            act = pooled.0;
            shape = pooled.1;
        }
        debug_assert_eq!(act.len(), self.dense_in);
        Ok(self
            .dense
            .chunks_exact(self.dense_in)
            .map(|row| row.iter().zip(&act).map(|(w, a)| w * a).sum())
            .collect())
    }

    /// Real outputs stored in the complex sketch container with zero imaginary parts.
    pub fn eval_into(&self, x: &[f64], out: &mut [Complex64]) -> Result<()> {
        let y = self.eval(x)?;
        for (o, v) in out.iter_mut().zip(y) {
            *o = Complex64::new(v, 0.0);
        }
        Ok(())
    }
}

/// Valid convolution as one GEMM over the im2col patch matrix.
fn conv_valid(input: &[f64], shape: ImageShape, layer: &ConvLayer) -> (Vec<f64>, ImageShape) {
    let k = layer.kernel;
    let cin = layer.in_channels;
    let out_h = shape.height - k + 1;
    let out_w = shape.width - k + 1;
    let patch = k * k * cin;
    let positions = out_h * out_w;

    let mut cols = Vec::with_capacity(positions * patch);
    for oy in 0..out_h {
        for ox in 0..out_w {
            for ky in 0..k {
                let start = ((oy + ky) * shape.width + ox) * cin;
                cols.extend_from_slice(&input[start..start + k * cin]);
            }
        }
    }

    let cout = layer.out_channels;
    let mut out = vec![0.0; positions * cout];
    // out (positions × cout) = cols (positions × patch) · weightsᵀ (patch × cout)
    unsafe {
        matrixmultiply::dgemm(
            positions,
            patch,
            cout,
            1.0,
            cols.as_ptr(),
            patch as isize,
            1,
            layer.weights.as_ptr(),
            1,
            patch as isize,
            0.0,
            out.as_mut_ptr(),
            cout as isize,
            1,
        );
    }
    (out, ImageShape::new(out_h, out_w, cout))
}

fn relu_max_pool(input: &[f64], shape: ImageShape, pool: usize) -> (Vec<f64>, ImageShape) {
    let out_shape = ImageShape::new(shape.height / pool, shape.width / pool, shape.channels);
    let c = shape.channels;
    // ReLU commutes with max, and every window is nonempty, so start from 0.
    let mut out = vec![0.0f64; out_shape.len()];
    for py in 0..out_shape.height {
        for px in 0..out_shape.width {
            let dst = &mut out[(py * out_shape.width + px) * c..][..c];
            for dy in 0..pool {
                for dx in 0..pool {
                    let y = py * pool + dy;
                    let x = px * pool + dx;
                    let src = &input[(y * shape.width + x) * c..][..c];
                    for (d, s) in dst.iter_mut().zip(src) {
                        if *s > *d {
                            *d = *s;
                        }
                    }
                }
            }
        }
    }
    (out, out_shape)
}
