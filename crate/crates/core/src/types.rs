//! Shared domain types: datasets, feature-map descriptors and their digests.

use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rcnn::RcnnArchitecture;

/// Class index in `0..K`.
pub type Label = usize;

/// Height × width × channels of an image example, flattened channel-last.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageShape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl ImageShape {
    pub fn new(height: usize, width: usize, channels: usize) -> Self {
        ImageShape {
            height,
            width,
            channels,
        }
    }

    pub fn len(&self) -> usize {
        self.height * self.width * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for ImageShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.height, self.width, self.channels)
    }
}

impl std::str::FromStr for ImageShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dims: Vec<usize> = s
            .split(['x', 'X'])
            .map(|d| d.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::config(format!("bad image shape {s:?}, expected HxWxC")))?;
        match dims[..] {
            [h, w, c] if h > 0 && w > 0 && c > 0 => Ok(ImageShape::new(h, w, c)),
            _ => Err(Error::config(format!("bad image shape {s:?}, expected HxWxC"))),
        }
    }
}

/// Per-coordinate train-set ranges used to map features into [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct Rescale {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Examples in ℝⁿ with labels in `0..K`, stored row-major in one buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    n: usize,
    values: Vec<f64>,
    labels: Vec<Label>,
    class_names: Vec<String>,
    /// Set for image datasets; `n == shape.len()`.
    pub shape: Option<ImageShape>,
    /// Present once the dataset has been rescaled.
    pub rescale: Option<Rescale>,
}

impl LabeledDataset {
    /// Builds a dataset from already-indexed labels.
    pub fn new(
        n: usize,
        values: Vec<f64>,
        labels: Vec<Label>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("example dimension must be at least 1"));
        }
        if values.len() != n * labels.len() {
            return Err(Error::input(format!(
                "{} values do not form {} examples of dimension {n}",
                values.len(),
                labels.len()
            )));
        }
        let k = class_names.len();
        if let Some(bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::input(format!("label {bad} out of range for K={k}")));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "non-finite value in example {}",
                pos / n
            )));
        }
        Ok(LabeledDataset {
            n,
            values,
            labels,
            class_names,
            shape: None,
            rescale: None,
        })
    }

    /// Builds a dataset from raw label symbols, assigning class indices in
    /// order of first appearance.
    pub fn from_symbols<S: AsRef<str>>(n: usize, values: Vec<f64>, symbols: &[S]) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut labels = Vec::with_capacity(symbols.len());
        for s in symbols {
            let s = s.as_ref();
            let idx = match names.iter().position(|x| x == s) {
                Some(i) => i,
                None => {
                    names.push(s.to_string());
                    names.len() - 1
                }
            };
            labels.push(idx);
        }
        LabeledDataset::new(n, values, labels, names)
    }

    pub fn with_shape(mut self, shape: ImageShape) -> Result<Self> {
        if shape.len() != self.n {
            return Err(Error::input(format!(
                "image shape {shape} does not match dimension {}",
                self.n
            )));
        }
        self.shape = Some(shape);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn example(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&[f64], Label)> + '_ {
        self.values
            .chunks_exact(self.n)
            .zip(self.labels.iter().copied())
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Examples at `indices`, in the given order. Class names and metadata are kept.
    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        let mut values = Vec::with_capacity(indices.len() * self.n);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            values.extend_from_slice(self.example(i));
            labels.push(self.labels[i]);
        }
        LabeledDataset {
            n: self.n,
            values,
            labels,
            class_names: self.class_names.clone(),
            shape: self.shape,
            rescale: self.rescale.clone(),
        }
    }

    /// Appends the examples of `other`, remapping its labels by class name.
    pub fn extend(&mut self, other: &LabeledDataset) -> Result<()> {
        if other.n != self.n || other.shape != self.shape {
            return Err(Error::input("cannot concatenate datasets of different dimension"));
        }
        let mut remap = Vec::with_capacity(other.num_classes());
        for name in &other.class_names {
            let idx = match self.class_names.iter().position(|x| x == name) {
                Some(i) => i,
                None => {
                    self.class_names.push(name.clone());
                    self.class_names.len() - 1
                }
            };
            remap.push(idx);
        }
        self.values.extend_from_slice(&other.values);
        self.labels.extend(other.labels.iter().map(|&l| remap[l]));
        Ok(())
    }
}

/// Checks that `x` is a valid example of dimension `n`.
pub fn check_example(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::input(format!(
            "example has dimension {}, expected {n}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("example contains a non-finite value"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapFamily {
    Rff,
    Rcnn,
}

impl MapFamily {
    pub(crate) fn tag(self) -> u8 {
        match self {
            MapFamily::Rff => 0,
            MapFamily::Rcnn => 1,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(MapFamily::Rff),
            1 => Some(MapFamily::Rcnn),
            _ => None,
        }
    }
}

impl fmt::Display for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapFamily::Rff => "rff",
            MapFamily::Rcnn => "rcnn",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapParams {
    /// Gaussian-kernel bandwidth σ.
    Rff { sigma: f64 },
    Rcnn { arch: RcnnArchitecture },
}

/// Everything needed to regenerate a feature map bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMapSpec {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub params: MapParams,
}

impl FeatureMapSpec {
    pub fn rff(n: usize, m: usize, sigma: f64, seed: u64) -> Self {
        FeatureMapSpec {
            n,
            m,
            seed,
            params: MapParams::Rff { sigma },
        }
    }

    pub fn rcnn(arch: RcnnArchitecture, m: usize, seed: u64) -> Self {
        FeatureMapSpec {
            n: arch.input.len(),
            m,
            seed,
            params: MapParams::Rcnn { arch },
        }
    }

    pub fn family(&self) -> MapFamily {
        match self.params {
            MapParams::Rff { .. } => MapFamily::Rff,
            MapParams::Rcnn { .. } => MapFamily::Rcnn,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("input dimension n must be at least 1"));
        }
        if self.m == 0 {
            return Err(Error::config("sketch size m must be at least 1"));
        }
        match &self.params {
            MapParams::Rff { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::config(format!("sigma must be positive, got {sigma}")));
                }
            }
            MapParams::Rcnn { arch } => {
                if arch.input.len() != self.n {
                    return Err(Error::config(format!(
                        "architecture input {} does not match n={}",
                        arch.input, self.n
                    )));
                }
                arch.stage_shapes()?;
            }
        }
        Ok(())
    }

    /// Canonical little-endian encoding; the digest is computed over these bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64);
        out.push(self.family().tag());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&(self.m as u64).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        match &self.params {
            MapParams::Rff { sigma } => out.extend_from_slice(&sigma.to_bits().to_le_bytes()),
            MapParams::Rcnn { arch } => arch.encode(&mut out),
        }
        out
    }

    /// 64-bit digest identifying the map; sketches are only comparable when
    /// their digests agree.
    pub fn digest(&self) -> u64 {
        let hash = Sha256::digest(self.canonical_bytes());
        u64::from_le_bytes(hash[..8].try_into().expect("sha256 is 32 bytes"))
    }
}
