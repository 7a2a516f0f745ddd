//! On-disk sketch bank ("CSKB").
//!
//! All integers and floats are little-endian:
//!
//! ```text
//! magic        4   b"CSKB"
//! version      u16 1
//! family       u8  0 = rff, 1 = rcnn
//! n            u64
//! m            u64
//! K            u32
//! seed         u64
//! params           rff: sigma f64 | rcnn: h,w,c u32, stage count u8, stages (kernel, channels, pool) u32
//! prior mode   u8  0 = empirical, 1 = uniform
//! transform    u8  0 = none, 1 = rescale (then n × (lo f64, hi f64)), 2 = pixels/255
//! class names  K × (u16 length, UTF-8 bytes)
//! spec digest  u64 must equal the digest recomputed from the fields above
//! payload      K × (count u64, m × (re f64, im f64))
//! ```

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rcnn::RcnnArchitecture;
use crate::sketch::{ClassSketchBank, PriorMode, Sketch};
use crate::types::{FeatureMapSpec, MapFamily, MapParams, Rescale};

pub const MAGIC: &[u8; 4] = b"CSKB";
pub const VERSION: u16 = 1;

/// How raw inputs are transformed before the feature map sees them.
#[derive(Clone, Debug, PartialEq)]
pub enum InputTransform {
    None,
    Rescale(Rescale),
    /// Byte pixels divided by 255 (done by the IDX and CIFAR readers).
    UnitPixels,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub bank: ClassSketchBank,
    pub class_names: Vec<String>,
    pub transform: InputTransform,
}

impl ModelFile {
    pub fn new(bank: ClassSketchBank, class_names: Vec<String>, transform: InputTransform) -> Result<Self> {
        if class_names.len() != bank.num_classes() {
            return Err(Error::input(format!(
                "{} class names for {} sketches",
                class_names.len(),
                bank.num_classes()
            )));
        }
        if let Some(long) = class_names.iter().find(|s| s.len() > u16::MAX as usize) {
            return Err(Error::input(format!("class name of {} bytes is too long", long.len())));
        }
        if let InputTransform::Rescale(r) = &transform {
            if r.dim() != bank.spec().n {
                return Err(Error::input("rescale parameters do not match the input dimension"));
            }
        }
        Ok(ModelFile {
            bank,
            class_names,
            transform,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let spec = self.bank.spec();
        let k = self.bank.num_classes();
        let mut out = Vec::with_capacity(128 + k * (8 + 16 * spec.m));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(spec.family().tag());
        out.extend_from_slice(&(spec.n as u64).to_le_bytes());
        out.extend_from_slice(&(spec.m as u64).to_le_bytes());
        out.extend_from_slice(&(k as u32).to_le_bytes());
        out.extend_from_slice(&spec.seed.to_le_bytes());
        match &spec.params {
            MapParams::Rff { sigma } => out.extend_from_slice(&sigma.to_le_bytes()),
            MapParams::Rcnn { arch } => arch.encode(&mut out),
        }
        out.push(self.bank.prior_mode.tag());
        match &self.transform {
            InputTransform::None => out.push(0),
            InputTransform::Rescale(r) => {
                out.push(1);
                for (lo, hi) in r.lo.iter().zip(&r.hi) {
                    out.extend_from_slice(&lo.to_le_bytes());
                    out.extend_from_slice(&hi.to_le_bytes());
                }
            }
            InputTransform::UnitPixels => out.push(2),
        }
        for name in &self.class_names {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
        }
        out.extend_from_slice(&spec.digest().to_le_bytes());
        for s in self.bank.sketches() {
            out.extend_from_slice(&s.count().to_le_bytes());
            for c in s.sum() {
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::format("not a sketch bank file (bad magic)"));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::format(format!("unsupported format version {version}")));
        }
        let family = MapFamily::from_tag(r.u8()?)
            .ok_or_else(|| Error::format("unknown feature map family"))?;
        let n = r.len_u64()?;
        let m = r.len_u64()?;
        let k = r.u32()? as usize;
        let seed = r.u64()?;
        let params = match family {
            MapFamily::Rff => MapParams::Rff { sigma: r.f64()? },
            MapFamily::Rcnn => {
                let (arch, used) = RcnnArchitecture::decode(&r.bytes[r.pos..])?;
                r.pos += used;
                MapParams::Rcnn { arch }
            }
        };
        let spec = FeatureMapSpec { n, m, seed, params };
        spec.validate().map_err(|e| Error::format(format!("invalid map in header: {e}")))?;
        if k == 0 {
            return Err(Error::format("sketch bank has no classes"));
        }
        let prior_mode =
            PriorMode::from_tag(r.u8()?).ok_or_else(|| Error::format("unknown prior mode"))?;
        let transform = match r.u8()? {
            0 => InputTransform::None,
            1 => {
                r.ensure(n, 16)?;
                let mut lo = Vec::with_capacity(n);
                let mut hi = Vec::with_capacity(n);
                for _ in 0..n {
                    lo.push(r.f64()?);
                    hi.push(r.f64()?);
                }
                InputTransform::Rescale(Rescale { lo, hi })
            }
            2 => InputTransform::UnitPixels,
            t => return Err(Error::format(format!("unknown input transform {t}"))),
        };
        r.ensure(k, 2)?;
        let mut class_names = Vec::with_capacity(k);
        for _ in 0..k {
            let len = r.u16()? as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::format("class name is not UTF-8"))?;
            class_names.push(name.to_string());
        }
        let digest = r.u64()?;
        if digest != spec.digest() {
            return Err(Error::format(format!(
                "header digest {digest:016x} does not match map fields ({:016x})",
                spec.digest()
            )));
        }
        let record = m
            .checked_mul(16)
            .and_then(|v| v.checked_add(8))
            .ok_or_else(|| Error::format("sketch size overflows"))?;
        r.ensure(k, record)?;
        if r.remaining() != k * record {
            return Err(Error::format(format!(
                "payload has {} bytes, expected {}",
                r.remaining(),
                k * record
            )));
        }
        let mut sketches = Vec::with_capacity(k);
        for _ in 0..k {
            let count = r.u64()?;
            let mut sum = Vec::with_capacity(m);
            for _ in 0..m {
                let re = r.f64()?;
                let im = r.f64()?;
                sum.push(Complex64::new(re, im));
            }
            sketches.push(Sketch::from_parts(digest, sum, count));
        }
        let bank = ClassSketchBank::from_sketches(spec, sketches, prior_mode)?;
        ModelFile::new(bank, class_names, transform).map_err(|e| Error::format(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    /// Folds `other` into `self`. Classes are matched by name; classes only
    /// `other` knows are appended.
    pub fn merge_from(&mut self, other: &ModelFile) -> Result<()> {
        if other.bank.spec() != self.bank.spec() {
            return Err(Error::Incompatible("sketches use different feature maps".into()));
        }
        if other.transform != self.transform {
            return Err(Error::Incompatible("sketches use different input transforms".into()));
        }
        if other.bank.prior_mode != self.bank.prior_mode {
            return Err(Error::Incompatible("sketches use different prior modes".into()));
        }
        let spec = self.bank.spec().clone();
        let mut sketches = self.bank.sketches().to_vec();
        for (name, sketch) in other.class_names.iter().zip(other.bank.sketches()) {
            match self.class_names.iter().position(|x| x == name) {
                Some(k) => sketches[k].merge_from(sketch)?,
                None => {
                    self.class_names.push(name.clone());
                    sketches.push(sketch.clone());
                }
            }
        }
        self.bank = ClassSketchBank::from_sketches(spec, sketches, self.bank.prior_mode)?;
        Ok(())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.remaining() < len {
            return Err(Error::format("truncated sketch bank file"));
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    /// Fails early when `count` items of `size` bytes cannot possibly fit.
    fn ensure(&self, count: usize, size: usize) -> Result<()> {
        match count.checked_mul(size) {
            Some(total) if total <= self.remaining() => Ok(()),
            _ => Err(Error::format("truncated sketch bank file")),
        }
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len_u64(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::format("dimension does not fit in memory"))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
