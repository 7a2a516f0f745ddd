//! Compressive classification.
//!
//! A labeled dataset is summarized, in one pass, into one fixed-size sketch per
//! class: the running sum of a random feature map `f` over that class's
//! examples. A new sample is assigned to the class whose prior-weighted sketch
//! mean correlates best with `f(sample)`. With random Fourier features this is
//! a Parzen-window classifier under a Gaussian kernel, evaluated through the
//! sketches alone.
//!
//! Modules:
//! - [`rng`]: addressable deterministic random streams
//! - [`rff`], [`rcnn`]: the two feature-map families
//! - [`sketch`]: mergeable per-class sketches and priors
//! - [`classifier`]: the compressive classifier and its Parzen reference
//! - [`datasets`]: synthetic generators, CSV / IDX / CIFAR readers, splits
//! - [`model_file`]: the binary sketch bank format
//! - [`eval`]: the repeated-split benchmark harness

pub mod classifier;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod feature_map;
pub mod model_file;
pub mod rcnn;
pub mod rff;
pub mod rng;
pub mod sketch;
pub mod types;

pub use classifier::{classify, parzen_score, score, CompressiveClassifier, ScoreVector};
pub use error::{Error, Result};
pub use feature_map::{AnyFeatureMap, FeatureMap};
pub use model_file::{InputTransform, ModelFile};
pub use rcnn::{ConvStage, RcnnArchitecture, RcnnMap};
pub use rff::{gaussian_kernel, RffMap};
pub use rng::{derive_seed, derive_stream, gaussian_draw, RandomStream};
pub use sketch::{merge, sketch_stream, ClassSketchBank, PriorMode, Sketch};
pub use types::{FeatureMapSpec, ImageShape, Label, LabeledDataset, MapFamily, MapParams, Rescale};
