//! Mesh-to-grid image resampling with frequency-selective DCT models.
//!
//! Scattered samples (the *mesh*) are turned back into a regular pixel grid
//! block by block. Each block plus its support ring is modelled as a sparse
//! superposition of 2-D DCT basis functions, selected greedily to reduce a
//! spatially weighted residual energy. Two variants are provided:
//!
//! * [`Method::Afsmr`]: the model sees only the mesh samples and the basis
//!   selection is biased toward low frequencies by a spectral weight.
//! * [`Method::Fsmr`]: the mesh is augmented with key points, i.e. grid
//!   samples pre-estimated by scattered-data interpolation, which enter the
//!   fit with an attenuated weight.
//!
//! Separable kernel warps (bilinear, bicubic, Lanczos) serve as baselines, and
//! the [`benchmark`] module drives synthetic warp sequences through any of
//! the methods and scores the result with PSNR and SSIM.

pub mod basis;
pub mod benchmark;
pub mod block;
pub mod engine;
mod error;
pub mod geometry;
pub mod image;
pub mod kernel;
pub mod keypoints;
pub mod mesh;
pub mod resample;

pub use crate::basis::{BasisSpec, BasisTable, Freq};
pub use crate::block::{gather_local_samples, partition_blocks, BlockContext};
pub use crate::engine::{
    generate_model, SparseSpectrum, StoppingConfig, WeightedSampleSet, WeightingConfig,
};
pub use crate::error::{Error, Result};
pub use crate::geometry::AffineTransform;
pub use crate::image::Image;
pub use crate::kernel::{kernel_warp, Kernel};
pub use crate::mesh::{MeshSample, MeshSampleSet};
pub use crate::resample::{resample_mesh, Method, ResamplerConfig};
