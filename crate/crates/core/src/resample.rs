//! Block-wise mesh-to-grid reconstruction.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::basis::BasisSpec;
use crate::block::{gather_all, partition_blocks, BlockContext};
use crate::engine::{
    generate_model, spatial_weight, StoppingConfig, WeightedSampleSet, WeightingConfig,
};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::kernel::Kernel;
use crate::keypoints::estimate_key_points;
use crate::mesh::{MeshSample, MeshSampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Mesh samples only, spectrally weighted basis selection.
    Afsmr,
    /// Mesh plus estimated key points, plain energy argmax.
    Fsmr,
    /// Mesh samples only, plain energy argmax.
    FsmrNoKeypoints,
    Bilinear,
    Bicubic,
    Lanczos,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Afsmr,
        Method::Fsmr,
        Method::FsmrNoKeypoints,
        Method::Bilinear,
        Method::Bicubic,
        Method::Lanczos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Afsmr => "afsmr",
            Method::Fsmr => "fsmr",
            Method::FsmrNoKeypoints => "fsmr-no-keypoints",
            Method::Bilinear => "bilinear",
            Method::Bicubic => "bicubic",
            Method::Lanczos => "lanczos",
        }
    }

    /// The interpolation kernel of a baseline method.
    pub fn kernel(self) -> Option<Kernel> {
        match self {
            Method::Bilinear => Some(Kernel::Bilinear),
            Method::Bicubic => Some(Kernel::Bicubic),
            Method::Lanczos => Some(Kernel::Lanczos),
            _ => None,
        }
    }

    pub fn is_model_based(self) -> bool {
        self.kernel().is_none()
    }

    fn uses_key_points(self) -> bool {
        self == Method::Fsmr
    }

    fn spectral_selection(self) -> bool {
        self == Method::Afsmr
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .or(match s.as_str() {
                "fsmr-nokp" | "fsmr_no_keypoints" => Some(Method::FsmrNoKeypoints),
                "linear" => Some(Method::Bilinear),
                "cubic" => Some(Method::Bicubic),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResamplerConfig {
    pub block: usize,
    pub support: usize,
    pub weighting: WeightingConfig,
    pub stopping: StoppingConfig,
    pub method: Method,
    /// Worker threads for the block loop; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for ResamplerConfig {
    fn default() -> Self {
        Self {
            block: 8,
            support: 8,
            weighting: WeightingConfig::default(),
            stopping: StoppingConfig::default(),
            method: Method::Afsmr,
            threads: None,
        }
    }
}

impl ResamplerConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block == 0 {
            return Err(Error::InvalidArgument("block size must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        self.weighting.validate()?;
        self.stopping.validate()
    }

    /// Runs `f` on a pool sized by `threads`.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Reconstructed grid plus timing of the reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub image: Image,
    pub blocks: usize,
    pub elapsed: Duration,
}

impl Reconstruction {
    pub fn mean_block_ms(&self) -> f64 {
        self.elapsed.as_secs_f64() * 1e3 / self.blocks.max(1) as f64
    }
}

/// Reconstructs the `mesh.width() × mesh.height()` grid with a model-based
/// method. Kernel baselines need the source grid and are rejected here.
pub fn resample_mesh(mesh: &MeshSampleSet, cfg: &ResamplerConfig) -> Result<Reconstruction> {
    cfg.validate()?;
    if !cfg.method.is_model_based() {
        return Err(Error::MeshUnsupported(cfg.method.name()));
    }
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let (width, height) = (mesh.width(), mesh.height());
    let start = Instant::now();
    let mut blocks = partition_blocks(width, height, cfg.block, cfg.support)?;
    gather_all(mesh, &mut blocks, cfg.block);
    let results: Vec<Result<Vec<f64>>> = cfg.install(|| {
        blocks
            .par_iter()
            .map(|ctx| reconstruct_block(ctx, mesh, cfg))
            .collect()
    })?;
    let mut data = vec![0.0; width * height];
    for (ctx, res) in blocks.iter().zip(results) {
        let values = res?;
        let [bx, by] = ctx.block_origin;
        let [bw, bh] = ctx.block_dims;
        for row in 0..bh {
            let dst = (by + row) * width + bx;
            data[dst..dst + bw].copy_from_slice(&values[row * bw..(row + 1) * bw]);
        }
    }
    let elapsed = start.elapsed();
    Ok(Reconstruction {
        image: Image::new(width, height, data)?,
        blocks: blocks.len(),
        elapsed,
    })
}

/// Key-point agnostic reconstruction of a `width × height` grid.
pub fn afsmr_resample(
    mesh: &MeshSampleSet,
    width: usize,
    height: usize,
    cfg: &ResamplerConfig,
) -> Result<Image> {
    resample_as(mesh, width, height, cfg, Method::Afsmr)
}

/// Reconstruction from mesh plus estimated key points.
pub fn fsmr_resample(
    mesh: &MeshSampleSet,
    width: usize,
    height: usize,
    cfg: &ResamplerConfig,
) -> Result<Image> {
    resample_as(mesh, width, height, cfg, Method::Fsmr)
}

fn resample_as(
    mesh: &MeshSampleSet,
    width: usize,
    height: usize,
    cfg: &ResamplerConfig,
    method: Method,
) -> Result<Image> {
    if (width, height) != (mesh.width(), mesh.height()) {
        return Err(Error::InvalidArgument(format!(
            "mesh targets a {}x{} grid, asked for {width}x{height}",
            mesh.width(),
            mesh.height()
        )));
    }
    let cfg = ResamplerConfig {
        method,
        ..cfg.clone()
    };
    Ok(resample_mesh(mesh, &cfg)?.image)
}

/// Model values at the block's own pixels, row-major within the block.
///
/// `ctx.local_mesh` must already be filled; `mesh` is consulted only for the
/// nearest-sample fallback of empty areas.
pub fn reconstruct_block(
    ctx: &BlockContext,
    mesh: &MeshSampleSet,
    cfg: &ResamplerConfig,
) -> Result<Vec<f64>> {
    let [ox, oy] = ctx.block_offset();
    let [bw, bh] = ctx.block_dims;
    let grid: Vec<[f64; 2]> = (0..bh)
        .flat_map(|y| (0..bw).map(move |x| [(ox + x) as f64, (oy + y) as f64]))
        .collect();
    if ctx.local_mesh.is_empty() {
        let [ax, ay] = ctx.area_origin;
        return Ok(grid
            .iter()
            .map(|&[x, y]| nearest_value(mesh, x + ax as f64, y + ay as f64))
            .collect());
    }
    let set = block_samples(ctx, cfg)?;
    let wcfg = WeightingConfig {
        spectral_enabled: cfg.method.spectral_selection(),
        ..cfg.weighting
    };
    let spectrum = generate_model(&set, &wcfg, &cfg.stopping)?;
    Ok(spectrum.evaluate(&grid))
}

/// Weighted sample set of one area for the configured method.
pub fn block_samples(ctx: &BlockContext, cfg: &ResamplerConfig) -> Result<WeightedSampleSet> {
    let [m, n] = ctx.area_dims;
    let spec = BasisSpec::new(m, n)?;
    let rho = cfg.weighting.rho;
    let mut positions: Vec<[f64; 2]> = ctx.local_mesh.iter().map(|s| [s.x, s.y]).collect();
    let mut values: Vec<f64> = ctx.local_mesh.iter().map(|s| s.value).collect();
    let mut weights: Vec<f64> = positions
        .iter()
        .map(|&[x, y]| spatial_weight(x, y, m, n, rho))
        .collect();
    if cfg.method.uses_key_points() {
        let key_points: Vec<MeshSample> = if ctx.local_key_points.is_empty() {
            estimate_key_points(&ctx.local_mesh, ctx.area_dims)?
                .samples()
                .collect()
        } else {
            ctx.local_key_points.clone()
        };
        let alpha = cfg.weighting.alpha;
        for kp in key_points {
            positions.push([kp.x, kp.y]);
            values.push(kp.value);
            weights.push(alpha * spatial_weight(kp.x, kp.y, m, n, rho));
        }
    }
    WeightedSampleSet::new(positions, values, weights, spec)
}

fn nearest_value(mesh: &MeshSampleSet, x: f64, y: f64) -> f64 {
    mesh.samples()
        .iter()
        .map(|s| ((s.x - x).powi(2) + (s.y - y).powi(2), s.value))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, v)| v)
        .unwrap_or(0.0)
}
