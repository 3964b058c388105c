//! Synthetic warp benchmark: an image is pushed through a sequence of
//! mutually canceling affine warps, each followed by a reconstruction onto
//! the pixel grid, and the result is scored against the original.

mod metrics;
mod report;
mod sequence;

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use metrics::{psnr, ssim};
pub use report::{emit_report, format_speedup, summary_path, BenchmarkRecord, BenchmarkReport, Summary};
pub use sequence::{build_sequence, expand_sequences, sweep_angles, TransformSequence};

use crate::error::{Error, Result};
use crate::geometry::AffineTransform;
use crate::image::Image;
use crate::kernel::kernel_warp;
use crate::mesh::{MeshSample, MeshSampleSet};
use crate::resample::{resample_mesh, Method, ResamplerConfig};

/// Default border excluded from the metrics.
pub const DEFAULT_CROP: usize = 24;

/// Forward-warped samples further than this outside the grid are dropped.
pub const MESH_PADDING: f64 = 0.5;

/// Center of the pixel grid, the anchor of every benchmark warp.
pub fn image_center(width: usize, height: usize) -> [f64; 2] {
    [(width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0]
}

/// Moves every pixel `(x, y)` of `image` to `a(x, y)`, keeping samples that
/// land within [`MESH_PADDING`] of the grid.
pub fn forward_warp(image: &Image, a: &AffineTransform) -> MeshSampleSet {
    let mut mesh =
        MeshSampleSet::new(image.width(), image.height()).expect("image dimensions are positive");
    for y in 0..image.height() {
        for x in 0..image.width() {
            let [px, py] = a.apply([x as f64, y as f64]);
            mesh.push_within(MeshSample::new(px, py, image.get(x, y)), MESH_PADDING);
        }
    }
    mesh
}

/// Accumulated reconstruction time of a sequence run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timing {
    pub elapsed: Duration,
    pub blocks: usize,
}

impl Timing {
    pub fn mean_block_ms(&self) -> f64 {
        if self.blocks == 0 {
            0.0
        } else {
            self.elapsed.as_secs_f64() * 1e3 / self.blocks as f64
        }
    }
}

/// Runs every step of `seq` on `image` with `cfg.method`. Model-based
/// methods forward-warp the current grid and reconstruct from the mesh;
/// kernel baselines inverse-map the current grid directly. Intermediate
/// grids stay real-valued.
pub fn run_sequence(
    image: &Image,
    seq: &TransformSequence,
    cfg: &ResamplerConfig,
) -> Result<(Image, Timing)> {
    cfg.validate()?;
    let center = image_center(image.width(), image.height());
    let mut current = image.clone();
    let mut timing = Timing::default();
    for step in &seq.steps {
        let a = step.about(center);
        match cfg.method.kernel() {
            None => {
                let mesh = forward_warp(&current, &a);
                let rec = resample_mesh(&mesh, cfg)?;
                timing.elapsed += rec.elapsed;
                timing.blocks += rec.blocks;
                current = rec.image;
            }
            Some(kernel) => {
                let inverse = a.invert()?;
                let start = Instant::now();
                current = kernel_warp(&current, &inverse, kernel);
                timing.elapsed += start.elapsed();
                timing.blocks +=
                    current.width().div_ceil(cfg.block) * current.height().div_ceil(cfg.block);
            }
        }
    }
    Ok((current, timing))
}

/// Named grayscale images of a dataset directory.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Vec<(String, Image)>> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "pgm" | "pnm" | "png"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{}: no PGM or PNG images found",
            dir.display()
        )));
    }
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((name, Image::load(&p)?))
        })
        .collect()
}

/// Every method × sequence × image combination, rows ordered by image, then
/// method, then sequence. Images run in parallel on the pool of `cfg`.
pub fn run_benchmark(
    images: &[(String, Image)],
    sequences: &[TransformSequence],
    methods: &[Method],
    cfg: &ResamplerConfig,
    crop: usize,
) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let inner = ResamplerConfig {
        threads: None,
        ..cfg.clone()
    };
    let rows: Vec<Result<Vec<BenchmarkRecord>>> = cfg.install(|| {
        images
            .par_iter()
            .map(|(name, img)| {
                let mut out = Vec::new();
                for &method in methods {
                    let mcfg = ResamplerConfig {
                        method,
                        ..inner.clone()
                    };
                    for seq in sequences {
                        let (result, timing) = run_sequence(img, seq, &mcfg)?;
                        out.push(BenchmarkRecord {
                            image: name.clone(),
                            method: method.to_string(),
                            sequence: seq.name.clone(),
                            psnr_db: psnr(img, &result, crop)?,
                            ssim: ssim(img, &result, crop)?,
                            block_ms: timing.mean_block_ms(),
                        });
                    }
                }
                Ok(out)
            })
            .collect()
    })?;
    let mut report = BenchmarkReport::new(crop);
    for r in rows {
        report.records.extend(r?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::StoppingConfig;

    #[test]
    fn identity_warp_lands_on_grid() {
        let img = Image::from_fn(9, 7, |x, y| (x * 10 + y) as f64).unwrap();
        let mesh = forward_warp(&img, &AffineTransform::identity());
        assert_eq!(mesh.len(), 63);
        for s in mesh.samples() {
            assert_eq!(s.x.fract(), 0.0);
            assert_eq!(s.y.fract(), 0.0);
            assert_eq!(s.value, img.get(s.x as usize, s.y as usize));
        }
    }

    #[test]
    fn zoom_fixes_center() {
        let img = Image::from_fn(9, 9, |x, y| (x + 9 * y) as f64).unwrap();
        let a = AffineTransform::zoom(1.15).unwrap().about(image_center(9, 9));
        let mesh = forward_warp(&img, &a);
        let c = mesh.samples().iter().find(|s| s.value == 40.0).unwrap();
        assert_eq!((c.x, c.y), (4.0, 4.0));
        // Zooming in pushes the outer ring off the grid.
        assert!(mesh.len() < 81);
    }

    #[test]
    fn rotated_corner_matches_trigonometry() {
        let n = 1200;
        let a = AffineTransform::rotation_degrees(30.0).about(image_center(n, n));
        let c = (n as f64 - 1.0) / 2.0;
        let (s, co) = 30f64.to_radians().sin_cos();
        let expected = [c + co * -c - s * -c, c + s * -c + co * -c];
        let got = a.apply([0.0, 0.0]);
        assert!((got[0] - expected[0]).abs() < 1e-12 && (got[1] - expected[1]).abs() < 1e-12);
    }

    #[test]
    fn identity_sequence_keeps_image_close() {
        let img = Image::from_fn(64, 64, |x, y| {
            128.0 + 60.0 * ((x as f64) * 0.21).sin() * ((y as f64) * 0.13).cos()
        })
        .unwrap();
        let cfg = ResamplerConfig {
            stopping: StoppingConfig {
                max_iterations: 300,
                min_energy_reduction: 0.0,
            },
            ..ResamplerConfig::default()
        };
        for method in Method::ALL {
            let (out, timing) = run_sequence(
                &img,
                &TransformSequence::identity(),
                &ResamplerConfig { method, ..cfg.clone() },
            )
            .unwrap();
            assert!(psnr(&img, &out, 24).unwrap() >= 40.0, "{method}");
            assert_eq!(timing.blocks, 64);
        }
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("notes.txt"), "x").unwrap();
        assert!(load_dataset(dir.path()).is_err());
        Image::filled(4, 4, 9.0).unwrap().save(dir.path().join("b.pgm")).unwrap();
        Image::filled(4, 4, 3.0).unwrap().save(dir.path().join("a.png")).unwrap();
        let names: Vec<String> = load_dataset(dir.path()).unwrap().into_iter().map(|p| p.0).collect();
        assert_eq!(names, ["a", "b"]);
    }

    #[test]
    fn benchmark_rows() {
        let img = Image::filled(56, 56, 128.0).unwrap();
        let images = vec![("flat".to_string(), img)];
        let seqs = expand_sequences("zoom15,rot15").unwrap();
        let methods = [Method::Afsmr, Method::Fsmr, Method::Bicubic];
        let cfg = ResamplerConfig {
            threads: Some(2),
            ..ResamplerConfig::default()
        };
        let report = run_benchmark(&images, &seqs, &methods, &cfg, 24).unwrap();
        assert_eq!(report.records.len(), 6);
        for r in &report.records {
            assert!(r.psnr_db == f64::INFINITY && r.ssim == 1.0, "{r:?}");
        }
    }
}
