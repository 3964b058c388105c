//! Separable kernel interpolation baselines applied by inverse mapping.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::AffineTransform;
use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Bilinear,
    /// Keys cubic convolution with `a = -0.5` (Catmull-Rom).
    Bicubic,
    /// Windowed sinc with three lobes.
    Lanczos,
}

const CUBIC_A: f64 = -0.5;
const LANCZOS_LOBES: f64 = 3.0;

impl Kernel {
    /// Half-width of the kernel's support in pixels.
    pub fn radius(self) -> isize {
        match self {
            Kernel::Bilinear => 1,
            Kernel::Bicubic => 2,
            Kernel::Lanczos => 3,
        }
    }

    pub fn weight(self, d: f64) -> f64 {
        let d = d.abs();
        match self {
            Kernel::Bilinear => (1.0 - d).max(0.0),
            Kernel::Bicubic => {
                let a = CUBIC_A;
                if d <= 1.0 {
                    ((a + 2.0) * d - (a + 3.0)) * d * d + 1.0
                } else if d < 2.0 {
                    ((a * d - 5.0 * a) * d + 8.0 * a) * d - 4.0 * a
                } else {
                    0.0
                }
            }
            Kernel::Lanczos => {
                if d == 0.0 {
                    1.0
                } else if d < LANCZOS_LOBES {
                    let px = PI * d;
                    LANCZOS_LOBES * px.sin() * (px / LANCZOS_LOBES).sin() / (px * px)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Bilinear => "bilinear",
            Kernel::Bicubic => "bicubic",
            Kernel::Lanczos => "lanczos",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bilinear" | "linear" => Ok(Kernel::Bilinear),
            "bicubic" | "cubic" => Ok(Kernel::Bicubic),
            "lanczos" | "lanczos3" => Ok(Kernel::Lanczos),
            _ => Err(Error::InvalidArgument(format!("unknown kernel `{s}`"))),
        }
    }
}

/// Tap positions and normalized weights along one axis. At integer
/// positions this is the single source sample with weight 1.
fn taps(kernel: Kernel, pos: f64, len: usize, out: &mut Vec<(usize, f64)>) {
    out.clear();
    let base = pos.floor();
    let frac = pos - base;
    let last = len as isize - 1;
    let base = base as isize;
    if frac == 0.0 {
        out.push((base.clamp(0, last) as usize, 1.0));
        return;
    }
    let r = kernel.radius();
    for i in (base - r + 1)..=(base + r) {
        let w = kernel.weight(pos - i as f64);
        if w != 0.0 {
            out.push((i.clamp(0, last) as usize, w));
        }
    }
}

/// Resamples `source` on its own grid: target pixel `(x, y)` takes the
/// kernel-interpolated source value at `inverse(x, y)`. Outside the source
/// the nearest edge pixel is repeated. Weights are normalized so constant
/// images stay constant.
pub fn kernel_warp(source: &Image, inverse: &AffineTransform, kernel: Kernel) -> Image {
    let (w, h) = (source.width(), source.height());
    let mut out = vec![0.0; w * h];
    let mut tx = Vec::with_capacity(8);
    let mut ty = Vec::with_capacity(8);
    for y in 0..h {
        for x in 0..w {
            let [sx, sy] = inverse.apply([x as f64, y as f64]);
            out[y * w + x] = if sx.is_finite() && sy.is_finite() {
                taps(kernel, sx, w, &mut tx);
                taps(kernel, sy, h, &mut ty);
                sample(source, &tx, &ty)
            } else {
                0.0
            };
        }
    }
    Image::new(w, h, out).expect("dimensions taken from a valid image")
}

/// Weighted mean of the taps, taken as an offset from the first tap so that
/// flat neighbourhoods come out exactly.
fn sample(source: &Image, tx: &[(usize, f64)], ty: &[(usize, f64)]) -> f64 {
    let base = source.get(tx[0].0, ty[0].0);
    let wx: f64 = tx.iter().map(|t| t.1).sum();
    let wy: f64 = ty.iter().map(|t| t.1).sum();
    let mut acc = 0.0;
    for &(row, wr) in ty {
        let line: f64 = tx
            .iter()
            .map(|&(col, wc)| wc * (source.get(col, row) - base))
            .sum();
        acc += wr * (line / wx);
    }
    base + acc / wy
}
