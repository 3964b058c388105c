//! Full-reference quality metrics over a border-cropped interior.

use crate::error::{Error, Result};
use crate::image::Image;

const PEAK: f64 = 255.0;
const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = (0.01 * PEAK) * (0.01 * PEAK);
const SSIM_C2: f64 = (0.03 * PEAK) * (0.03 * PEAK);

fn interior(a: &Image, b: &Image, crop: usize) -> Result<(usize, usize)> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::InvalidArgument(format!(
            "image sizes differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    if a.width() <= 2 * crop || a.height() <= 2 * crop {
        return Err(Error::InvalidArgument(format!(
            "{}x{} image has no interior after a {crop}-pixel crop",
            a.width(),
            a.height()
        )));
    }
    Ok((a.width() - 2 * crop, a.height() - 2 * crop))
}

fn cropped(img: &Image, crop: usize, w: usize, h: usize) -> Vec<f64> {
    (0..h)
        .flat_map(|y| (0..w).map(move |x| (x + crop, y + crop)))
        .map(|(x, y)| img.get(x, y))
        .collect()
}

/// Peak signal-to-noise ratio in dB for 8-bit peak 255, computed on real
/// intensities. Identical interiors give `f64::INFINITY`.
pub fn psnr(a: &Image, b: &Image, crop: usize) -> Result<f64> {
    let (w, h) = interior(a, b, crop)?;
    let mut sum = 0.0;
    for y in crop..crop + h {
        for x in crop..crop + w {
            let d = a.get(x, y) - b.get(x, y);
            sum += d * d;
        }
    }
    let mse = sum / (w * h) as f64;
    Ok(if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    })
}

fn gaussian_window() -> Vec<f64> {
    let c = (SSIM_WINDOW / 2) as f64;
    let g: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp())
        .collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|v| v / s).collect()
}

/// Valid-mode separable filtering of a `w × h` buffer.
fn filter(src: &[f64], w: usize, h: usize, g: &[f64]) -> Vec<f64> {
    let k = g.len();
    let (ow, oh) = (w + 1 - k, h + 1 - k);
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let line = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = g.iter().zip(&line[x..x + k]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..k).map(|i| g[i] * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

fn ssim_index(ma: f64, mb: f64, saa: f64, sbb: f64, sab: f64) -> f64 {
    let va = saa - ma * ma;
    let vb = sbb - mb * mb;
    let cov = sab - ma * mb;
    ((2.0 * ma * mb + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((ma * ma + mb * mb + SSIM_C1) * (va + vb + SSIM_C2))
}

/// Mean structural similarity over all 11×11 Gaussian windows (σ = 1.5)
/// lying fully inside the cropped interior. An interior smaller than one
/// window is scored as a single uniformly weighted window.
pub fn ssim(a: &Image, b: &Image, crop: usize) -> Result<f64> {
    let (w, h) = interior(a, b, crop)?;
    let pa = cropped(a, crop, w, h);
    let pb = cropped(b, crop, w, h);
    let aa: Vec<f64> = pa.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = pb.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        let n = (w * h) as f64;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
        return Ok(ssim_index(mean(&pa), mean(&pb), mean(&aa), mean(&bb), mean(&ab)));
    }
    let g = gaussian_window();
    let [ma, mb, saa, sbb, sab] = [&pa, &pb, &aa, &bb, &ab].map(|v| filter(v, w, h, &g));
    let total: f64 = (0..ma.len())
        .map(|i| ssim_index(ma[i], mb[i], saa[i], sbb[i], sab[i]))
        .sum();
    Ok(total / ma.len() as f64)
}
