//! Grayscale raster with a real-valued working buffer.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};

use crate::error::{Error, Result};

/// Row-major grayscale image. Intensities are kept as unclamped reals while
/// processing and quantized to 8 bit only on export.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "expected {} intensities for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn from_u8(width: usize, height: usize, pixels: &[u8]) -> Result<Self> {
        Self::new(width, height, pixels.iter().map(|&p| p as f64).collect())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Reads an 8-bit image (PGM/PNM, PNG). Color inputs are reduced to luma.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::ImageReader::open(path)
            .map_err(|e| Error::io(path, e))?
            .with_guessed_format()
            .map_err(|e| Error::io(path, e))?
            .decode()
            .map_err(|e| Error::format(path, e))?;
        let luma = img.to_luma8();
        let (w, h) = luma.dimensions();
        Self::from_u8(w as usize, h as usize, luma.as_raw())
    }

    /// Intensities clamped to `[0, 255]` and rounded half away from zero.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }

    /// Same image after an 8-bit export/import round trip.
    pub fn quantized(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| quantize(v) as f64).collect(),
        }
    }

    /// Writes binary PGM (`.pgm`/`.pnm`) or PNG (anything else).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let out = BufWriter::new(file);
        let pixels = self.to_u8();
        let (w, h) = (self.width as u32, self.height as u32);
        let is_pnm = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| matches!(e.to_ascii_lowercase().as_str(), "pgm" | "pnm"))
            .unwrap_or(false);
        let res = if is_pnm {
            PnmEncoder::new(out)
                .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
                .write_image(&pixels, w, h, ExtendedColorType::L8)
        } else {
            PngEncoder::new(out).write_image(&pixels, w, h, ExtendedColorType::L8)
        };
        res.map_err(|e| Error::format(path, e))
    }
}

#[inline]
pub fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.clamp(0.0, 255.0).round() as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty() {
        assert!(Image::new(0, 4, vec![]).is_err());
        assert!(Image::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn export_clamps_and_rounds() {
        let img = Image::new(6, 1, vec![-3.0, 0.5, 1.49, 254.5, 300.0, 127.5]).unwrap();
        assert_eq!(img.to_u8(), vec![0, 1, 1, 255, 255, 128]);
    }

    #[test]
    fn pgm_and_png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::from_fn(7, 5, |x, y| (x * 30 + y * 7) as f64).unwrap();
        for name in ["a.pgm", "a.png"] {
            let p = dir.path().join(name);
            img.save(&p).unwrap();
            let back = Image::load(&p).unwrap();
            assert_eq!(back, img);
        }
        let raw = std::fs::read(dir.path().join("a.pgm")).unwrap();
        assert_eq!(&raw[..2], b"P5");
    }
}
