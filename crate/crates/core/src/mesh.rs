//! Scattered samples at real-valued positions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSample {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

impl MeshSample {
    pub fn new(x: f64, y: f64, value: f64) -> Self {
        Self { x, y, value }
    }
}

/// Mesh samples destined for a `width × height` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSampleSet {
    samples: Vec<MeshSample>,
    width: usize,
    height: usize,
}

impl MeshSampleSet {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::from_samples(width, height, Vec::new())
    }

    pub fn from_samples(width: usize, height: usize, samples: Vec<MeshSample>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        if let Some(s) = samples
            .iter()
            .find(|s| !(s.x.is_finite() && s.y.is_finite() && s.value.is_finite()))
        {
            return Err(Error::InvalidArgument(format!("non-finite sample {s:?}")));
        }
        Ok(Self {
            samples,
            width,
            height,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[MeshSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Adds a sample if it lies within the grid padded by `support` pixels.
    /// Returns whether it was kept.
    pub fn push_within(&mut self, sample: MeshSample, support: f64) -> bool {
        if !(sample.x.is_finite() && sample.y.is_finite() && sample.value.is_finite()) {
            return false;
        }
        let inside = sample.x >= -support
            && sample.y >= -support
            && sample.x <= (self.width - 1) as f64 + support
            && sample.y <= (self.height - 1) as f64 + support;
        if inside {
            self.samples.push(sample);
        }
        inside
    }

    /// Reads a CSV with header `x,y,value`.
    pub fn read_csv(path: impl AsRef<Path>, width: usize, height: usize) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
        let headers = rdr.headers().map_err(|e| Error::format(path, e))?;
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["x", "y", "value"] {
            return Err(Error::format(path, "expected header `x,y,value`"));
        }
        let mut samples = Vec::new();
        for row in rdr.deserialize() {
            let s: MeshSample = row.map_err(|e| Error::format(path, e))?;
            samples.push(s);
        }
        Self::from_samples(width, height, samples).map_err(|e| Error::format(path, e))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e))?;
        // An empty mesh still gets its header row.
        if self.samples.is_empty() {
            w.write_record(["x", "y", "value"])
                .map_err(|e| Error::format(path, e))?;
        }
        for s in &self.samples {
            w.serialize(s).map_err(|e| Error::format(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_bounds() {
        let mut m = MeshSampleSet::new(10, 10).unwrap();
        assert!(m.push_within(MeshSample::new(-8.0, 0.0, 1.0), 8.0));
        assert!(!m.push_within(MeshSample::new(-8.01, 0.0, 1.0), 8.0));
        assert!(m.push_within(MeshSample::new(17.0, 17.0, 1.0), 8.0));
        assert!(!m.push_within(MeshSample::new(17.0, 17.5, 1.0), 8.0));
        assert!(!m.push_within(MeshSample::new(f64::NAN, 1.0, 1.0), 8.0));
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let m = MeshSampleSet::from_samples(
            4,
            4,
            vec![MeshSample::new(0.25, 1.5, 17.0), MeshSample::new(3.125, -0.5, 255.0)],
        )
        .unwrap();
        m.write_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x,y,value\n"));
        assert_eq!(MeshSampleSet::read_csv(&p, 4, 4).unwrap(), m);

        let empty = MeshSampleSet::new(4, 4).unwrap();
        empty.write_csv(&p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "x,y,value\n");
        assert!(MeshSampleSet::read_csv(&p, 4, 4).unwrap().is_empty());
    }

    #[test]
    fn csv_bad_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, "a,b,c\n1,2,3\n").unwrap();
        assert!(matches!(
            MeshSampleSet::read_csv(&p, 4, 4),
            Err(Error::Format { .. })
        ));
    }
}
