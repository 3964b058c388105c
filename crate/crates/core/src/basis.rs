//! 2-D DCT-II basis functions evaluated at real-valued positions.
//!
//! `φ(k,l)(x, y) = cos(π k (2x + 1) / 2M) · cos(π l (2y + 1) / 2N)`, without
//! normalization (`φ(0,0) ≡ 1`). On the integer grid of an `M × N` area these
//! are the usual DCT-II basis images.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Horizontal and vertical frequency index `(k, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Freq {
    pub k: usize,
    pub l: usize,
}

impl Freq {
    pub const DC: Freq = Freq { k: 0, l: 0 };

    pub fn new(k: usize, l: usize) -> Self {
        Self { k, l }
    }

    pub fn radius_sq(self) -> usize {
        self.k * self.k + self.l * self.l
    }
}

/// Dictionary of an `m × n` reconstruction area: every `(k, l)` with
/// `k < m`, `l < n`. Frequencies are indexed `k * n + l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    m: usize,
    n: usize,
}

impl BasisSpec {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "basis dimensions must be positive, got {m}x{n}"
            )));
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, f: Freq) -> usize {
        f.k * self.n + f.l
    }

    #[inline]
    pub fn freq(&self, index: usize) -> Freq {
        Freq::new(index / self.n, index % self.n)
    }

    pub fn freqs(&self) -> impl Iterator<Item = Freq> + '_ {
        (0..self.len()).map(|j| self.freq(j))
    }
}

#[inline]
pub(crate) fn dct_cos(k: usize, x: f64, m: usize) -> f64 {
    (PI * k as f64 * (2.0 * x + 1.0) / (2 * m) as f64).cos()
}

/// `φ(k,l)` at `(x, y)` for an `m × n` area.
pub fn eval_basis(k: usize, l: usize, x: f64, y: f64, m: usize, n: usize) -> Result<f64> {
    if k >= m || l >= n {
        return Err(Error::InvalidArgument(format!(
            "frequency ({k}, {l}) outside {m}x{n} dictionary"
        )));
    }
    Ok(dct_cos(k, x, m) * dct_cos(l, y, n))
}

/// Basis values for a fixed point set, stored in separable form: one row of
/// horizontal cosines and one row of vertical cosines per point. Entry
/// `(i, j)` is the product of the two, bit-identical to [`eval_basis`].
#[derive(Debug, Clone)]
pub struct BasisTable {
    spec: BasisSpec,
    freqs: Vec<Freq>,
    points: usize,
    cos_x: Vec<f64>,
    cos_y: Vec<f64>,
}

impl BasisTable {
    /// Table over the full dictionary of `spec`.
    pub fn build(points: &[[f64; 2]], spec: BasisSpec) -> Self {
        Self::build_for(points, spec, spec.freqs().collect())
    }

    /// Table restricted to `freqs` (which may be empty).
    pub fn build_for(points: &[[f64; 2]], spec: BasisSpec, freqs: Vec<Freq>) -> Self {
        let (m, n) = (spec.m, spec.n);
        let mut cos_x = Vec::with_capacity(points.len() * m);
        let mut cos_y = Vec::with_capacity(points.len() * n);
        for &[x, y] in points {
            cos_x.extend((0..m).map(|k| dct_cos(k, x, m)));
            cos_y.extend((0..n).map(|l| dct_cos(l, y, n)));
        }
        Self {
            spec,
            freqs,
            points: points.len(),
            cos_x,
            cos_y,
        }
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn freqs(&self) -> &[Freq] {
        &self.freqs
    }

    pub fn rows(&self) -> usize {
        self.points
    }

    pub fn cols(&self) -> usize {
        self.freqs.len()
    }

    /// Value of the `col`-th tabulated frequency at point `row`.
    #[inline]
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.at(row, self.freqs[col])
    }

    /// `φ(f)` at point `row`; `f` need not be among the tabulated columns.
    #[inline]
    pub fn at(&self, row: usize, f: Freq) -> f64 {
        self.cos_x[row * self.spec.m + f.k] * self.cos_y[row * self.spec.n + f.l]
    }

    /// Horizontal cosines `cos(π k (2x_i+1) / 2M)` of point `row`, `k < M`.
    #[inline]
    pub fn cos_x(&self, row: usize) -> &[f64] {
        &self.cos_x[row * self.spec.m..(row + 1) * self.spec.m]
    }

    #[inline]
    pub fn cos_y(&self, row: usize) -> &[f64] {
        &self.cos_y[row * self.spec.n..(row + 1) * self.spec.n]
    }

    /// Row-major `rows × cols` matrix of all tabulated values.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.points {
            out.extend(self.freqs.iter().map(|&f| self.at(i, f)));
        }
        out
    }
}
