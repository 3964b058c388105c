//! Affine transforms `y = T x + t` on pixel coordinates.
//!
//! Pixel `(m, n)` sits at the point `(x, y) = (m, n)`: column first, row
//! second, integer coordinates at pixel centers.

use crate::error::{Error, Result};

/// Smallest `|det T|` accepted as invertible.
pub const MIN_DETERMINANT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTransform {
    matrix: [[f64; 2]; 2],
    translation: [f64; 2],
}

impl AffineTransform {
    /// Builds `y = matrix * x + translation`, rejecting singular matrices.
    pub fn new(matrix: [[f64; 2]; 2], translation: [f64; 2]) -> Result<Self> {
        let det = determinant(&matrix);
        if !det.is_finite() || det.abs() <= MIN_DETERMINANT {
            return Err(Error::SingularTransform { det });
        }
        if translation.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite translation {translation:?}"
            )));
        }
        Ok(Self {
            matrix,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            matrix: [[1.0, 0.0], [0.0, 1.0]],
            translation: [0.0, 0.0],
        }
    }

    /// Counter-clockwise rotation (in the x-right, y-down pixel frame this
    /// turns the image clockwise on screen) about the origin.
    pub fn rotation_degrees(degrees: f64) -> Self {
        let (s, c) = degrees.to_radians().sin_cos();
        Self {
            matrix: [[c, -s], [s, c]],
            translation: [0.0, 0.0],
        }
    }

    /// Isotropic scaling about the origin.
    pub fn zoom(factor: f64) -> Result<Self> {
        Self::new([[factor, 0.0], [0.0, factor]], [0.0, 0.0])
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.matrix
    }

    pub fn translation(&self) -> [f64; 2] {
        self.translation
    }

    pub fn determinant(&self) -> f64 {
        determinant(&self.matrix)
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.matrix;
        [
            a * p[0] + b * p[1] + self.translation[0],
            c * p[0] + d * p[1] + self.translation[1],
        ]
    }

    /// The inverse map `x = T⁻¹ y − T⁻¹ t`.
    pub fn invert(&self) -> Result<Self> {
        let det = self.determinant();
        if !det.is_finite() || det.abs() <= MIN_DETERMINANT {
            return Err(Error::SingularTransform { det });
        }
        let [[a, b], [c, d]] = self.matrix;
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let [tx, ty] = self.translation;
        let translation = [
            -(inv[0][0] * tx + inv[0][1] * ty),
            -(inv[1][0] * tx + inv[1][1] * ty),
        ];
        Ok(Self {
            matrix: inv,
            translation,
        })
    }

    /// `self` applied after `first`, i.e. `p ↦ self(first(p))`.
    pub fn after(&self, first: &AffineTransform) -> AffineTransform {
        let m = mat_mul(&self.matrix, &first.matrix);
        let [tx, ty] = self.apply(first.translation);
        AffineTransform {
            matrix: m,
            translation: [tx, ty],
        }
    }

    /// The same linear map anchored at `center` instead of the origin.
    pub fn about(&self, center: [f64; 2]) -> AffineTransform {
        let [[a, b], [c, d]] = self.matrix;
        let [cx, cy] = center;
        AffineTransform {
            matrix: self.matrix,
            translation: [
                self.translation[0] + cx - (a * cx + b * cy),
                self.translation[1] + cy - (c * cx + d * cy),
            ],
        }
    }

    /// Largest absolute deviation of any matrix or translation entry from
    /// the identity transform.
    pub fn distance_from_identity(&self) -> f64 {
        let [[a, b], [c, d]] = self.matrix;
        [
            (a - 1.0).abs(),
            b.abs(),
            c.abs(),
            (d - 1.0).abs(),
            self.translation[0].abs(),
            self.translation[1].abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn determinant(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn mat_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}
