use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::AffineTransform;

/// Shear-and-stretch pair of the affine sequence.
const T1: [[f64; 2]; 2] = [[1.2, 0.1954], [0.0, 1.0]];
const T2: [[f64; 2]; 2] = [[1.0, 0.0], [0.1954, 1.2]];
const ZOOM: f64 = 1.15;

/// Angles of the rotation sweep, in degrees.
pub fn sweep_angles() -> impl Iterator<Item = f64> {
    (0..=12).map(|i| 10.0 + 2.5 * i as f64)
}

/// An ordered list of warps whose composition is the identity, so the
/// final reconstruction lines up with the input. Steps are linear maps
/// about the origin; the harness anchors them at the image center.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSequence {
    pub name: String,
    pub steps: Vec<AffineTransform>,
}

impl TransformSequence {
    pub fn rotation(degrees: f64) -> Self {
        Self {
            name: format!("rot{degrees}"),
            steps: vec![
                AffineTransform::rotation_degrees(degrees),
                AffineTransform::rotation_degrees(-degrees),
            ],
        }
    }

    pub fn zoom15() -> Self {
        let z = AffineTransform::zoom(ZOOM).expect("non-singular");
        Self {
            name: "zoom15".into(),
            steps: vec![z, z.invert().expect("non-singular")],
        }
    }

    pub fn affine4() -> Self {
        let t1 = AffineTransform::new(T1, [0.0; 2]).expect("non-singular");
        let t2 = AffineTransform::new(T2, [0.0; 2]).expect("non-singular");
        Self {
            name: "affine4".into(),
            steps: vec![
                t2.invert().expect("non-singular"),
                t1,
                t1.invert().expect("non-singular"),
                t2,
            ],
        }
    }

    pub fn identity() -> Self {
        Self {
            name: "identity".into(),
            steps: vec![AffineTransform::identity()],
        }
    }

    /// All steps chained in order.
    pub fn composition(&self) -> AffineTransform {
        self.steps
            .iter()
            .fold(AffineTransform::identity(), |acc, s| s.after(&acc))
    }
}

impl fmt::Display for TransformSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Parses one sequence name: `zoom15`, `affine4` (or `affine`),
/// `identity`, or a rotation written `rot30`, `rot12.5` or `rotation(30)`.
pub fn build_sequence(name: &str) -> Result<TransformSequence> {
    let name = name.trim();
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "zoom15" | "zoom" => return Ok(TransformSequence::zoom15()),
        "affine4" | "affine" => return Ok(TransformSequence::affine4()),
        "identity" => return Ok(TransformSequence::identity()),
        _ => {}
    }
    let angle = lower
        .strip_prefix("rotation(")
        .and_then(|s| s.strip_suffix(')'))
        .or_else(|| lower.strip_prefix("rotation"))
        .or_else(|| lower.strip_prefix("rot"))
        .map(|s| s.trim().trim_end_matches("deg"));
    match angle.map(str::parse::<f64>) {
        Some(Ok(deg)) if deg.is_finite() => Ok(TransformSequence::rotation(deg)),
        _ => Err(Error::InvalidArgument(format!("unknown sequence `{name}`"))),
    }
}

/// Expands a comma-separated list; `rotation-sweep` stands for the thirteen
/// rotations from 10° to 40°.
pub fn expand_sequences(list: &str) -> Result<Vec<TransformSequence>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("rotation-sweep") {
            out.extend(sweep_angles().map(TransformSequence::rotation));
        } else {
            out.push(build_sequence(item)?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no sequences given".into()));
    }
    Ok(out)
}
