//! Key-point estimation: intensities at integer grid positions interpolated
//! from scattered mesh samples.
//!
//! The mesh is Delaunay-triangulated and each triangle carries a
//! Clough-Tocher macro element: the triangle is split at its centroid into
//! three cubic Bézier patches, matching vertex values and gradients, with the
//! cross-edge derivative taken along the line joining adjacent centroids so
//! neighbouring triangles meet with C1 continuity. Vertex gradients come from
//! a local quadratic least-squares fit, which makes the interpolant exact for
//! quadratic data. Positions outside the convex hull take the value of the
//! nearest sample.

use spade::handles::{FixedFaceHandle, InnerTag, VertexHandle};
use spade::{DelaunayTriangulation, HasPosition, Point2, PositionInTriangulation, Triangulation};

use crate::error::{Error, Result};
use crate::mesh::MeshSample;

#[derive(Debug, Clone, Copy)]
struct Node {
    pos: Point2<f64>,
    value: f64,
}

impl HasPosition for Node {
    type Scalar = f64;

    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

/// Estimated intensities on the integer grid of one reconstruction area,
/// row-major, local coordinates `(x, y)` with `x < dims[0]`, `y < dims[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyPointSet {
    pub dims: [usize; 2],
    pub values: Vec<f64>,
}

impl KeyPointSet {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.dims[0] + x]
    }

    /// `(position, value)` pairs in row-major order.
    pub fn samples(&self) -> impl Iterator<Item = MeshSample> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| {
            MeshSample::new((i % self.dims[0]) as f64, (i / self.dims[0]) as f64, v)
        })
    }
}

/// Interpolates every integer position of an `area_dims` grid from
/// `local_mesh` (coordinates relative to the same area).
pub fn estimate_key_points(local_mesh: &[MeshSample], area_dims: [usize; 2]) -> Result<KeyPointSet> {
    let interp = ScatteredInterpolant::new(local_mesh)?;
    let [w, h] = area_dims;
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            values.push(interp.value_at(x as f64, y as f64));
        }
    }
    Ok(KeyPointSet {
        dims: area_dims,
        values,
    })
}

/// Clough-Tocher interpolant over the Delaunay triangulation of a sample set.
pub struct ScatteredInterpolant {
    tri: DelaunayTriangulation<Node>,
    gradients: Vec<[f64; 2]>,
}

impl ScatteredInterpolant {
    pub fn new(samples: &[MeshSample]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyArea);
        }
        let mut tri = DelaunayTriangulation::<Node>::new();
        for s in samples {
            // Coincident samples keep the later value.
            tri.insert(Node {
                pos: Point2::new(s.x, s.y),
                value: s.value,
            })
            .map_err(|e| Error::InvalidArgument(format!("cannot triangulate {s:?}: {e:?}")))?;
        }
        let gradients = if tri.num_inner_faces() > 0 {
            estimate_gradients(&tri)
        } else {
            vec![[0.0, 0.0]; tri.num_vertices()]
        };
        Ok(Self { tri, gradients })
    }

    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        let p = Point2::new(x, y);
        let face = match self.tri.locate(p) {
            PositionInTriangulation::OnVertex(v) => return self.tri.vertex(v).data().value,
            PositionInTriangulation::OnFace(f) => Some(f),
            PositionInTriangulation::OnEdge(e) => {
                let e = self.tri.directed_edge(e);
                e.face()
                    .as_inner()
                    .or_else(|| e.rev().face().as_inner())
                    .map(|f| f.fix())
            }
            PositionInTriangulation::OutsideOfConvexHull(_)
            | PositionInTriangulation::NoTriangulation => None,
        };
        match face {
            Some(f) => self.clough_tocher(f, [x, y]),
            None => self.nearest(p),
        }
    }

    fn nearest(&self, p: Point2<f64>) -> f64 {
        self.tri
            .nearest_neighbor(p)
            .map(|v| v.data().value)
            .unwrap_or(0.0)
    }

    fn clough_tocher(&self, face: FixedFaceHandle<InnerTag>, p: [f64; 2]) -> f64 {
        let face = self.tri.face(face);
        let verts = face.vertices();
        let pos: [[f64; 2]; 3] = verts.map(|v| [v.position().x, v.position().y]);
        let f: [f64; 3] = verts.map(|v| v.data().value);
        let grad: [[f64; 2]; 3] = verts.map(|v| self.gradients[v.fix().index()]);

        // Cross-edge direction parameter per edge, indexed by the opposite
        // vertex: -1/2 (toward the own centroid) on the hull, otherwise the
        // line through both centroids.
        let mut g = [-0.5; 3];
        for edge in face.adjacent_edges() {
            let [a, b] = [edge.from().fix(), edge.to().fix()];
            let Some(opp) = (0..3).find(|&i| verts[i].fix() != a && verts[i].fix() != b) else {
                continue;
            };
            let Some(nb) = edge.rev().face().as_inner() else {
                continue;
            };
            let np = nb.positions();
            let centroid = [
                (np[0].x + np[1].x + np[2].x) / 3.0,
                (np[0].y + np[1].y + np[2].y) / 3.0,
            ];
            let c = barycentric(&pos, centroid);
            let next = (opp + 2) % 3;
            let den = 3.0 * c[opp] - 1.0;
            if den.abs() > 1e-12 {
                g[opp] = (c[next] - c[opp]) / den;
            }
        }

        let e = |a: usize, b: usize| [pos[b][0] - pos[a][0], pos[b][1] - pos[a][1]];
        let dot = |v: [f64; 2], w: [f64; 2]| v[0] * w[0] + v[1] * w[1];
        let (e12, e23, e31) = (e(0, 1), e(1, 2), e(2, 0));
        let df12 = dot(grad[0], e12);
        let df21 = -dot(grad[1], e12);
        let df23 = dot(grad[1], e23);
        let df32 = -dot(grad[2], e23);
        let df31 = dot(grad[2], e31);
        let df13 = -dot(grad[0], e31);

        let c3000 = f[0];
        let c2100 = (df12 + 3.0 * c3000) / 3.0;
        let c2010 = (df13 + 3.0 * c3000) / 3.0;
        let c0300 = f[1];
        let c1200 = (df21 + 3.0 * c0300) / 3.0;
        let c0210 = (df23 + 3.0 * c0300) / 3.0;
        let c0030 = f[2];
        let c1020 = (df31 + 3.0 * c0030) / 3.0;
        let c0120 = (df32 + 3.0 * c0030) / 3.0;

        let c2001 = (c2100 + c2010 + c3000) / 3.0;
        let c0201 = (c1200 + c0300 + c0210) / 3.0;
        let c0021 = (c1020 + c0120 + c0030) / 3.0;

        let c0111 = (g[0] * (-c0300 + 3.0 * c0210 - 3.0 * c0120 + c0030)
            + (-c0300 + 2.0 * c0210 - c0120 + c0021 + c0201))
            / 2.0;
        let c1011 = (g[1] * (-c0030 + 3.0 * c1020 - 3.0 * c2010 + c3000)
            + (-c0030 + 2.0 * c1020 - c2010 + c2001 + c0021))
            / 2.0;
        let c1101 = (g[2] * (-c3000 + 3.0 * c2100 - 3.0 * c1200 + c0300)
            + (-c3000 + 2.0 * c2100 - c1200 + c2001 + c0201))
            / 2.0;

        let c1002 = (c1101 + c1011 + c2001) / 3.0;
        let c0102 = (c1101 + c0111 + c0201) / 3.0;
        let c0012 = (c1011 + c0111 + c0021) / 3.0;
        let c0003 = (c1002 + c0102 + c0012) / 3.0;

        // Barycentric coordinates within the sub-triangle containing p.
        let b = barycentric(&pos, p);
        let min = b[0].min(b[1]).min(b[2]);
        let (b1, b2, b3, b4) = (b[0] - min, b[1] - min, b[2] - min, 3.0 * min);

        // Offsets from a vertex value: the Bernstein weights sum to one only
        // up to rounding, and this keeps constant data exact.
        let base = c3000;
        base + b1 * b1 * b1 * (c3000 - base)
            + 3.0 * b1 * b1 * b2 * (c2100 - base)
            + 3.0 * b1 * b1 * b3 * (c2010 - base)
            + 3.0 * b1 * b1 * b4 * (c2001 - base)
            + 3.0 * b1 * b2 * b2 * (c1200 - base)
            + 6.0 * b1 * b2 * b4 * (c1101 - base)
            + 3.0 * b1 * b3 * b3 * (c1020 - base)
            + 6.0 * b1 * b3 * b4 * (c1011 - base)
            + 3.0 * b1 * b4 * b4 * (c1002 - base)
            + b2 * b2 * b2 * (c0300 - base)
            + 3.0 * b2 * b2 * b3 * (c0210 - base)
            + 3.0 * b2 * b2 * b4 * (c0201 - base)
            + 6.0 * b2 * b3 * b4 * (c0111 - base)
            + 3.0 * b2 * b3 * b3 * (c0120 - base)
            + 3.0 * b2 * b4 * b4 * (c0102 - base)
            + b3 * b3 * b3 * (c0030 - base)
            + 3.0 * b3 * b3 * b4 * (c0021 - base)
            + 3.0 * b3 * b4 * b4 * (c0012 - base)
            + b4 * b4 * b4 * (c0003 - base)
    }
}

fn barycentric(tri: &[[f64; 2]; 3], p: [f64; 2]) -> [f64; 3] {
    let [a, b, c] = *tri;
    let det = (b[1] - c[1]) * (a[0] - c[0]) + (c[0] - b[0]) * (a[1] - c[1]);
    let l1 = ((b[1] - c[1]) * (p[0] - c[0]) + (c[0] - b[0]) * (p[1] - c[1])) / det;
    let l2 = ((c[1] - a[1]) * (p[0] - c[0]) + (a[0] - c[0]) * (p[1] - c[1])) / det;
    [l1, l2, 1.0 - l1 - l2]
}

/// Per-vertex gradients from an inverse-distance-weighted quadratic fit over
/// the vertex's first and second Delaunay rings, falling back to a linear
/// fit and finally to zero when the neighbourhood is degenerate.
fn estimate_gradients(tri: &DelaunayTriangulation<Node>) -> Vec<[f64; 2]> {
    let mut grads = vec![[0.0, 0.0]; tri.num_vertices()];
    let mut ring: Vec<usize> = Vec::new();
    for v in tri.vertices() {
        ring.clear();
        collect_rings(v, &mut ring);
        let origin = v.position();
        let f0 = v.data().value;
        let diffs: Vec<([f64; 2], f64)> = ring
            .iter()
            .map(|&i| {
                let n = tri.vertex(spade::handles::FixedVertexHandle::from_index(i));
                let p = n.position();
                ([p.x - origin.x, p.y - origin.y], n.data().value - f0)
            })
            .collect();
        grads[v.fix().index()] = fit_gradient(&diffs).unwrap_or([0.0, 0.0]);
    }
    grads
}

fn collect_rings(v: VertexHandle<'_, Node>, out: &mut Vec<usize>) {
    let me = v.fix().index();
    out.extend(v.out_edges().map(|e| e.to().fix().index()));
    for e in v.out_edges() {
        for e2 in e.to().out_edges() {
            let i = e2.to().fix().index();
            if i != me && !out.contains(&i) {
                out.push(i);
            }
        }
    }
}

/// Weighted least squares for `Δf ≈ gx dx + gy dy [+ quadratic terms]`.
fn fit_gradient(diffs: &[([f64; 2], f64)]) -> Option<[f64; 2]> {
    let scale = diffs
        .iter()
        .map(|(d, _)| d[0].hypot(d[1]))
        .fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    if diffs.len() >= 5 {
        if let Some(sol) = weighted_lsq::<5>(diffs, scale, |u, v| [u, v, 0.5 * u * u, u * v, 0.5 * v * v]) {
            return Some([sol[0] / scale, sol[1] / scale]);
        }
    }
    weighted_lsq::<2>(diffs, scale, |u, v| [u, v]).map(|s| [s[0] / scale, s[1] / scale])
}

fn weighted_lsq<const N: usize>(
    diffs: &[([f64; 2], f64)],
    scale: f64,
    features: impl Fn(f64, f64) -> [f64; N],
) -> Option<[f64; N]> {
    let mut ata = [[0.0; N]; N];
    let mut atb = [0.0; N];
    for &(d, df) in diffs {
        let (u, v) = (d[0] / scale, d[1] / scale);
        let r2 = u * u + v * v;
        if r2 == 0.0 {
            continue;
        }
        let w = 1.0 / r2;
        let phi = features(u, v);
        for i in 0..N {
            atb[i] += w * phi[i] * df;
            for j in 0..N {
                ata[i][j] += w * phi[i] * phi[j];
            }
        }
    }
    solve(ata, atb)
}

/// Gaussian elimination with partial pivoting; `None` for (near-)singular
/// systems.
fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    let norm = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if !(norm > 0.0) {
        return None;
    }
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-10 * norm {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..N {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let mut s = b[row];
        for k in row + 1..N {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}
