//! Partition of the output grid into blocks with overlapping support areas.

use crate::error::{Error, Result};
use crate::mesh::{MeshSample, MeshSampleSet};

/// One output block and its reconstruction area.
///
/// The area is the block dilated by the support width and clipped to the
/// image. Local samples are stored relative to `area_origin`; membership is
/// half-open, `area_origin <= p < area_origin + area_dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockContext {
    pub block_origin: [usize; 2],
    pub block_dims: [usize; 2],
    pub area_origin: [usize; 2],
    pub area_dims: [usize; 2],
    pub local_mesh: Vec<MeshSample>,
    pub local_key_points: Vec<MeshSample>,
}

impl BlockContext {
    /// Block origin relative to the area.
    pub fn block_offset(&self) -> [usize; 2] {
        [
            self.block_origin[0] - self.area_origin[0],
            self.block_origin[1] - self.area_origin[1],
        ]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let [ox, oy] = self.area_origin;
        let [w, h] = self.area_dims;
        x >= ox as f64 && x < (ox + w) as f64 && y >= oy as f64 && y < (oy + h) as f64
    }

    fn to_local(&self, s: &MeshSample) -> MeshSample {
        MeshSample {
            x: s.x - self.area_origin[0] as f64,
            y: s.y - self.area_origin[1] as f64,
            value: s.value,
        }
    }
}

/// Tiles a `width × height` grid with `block`-sized output blocks in
/// row-major order. Blocks on the right and bottom edges are truncated when
/// the dimensions are not multiples of `block`.
pub fn partition_blocks(
    width: usize,
    height: usize,
    block: usize,
    support: usize,
) -> Result<Vec<BlockContext>> {
    if width == 0 || height == 0 || block == 0 {
        return Err(Error::InvalidArgument(format!(
            "block partition needs positive sizes, got {width}x{height} with block {block}"
        )));
    }
    if width < block || height < block {
        return Err(Error::InvalidArgument(format!(
            "image {width}x{height} is smaller than one {block}x{block} block"
        )));
    }
    let mut blocks = Vec::with_capacity(width.div_ceil(block) * height.div_ceil(block));
    for by in (0..height).step_by(block) {
        for bx in (0..width).step_by(block) {
            let bw = block.min(width - bx);
            let bh = block.min(height - by);
            let ax = bx.saturating_sub(support);
            let ay = by.saturating_sub(support);
            let ax_end = (bx + bw + support).min(width);
            let ay_end = (by + bh + support).min(height);
            blocks.push(BlockContext {
                block_origin: [bx, by],
                block_dims: [bw, bh],
                area_origin: [ax, ay],
                area_dims: [ax_end - ax, ay_end - ay],
                local_mesh: Vec::new(),
                local_key_points: Vec::new(),
            });
        }
    }
    Ok(blocks)
}

/// Attaches the mesh samples inside `ctx`'s area, rebased to the area
/// origin, in mesh order.
pub fn gather_local_samples(mesh: &MeshSampleSet, ctx: &BlockContext) -> BlockContext {
    let mut out = ctx.clone();
    out.local_mesh = mesh
        .samples()
        .iter()
        .filter(|s| ctx.contains(s.x, s.y))
        .map(|s| ctx.to_local(s))
        .collect();
    out
}

/// Fills `local_mesh` for every block at once using a spatial bin index.
/// Produces exactly what [`gather_local_samples`] would for each block.
pub fn gather_all(mesh: &MeshSampleSet, blocks: &mut [BlockContext], cell: usize) {
    let cell = cell.max(1);
    let (w, h) = (mesh.width(), mesh.height());
    let cols = w.div_ceil(cell);
    let rows = h.div_ceil(cell);
    let mut bins: Vec<Vec<u32>> = vec![Vec::new(); cols * rows];
    for (i, s) in mesh.samples().iter().enumerate() {
        if s.x >= 0.0 && s.y >= 0.0 && s.x < w as f64 && s.y < h as f64 {
            let cx = ((s.x as usize) / cell).min(cols - 1);
            let cy = ((s.y as usize) / cell).min(rows - 1);
            bins[cy * cols + cx].push(i as u32);
        }
    }
    let samples = mesh.samples();
    let mut idx = Vec::new();
    for ctx in blocks.iter_mut() {
        let [ox, oy] = ctx.area_origin;
        let [aw, ah] = ctx.area_dims;
        idx.clear();
        for cy in oy / cell..=((oy + ah - 1) / cell).min(rows - 1) {
            for cx in ox / cell..=((ox + aw - 1) / cell).min(cols - 1) {
                idx.extend(
                    bins[cy * cols + cx]
                        .iter()
                        .copied()
                        .filter(|&i| ctx.contains(samples[i as usize].x, samples[i as usize].y)),
                );
            }
        }
        idx.sort_unstable();
        ctx.local_mesh = idx.iter().map(|&i| ctx.to_local(&samples[i as usize])).collect();
    }
}
