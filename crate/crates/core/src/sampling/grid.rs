use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{Correspondence, ImageSizes};

use super::SamplingError;

/// Cell divisions per axis, finest first.
pub const GRID_LAYERS: [u32; 5] = [16, 8, 4, 2, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CellRange {
    start: u32,
    len: u32,
}

/// One uniform 4D grid with δ cells per axis.
#[derive(Debug, Clone)]
pub struct GridLayer {
    delta: u32,
    cells: HashMap<u32, CellRange>,
    members: Vec<u32>,
    cell_of: Vec<u32>,
}

impl GridLayer {
    fn build(delta: u32, points: &[Correspondence], sizes: &ImageSizes) -> Self {
        let cell_of: Vec<u32> = points
            .iter()
            .map(|p| pack(delta, cell_coordinates(delta, p, sizes)))
            .collect();

        let mut cells: HashMap<u32, CellRange> = HashMap::new();
        for &key in &cell_of {
            cells.entry(key).or_insert(CellRange { start: 0, len: 0 }).len += 1;
        }
        let mut offset = 0;
        for range in cells.values_mut() {
            range.start = offset;
            offset += range.len;
            range.len = 0;
        }
        let mut members = vec![0u32; points.len()];
        for (i, key) in cell_of.iter().enumerate() {
            let range = cells.get_mut(key).expect("counted above");
            members[(range.start + range.len) as usize] = i as u32;
            range.len += 1;
        }
        Self {
            delta,
            cells,
            members,
            cell_of,
        }
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Σ(G_δ, p_i): every point sharing p_i's cell, p_i included, in index order.
    pub fn cell_of_point(&self, i: usize) -> &[u32] {
        self.cell(self.cell_of[i])
    }

    /// Packed cell key of point `i`.
    pub fn key_of(&self, i: usize) -> u32 {
        self.cell_of[i]
    }

    fn cell(&self, key: u32) -> &[u32] {
        match self.cells.get(&key) {
            Some(r) => &self.members[r.start as usize..(r.start + r.len) as usize],
            None => &[],
        }
    }

    /// Points in the cell with the given coordinates.
    pub fn cell_at(&self, coordinates: [u32; 4]) -> &[u32] {
        if coordinates.iter().any(|&c| c >= self.delta) {
            return &[];
        }
        self.cell(pack(self.delta, coordinates))
    }
}

/// Stacked 4D grids over the joint correspondence space.
#[derive(Debug, Clone)]
pub struct MultiLayerGrid {
    sizes: ImageSizes,
    layers: Vec<GridLayer>,
}

impl MultiLayerGrid {
    pub fn new(points: &[Correspondence], sizes: ImageSizes) -> Result<Self, SamplingError> {
        if !sizes.is_valid() {
            return Err(SamplingError::DomainError("image sizes must be positive"));
        }
        let layers = GRID_LAYERS
            .iter()
            .map(|&d| GridLayer::build(d, points, &sizes))
            .collect();
        Ok(Self { sizes, layers })
    }

    pub fn sizes(&self) -> &ImageSizes {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.layers[0].cell_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Layers ordered finest (δ = 16) to coarsest (δ = 1).
    pub fn layers(&self) -> &[GridLayer] {
        &self.layers
    }

    pub fn layer(&self, delta: u32) -> Option<&GridLayer> {
        self.layers.iter().find(|l| l.delta == delta)
    }

    /// Index into `layers()` of the finest layer whose cell around `i` holds
    /// at least `required` points other than `i`; the coarsest layer when
    /// none does.
    pub fn select_layer(&self, i: usize, required: usize) -> usize {
        self.layers
            .iter()
            .position(|l| l.cell_of_point(i).len() > required)
            .unwrap_or(self.layers.len() - 1)
    }
}

/// (⌊u₁δ/w₁⌋, ⌊v₁δ/h₁⌋, ⌊u₂δ/w₂⌋, ⌊v₂δ/h₂⌋) clamped to [0, δ−1].
pub fn cell_coordinates(delta: u32, p: &Correspondence, sizes: &ImageSizes) -> [u32; 4] {
    let axis = |value: f64, extent: f64| -> u32 {
        let c = (value * delta as f64 / extent).floor();
        if c >= 0.0 {
            (c as u32).min(delta - 1)
        } else {
            0
        }
    };
    [
        axis(p.u1, sizes.width1),
        axis(p.v1, sizes.height1),
        axis(p.u2, sizes.width2),
        axis(p.v2, sizes.height2),
    ]
}

fn pack(delta: u32, c: [u32; 4]) -> u32 {
    c[0] + delta * (c[1] + delta * (c[2] + delta * c[3]))
}
