//! Two-view domain types, Hartley conditioning, minimal and weighted solvers
//! for homographies and fundamental matrices, and point-to-model residuals.

mod fundamental;
mod homography;
mod linalg;
mod normalize;
mod residual;

pub use fundamental::{solve_fundamental_minimal, solve_fundamental_weighted};
pub use homography::{solve_homography_minimal, solve_homography_weighted};
pub use normalize::{normalize_points, NormalizationTransform};
pub use residual::{residual, PreparedModel};

use nalgebra::{Matrix3, Vector3};
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("degenerate input configuration")]
    DegenerateInput,
    #[error("model is not invertible")]
    NonInvertibleModel,
    #[error("expected {expected} correspondences, got {actual}")]
    WrongSampleSize { expected: usize, actual: usize },
    #[error("weights must be finite and nonnegative, one per point")]
    InvalidWeights,
}

/// A point in the first image matched to a point in the second image, in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub u1: f64,
    pub v1: f64,
    pub u2: f64,
    pub v2: f64,
}

impl Correspondence {
    pub const fn new(u1: f64, v1: f64, u2: f64, v2: f64) -> Self {
        Self { u1, v1, u2, v2 }
    }

    pub fn first(&self) -> Vector3<f64> {
        Vector3::new(self.u1, self.v1, 1.0)
    }

    pub fn second(&self) -> Vector3<f64> {
        Vector3::new(self.u2, self.v2, 1.0)
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.v1.is_finite() && self.u2.is_finite() && self.v2.is_finite()
    }

    /// Euclidean distance in the joint 4D correspondence space.
    pub fn distance4(&self, other: &Correspondence) -> f64 {
        self.distance4_squared(other).sqrt()
    }

    pub fn distance4_squared(&self, other: &Correspondence) -> f64 {
        let du1 = self.u1 - other.u1;
        let dv1 = self.v1 - other.v1;
        let du2 = self.u2 - other.u2;
        let dv2 = self.v2 - other.v2;
        du1 * du1 + dv1 * dv1 + du2 * du2 + dv2 * dv2
    }
}

/// Widths and heights of the two images, in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSizes {
    pub width1: f64,
    pub height1: f64,
    pub width2: f64,
    pub height2: f64,
}

impl ImageSizes {
    pub const fn new(width1: f64, height1: f64, width2: f64, height2: f64) -> Self {
        Self {
            width1,
            height1,
            width2,
            height2,
        }
    }

    /// Same size for both images.
    pub const fn square(width: f64, height: f64) -> Self {
        Self::new(width, height, width, height)
    }

    pub fn is_valid(&self) -> bool {
        [self.width1, self.height1, self.width2, self.height2]
            .iter()
            .all(|s| s.is_finite() && *s > 0.0)
    }

    pub fn first_diagonal(&self) -> f64 {
        self.width1.hypot(self.height1)
    }

    /// Diagonal of the 4D box spanned by both images.
    pub fn joint_diagonal(&self) -> f64 {
        (self.width1 * self.width1
            + self.height1 * self.height1
            + self.width2 * self.width2
            + self.height2 * self.height2)
            .sqrt()
    }

    pub fn contains(&self, p: &Correspondence) -> bool {
        (0.0..=self.width1).contains(&p.u1)
            && (0.0..=self.height1).contains(&p.v1)
            && (0.0..=self.width2).contains(&p.u2)
            && (0.0..=self.height2).contains(&p.v2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Homography,
    FundamentalMatrix,
}

impl ModelKind {
    /// Size of a minimal sample.
    pub const fn sample_size(self) -> usize {
        match self {
            ModelKind::Homography => 4,
            ModelKind::FundamentalMatrix => 7,
        }
    }

    /// Fewest points the weighted (non-minimal) solver accepts.
    pub const fn non_minimal_size(self) -> usize {
        match self {
            ModelKind::Homography => 4,
            ModelKind::FundamentalMatrix => 8,
        }
    }

    /// Runs the minimal solver; the fundamental solver may return up to three models.
    pub fn solve_minimal(self, sample: &[Correspondence]) -> Result<alloc::vec::Vec<Model>, GeometryError> {
        match self {
            ModelKind::Homography => solve_homography_minimal(sample).map(|h| alloc::vec![h]),
            ModelKind::FundamentalMatrix => solve_fundamental_minimal(sample),
        }
    }

    pub fn solve_weighted(self, points: &[Correspondence], weights: &[f64]) -> Result<Model, GeometryError> {
        match self {
            ModelKind::Homography => solve_homography_weighted(points, weights),
            ModelKind::FundamentalMatrix => solve_fundamental_weighted(points, weights),
        }
    }
}

/// A homography or fundamental matrix in canonical scale: unit Frobenius norm
/// and positive largest-magnitude entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    kind: ModelKind,
    matrix: Matrix3<f64>,
}

impl Model {
    /// Canonicalizes `matrix`. Fails on a zero or non-finite matrix.
    pub fn new(kind: ModelKind, matrix: Matrix3<f64>) -> Result<Self, GeometryError> {
        let matrix = canonicalize(&matrix).ok_or(GeometryError::DegenerateInput)?;
        Ok(Self { kind, matrix })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn prepare(&self) -> PreparedModel {
        PreparedModel::new(self)
    }

    pub fn residual(&self, p: &Correspondence) -> f64 {
        residual(self, p)
    }
}

/// Fixes the homogeneous scale: Frobenius norm 1, and the first entry whose
/// magnitude is (within 1e-9 relative) the largest is positive.
///
/// Matrices that are already canonical are returned bit-for-bit unchanged.
pub fn canonicalize(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    if !m.iter().all(|v| v.is_finite()) {
        return None;
    }
    let norm = m.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return None;
    }
    let max_abs = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    // Row-major scan so the tie-break does not depend on storage order.
    let mut sign = 1.0;
    'scan: for r in 0..3 {
        for c in 0..3 {
            let v = m[(r, c)];
            if v.abs() >= max_abs * (1.0 - 1e-9) {
                sign = if v < 0.0 { -1.0 } else { 1.0 };
                break 'scan;
            }
        }
    }
    let scale = sign / norm;
    if (scale - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Some(*m);
    }
    Some(m * scale)
}

/// Applies a homography to an image point; `None` when the point maps to infinity.
pub fn transfer(h: &Matrix3<f64>, u: f64, v: f64) -> Option<(f64, f64)> {
    let x = h[(0, 0)] * u + h[(0, 1)] * v + h[(0, 2)];
    let y = h[(1, 0)] * u + h[(1, 1)] * v + h[(1, 2)];
    let w = h[(2, 0)] * u + h[(2, 1)] * v + h[(2, 2)];
    if w == 0.0 || !w.is_finite() {
        return None;
    }
    Some((x / w, y / w))
}
