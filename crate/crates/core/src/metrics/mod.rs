//! Ground-truth comparison: symmetric geometric distance between fundamental
//! matrices, re-projection RMSE for homographies, and the 1%-of-diagonal
//! failure rule.

use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::geometry::{transfer, Correspondence, ImageSizes, Model, ModelKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no epipolar line crosses the opposite image")]
    DegenerateGeometry,
    #[error("model is not invertible")]
    NonInvertibleModel,
    #[error("no ground-truth inliers")]
    EmptyInlierSet,
    #[error("ground truth lacks what this model kind needs")]
    MissingGroundTruth,
    #[error("ground truth must carry a model or inlier labels")]
    EmptyGroundTruth,
    #[error("expected one label per correspondence")]
    LabelCountMismatch,
}

/// Known answer for one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    model: Option<Model>,
    labels: Option<Vec<bool>>,
    sizes: ImageSizes,
}

impl GroundTruth {
    pub fn new(model: Option<Model>, labels: Option<Vec<bool>>, sizes: ImageSizes) -> Result<Self, MetricsError> {
        if model.is_none() && labels.is_none() {
            return Err(MetricsError::EmptyGroundTruth);
        }
        Ok(Self { model, labels, sizes })
    }

    pub fn model(&self) -> Option<&Model> {
        self.model.as_ref()
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    pub fn sizes(&self) -> &ImageSizes {
        &self.sizes
    }

    /// Labeled inliers among `points`.
    pub fn inliers(&self, points: &[Correspondence]) -> Result<Vec<Correspondence>, MetricsError> {
        let labels = self.labels.as_ref().ok_or(MetricsError::MissingGroundTruth)?;
        if labels.len() != points.len() {
            return Err(MetricsError::LabelCountMismatch);
        }
        Ok(points.iter().zip(labels).filter(|(_, &l)| l).map(|(p, _)| *p).collect())
    }

    /// RMSE on the labeled inliers for homographies, SGD against the
    /// ground-truth matrix for fundamental matrices.
    pub fn error_of(&self, estimate: &Model, points: &[Correspondence]) -> Result<f64, MetricsError> {
        match estimate.kind() {
            ModelKind::Homography => rmse_reprojection(estimate.matrix(), &self.inliers(points)?),
            ModelKind::FundamentalMatrix => {
                let gt = self.model.as_ref().ok_or(MetricsError::MissingGroundTruth)?;
                sgd_error(estimate.matrix(), gt.matrix(), &self.sizes, DEFAULT_SAMPLES_PER_SIDE)
            }
        }
    }
}

pub const DEFAULT_SAMPLES_PER_SIDE: usize = 25;

/// Symmetric geometric distance between two fundamental matrices, in pixels.
///
/// For a direction (A, B): points are spread evenly along each side of one
/// image (`samples_per_side` per side, cell-centered), each is mapped to its
/// epipolar line under A in the other image, the line is clipped to that
/// image and the midpoint of the clipped segment becomes the virtual match.
/// Each virtual correspondence, exact under A, is scored by its two
/// point-to-epipolar-line distances under B. This runs from both images and
/// the direction's value is the mean distance. Border points whose line misses
/// the other image are skipped.
///
/// The result is the average of the (A, B) = (F₁, F₂) and (F₂, F₁) values,
/// so it is symmetric by construction and invariant to the scale of either
/// matrix.
pub fn sgd_error(
    f1: &Matrix3<f64>,
    f2: &Matrix3<f64>,
    sizes: &ImageSizes,
    samples_per_side: usize,
) -> Result<f64, MetricsError> {
    let a = one_direction(f1, f2, sizes, samples_per_side)?;
    let b = one_direction(f2, f1, sizes, samples_per_side)?;
    Ok(0.5 * (a + b))
}

fn one_direction(
    a: &Matrix3<f64>,
    b: &Matrix3<f64>,
    sizes: &ImageSizes,
    samples_per_side: usize,
) -> Result<f64, MetricsError> {
    let mut total = 0.0;
    let mut count = 0usize;
    let a_t = a.transpose();
    let b_t = b.transpose();
    // From image 1: x on the border, x' on A x in image 2.
    for x in border_points(sizes.width1, sizes.height1, samples_per_side) {
        let Some(xp) = clip_midpoint(&(a * x), sizes.width2, sizes.height2) else {
            continue;
        };
        if let (Some(d1), Some(d2)) = (line_distance(&xp, &(b * x)), line_distance(&x, &(b_t * xp))) {
            total += d1 + d2;
            count += 2;
        }
    }
    // From image 2: x' on the border, x on Aᵀ x' in image 1.
    for xp in border_points(sizes.width2, sizes.height2, samples_per_side) {
        let Some(x) = clip_midpoint(&(a_t * xp), sizes.width1, sizes.height1) else {
            continue;
        };
        if let (Some(d1), Some(d2)) = (line_distance(&xp, &(b * x)), line_distance(&x, &(b_t * xp))) {
            total += d1 + d2;
            count += 2;
        }
    }
    if count == 0 {
        return Err(MetricsError::DegenerateGeometry);
    }
    Ok(total / count as f64)
}

fn border_points(w: f64, h: f64, per_side: usize) -> impl Iterator<Item = Vector3<f64>> {
    (0..per_side).flat_map(move |i| {
        let s = (i as f64 + 0.5) / per_side as f64;
        [
            Vector3::new(s * w, 0.0, 1.0),
            Vector3::new(w, s * h, 1.0),
            Vector3::new((1.0 - s) * w, h, 1.0),
            Vector3::new(0.0, (1.0 - s) * h, 1.0),
        ]
    })
}

/// Distance from a point (w = 1) to a line; `None` for a degenerate line.
fn line_distance(p: &Vector3<f64>, line: &Vector3<f64>) -> Option<f64> {
    let norm = line.x.hypot(line.y);
    if !(norm > 0.0) || !norm.is_finite() {
        return None;
    }
    Some(line.dot(p).abs() / norm)
}

/// Midpoint of the part of the line inside [0, w] × [0, h].
fn clip_midpoint(line: &Vector3<f64>, w: f64, h: f64) -> Option<Vector3<f64>> {
    let (a, b, c) = (line.x, line.y, line.z);
    let norm = a.hypot(b);
    if !(norm > 0.0) || !norm.is_finite() {
        return None;
    }
    let slack = 1e-9 * (w + h);
    let mut hits: [(f64, f64); 4] = [(0.0, 0.0); 4];
    let mut found = 0;
    if b != 0.0 {
        for x in [0.0, w] {
            let y = -(a * x + c) / b;
            if (-slack..=h + slack).contains(&y) {
                hits[found] = (x, y.clamp(0.0, h));
                found += 1;
            }
        }
    }
    if a != 0.0 {
        for y in [0.0, h] {
            let x = -(b * y + c) / a;
            if (-slack..=w + slack).contains(&x) {
                hits[found] = (x.clamp(0.0, w), y);
                found += 1;
            }
        }
    }
    if found == 0 {
        return None;
    }
    // Extreme intersections along the line direction (−b, a).
    let along = |p: &(f64, f64)| -b * p.0 + a * p.1;
    let hits = &hits[..found];
    let lo = hits.iter().min_by(|p, q| along(p).total_cmp(&along(q)))?;
    let hi = hits.iter().max_by(|p, q| along(p).total_cmp(&along(q)))?;
    let mut mid = Vector3::new(0.5 * (lo.0 + hi.0), 0.5 * (lo.1 + hi.1), 1.0);
    // Pull the midpoint back onto the line to undo clamping error.
    let offset = (a * mid.x + b * mid.y + c) / (norm * norm);
    mid.x -= a * offset;
    mid.y -= b * offset;
    Some(mid)
}

/// √(mean ‖π(H p₁) − p₂‖²) over the ground-truth inliers; transfer runs
/// first image to second only.
pub fn rmse_reprojection(h: &Matrix3<f64>, inliers: &[Correspondence]) -> Result<f64, MetricsError> {
    if inliers.is_empty() {
        return Err(MetricsError::EmptyInlierSet);
    }
    let scale = h.norm();
    if !(h.determinant().abs() > 1e-12 * scale * scale * scale) {
        return Err(MetricsError::NonInvertibleModel);
    }
    let mut sum = 0.0;
    for p in inliers {
        match transfer(h, p.u1, p.v1) {
            Some((x, y)) => {
                let (dx, dy) = (x - p.u2, y - p.v2);
                sum += dx * dx + dy * dy;
            }
            None => return Ok(f64::INFINITY),
        }
    }
    Ok((sum / inliers.len() as f64).sqrt())
}

/// Whether `error` exceeds 1% of the first image's diagonal. NaN counts as
/// a failure.
pub fn is_failure(error: f64, sizes: &ImageSizes) -> bool {
    !(error <= 0.01 * sizes.first_diagonal())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let inliers = [
            Correspondence::new(0.0, 0.0, 3.0, 4.0),
            Correspondence::new(10.0, -2.0, 13.0, 2.0),
        ];
        assert_eq!(rmse_reprojection(&Matrix3::identity(), &inliers).unwrap(), 5.0);
        assert_eq!(
            rmse_reprojection(&Matrix3::identity(), &[]),
            Err(MetricsError::EmptyInlierSet)
        );
        assert_eq!(
            rmse_reprojection(&Matrix3::zeros(), &inliers),
            Err(MetricsError::NonInvertibleModel)
        );
    }

    #[test]
    fn failure_rule() {
        let sizes = ImageSizes::square(1000.0, 1000.0);
        assert!(is_failure(15.0, &sizes));
        assert!(!is_failure(0.0, &sizes));
        assert!(!is_failure(0.01 * sizes.first_diagonal(), &sizes));
        assert!(is_failure(f64::NAN, &sizes));
    }

    #[test]
    fn sgd_zero_on_itself() {
        // Pure translation along x: F = [t]_x with t = (1, 0, 0).
        let f = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        let sizes = ImageSizes::square(640.0, 480.0);
        let e = sgd_error(&f, &(f * -3.0), &sizes, 25).unwrap();
        assert!(e.abs() < 1e-9, "{e}");
        let g = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 2.0);
        let e = sgd_error(&f, &g, &sizes, 25).unwrap();
        assert!(e > 0.5, "{e}");
    }

    #[test]
    fn ground_truth_needs_content() {
        let sizes = ImageSizes::square(10.0, 10.0);
        assert_eq!(GroundTruth::new(None, None, sizes), Err(MetricsError::EmptyGroundTruth));
        let gt = GroundTruth::new(None, Some(alloc::vec![true, false]), sizes).unwrap();
        let pts = [
            Correspondence::new(1.0, 1.0, 1.0, 1.0),
            Correspondence::new(2.0, 2.0, 9.0, 9.0),
        ];
        assert_eq!(gt.inliers(&pts).unwrap(), alloc::vec![pts[0]]);
        let h = Model::new(ModelKind::Homography, Matrix3::identity()).unwrap();
        assert_eq!(gt.error_of(&h, &pts).unwrap(), 0.0);
        let f = Model::new(ModelKind::FundamentalMatrix, Matrix3::identity()).unwrap();
        assert_eq!(gt.error_of(&f, &pts), Err(MetricsError::MissingGroundTruth));
    }
}
