use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::linalg::{to_matrix3, NullSpace};
use super::{normalize_points, Correspondence, GeometryError, Model, ModelKind};

// Rank tolerance on the design matrix, relative to its largest singular value.
const RANK_TOLERANCE: f64 = 1e-12;
const COLLINEAR_TOLERANCE: f64 = 1e-9;

/// Normalized four-point algorithm.
pub fn solve_homography_minimal(sample: &[Correspondence]) -> Result<Model, GeometryError> {
    if sample.len() != 4 {
        return Err(GeometryError::WrongSampleSize {
            expected: 4,
            actual: sample.len(),
        });
    }
    let (normalized, transform) = normalize_points(sample)?;
    if has_collinear_triple(&normalized) {
        return Err(GeometryError::DegenerateInput);
    }
    let rows = dlt_rows(normalized.iter().map(|p| (p, 1.0)));
    let h = smallest_solution(&rows)?;
    Model::new(ModelKind::Homography, transform.denormalize_homography(&h))
}

/// Weighted DLT: minimizes Σ wᵢ‖Aᵢh‖² over the normalized positively-weighted points.
pub fn solve_homography_weighted(points: &[Correspondence], weights: &[f64]) -> Result<Model, GeometryError> {
    let (selected, selected_weights) = positive_subset(points, weights)?;
    if selected.len() < 4 {
        return Err(GeometryError::DegenerateInput);
    }
    let (normalized, transform) = normalize_points(&selected)?;
    let rows = dlt_rows(normalized.iter().zip(selected_weights.iter().copied()));
    let h = smallest_solution(&rows)?;
    Model::new(ModelKind::Homography, transform.denormalize_homography(&h))
}

pub(super) fn positive_subset(
    points: &[Correspondence],
    weights: &[f64],
) -> Result<(Vec<Correspondence>, Vec<f64>), GeometryError> {
    if points.len() != weights.len() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(GeometryError::InvalidWeights);
    }
    Ok(points
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(p, w)| (*p, *w))
        .unzip())
}

fn dlt_rows<'a>(points: impl Iterator<Item = (&'a Correspondence, f64)>) -> Vec<[f64; 9]> {
    let mut rows = Vec::new();
    for (p, w) in points {
        let s = w.sqrt();
        let (x, y, xp, yp) = (p.u1, p.v1, p.u2, p.v2);
        rows.push([0.0, 0.0, 0.0, -s * x, -s * y, -s, s * yp * x, s * yp * y, s * yp]);
        rows.push([s * x, s * y, s, 0.0, 0.0, 0.0, -s * xp * x, -s * xp * y, -s * xp]);
    }
    rows
}

fn smallest_solution(rows: &[[f64; 9]]) -> Result<nalgebra::Matrix3<f64>, GeometryError> {
    let ns = NullSpace::of_rows(rows).ok_or(GeometryError::DegenerateInput)?;
    // A one-dimensional null space needs the second smallest singular value clear of zero.
    if !(ns.values[1] > RANK_TOLERANCE * ns.largest()) {
        return Err(GeometryError::DegenerateInput);
    }
    Ok(to_matrix3(&ns.vectors[0]))
}

fn has_collinear_triple(points: &[Correspondence]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&points[i], &points[j], &points[k]);
                let first = (b.u1 - a.u1) * (c.v1 - a.v1) - (b.v1 - a.v1) * (c.u1 - a.u1);
                let second = (b.u2 - a.u2) * (c.v2 - a.v2) - (b.v2 - a.v2) * (c.u2 - a.u2);
                if first.abs() < COLLINEAR_TOLERANCE || second.abs() < COLLINEAR_TOLERANCE {
                    return true;
                }
            }
        }
    }
    false
}
