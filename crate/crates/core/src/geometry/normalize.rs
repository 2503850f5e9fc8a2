use alloc::vec::Vec;

use nalgebra::Matrix3;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Correspondence, GeometryError};

/// Per-image similarity transforms that move each point cloud to zero
/// centroid and mean distance √2 from the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationTransform {
    pub first: Matrix3<f64>,
    pub second: Matrix3<f64>,
}

impl NormalizationTransform {
    /// Maps a homography between normalized clouds back to pixel coordinates.
    pub fn denormalize_homography(&self, h: &Matrix3<f64>) -> Matrix3<f64> {
        similarity_inverse(&self.second) * h * self.first
    }

    /// Maps a fundamental matrix between normalized clouds back to pixel coordinates.
    pub fn denormalize_fundamental(&self, f: &Matrix3<f64>) -> Matrix3<f64> {
        self.second.transpose() * f * self.first
    }
}

/// Hartley conditioning of both sides of a correspondence set.
pub fn normalize_points(
    points: &[Correspondence],
) -> Result<(Vec<Correspondence>, NormalizationTransform), GeometryError> {
    if points.len() < 2 {
        return Err(GeometryError::DegenerateInput);
    }
    let first = conditioning(points.iter().map(|p| (p.u1, p.v1)), points.len())?;
    let second = conditioning(points.iter().map(|p| (p.u2, p.v2)), points.len())?;
    let normalized = points
        .iter()
        .map(|p| Correspondence {
            u1: first.scale * (p.u1 - first.cx),
            v1: first.scale * (p.v1 - first.cy),
            u2: second.scale * (p.u2 - second.cx),
            v2: second.scale * (p.v2 - second.cy),
        })
        .collect();
    Ok((
        normalized,
        NormalizationTransform {
            first: first.matrix(),
            second: second.matrix(),
        },
    ))
}

struct Similarity {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl Similarity {
    fn matrix(&self) -> Matrix3<f64> {
        let s = self.scale;
        Matrix3::new(s, 0.0, -s * self.cx, 0.0, s, -s * self.cy, 0.0, 0.0, 1.0)
    }
}

fn conditioning(coords: impl Iterator<Item = (f64, f64)> + Clone, count: usize) -> Result<Similarity, GeometryError> {
    let n = count as f64;
    let (sx, sy) = coords.clone().fold((0.0, 0.0), |(ax, ay), (x, y)| (ax + x, ay + y));
    let (cx, cy) = (sx / n, sy / n);
    let mean_dist = coords.map(|(x, y)| (x - cx).hypot(y - cy)).sum::<f64>() / n;
    if !(mean_dist > 0.0) || !mean_dist.is_finite() {
        return Err(GeometryError::DegenerateInput);
    }
    Ok(Similarity {
        cx,
        cy,
        scale: core::f64::consts::SQRT_2 / mean_dist,
    })
}

fn similarity_inverse(t: &Matrix3<f64>) -> Matrix3<f64> {
    let s = t[(0, 0)];
    Matrix3::new(
        1.0 / s,
        0.0,
        -t[(0, 2)] / s,
        0.0,
        1.0 / s,
        -t[(1, 2)] / s,
        0.0,
        0.0,
        1.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centroid_and_spread(pts: &[(f64, f64)]) -> (f64, f64, f64) {
        let n = pts.len() as f64;
        let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let d = pts.iter().map(|p| (p.0 - cx).hypot(p.1 - cy)).sum::<f64>() / n;
        (cx, cy, d)
    }

    #[test]
    fn square_is_centered_and_scaled() {
        let pts = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)];
        let cs: Vec<_> = pts.iter().map(|&(x, y)| Correspondence::new(x, y, x, y)).collect();
        let (out, t) = normalize_points(&cs).unwrap();
        // mean distance of the square corners from (1,1) is √2, so the scale is 1
        let expected = Matrix3::new(1.0, 0.0, -1.0, 0.0, 1.0, -1.0, 0.0, 0.0, 1.0);
        assert!((t.first - expected).norm() < 1e-12);
        let first: Vec<_> = out.iter().map(|p| (p.u1, p.v1)).collect();
        let (cx, cy, d) = centroid_and_spread(&first);
        assert!(cx.abs() < 1e-12 && cy.abs() < 1e-12);
        assert!((d - core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let cs = [
            Correspondence::new(3.0, 3.0, 0.0, 0.0),
            Correspondence::new(3.0, 3.0, 1.0, 1.0),
        ];
        assert_eq!(normalize_points(&cs).unwrap_err(), GeometryError::DegenerateInput);
        assert!(normalize_points(&cs[..1]).is_err());
    }

    #[test]
    fn inverse_of_similarity() {
        let cs = [
            Correspondence::new(10.0, 3.0, 5.0, 1.0),
            Correspondence::new(-4.0, 8.0, 2.0, 9.0),
            Correspondence::new(1.0, 1.0, 7.0, 7.0),
        ];
        let (_, t) = normalize_points(&cs).unwrap();
        let id = similarity_inverse(&t.second) * t.second;
        assert!((id - Matrix3::identity()).norm() < 1e-12);
    }
}
