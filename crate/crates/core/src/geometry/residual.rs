use nalgebra::Matrix3;
#[allow(unused_imports)]
use num_traits::Float;

use super::{transfer, Correspondence, Model, ModelKind};

// Below this |det| (canonical scale) a homography is treated as singular.
const SINGULAR_DET: f64 = 1e-12;

/// A model with whatever it needs for fast repeated residual evaluation.
#[derive(Debug, Clone, Copy)]
pub struct PreparedModel {
    kind: ModelKind,
    forward: Matrix3<f64>,
    inverse: Option<Matrix3<f64>>,
}

impl PreparedModel {
    pub fn new(model: &Model) -> Self {
        let forward = *model.matrix();
        let inverse = match model.kind() {
            ModelKind::Homography if forward.determinant().abs() >= SINGULAR_DET => forward.try_inverse(),
            _ => None,
        };
        Self {
            kind: model.kind(),
            forward,
            inverse,
        }
    }

    /// `false` for a singular homography, whose residuals are all +∞.
    pub fn is_invertible(&self) -> bool {
        self.kind == ModelKind::FundamentalMatrix || self.inverse.is_some()
    }

    /// Point-to-model residual in pixels.
    #[inline]
    pub fn residual(&self, p: &Correspondence) -> f64 {
        match self.kind {
            ModelKind::Homography => match &self.inverse {
                Some(inv) => symmetric_transfer(&self.forward, inv, p),
                None => f64::INFINITY,
            },
            ModelKind::FundamentalMatrix => sampson(&self.forward, p),
        }
    }
}

/// Symmetric transfer error for homographies, Sampson distance for
/// fundamental matrices. A singular homography yields +∞.
pub fn residual(model: &Model, p: &Correspondence) -> f64 {
    PreparedModel::new(model).residual(p)
}

fn symmetric_transfer(h: &Matrix3<f64>, h_inv: &Matrix3<f64>, p: &Correspondence) -> f64 {
    let (Some((fu, fv)), Some((bu, bv))) = (transfer(h, p.u1, p.v1), transfer(h_inv, p.u2, p.v2)) else {
        return f64::INFINITY;
    };
    let forward = (fu - p.u2) * (fu - p.u2) + (fv - p.v2) * (fv - p.v2);
    let backward = (bu - p.u1) * (bu - p.u1) + (bv - p.v1) * (bv - p.v1);
    (0.5 * (forward + backward)).sqrt()
}

fn sampson(f: &Matrix3<f64>, p: &Correspondence) -> f64 {
    let (x1, y1, x2, y2) = (p.u1, p.v1, p.u2, p.v2);
    // F·x1 and Fᵀ·x2, first two components only are needed for the gradient.
    let fx0 = f[(0, 0)] * x1 + f[(0, 1)] * y1 + f[(0, 2)];
    let fx1 = f[(1, 0)] * x1 + f[(1, 1)] * y1 + f[(1, 2)];
    let fx2 = f[(2, 0)] * x1 + f[(2, 1)] * y1 + f[(2, 2)];
    let ftx0 = f[(0, 0)] * x2 + f[(1, 0)] * y2 + f[(2, 0)];
    let ftx1 = f[(0, 1)] * x2 + f[(1, 1)] * y2 + f[(2, 1)];
    let algebraic = x2 * fx0 + y2 * fx1 + fx2;
    let gradient = fx0 * fx0 + fx1 * fx1 + ftx0 * ftx0 + ftx1 * ftx1;
    if gradient > 0.0 {
        algebraic.abs() / gradient.sqrt()
    } else if algebraic == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    #[test]
    fn identity_fixed_point_has_zero_residual() {
        let m = Model::new(ModelKind::Homography, Matrix3::identity()).unwrap();
        assert_eq!(residual(&m, &Correspondence::new(5.0, 5.0, 5.0, 5.0)), 0.0);
    }

    #[test]
    fn symmetric_transfer_hand_value() {
        // forward: (2,2) vs (2.5,2) → 0.25; backward: (1.25,1) vs (1,1) → 0.0625
        let h = Matrix3::from_diagonal(&Vector3::new(2.0, 2.0, 1.0));
        let m = Model::new(ModelKind::Homography, h).unwrap();
        let r = residual(&m, &Correspondence::new(1.0, 1.0, 2.5, 2.0));
        assert!((r - (0.3125_f64 / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singular_homography_is_infinite() {
        let h = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        let m = Model::new(ModelKind::Homography, h).unwrap();
        assert!(!m.prepare().is_invertible());
        assert_eq!(residual(&m, &Correspondence::new(1.0, 2.0, 1.0, 2.0)), f64::INFINITY);
    }

    #[test]
    fn sampson_zero_on_epipolar_line() {
        // pure horizontal translation: F = [t]x with t = (1,0,0) → v1 == v2
        let f = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        let m = Model::new(ModelKind::FundamentalMatrix, f).unwrap();
        assert!(residual(&m, &Correspondence::new(3.0, 7.0, 40.0, 7.0)).abs() < 1e-15);
        // one pixel off the line: algebraic error 1, gradient (0,1,0,1)·s → 1/√2 per unit scale
        let r = residual(&m, &Correspondence::new(3.0, 7.0, 40.0, 8.0));
        assert!((r - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}
