use alloc::vec::Vec;

use nalgebra::Matrix3;
#[allow(unused_imports)]
use num_traits::Float;

use super::homography::positive_subset;
use super::linalg::{to_matrix3, NullSpace};
use super::{normalize_points, Correspondence, GeometryError, Model, ModelKind};

const RANK_TOLERANCE: f64 = 1e-12;
const DISCRIMINANT_TOLERANCE: f64 = 1e-12;

/// Seven-point algorithm. Returns one model per real root of the cubic
/// det(αF₁ + (1−α)F₂) = 0.
pub fn solve_fundamental_minimal(sample: &[Correspondence]) -> Result<Vec<Model>, GeometryError> {
    if sample.len() != 7 {
        return Err(GeometryError::WrongSampleSize {
            expected: 7,
            actual: sample.len(),
        });
    }
    let (normalized, transform) = normalize_points(sample)?;
    let rows: Vec<_> = normalized.iter().map(|p| epipolar_row(p, 1.0)).collect();
    let ns = NullSpace::of_rows(&rows).ok_or(GeometryError::DegenerateInput)?;
    // Exactly two null directions: the third smallest singular value must be clear of zero.
    if !(ns.values[2] > RANK_TOLERANCE * ns.largest()) {
        return Err(GeometryError::DegenerateInput);
    }
    let f1 = to_matrix3(&ns.vectors[0]);
    let f2 = to_matrix3(&ns.vectors[1]);
    let diff = f1 - f2;

    // det(F₂ + αD) is cubic in α; recover its coefficients from four evaluations.
    let det_at = |alpha: f64| (f2 + diff * alpha).determinant();
    let d0 = det_at(0.0);
    let d1 = det_at(1.0);
    let dm1 = det_at(-1.0);
    let d2 = det_at(2.0);
    let c0 = d0;
    let c2 = 0.5 * (d1 + dm1) - c0;
    let odd = 0.5 * (d1 - dm1);
    let c3 = ((d2 - c0 - 4.0 * c2) - 2.0 * odd) / 6.0;
    let c1 = odd - c3;

    let roots = solve_cubic(c3, c2, c1, c0);
    let mut models = Vec::with_capacity(3);
    for &alpha in roots.as_slice() {
        let f = f2 + diff * alpha;
        if let Ok(model) = Model::new(ModelKind::FundamentalMatrix, transform.denormalize_fundamental(&f)) {
            models.push(model);
        }
    }
    if models.is_empty() {
        return Err(GeometryError::DegenerateInput);
    }
    Ok(models)
}

/// Weighted normalized eight-point algorithm followed by projection onto rank 2.
pub fn solve_fundamental_weighted(points: &[Correspondence], weights: &[f64]) -> Result<Model, GeometryError> {
    let (selected, selected_weights) = positive_subset(points, weights)?;
    if selected.len() < 8 {
        return Err(GeometryError::DegenerateInput);
    }
    let (normalized, transform) = normalize_points(&selected)?;
    let rows: Vec<_> = normalized
        .iter()
        .zip(&selected_weights)
        .map(|(p, w)| epipolar_row(p, *w))
        .collect();
    let ns = NullSpace::of_rows(&rows).ok_or(GeometryError::DegenerateInput)?;
    if !(ns.values[1] > RANK_TOLERANCE * ns.largest()) {
        return Err(GeometryError::DegenerateInput);
    }
    let f = enforce_rank_two(&to_matrix3(&ns.vectors[0])).ok_or(GeometryError::DegenerateInput)?;
    Model::new(ModelKind::FundamentalMatrix, transform.denormalize_fundamental(&f))
}

fn epipolar_row(p: &Correspondence, weight: f64) -> [f64; 9] {
    let s = weight.sqrt();
    let (x1, y1, x2, y2) = (p.u1, p.v1, p.u2, p.v2);
    [
        s * x2 * x1,
        s * x2 * y1,
        s * x2,
        s * y2 * x1,
        s * y2 * y1,
        s * y2,
        s * x1,
        s * y1,
        s,
    ]
}

/// Zeroes the smallest singular value.
pub(crate) fn enforce_rank_two(f: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let svd = f.try_svd(true, true, f64::EPSILON, 200)?;
    let mut s = svd.singular_values;
    let (min_idx, _) = s.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    s[min_idx] = 0.0;
    let u = svd.u?;
    let v_t = svd.v_t?;
    Some(u * Matrix3::from_diagonal(&s) * v_t)
}

/// Real roots of a polynomial of degree at most three, without duplicates.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Roots {
    values: [f64; 3],
    len: usize,
}

impl Roots {
    fn push(&mut self, r: f64) {
        if r.is_finite()
            && !self
                .as_slice()
                .iter()
                .any(|&x| (x - r).abs() <= 1e-12 * (1.0 + r.abs()))
        {
            self.values[self.len] = r;
            self.len += 1;
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.len]
    }
}

/// Solves a·x³ + b·x² + c·x + d = 0 in closed form (trigonometric for three
/// real roots, Cardano otherwise), then polishes each root with Newton steps.
pub(crate) fn solve_cubic(a: f64, b: f64, c: f64, d: f64) -> Roots {
    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
    let mut roots = Roots::default();
    if !(scale > 0.0) {
        return roots;
    }
    if a.abs() <= 1e-12 * scale {
        solve_quadratic(b, c, d, &mut roots);
        return roots;
    }
    let (a2, a1, a0) = (b / a, c / a, d / a);
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let disc_scale = (half_q * half_q).max(third_p.abs().powi(3)).max(1.0);

    let mut raw = Roots::default();
    if disc.abs() <= DISCRIMINANT_TOLERANCE * disc_scale {
        if third_p.abs() <= DISCRIMINANT_TOLERANCE * disc_scale {
            raw.push(-shift);
        } else {
            raw.push(3.0 * q / p - shift);
            raw.push(-1.5 * q / p - shift);
        }
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let t = (-half_q + sq).cbrt() + (-half_q - sq).cbrt();
        raw.push(t - shift);
    } else {
        let m = 2.0 * (-third_p).sqrt();
        let arg = (-half_q / (-third_p).powf(1.5)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let two_pi_3 = 2.0 * core::f64::consts::PI / 3.0;
        for k in 0..3 {
            raw.push(m * (phi - two_pi_3 * k as f64).cos() - shift);
        }
    }
    for &r in raw.as_slice() {
        roots.push(newton_polish(r, a2, a1, a0));
    }
    roots
}

fn newton_polish(mut x: f64, a2: f64, a1: f64, a0: f64) -> f64 {
    for _ in 0..4 {
        let f = ((x + a2) * x + a1) * x + a0;
        let df = (3.0 * x + 2.0 * a2) * x + a1;
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let step = f / df;
        let next = x - step;
        let f_next = ((next + a2) * next + a1) * next + a0;
        if !(f_next.abs() < f.abs()) {
            break;
        }
        x = next;
    }
    x
}

fn solve_quadratic(a: f64, b: f64, c: f64, roots: &mut Roots) {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if a.abs() <= 1e-12 * scale {
        if b != 0.0 {
            roots.push(-c / b);
        }
        return;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -DISCRIMINANT_TOLERANCE * (b * b).max(1e-300) {
        return;
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q != 0.0 {
        roots.push(q / a);
        roots.push(c / q);
    } else {
        roots.push(-b / (2.0 * a));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(r: Roots) -> Vec<f64> {
        let mut v = r.as_slice().to_vec();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn cubic_three_real_roots() {
        // (x-1)(x-2)(x+3) = x³ - 7x + 6
        let r = sorted(solve_cubic(1.0, 0.0, -7.0, 6.0));
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn cubic_single_real_root() {
        // (x-2)(x²+1)
        let r = sorted(solve_cubic(1.0, -2.0, 1.0, -2.0));
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_repeated_roots() {
        // (x-1)²(x+2) = x³ - 3x + 2
        let r = sorted(solve_cubic(1.0, 0.0, -3.0, 2.0));
        assert_eq!(r.len(), 2);
        assert!((r[0] + 2.0).abs() < 1e-9 && (r[1] - 1.0).abs() < 1e-6);
        // x³
        let r = sorted(solve_cubic(2.0, 0.0, 0.0, 0.0));
        assert_eq!(r, [0.0]);
    }

    #[test]
    fn degenerate_leading_coefficient() {
        // 2x² - 2 = 0
        let r = sorted(solve_cubic(0.0, 2.0, 0.0, -2.0));
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_two_projection() {
        let f = Matrix3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0);
        let g = enforce_rank_two(&f).unwrap();
        let s = g.singular_values();
        let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min < 1e-12);
    }

    #[test]
    fn wrong_sample_size() {
        let pts = [Correspondence::new(0.0, 0.0, 0.0, 0.0); 8];
        assert!(matches!(
            solve_fundamental_minimal(&pts),
            Err(GeometryError::WrongSampleSize { expected: 7, actual: 8 })
        ));
    }
}
