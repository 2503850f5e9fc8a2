#[allow(unused_imports)]
use num_traits::Float;

/// r = ⌈log(1 − μ) / log(1 − η^m)⌉ clamped to [1, cap]. η ≤ 0 gives `cap`,
/// η ≥ 1 gives 1.
pub fn required_iterations(confidence: f64, inlier_ratio: f64, m: usize, cap: usize) -> usize {
    let cap = cap.max(1);
    if !(inlier_ratio > 0.0) {
        return cap;
    }
    if inlier_ratio >= 1.0 {
        return 1;
    }
    let p = inlier_ratio.powi(m as i32);
    let denominator = (-p).ln_1p();
    if !(denominator < 0.0) {
        return cap;
    }
    let r = ((1.0 - confidence).ln() / denominator).ceil();
    if r.is_nan() || r < 1.0 {
        return 1;
    }
    if r >= cap as f64 {
        cap
    } else {
        r as usize
    }
}

/// Iteration bound with the inlier ratio raised to η + γ, γ clipped to
/// [0, 1 − η]. γ = 0 is exactly [`required_iterations`].
pub fn relaxed_iterations(confidence: f64, inlier_ratio: f64, relaxation: f64, m: usize, cap: usize) -> usize {
    let eta = inlier_ratio.clamp(0.0, 1.0);
    let gamma = relaxation.clamp(0.0, 1.0 - eta);
    if gamma >= 1.0 - eta && gamma > 0.0 {
        return 1;
    }
    required_iterations(confidence, eta + gamma, m, cap)
}
