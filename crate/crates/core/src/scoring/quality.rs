use alloc::vec::Vec;

use crate::geometry::{Correspondence, Model};

use super::{ScoreProfile, ScoringError};

/// Quality reported when the total loss is numerically zero.
pub const SATURATED_QUALITY: f64 = 1e300;

/// L(θ, P) = Σ ρ(D(θ, p)).
pub fn total_loss(model: &Model, points: &[Correspondence], profile: &ScoreProfile) -> f64 {
    let prepared = model.prepare();
    points.iter().map(|p| profile.loss(prepared.residual(p))).sum()
}

/// Q(θ, P) = 1 / L(θ, P); higher is better.
pub fn model_quality(model: &Model, points: &[Correspondence], profile: &ScoreProfile) -> Result<f64, ScoringError> {
    if points.is_empty() {
        return Err(ScoringError::EmptyPointSet);
    }
    Ok(quality_from_loss(total_loss(model, points, profile)))
}

pub fn quality_from_loss(loss: f64) -> f64 {
    if loss < 1e-300 {
        SATURATED_QUALITY
    } else {
        1.0 / loss
    }
}

/// Residuals of every point under `model`.
pub fn residuals(model: &Model, points: &[Correspondence]) -> Vec<f64> {
    let prepared = model.prepare();
    points.iter().map(|p| prepared.residual(p)).collect()
}
