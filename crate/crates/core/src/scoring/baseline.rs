use alloc::vec::Vec;

use crate::geometry::{Correspondence, Model};

use super::ScoringError;

/// Classical scoring rules, all oriented so that higher is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineScorer {
    /// Inlier count.
    Ransac,
    /// Negated truncated quadratic cost Σ min(r², T²).
    Msac,
    /// Negated median of squared residuals; the threshold is unused.
    Lmeds,
}

pub fn baseline_score(
    kind: BaselineScorer,
    model: &Model,
    points: &[Correspondence],
    threshold: f64,
) -> Result<f64, ScoringError> {
    if points.is_empty() {
        return Err(ScoringError::EmptyPointSet);
    }
    let prepared = model.prepare();
    let residuals = points.iter().map(|p| prepared.residual(p));
    Ok(score_residuals(kind, residuals, threshold))
}

pub(crate) fn score_residuals(kind: BaselineScorer, residuals: impl Iterator<Item = f64>, threshold: f64) -> f64 {
    match kind {
        BaselineScorer::Ransac => residuals.filter(|r| *r <= threshold).count() as f64,
        BaselineScorer::Msac => {
            let cap = threshold * threshold;
            -residuals
                .map(|r| {
                    let sq = r * r;
                    if sq < cap {
                        sq
                    } else {
                        cap
                    }
                })
                .sum::<f64>()
        }
        BaselineScorer::Lmeds => {
            let mut squares: Vec<f64> = residuals.map(|r| r * r).collect();
            -lower_median(&mut squares)
        }
    }
}

/// Median of the values; the lower middle element for even counts.
fn lower_median(values: &mut [f64]) -> f64 {
    let mid = (values.len() - 1) / 2;
    let (_, m, _) = values.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    *m
}
