//! σ-consensus++: iteratively reweighted least squares with the marginal
//! weights w(r).

use alloc::vec::Vec;

use crate::geometry::{Correspondence, GeometryError, Model};

use super::quality::total_loss;
use super::ScoreProfile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrlsSettings {
    pub max_iterations: usize,
    /// Stop once the relative loss decrease falls below this.
    pub rel_tol: f64,
}

impl Default for IrlsSettings {
    fn default() -> Self {
        Self {
            max_iterations: 10,
            rel_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrlsStatus {
    /// Relative loss change dropped below the tolerance.
    Converged,
    MaxIterations,
    /// A reweighted fit did not lower the loss; the previous iterate was kept.
    Stalled,
    /// The weighted solver rejected the weighted point set.
    SolverFailed,
    /// Fewer than a minimal sample's worth of points had positive weight.
    Diverged,
}

#[derive(Debug, Clone)]
pub struct IrlsOutcome {
    pub model: Model,
    pub loss: f64,
    /// Loss of every accepted iterate, starting with the initial model.
    pub loss_trace: Vec<f64>,
    pub iterations: usize,
    pub status: IrlsStatus,
}

/// Polishes `initial` by IRLS. `solver` fits a model to points with
/// nonnegative weights (zero-weight points are ignored).
///
/// A step is only accepted if it does not increase L = Σρ(r), so the
/// returned loss never exceeds the loss of `initial`.
pub fn sigma_consensus_pp<S>(
    initial: &Model,
    points: &[Correspondence],
    profile: &ScoreProfile,
    settings: &IrlsSettings,
    mut solver: S,
) -> IrlsOutcome
where
    S: FnMut(&[Correspondence], &[f64]) -> Result<Model, GeometryError>,
{
    let minimal = initial.kind().sample_size();
    let mut current = *initial;
    let mut current_loss = total_loss(&current, points, profile);
    let mut loss_trace = alloc::vec![current_loss];
    let mut weights = alloc::vec![0.0; points.len()];
    let mut status = IrlsStatus::MaxIterations;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        let prepared = current.prepare();
        let mut positive = 0;
        for (w, p) in weights.iter_mut().zip(points) {
            *w = profile.weight(prepared.residual(p));
            if *w > 0.0 {
                positive += 1;
            }
        }
        if positive < minimal {
            status = IrlsStatus::Diverged;
            break;
        }
        let candidate = match solver(points, &weights) {
            Ok(m) => m,
            Err(_) => {
                status = IrlsStatus::SolverFailed;
                break;
            }
        };
        iterations += 1;
        let candidate_loss = total_loss(&candidate, points, profile);
        if !(candidate_loss <= current_loss) {
            status = IrlsStatus::Stalled;
            break;
        }
        let decrease = current_loss - candidate_loss;
        current = candidate;
        loss_trace.push(candidate_loss);
        let converged = decrease <= settings.rel_tol * current_loss;
        current_loss = candidate_loss;
        if converged {
            status = IrlsStatus::Converged;
            break;
        }
    }

    IrlsOutcome {
        model: current,
        loss: current_loss,
        loss_trace,
        iterations,
        status,
    }
}
