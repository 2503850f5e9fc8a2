//! MAGSAC++ scoring: trimmed χ machinery, the σ-marginalized weight w(r) and
//! loss ρ(r), the quality Q = 1/Σρ, lookup tables, σ-consensus++, and the
//! RANSAC/MSAC/LMedS baselines.

mod baseline;
mod gamma;
mod irls;
mod marginal;
mod profile;
mod quality;

pub use baseline::{baseline_score, BaselineScorer};
pub use gamma::{
    gamma, incomplete_gamma, ln_gamma, lower_incomplete_gamma, regularized_pair, upper_incomplete_gamma, GammaKind,
};
pub use irls::{sigma_consensus_pp, IrlsOutcome, IrlsSettings, IrlsStatus};
pub use marginal::{chi_density, chi_normalizer, loss_rho, weight, MarginalKernel};
pub use profile::{ScoreProfile, DEFAULT_BINS};
pub use quality::{model_quality, quality_from_loss, residuals, total_loss, SATURATED_QUALITY};

pub(crate) use baseline::score_residuals;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ScoringError {
    #[error("argument outside the function's domain")]
    DomainError,
    #[error("series or continued fraction did not converge")]
    ConvergenceFailure,
    #[error("invalid noise configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("empty point set")]
    EmptyPointSet,
}

/// Residual dimension for point correspondences.
pub const DEFAULT_DIMENSION: u32 = 4;
/// 0.99 quantile of the χ distribution with four degrees of freedom.
pub const DEFAULT_QUANTILE: f64 = 3.64;

/// Noise model parameters: residual dimension n, quantile multiplier k with
/// τ(σ) = kσ, and the upper bound σ_max of the uniform noise prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    dimension: u32,
    quantile: f64,
    sigma_max: f64,
}

impl NoiseConfig {
    /// Default n = 4, k = 3.64.
    pub fn new(sigma_max: f64) -> Result<Self, ScoringError> {
        Self::with_parameters(DEFAULT_DIMENSION, DEFAULT_QUANTILE, sigma_max)
    }

    pub fn with_parameters(dimension: u32, quantile: f64, sigma_max: f64) -> Result<Self, ScoringError> {
        if dimension < 2 {
            return Err(ScoringError::InvalidConfig("dimension must be at least 2"));
        }
        if !(quantile > 0.0) || !quantile.is_finite() {
            return Err(ScoringError::InvalidConfig("quantile must be positive"));
        }
        if !(sigma_max > 0.0) || !sigma_max.is_finite() {
            return Err(ScoringError::InvalidConfig("sigma_max must be positive"));
        }
        Ok(Self {
            dimension,
            quantile,
            sigma_max,
        })
    }

    /// σ_max implied by an inlier-outlier threshold: t / k.
    pub fn from_threshold(threshold: f64) -> Result<Self, ScoringError> {
        Self::new(threshold / DEFAULT_QUANTILE)
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn quantile(&self) -> f64 {
        self.quantile
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    /// τ(σ) = kσ
    pub fn tau(&self, sigma: f64) -> f64 {
        self.quantile * sigma
    }

    /// kσ_max, past which w vanishes and ρ is constant.
    pub fn threshold(&self) -> f64 {
        self.tau(self.sigma_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = NoiseConfig::new(10.0).unwrap();
        assert_eq!(c.dimension(), 4);
        assert_eq!(c.quantile(), 3.64);
        assert!((c.threshold() - 36.4).abs() < 1e-12);
        let t = NoiseConfig::from_threshold(36.4).unwrap();
        assert!((t.sigma_max() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs() {
        assert!(NoiseConfig::with_parameters(1, 3.64, 1.0).is_err());
        assert!(NoiseConfig::with_parameters(4, 0.0, 1.0).is_err());
        assert!(NoiseConfig::new(0.0).is_err());
        assert!(NoiseConfig::new(f64::NAN).is_err());
    }
}
