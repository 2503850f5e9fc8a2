//! The robust estimation loop: sample, solve, score, polish new bests and
//! stop on the (relaxed) confidence bound.

mod termination;

pub use termination::{relaxed_iterations, required_iterations};

use alloc::vec::Vec;
use core::time::Duration;

use thiserror::Error;

use crate::geometry::{Correspondence, ImageSizes, Model, ModelKind};
use crate::sampling::{Sampler, SamplerKind, SamplerOptions, SamplingError};
use crate::scoring::{
    quality_from_loss, score_residuals, sigma_consensus_pp, total_loss, BaselineScorer, IrlsSettings, NoiseConfig,
    ScoreProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scorer {
    MagsacPlusPlus,
    Ransac,
    Msac,
    Lmeds,
}

impl Scorer {
    fn baseline(self) -> Option<BaselineScorer> {
        match self {
            Scorer::MagsacPlusPlus => None,
            Scorer::Ransac => Some(BaselineScorer::Ransac),
            Scorer::Msac => Some(BaselineScorer::Msac),
            Scorer::Lmeds => Some(BaselineScorer::Lmeds),
        }
    }
}

pub const DEFAULT_CONFIDENCE: f64 = 0.99;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
/// Relaxation used with localized samplers.
pub const DEFAULT_LOCALIZED_RELAXATION: f64 = 0.1;
/// Inlier ratios below this mark a result as low-confidence.
pub const LOW_CONFIDENCE_RATIO: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub kind: ModelKind,
    pub scorer: Scorer,
    pub sampler: SamplerKind,
    /// μ
    pub confidence: f64,
    /// γ
    pub relaxation: f64,
    pub max_iterations: usize,
    /// Also fixes the inlier threshold kσ_max used by the baselines, the
    /// inlier mask and the termination bound.
    pub noise: NoiseConfig,
    pub seed: u64,
    pub irls: IrlsSettings,
    /// Polish new incumbents and the final model.
    pub polish: bool,
    pub napsac_radius: Option<f64>,
    /// Per-point quality scores for PROSAC-style ordering, higher first.
    pub ordering: Option<Vec<f64>>,
}

impl EngineConfig {
    /// Defaults: μ = 0.99, γ = 0.1 for NAPSAC and P-NAPSAC and 0 otherwise,
    /// cap 100 000, seed 0.
    pub fn new(kind: ModelKind, scorer: Scorer, sampler: SamplerKind, noise: NoiseConfig) -> Self {
        Self {
            kind,
            scorer,
            sampler,
            confidence: DEFAULT_CONFIDENCE,
            relaxation: if sampler.is_localized() {
                DEFAULT_LOCALIZED_RELAXATION
            } else {
                0.0
            },
            max_iterations: DEFAULT_MAX_ITERATIONS,
            noise,
            seed: 0,
            irls: IrlsSettings::default(),
            polish: true,
            napsac_radius: None,
            ordering: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_relaxation(mut self, relaxation: f64) -> Self {
        self.relaxation = relaxation;
        self
    }

    pub fn with_max_iterations(mut self, cap: usize) -> Self {
        self.max_iterations = cap;
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    pub fn threshold(&self) -> f64 {
        self.noise.threshold()
    }

    fn validate(&self) -> Result<(), EngineError> {
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(EngineError::InvalidConfig("confidence must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.relaxation) {
            return Err(EngineError::InvalidConfig("relaxation must lie in [0, 1]"));
        }
        if self.max_iterations == 0 {
            return Err(EngineError::InvalidConfig("iteration cap must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("need at least {required} correspondences, got {available}")]
    InsufficientPoints { required: usize, available: usize },
    #[error("every sample was degenerate; no model found")]
    NoModelFound,
    #[error("sampler failed: {0}")]
    Sampling(SamplingError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

impl From<SamplingError> for EngineError {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::InsufficientPoints { required, available } => {
                EngineError::InsufficientPoints { required, available }
            }
            other => EngineError::Sampling(other),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageCounters {
    pub samples_drawn: usize,
    pub models_scored: usize,
    /// Candidates that beat the incumbent.
    pub improvements: usize,
    pub polish_runs: usize,
    /// Polished models kept because they scored at least as well.
    pub polish_accepted: usize,
    pub irls_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct EstimationReport {
    pub model: Model,
    /// Score of `model` under the configured scorer, higher is better.
    pub quality: f64,
    /// r ≤ kσ_max per correspondence.
    pub inliers: Vec<bool>,
    pub inlier_count: usize,
    pub iterations: usize,
    pub degenerate_samples: usize,
    /// Relaxed iteration bound in force when the loop stopped, from the
    /// incumbent's inlier ratio before the final polish.
    pub iteration_bound: usize,
    /// (iteration, incumbent score) at every incumbent change.
    pub quality_trace: Vec<(usize, f64)>,
    pub counters: StageCounters,
    /// Inlier ratio below 0.1.
    pub low_confidence: bool,
    /// Left at zero here; callers with a clock fill it in.
    pub wall_time: Duration,
}

impl EstimationReport {
    pub fn inlier_ratio(&self) -> f64 {
        if self.inliers.is_empty() {
            0.0
        } else {
            self.inlier_count as f64 / self.inliers.len() as f64
        }
    }
}

struct Evaluator<'a> {
    points: &'a [Correspondence],
    scorer: Scorer,
    threshold: f64,
    profile: Option<ScoreProfile>,
    residuals: Vec<f64>,
}

impl Evaluator<'_> {
    fn score(&mut self, model: &Model) -> f64 {
        match (self.scorer.baseline(), &self.profile) {
            (None, Some(profile)) => quality_from_loss(total_loss(model, self.points, profile)),
            (Some(kind), _) => {
                let prepared = model.prepare();
                score_residuals(kind, self.points.iter().map(|p| prepared.residual(p)), self.threshold)
            }
            (None, None) => unreachable!("MAGSAC++ scoring always has a profile"),
        }
    }

    fn inliers(&mut self, model: &Model) -> usize {
        let prepared = model.prepare();
        self.residuals.clear();
        self.residuals.extend(self.points.iter().map(|p| prepared.residual(p)));
        let t = self.threshold;
        self.residuals.iter().filter(|&&r| r <= t).count()
    }

    /// σ-consensus++ for MAGSAC++, least squares on the inliers otherwise.
    fn polish(&mut self, model: &Model, irls: &IrlsSettings, counters: &mut StageCounters) -> Option<Model> {
        counters.polish_runs += 1;
        let kind = model.kind();
        match &self.profile {
            Some(profile) if self.scorer == Scorer::MagsacPlusPlus => {
                let outcome = sigma_consensus_pp(model, self.points, profile, irls, |p, w| kind.solve_weighted(p, w));
                counters.irls_iterations += outcome.iterations;
                Some(outcome.model)
            }
            _ => {
                self.inliers(model);
                let t = self.threshold;
                let weights: Vec<f64> = self.residuals.iter().map(|&r| if r <= t { 1.0 } else { 0.0 }).collect();
                kind.solve_weighted(self.points, &weights).ok()
            }
        }
    }
}

/// Runs robust estimation of `config.kind` on `points`.
///
/// New incumbents are polished and the polished model is kept only if it
/// scores at least as well as the raw candidate. One more guarded polish runs
/// on the final incumbent.
pub fn run_estimation(
    points: &[Correspondence],
    sizes: ImageSizes,
    config: &EngineConfig,
) -> Result<EstimationReport, EngineError> {
    config.validate()?;
    let m = config.kind.sample_size();
    let n = points.len();
    if n < m {
        return Err(EngineError::InsufficientPoints {
            required: m,
            available: n,
        });
    }
    let options = SamplerOptions {
        seed: config.seed,
        scores: config.ordering.as_deref(),
        napsac_radius: config.napsac_radius,
    };
    let mut sampler = Sampler::new(config.sampler, points, sizes, m, &options)?;
    let mut eval = Evaluator {
        points,
        scorer: config.scorer,
        threshold: config.threshold(),
        profile: (config.scorer == Scorer::MagsacPlusPlus).then(|| ScoreProfile::new(config.noise)),
        residuals: Vec::with_capacity(n),
    };

    let cap = config.max_iterations;
    let bound = |eta: f64| relaxed_iterations(config.confidence, eta, config.relaxation, m, cap);
    let mut counters = StageCounters::default();
    let mut best: Option<(Model, f64)> = None;
    let mut quality_trace = Vec::new();
    let mut iteration_bound = cap;
    let mut iterations = 0;
    let mut degenerate = 0;
    let mut indices = Vec::with_capacity(m);
    let mut sample = Vec::with_capacity(m);

    while iterations < iteration_bound {
        iterations += 1;
        sampler.draw(&mut indices)?;
        counters.samples_drawn += 1;
        sample.clear();
        sample.extend(indices.iter().map(|&i| points[i]));
        let candidates = match config.kind.solve_minimal(&sample) {
            Ok(c) if !c.is_empty() => c,
            _ => {
                degenerate += 1;
                continue;
            }
        };
        let mut improved = false;
        for candidate in candidates {
            counters.models_scored += 1;
            let score = eval.score(&candidate);
            if best.as_ref().is_some_and(|(_, q)| !(score > *q)) {
                continue;
            }
            counters.improvements += 1;
            let mut incumbent = (candidate, score);
            if config.polish {
                if let Some(polished) = eval.polish(&candidate, &config.irls, &mut counters) {
                    let polished_score = eval.score(&polished);
                    if polished_score >= score {
                        counters.polish_accepted += 1;
                        incumbent = (polished, polished_score);
                    }
                }
            }
            best = Some(incumbent);
            improved = true;
        }
        if improved {
            let (model, quality) = best.expect("set above");
            quality_trace.push((iterations, quality));
            let eta = eval.inliers(&model) as f64 / n as f64;
            iteration_bound = bound(eta);
        }
    }

    let (mut model, mut quality) = best.ok_or(EngineError::NoModelFound)?;
    let final_polish = if config.polish {
        eval.polish(&model, &config.irls, &mut counters)
    } else {
        None
    };
    if let Some(polished) = final_polish {
        let polished_score = eval.score(&polished);
        if polished_score >= quality {
            counters.polish_accepted += 1;
            if polished_score > quality {
                quality_trace.push((iterations, polished_score));
            }
            model = polished;
            quality = polished_score;
        }
    }
    let inlier_count = eval.inliers(&model);
    let threshold = eval.threshold;
    let inliers: Vec<bool> = eval.residuals.iter().map(|&r| r <= threshold).collect();
    let ratio = inlier_count as f64 / n as f64;
    Ok(EstimationReport {
        model,
        quality,
        inliers,
        inlier_count,
        iterations,
        degenerate_samples: degenerate,
        iteration_bound,
        quality_trace,
        counters,
        low_confidence: ratio < LOW_CONFIDENCE_RATIO,
        wall_time: Duration::ZERO,
    })
}
