//! Method strings: `scorer:sampler[:key=value]...`, e.g.
//! `magsac++:pnapsac:gamma=0.1` or `msac:uniform:threshold=6`.
//!
//! Keys: `sigma` (σ_max in px), `threshold` (kσ_max in px), `conf`,
//! `gamma`, `cap`.

use std::fmt;
use std::str::FromStr;

use magsac_core::{EngineConfig, ModelKind, NoiseConfig, SamplerKind, Scorer};
use thiserror::Error;

/// σ_max used when a method string sets neither `sigma` nor `threshold`.
pub const DEFAULT_SIGMA_MAX: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    /// The string the method was parsed from.
    pub id: String,
    pub scorer: Scorer,
    pub sampler: SamplerKind,
    pub sigma_max: Option<f64>,
    pub threshold: Option<f64>,
    pub confidence: Option<f64>,
    pub relaxation: Option<f64>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MethodParseError {
    #[error("method `{0}` must look like scorer:sampler[:key=value]")]
    Shape(String),
    #[error("unknown scorer `{0}` (magsac++, ransac, msac, lmeds)")]
    Scorer(String),
    #[error("unknown sampler `{0}` (uniform, prosac, napsac, pnapsac)")]
    Sampler(String),
    #[error("bad parameter `{0}`")]
    Parameter(String),
    #[error("invalid noise setting in `{0}`")]
    Noise(String),
}

pub fn parse_scorer(s: &str) -> Result<Scorer, MethodParseError> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "magsac++" | "magsacpp" | "magsac" => Scorer::MagsacPlusPlus,
        "ransac" => Scorer::Ransac,
        "msac" => Scorer::Msac,
        "lmeds" => Scorer::Lmeds,
        _ => return Err(MethodParseError::Scorer(s.to_owned())),
    })
}

pub fn parse_sampler(s: &str) -> Result<SamplerKind, MethodParseError> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "uniform" => SamplerKind::Uniform,
        "prosac" => SamplerKind::Prosac,
        "napsac" => SamplerKind::Napsac,
        "pnapsac" | "p-napsac" => SamplerKind::ProgressiveNapsac,
        _ => return Err(MethodParseError::Sampler(s.to_owned())),
    })
}

impl FromStr for MethodSpec {
    type Err = MethodParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut parts = s.split(':');
        let (Some(scorer), Some(sampler)) = (parts.next(), parts.next()) else {
            return Err(MethodParseError::Shape(s.to_owned()));
        };
        let mut spec = MethodSpec {
            id: s.to_owned(),
            scorer: parse_scorer(scorer)?,
            sampler: parse_sampler(sampler)?,
            sigma_max: None,
            threshold: None,
            confidence: None,
            relaxation: None,
            max_iterations: None,
        };
        for part in parts {
            let bad = || MethodParseError::Parameter(part.to_owned());
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key {
                "cap" => spec.max_iterations = Some(value.parse().map_err(|_| bad())?),
                _ => {
                    let v: f64 = value.parse().map_err(|_| bad())?;
                    match key {
                        "sigma" => spec.sigma_max = Some(v),
                        "threshold" => spec.threshold = Some(v),
                        "conf" => spec.confidence = Some(v),
                        "gamma" => spec.relaxation = Some(v),
                        _ => return Err(bad()),
                    }
                }
            }
        }
        spec.noise()?;
        Ok(spec)
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

impl MethodSpec {
    /// Noise model from `sigma`, else from `threshold`, else the default σ_max.
    pub fn noise(&self) -> Result<NoiseConfig, MethodParseError> {
        let result = match (self.sigma_max, self.threshold) {
            (Some(s), _) => NoiseConfig::new(s),
            (None, Some(t)) => NoiseConfig::from_threshold(t),
            (None, None) => NoiseConfig::new(DEFAULT_SIGMA_MAX),
        };
        result.map_err(|_| MethodParseError::Noise(self.id.clone()))
    }

    pub fn engine_config(&self, kind: ModelKind, seed: u64) -> EngineConfig {
        let noise = self.noise().expect("validated when parsed");
        let mut config = EngineConfig::new(kind, self.scorer, self.sampler, noise).with_seed(seed);
        if let Some(c) = self.confidence {
            config.confidence = c;
        }
        if let Some(g) = self.relaxation {
            config.relaxation = g;
        }
        if let Some(cap) = self.max_iterations {
            config.max_iterations = cap;
        }
        config
    }
}
