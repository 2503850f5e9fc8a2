//! Minimal-sample generators: uniform, PROSAC and NAPSAC baselines, and
//! Progressive NAPSAC with its growth table and multi-layer grid.
//!
//! Every sampler owns a ChaCha8 stream seeded from a `u64`, so sampling
//! traces are reproducible across platforms.

mod baseline;
mod grid;
mod growth;
mod pnapsac;

pub use baseline::{NapsacSampler, ProsacSampler, ProsacSchedule, UniformSampler, PROSAC_HORIZON};
pub use grid::{cell_coordinates, GridLayer, MultiLayerGrid, GRID_LAYERS};
pub use growth::GrowthTable;
pub use pnapsac::{Neighborhoods, ProgressiveNapsac};

use alloc::vec::Vec;

use thiserror::Error;

use crate::geometry::{Correspondence, ImageSizes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("need at least {required} points, got {available}")]
    InsufficientPoints { required: usize, available: usize },
    #[error("no point has enough neighbors within the NAPSAC radius")]
    NapsacStarved,
    #[error("invalid sampler argument: {0}")]
    DomainError(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SamplerKind {
    Uniform,
    Prosac,
    Napsac,
    ProgressiveNapsac,
}

impl SamplerKind {
    /// Whether the sampler draws spatially coherent samples.
    pub fn is_localized(self) -> bool {
        matches!(self, SamplerKind::Napsac | SamplerKind::ProgressiveNapsac)
    }
}

/// Fraction of the joint 4D image diagonal used as the default NAPSAC radius.
pub const DEFAULT_NAPSAC_RADIUS_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, Default)]
pub struct SamplerOptions<'s> {
    pub seed: u64,
    /// Per-point quality scores, higher first. Required by PROSAC; orders
    /// the first point of P-NAPSAC when present.
    pub scores: Option<&'s [f64]>,
    /// NAPSAC ball radius; 10% of the joint image diagonal when unset.
    pub napsac_radius: Option<f64>,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Sampler<'a> {
    Uniform(UniformSampler),
    Prosac(ProsacSampler),
    Napsac(NapsacSampler<'a>),
    ProgressiveNapsac(ProgressiveNapsac<'a>),
}

impl<'a> Sampler<'a> {
    pub fn new(
        kind: SamplerKind,
        points: &'a [Correspondence],
        sizes: ImageSizes,
        m: usize,
        options: &SamplerOptions<'_>,
    ) -> Result<Self, SamplingError> {
        let n = points.len();
        Ok(match kind {
            SamplerKind::Uniform => Sampler::Uniform(UniformSampler::new(n, m, options.seed)?),
            SamplerKind::Prosac => {
                let scores = options
                    .scores
                    .ok_or(SamplingError::DomainError("PROSAC needs per-point scores"))?;
                if scores.len() != n {
                    return Err(SamplingError::DomainError("one score per point is required"));
                }
                Sampler::Prosac(ProsacSampler::new(scores, m, options.seed)?)
            }
            SamplerKind::Napsac => {
                let radius = options
                    .napsac_radius
                    .unwrap_or(DEFAULT_NAPSAC_RADIUS_FRACTION * sizes.joint_diagonal());
                Sampler::Napsac(NapsacSampler::new(points, m, radius, options.seed)?)
            }
            SamplerKind::ProgressiveNapsac => {
                Sampler::ProgressiveNapsac(ProgressiveNapsac::new(points, sizes, m, options.scores, options.seed)?)
            }
        })
    }

    pub fn kind(&self) -> SamplerKind {
        match self {
            Sampler::Uniform(_) => SamplerKind::Uniform,
            Sampler::Prosac(_) => SamplerKind::Prosac,
            Sampler::Napsac(_) => SamplerKind::Napsac,
            Sampler::ProgressiveNapsac(_) => SamplerKind::ProgressiveNapsac,
        }
    }

    /// Writes the next minimal sample into `out`.
    pub fn draw(&mut self, out: &mut Vec<usize>) -> Result<(), SamplingError> {
        match self {
            Sampler::Uniform(s) => s.draw(out),
            Sampler::Prosac(s) => s.draw(out),
            Sampler::Napsac(s) => return s.draw(out),
            Sampler::ProgressiveNapsac(s) => s.draw(out),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(n: usize) -> Vec<Correspondence> {
        (0..n)
            .map(|i| {
                let x = i as f64 * 10.0;
                Correspondence::new(x, x * 0.5, x + 1.0, x * 0.5 + 1.0)
            })
            .collect()
    }

    fn sizes() -> ImageSizes {
        ImageSizes::square(1000.0, 1000.0)
    }

    fn distinct(sample: &[usize], n: usize) -> bool {
        let mut s = sample.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len() == sample.len() && s.iter().all(|&i| i < n)
    }

    #[test]
    fn all_kinds_draw_valid_samples() {
        let points = line(60);
        let scores: Vec<f64> = (0..60).map(|i| -(i as f64)).collect();
        let options = SamplerOptions {
            seed: 7,
            scores: Some(&scores),
            napsac_radius: Some(200.0),
        };
        for kind in [
            SamplerKind::Uniform,
            SamplerKind::Prosac,
            SamplerKind::Napsac,
            SamplerKind::ProgressiveNapsac,
        ] {
            let mut sampler = Sampler::new(kind, &points, sizes(), 4, &options).unwrap();
            assert_eq!(sampler.kind(), kind);
            let mut out = Vec::new();
            for _ in 0..500 {
                sampler.draw(&mut out).unwrap();
                assert_eq!(out.len(), 4);
                assert!(distinct(&out, points.len()), "{kind:?} {out:?}");
            }
        }
    }

    #[test]
    fn insufficient_points() {
        let points = line(3);
        let err = Sampler::new(SamplerKind::Uniform, &points, sizes(), 4, &SamplerOptions::default());
        assert_eq!(
            err.unwrap_err(),
            SamplingError::InsufficientPoints {
                required: 4,
                available: 3
            }
        );
        let err = Sampler::new(
            SamplerKind::ProgressiveNapsac,
            &points,
            sizes(),
            4,
            &SamplerOptions::default(),
        );
        assert!(matches!(err, Err(SamplingError::InsufficientPoints { .. })));
    }

    #[test]
    fn prosac_first_sample_is_top_prefix() {
        let scores = vec![0.1, 0.9, 0.5, 0.8, 0.2, 0.7, 0.0];
        let mut sampler = ProsacSampler::new(&scores, 4, 3).unwrap();
        let mut out = Vec::new();
        sampler.draw(&mut out);
        out.sort_unstable();
        assert_eq!(out, vec![1, 2, 3, 5]);
        assert!(Sampler::new(SamplerKind::Prosac, &line(7), sizes(), 4, &SamplerOptions::default()).is_err());
    }

    #[test]
    fn napsac_stays_in_ball() {
        let points = line(40);
        let mut sampler = NapsacSampler::new(&points, 4, 40.0, 1).unwrap();
        let mut out = Vec::new();
        for _ in 0..200 {
            sampler.draw(&mut out).unwrap();
            for &j in &out[1..] {
                assert!(points[out[0]].distance4(&points[j]) <= 40.0);
            }
        }
        let mut starved = NapsacSampler::new(&points, 4, 1.0, 1).unwrap();
        assert_eq!(starved.draw(&mut out), Err(SamplingError::NapsacStarved));
    }

    #[test]
    fn full_set_when_n_equals_m() {
        let points = line(4);
        let mut pn = ProgressiveNapsac::new(&points, sizes(), 4, None, 0).unwrap();
        let mut out = Vec::new();
        for _ in 0..10 {
            pn.draw(&mut out);
            assert_eq!(out, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn saturated_neighborhood_draws_globally() {
        let points = line(30);
        let mut pn = ProgressiveNapsac::new(&points, sizes(), 4, None, 5).unwrap();
        pn.set_state(0, 1 << 40, 30);
        let mut out = Vec::new();
        let mut seen = [false; 30];
        for _ in 0..400 {
            pn.sample_around(0, &mut out);
            assert_eq!(out[0], 0);
            assert!(distinct(&out, 30));
            for &j in &out[1..] {
                seen[j] = true;
            }
        }
        assert!(seen[1..].iter().all(|&s| s));
    }

    #[test]
    fn far_center_does_not_hit_member() {
        let mut points = line(30);
        points.push(Correspondence::new(990.0, 990.0, 990.0, 990.0));
        let mut pn = ProgressiveNapsac::new(&points, sizes(), 4, None, 5).unwrap();
        let before = pn.hits()[0];
        pn.update_hits(&[30, 0, 1, 2], 30);
        assert_eq!(pn.hits()[0], before);
        pn.update_hits(&[0, 1], 0);
        assert_eq!(pn.hits()[1], 1);
    }
}
