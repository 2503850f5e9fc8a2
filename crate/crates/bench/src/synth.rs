//! Synthetic two-view scenes with known ground truth.

use magsac_core::geometry::solve_homography_minimal;
use magsac_core::{Correspondence, GroundTruth, ImageSizes, Model, ModelKind};
use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::instance::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// Inliers spread over the whole first image.
    Global,
    /// Inliers confined to a random half-width, half-height window (25% of the area).
    Localized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub kind: ModelKind,
    pub n_points: usize,
    pub inlier_ratio: f64,
    pub noise_sigma: f64,
    pub layout: Layout,
    pub sizes: ImageSizes,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(kind: ModelKind, n_points: usize, inlier_ratio: f64, noise_sigma: f64, seed: u64) -> Self {
        Self {
            kind,
            n_points,
            inlier_ratio,
            noise_sigma,
            layout: Layout::Global,
            sizes: ImageSizes::square(1000.0, 1000.0),
            seed,
        }
    }

    pub fn localized(mut self) -> Self {
        self.layout = Layout::Localized;
        self
    }

    pub fn inlier_count(&self) -> usize {
        ((self.n_points as f64 * self.inlier_ratio).round() as usize).min(self.n_points)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic scene parameter: {0}")]
    DomainError(&'static str),
    #[error("could not place inliers inside both images")]
    PlacementFailed,
}

const MAX_TRIES: usize = 1000;

/// A ground-truth model plus a sampler of exact inlier pairs in a window.
enum Scene {
    Homography(Matrix3<f64>),
    Epipolar {
        k1_inv: Matrix3<f64>,
        k2: Matrix3<f64>,
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
    },
}

impl Scene {
    fn random(kind: ModelKind, sizes: &ImageSizes, rng: &mut ChaCha8Rng) -> Result<(Self, Model), SynthError> {
        match kind {
            ModelKind::Homography => {
                for _ in 0..MAX_TRIES {
                    let (w1, h1, w2, h2) = (sizes.width1, sizes.height1, sizes.width2, sizes.height2);
                    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
                    let sample: Vec<Correspondence> = corners
                        .iter()
                        .map(|&(x, y)| {
                            let jx = rng.random_range(-0.15..0.15);
                            let jy = rng.random_range(-0.15..0.15);
                            Correspondence::new(x * w1, y * h1, (x + jx) * w2, (y + jy) * h2)
                        })
                        .collect();
                    if let Ok(model) = solve_homography_minimal(&sample) {
                        return Ok((Scene::Homography(*model.matrix()), model));
                    }
                }
                Err(SynthError::PlacementFailed)
            }
            ModelKind::FundamentalMatrix => {
                let k = |w: f64, h: f64| Matrix3::new(w, 0.0, w / 2.0, 0.0, w, h / 2.0, 0.0, 0.0, 1.0);
                let k1 = k(sizes.width1, sizes.height1);
                let k2 = k(sizes.width2, sizes.height2);
                let angle = |rng: &mut ChaCha8Rng| rng.random_range(-0.15..0.15);
                let rotation = *Rotation3::from_euler_angles(angle(rng), angle(rng), angle(rng)).matrix();
                let direction = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-0.3..0.3),
                );
                let translation = direction.normalize();
                let k1_inv = k1.try_inverse().ok_or(SynthError::PlacementFailed)?;
                let k2_inv_t = k2.try_inverse().ok_or(SynthError::PlacementFailed)?.transpose();
                let f = k2_inv_t * translation.cross_matrix() * rotation * k1_inv;
                let model = Model::new(ModelKind::FundamentalMatrix, f).map_err(|_| SynthError::PlacementFailed)?;
                Ok((
                    Scene::Epipolar {
                        k1_inv,
                        k2,
                        rotation,
                        translation,
                    },
                    model,
                ))
            }
        }
    }

    /// Image of a first-image point in the second image, if it lands there.
    fn project(&self, u: f64, v: f64, rng: &mut ChaCha8Rng, sizes: &ImageSizes) -> Option<(f64, f64)> {
        let (x, y) = match self {
            Scene::Homography(h) => magsac_core::geometry::transfer(h, u, v)?,
            Scene::Epipolar {
                k1_inv,
                k2,
                rotation,
                translation,
            } => {
                let depth = rng.random_range(4.0..12.0);
                let world = k1_inv * Vector3::new(u, v, 1.0) * depth;
                let seen = k2 * (rotation * world + translation);
                if seen.z.is_nan() || seen.z <= 1e-6 {
                    return None;
                }
                (seen.x / seen.z, seen.y / seen.z)
            }
        };
        ((0.0..=sizes.width2).contains(&x) && (0.0..=sizes.height2).contains(&y)).then_some((x, y))
    }
}

/// Draws a scene per `spec`. Gaussian noise is added to the second-image
/// coordinates of inliers; outliers are uniform in both images. Points are
/// shuffled and labels record which are inliers.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<ProblemInstance, SynthError> {
    if !(spec.inlier_ratio > 0.0 && spec.inlier_ratio <= 1.0) {
        return Err(SynthError::DomainError("inlier ratio must lie in (0, 1]"));
    }
    if !spec.noise_sigma.is_finite() || spec.noise_sigma < 0.0 {
        return Err(SynthError::DomainError("noise sigma must be nonnegative"));
    }
    if spec.n_points == 0 {
        return Err(SynthError::DomainError("at least one point is required"));
    }
    if !spec.sizes.is_valid() {
        return Err(SynthError::DomainError("image sizes must be positive"));
    }
    let sizes = spec.sizes;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|_| SynthError::DomainError("noise sigma"))?;

    let (scene, model, window) = 'scene: {
        for _ in 0..MAX_TRIES {
            let (scene, model) = Scene::random(spec.kind, &sizes, &mut rng)?;
            let window = match spec.layout {
                Layout::Global => (0.0, 0.0, sizes.width1, sizes.height1),
                Layout::Localized => {
                    let (w, h) = (sizes.width1 / 2.0, sizes.height1 / 2.0);
                    let x0 = rng.random_range(0.0..=sizes.width1 - w);
                    let y0 = rng.random_range(0.0..=sizes.height1 - h);
                    (x0, y0, w, h)
                }
            };
            // Reject scenes where the window barely reaches the second image.
            let hits = (0..64)
                .filter(|_| {
                    let u = window.0 + rng.random_range(0.0..=window.2);
                    let v = window.1 + rng.random_range(0.0..=window.3);
                    scene.project(u, v, &mut rng, &sizes).is_some()
                })
                .count();
            if hits >= 32 {
                break 'scene (scene, model, window);
            }
        }
        return Err(SynthError::PlacementFailed);
    };

    let inliers = spec.inlier_count();
    let mut labeled = Vec::with_capacity(spec.n_points);
    let mut tries = 0;
    while labeled.len() < inliers {
        tries += 1;
        if tries > MAX_TRIES * spec.n_points.max(1) {
            return Err(SynthError::PlacementFailed);
        }
        let u = window.0 + rng.random_range(0.0..=window.2);
        let v = window.1 + rng.random_range(0.0..=window.3);
        let Some((x, y)) = scene.project(u, v, &mut rng, &sizes) else {
            continue;
        };
        let (dx, dy) = if spec.noise_sigma > 0.0 {
            (noise.sample(&mut rng), noise.sample(&mut rng))
        } else {
            (0.0, 0.0)
        };
        labeled.push((Correspondence::new(u, v, x + dx, y + dy), true));
    }
    while labeled.len() < spec.n_points {
        let p = Correspondence::new(
            rng.random_range(0.0..=sizes.width1),
            rng.random_range(0.0..=sizes.height1),
            rng.random_range(0.0..=sizes.width2),
            rng.random_range(0.0..=sizes.height2),
        );
        labeled.push((p, false));
    }
    labeled.shuffle(&mut rng);

    let (points, labels): (Vec<_>, Vec<_>) = labeled.into_iter().unzip();
    let truth = GroundTruth::new(Some(model), Some(labels), sizes).expect("model and labels present");
    let id = format!(
        "synth-{}-{}-n{}-r{}-s{}-{}",
        match spec.kind {
            ModelKind::Homography => "h",
            ModelKind::FundamentalMatrix => "f",
        },
        match spec.layout {
            Layout::Global => "global",
            Layout::Localized => "local",
        },
        spec.n_points,
        spec.inlier_ratio,
        spec.noise_sigma,
        spec.seed
    );
    Ok(ProblemInstance {
        id,
        kind: Some(spec.kind),
        points,
        sizes,
        truth: Some(truth),
    })
}
