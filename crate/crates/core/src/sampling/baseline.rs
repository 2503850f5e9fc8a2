use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Correspondence;

use super::SamplingError;

/// Draws m distinct indices uniformly from [0, n).
#[derive(Debug, Clone)]
pub struct UniformSampler {
    n: usize,
    m: usize,
    rng: ChaCha8Rng,
}

impl UniformSampler {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self, SamplingError> {
        check_sizes(n, m)?;
        Ok(Self {
            n,
            m,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn draw(&mut self, out: &mut Vec<usize>) {
        out.clear();
        out.extend(index::sample(&mut self.rng, self.n, self.m).iter());
    }
}

/// Iterations of plain uniform sampling PROSAC's growth is matched to.
pub const PROSAC_HORIZON: f64 = 200_000.0;

/// PROSAC's progressive subset schedule over points ordered by decreasing score.
#[derive(Debug, Clone)]
pub struct ProsacSchedule {
    order: Vec<usize>,
    m: usize,
    subset: usize,
    iteration: u64,
    t_n: f64,
    t_n_prime: u64,
}

impl ProsacSchedule {
    pub fn new(scores: &[f64], n: usize, m: usize) -> Result<Self, SamplingError> {
        check_sizes(n, m)?;
        if scores.len() != n {
            return Err(SamplingError::DomainError("one score per point is required"));
        }
        let key = |s: f64| if s.is_nan() { f64::NEG_INFINITY } else { s };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| key(scores[b]).total_cmp(&key(scores[a])).then(a.cmp(&b)));
        let mut t_n = PROSAC_HORIZON;
        for i in 0..m {
            t_n *= (m - i) as f64 / (n - i) as f64;
        }
        Ok(Self {
            order,
            m,
            subset: m,
            iteration: 0,
            t_n,
            t_n_prime: 1,
        })
    }

    /// Point indices, best first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn subset(&self) -> usize {
        self.subset
    }

    /// Advances one iteration. Returns the current subset size and whether
    /// the newest point of the subset must be part of the sample.
    pub fn advance(&mut self) -> (usize, bool) {
        self.iteration += 1;
        if self.iteration > self.t_n_prime && self.subset < self.order.len() {
            let next = self.t_n * (self.subset + 1) as f64 / (self.subset + 1 - self.m) as f64;
            self.t_n_prime += (next - self.t_n).ceil().max(0.0) as u64;
            self.t_n = next;
            self.subset += 1;
        }
        (self.subset, self.t_n_prime >= self.iteration)
    }
}

#[derive(Debug, Clone)]
pub struct ProsacSampler {
    schedule: ProsacSchedule,
    rng: ChaCha8Rng,
}

impl ProsacSampler {
    pub fn new(scores: &[f64], m: usize, seed: u64) -> Result<Self, SamplingError> {
        Ok(Self {
            schedule: ProsacSchedule::new(scores, scores.len(), m)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn schedule(&self) -> &ProsacSchedule {
        &self.schedule
    }

    pub fn draw(&mut self, out: &mut Vec<usize>) {
        out.clear();
        let (subset, forced) = self.schedule.advance();
        let m = self.schedule.m;
        let order = &self.schedule.order;
        if forced {
            out.push(order[subset - 1]);
            out.extend(index::sample(&mut self.rng, subset - 1, m - 1).iter().map(|p| order[p]));
        } else {
            out.extend(index::sample(&mut self.rng, subset, m).iter().map(|p| order[p]));
        }
    }
}

/// NAPSAC: a uniform center plus m − 1 uniform draws from the 4D ball of
/// radius r around it.
#[derive(Debug, Clone)]
pub struct NapsacSampler<'a> {
    points: &'a [Correspondence],
    m: usize,
    radius: f64,
    balls: Vec<Option<Vec<u32>>>,
    rng: ChaCha8Rng,
}

impl<'a> NapsacSampler<'a> {
    pub fn new(points: &'a [Correspondence], m: usize, radius: f64, seed: u64) -> Result<Self, SamplingError> {
        check_sizes(points.len(), m)?;
        if !(radius > 0.0) {
            return Err(SamplingError::DomainError("radius must be positive"));
        }
        Ok(Self {
            points,
            m,
            radius,
            balls: vec![None; points.len()],
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Other points within the radius of p_i, in index order.
    pub fn ball(&mut self, i: usize) -> &[u32] {
        let points = self.points;
        let r2 = self.radius * self.radius;
        self.balls[i].get_or_insert_with(|| {
            let center = points[i];
            (0..points.len() as u32)
                .filter(|&j| j as usize != i && center.distance4_squared(&points[j as usize]) <= r2)
                .collect()
        })
    }

    pub fn draw(&mut self, out: &mut Vec<usize>) -> Result<(), SamplingError> {
        out.clear();
        let n = self.points.len();
        for _ in 0..n.max(1) {
            let i = self.rng.random_range(0..n);
            let size = self.ball(i).len();
            if size + 1 < self.m {
                continue;
            }
            let picks = index::sample(&mut self.rng, size, self.m - 1);
            let ball = self.balls[i].as_deref().unwrap_or(&[]);
            out.push(i);
            out.extend(picks.iter().map(|p| ball[p] as usize));
            return Ok(());
        }
        Err(SamplingError::NapsacStarved)
    }
}

fn check_sizes(n: usize, m: usize) -> Result<(), SamplingError> {
    if m == 0 {
        return Err(SamplingError::DomainError("sample size must be positive"));
    }
    if n < m {
        return Err(SamplingError::InsufficientPoints {
            required: m,
            available: n,
        });
    }
    Ok(())
}
