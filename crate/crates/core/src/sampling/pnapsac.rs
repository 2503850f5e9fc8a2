use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Correspondence, ImageSizes};

use super::baseline::ProsacSchedule;
use super::{GrowthTable, MultiLayerGrid, SamplingError};

#[derive(Debug, Clone)]
struct Cached {
    layer: usize,
    sorted: Vec<u32>,
}

/// Grid-backed approximate nearest neighbors with a per-point cache.
#[derive(Debug, Clone)]
pub struct Neighborhoods<'a> {
    points: &'a [Correspondence],
    grid: MultiLayerGrid,
    cache: Vec<Option<Cached>>,
}

impl<'a> Neighborhoods<'a> {
    pub fn new(points: &'a [Correspondence], sizes: ImageSizes) -> Result<Self, SamplingError> {
        Ok(Self {
            points,
            grid: MultiLayerGrid::new(points, sizes)?,
            cache: vec![None; points.len()],
        })
    }

    pub fn grid(&self) -> &MultiLayerGrid {
        &self.grid
    }

    /// Delta of the layer `query(i, required)` reads from.
    pub fn selected_delta(&self, i: usize, required: usize) -> u32 {
        self.grid.layers()[self.grid.select_layer(i, required)].delta()
    }

    /// The other points of p_i's cell in the finest layer holding at least
    /// `required` of them, nearest first (ties by index).
    pub fn query(&mut self, i: usize, required: usize) -> &[u32] {
        let layer = self.grid.select_layer(i, required);
        let stale = !matches!(&self.cache[i], Some(c) if c.layer == layer);
        if stale {
            let center = self.points[i];
            let points = self.points;
            let mut sorted: Vec<u32> = self.grid.layers()[layer]
                .cell_of_point(i)
                .iter()
                .copied()
                .filter(|&j| j as usize != i)
                .collect();
            sorted.sort_by(|&a, &b| {
                let da = center.distance4_squared(&points[a as usize]);
                let db = center.distance4_squared(&points[b as usize]);
                da.total_cmp(&db).then(a.cmp(&b))
            });
            self.cache[i] = Some(Cached { layer, sorted });
        }
        match &self.cache[i] {
            Some(c) => &c.sorted,
            None => &[],
        }
    }
}

/// Progressive NAPSAC: the first point is drawn globally, its companions
/// from a neighborhood that grows with the point's hit count until it spans
/// the whole point set.
#[derive(Debug, Clone)]
pub struct ProgressiveNapsac<'a> {
    m: usize,
    n: usize,
    hits: Vec<u64>,
    sizes: Vec<usize>,
    growth: Option<GrowthTable>,
    neighborhoods: Neighborhoods<'a>,
    schedule: Option<ProsacSchedule>,
    rng: ChaCha8Rng,
}

impl<'a> ProgressiveNapsac<'a> {
    /// `scores`, when given, order the choice of first points PROSAC-style.
    pub fn new(
        points: &'a [Correspondence],
        sizes: ImageSizes,
        m: usize,
        scores: Option<&[f64]>,
        seed: u64,
    ) -> Result<Self, SamplingError> {
        let n = points.len();
        if m < 2 {
            return Err(SamplingError::DomainError("sample size must be at least 2"));
        }
        if n < m {
            return Err(SamplingError::InsufficientPoints {
                required: m,
                available: n,
            });
        }
        let schedule = scores.map(|s| ProsacSchedule::new(s, n, m)).transpose()?;
        Ok(Self {
            m,
            n,
            hits: vec![0; n],
            sizes: vec![m.min(n); n],
            growth: if n > m { Some(GrowthTable::new(m, n)?) } else { None },
            neighborhoods: Neighborhoods::new(points, sizes)?,
            schedule,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn hits(&self) -> &[u64] {
        &self.hits
    }

    /// Current k_i per point.
    pub fn neighborhood_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn growth(&self) -> Option<&GrowthTable> {
        self.growth.as_ref()
    }

    pub fn neighborhoods(&mut self) -> &mut Neighborhoods<'a> {
        &mut self.neighborhoods
    }

    /// Sets t_i and k_i of a point directly.
    pub fn set_state(&mut self, i: usize, hits: u64, size: usize) {
        self.hits[i] = hits;
        self.sizes[i] = size.clamp(self.m, self.n);
    }

    fn grow(&mut self, i: usize) {
        if let Some(growth) = &self.growth {
            if self.sizes[i] < self.n && self.hits[i] >= growth.t_prime(self.sizes[i]) {
                self.sizes[i] += 1;
            }
        }
    }

    fn pick_center(&mut self) -> usize {
        match &mut self.schedule {
            Some(schedule) => {
                let (subset, forced) = schedule.advance();
                if forced {
                    schedule.order()[subset - 1]
                } else {
                    schedule.order()[self.rng.random_range(0..subset)]
                }
            }
            None => self.rng.random_range(0..self.n),
        }
    }

    /// Draws a sample into `out` (center first) and returns the center. The
    /// center's hit count and neighborhood are advanced; companions are not.
    pub fn draw_sample(&mut self, out: &mut Vec<usize>) -> usize {
        out.clear();
        if self.n == self.m {
            out.extend(0..self.n);
            return 0;
        }
        let i = self.pick_center();
        self.hits[i] += 1;
        self.grow(i);
        self.fill_around(i, out);
        i
    }

    /// Sample around a fixed center without touching hit counts.
    pub fn sample_around(&mut self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        self.fill_around(i, out);
    }

    fn fill_around(&mut self, i: usize, out: &mut Vec<usize>) {
        let k = self.sizes[i];
        out.push(i);
        if k < self.n {
            let picks = index::sample(&mut self.rng, k - 1, self.m - 2);
            let neighbors = self.neighborhoods.query(i, k);
            out.push(neighbors[k - 1] as usize);
            out.extend(picks.iter().map(|p| neighbors[p] as usize));
        } else {
            let picks = index::sample(&mut self.rng, self.n - 1, self.m - 1);
            out.extend(picks.iter().map(|p| if p >= i { p + 1 } else { p }));
        }
    }

    /// Whether p_i ∈ S_{j,k_j}, the k_j nearest neighbors of p_j.
    pub fn in_neighborhood(&mut self, j: usize, i: usize) -> bool {
        let k = self.sizes[j];
        if k >= self.n {
            return j != i;
        }
        self.neighborhoods.query(j, k)[..k].contains(&(i as u32))
    }

    /// For every other member j of the sample, increments t_j when the center
    /// lies in S_{j,k_j}, then applies the growth rule.
    pub fn update_hits(&mut self, sample: &[usize], center: usize) {
        if self.n == self.m {
            return;
        }
        for &j in sample {
            if j != center && self.in_neighborhood(j, center) {
                self.hits[j] += 1;
                self.grow(j);
            }
        }
    }

    /// One full step: draw, then update the companions' hit counts.
    pub fn draw(&mut self, out: &mut Vec<usize>) {
        let center = self.draw_sample(out);
        let sample = core::mem::take(out);
        self.update_hits(&sample, center);
        *out = sample;
    }
}
