use alloc::vec::Vec;

use super::marginal::MarginalKernel;
use super::NoiseConfig;

pub const DEFAULT_BINS: usize = 4096;

/// Lookup tables of w(r) and ρ(r) over [0, kσ_max] for one noise configuration.
///
/// Values between knots use cubic Hermite interpolation with the exact
/// derivatives w′(r) and ρ′(r) = r·w(r) stored at each knot.
#[derive(Debug, Clone)]
pub struct ScoreProfile {
    kernel: MarginalKernel,
    step: f64,
    inv_step: f64,
    weights: Vec<f64>,
    weight_slopes: Vec<f64>,
    losses: Vec<f64>,
}

impl ScoreProfile {
    pub fn new(config: NoiseConfig) -> Self {
        Self::with_bins(config, DEFAULT_BINS)
    }

    /// Panics if `bins` is zero.
    pub fn with_bins(config: NoiseConfig, bins: usize) -> Self {
        assert!(bins > 0, "a score profile needs at least one bin");
        let kernel = MarginalKernel::new(config);
        let cutoff = config.threshold();
        let step = cutoff / bins as f64;
        let mut weights = Vec::with_capacity(bins + 1);
        let mut weight_slopes = Vec::with_capacity(bins + 1);
        let mut losses = Vec::with_capacity(bins + 1);
        for i in 0..bins {
            let r = i as f64 * step;
            weights.push(kernel.weight(r));
            weight_slopes.push(kernel.weight_derivative(r));
            losses.push(kernel.loss(r));
        }
        weights.push(0.0);
        weight_slopes.push(kernel.weight_derivative(cutoff));
        losses.push(kernel.rho_max());
        Self {
            kernel,
            step,
            inv_step: 1.0 / step,
            weights,
            weight_slopes,
            losses,
        }
    }

    pub fn config(&self) -> &NoiseConfig {
        self.kernel.config()
    }

    pub fn kernel(&self) -> &MarginalKernel {
        &self.kernel
    }

    pub fn bins(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn rho_max(&self) -> f64 {
        self.kernel.rho_max()
    }

    pub fn weight_table(&self) -> &[f64] {
        &self.weights
    }

    pub fn loss_table(&self) -> &[f64] {
        &self.losses
    }

    #[inline]
    fn locate(&self, r: f64) -> Option<(usize, f64)> {
        if !(r >= 0.0) || r >= self.config().threshold() {
            return None;
        }
        let pos = r * self.inv_step;
        let idx = pos as usize;
        if idx >= self.bins() {
            return None;
        }
        Some((idx, pos - idx as f64))
    }

    /// Interpolated w(r); 0 beyond the cutoff or for non-finite residuals.
    #[inline]
    pub fn weight(&self, r: f64) -> f64 {
        match self.locate(r) {
            Some((i, t)) => hermite(
                t,
                self.step,
                self.weights[i],
                self.weight_slopes[i],
                self.weights[i + 1],
                self.weight_slopes[i + 1],
            )
            .max(0.0),
            None if r >= 0.0 && r < self.config().threshold() => self.kernel.weight(r),
            None => 0.0,
        }
    }

    /// Interpolated ρ(r); ρ_max beyond the cutoff or for non-finite residuals.
    #[inline]
    pub fn loss(&self, r: f64) -> f64 {
        match self.locate(r) {
            Some((i, t)) => {
                let r0 = i as f64 * self.step;
                let r1 = r0 + self.step;
                hermite(
                    t,
                    self.step,
                    self.losses[i],
                    r0 * self.weights[i],
                    self.losses[i + 1],
                    r1 * self.weights[i + 1],
                )
            }
            None if r >= 0.0 && r < self.config().threshold() => self.kernel.loss(r),
            None => self.rho_max(),
        }
    }
}

#[inline]
fn hermite(t: f64, h: f64, f0: f64, d0: f64, f1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1
}
