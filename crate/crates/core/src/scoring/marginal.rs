//! Closed forms of the σ-marginalized inlier density (the IRLS weight) and
//! of its M-estimator loss.

#[allow(unused_imports)]
use num_traits::Float;

use super::gamma::{gamma, lower_incomplete_gamma, upper_incomplete_gamma};
use super::NoiseConfig;

/// C(n) = (2^{n/2} Γ(n/2))^{-1}
pub fn chi_normalizer(dimension: u32) -> f64 {
    let half = dimension as f64 / 2.0;
    1.0 / (2f64.powf(half) * gamma(half))
}

/// Trimmed χ density of a residual for a fixed noise scale: zero at and
/// beyond τ(σ) = kσ.
pub fn chi_density(r: f64, sigma: f64, config: &NoiseConfig) -> f64 {
    if !(r >= 0.0) || r >= config.tau(sigma) {
        return 0.0;
    }
    let n = config.dimension() as i32;
    2.0 * chi_normalizer(config.dimension()) * sigma.powi(-n) * (-r * r / (2.0 * sigma * sigma)).exp() * r.powi(n - 1)
}

/// Precomputed constants for evaluating w(r) and ρ(r) in closed form.
#[derive(Debug, Clone, Copy)]
pub struct MarginalKernel {
    config: NoiseConfig,
    /// (n − 1) / 2
    lower_order: f64,
    /// (n + 1) / 2
    upper_order: f64,
    /// Γ((n−1)/2, k²/2)
    upper_at_cutoff: f64,
    /// C(n) 2^{(n−1)/2} / σ_max
    weight_scale: f64,
    rho_max: f64,
}

impl MarginalKernel {
    pub fn new(config: NoiseConfig) -> Self {
        let n = config.dimension() as f64;
        let k = config.quantile();
        let sigma_max = config.sigma_max();
        let lower_order = (n - 1.0) / 2.0;
        let upper_order = (n + 1.0) / 2.0;
        let c = chi_normalizer(config.dimension());
        let cutoff = k * k / 2.0;
        // Both orders are positive and the cutoff finite, so these cannot fail.
        let upper_at_cutoff = upper_incomplete_gamma(lower_order, cutoff).unwrap_or(0.0);
        let lower_upper_cutoff = lower_incomplete_gamma(upper_order, cutoff).unwrap_or(0.0);
        let two_pow = 2f64.powf(lower_order);
        Self {
            config,
            lower_order,
            upper_order,
            upper_at_cutoff,
            weight_scale: c * two_pow / sigma_max,
            rho_max: sigma_max * c * two_pow * lower_upper_cutoff,
        }
    }

    pub fn config(&self) -> &NoiseConfig {
        &self.config
    }

    /// ρ(kσ_max), the loss of every residual at or beyond the cutoff.
    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    fn scaled(&self, r: f64) -> f64 {
        let s = self.config.sigma_max();
        r * r / (2.0 * s * s)
    }

    /// w(r), zero from kσ_max on.
    pub fn weight(&self, r: f64) -> f64 {
        if !(r >= 0.0) || r >= self.config.threshold() {
            return 0.0;
        }
        let upper = upper_incomplete_gamma(self.lower_order, self.scaled(r)).unwrap_or(0.0);
        (self.weight_scale * (upper - self.upper_at_cutoff)).max(0.0)
    }

    /// dw/dr on [0, kσ_max].
    pub fn weight_derivative(&self, r: f64) -> f64 {
        if !(r >= 0.0) || r > self.config.threshold() {
            return 0.0;
        }
        let s = self.config.sigma_max();
        let u = self.scaled(r);
        // d/dr Γ(a, u(r)) = −u^{a−1} e^{−u} · r/σ², with r·u^{a−1} = r^{n−2} (2σ²)^{1−a}
        let n = self.config.dimension() as i32;
        let r_term = r.powi(n - 2) * (2.0 * s * s).powf(1.0 - self.lower_order);
        -self.weight_scale * r_term * (-u).exp() / (s * s)
    }

    /// ρ(r) = ∫₀^r x·w(x) dx, constant ρ(kσ_max) beyond the cutoff.
    pub fn loss(&self, r: f64) -> f64 {
        if !(r >= 0.0) {
            return self.rho_max;
        }
        if r >= self.config.threshold() {
            return self.rho_max;
        }
        let s = self.config.sigma_max();
        let u = self.scaled(r);
        let lower = lower_incomplete_gamma(self.upper_order, u).unwrap_or(0.0);
        let upper = upper_incomplete_gamma(self.lower_order, u).unwrap_or(0.0);
        // (1/σ) C 2^{(n+1)/2} = 2 · weight_scale
        2.0 * self.weight_scale * (0.5 * s * s * lower + 0.25 * r * r * (upper - self.upper_at_cutoff))
    }
}

/// Marginal weight w(r) evaluated directly from the closed form.
pub fn weight(r: f64, config: &NoiseConfig) -> f64 {
    MarginalKernel::new(*config).weight(r)
}

/// M-estimator loss ρ(r) evaluated directly from the closed form.
pub fn loss_rho(r: f64, config: &NoiseConfig) -> f64 {
    MarginalKernel::new(*config).loss(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: u32, sigma_max: f64) -> NoiseConfig {
        NoiseConfig::with_parameters(n, 3.64, sigma_max).unwrap()
    }

    #[test]
    fn density_vanishes_at_cutoff() {
        let c = config(4, 1.0);
        assert_eq!(chi_density(3.64, 1.0, &c), 0.0);
        assert_eq!(chi_density(10.0, 1.0, &c), 0.0);
        assert!(chi_density(3.63, 1.0, &c) > 0.0);
    }

    #[test]
    fn density_two_dof() {
        // C(2) = 1/2 → g(1|1) = e^{-1/2}
        let v = chi_density(1.0, 1.0, &config(2, 1.0));
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn weight_reference_value() {
        let v = weight(1.0, &config(4, 1.0));
        assert!((v - 0.50).abs() < 0.01, "{v}");
    }

    #[test]
    fn weight_zero_past_cutoff() {
        let c = config(4, 1.0);
        assert_eq!(weight(3.64 + 1e-9, &c), 0.0);
        assert!(weight(1.0, &c) > weight(2.0, &c));
        assert!(weight(3.64 - 1e-6, &c) < 1e-6);
    }

    #[test]
    fn loss_saturates() {
        let c = config(4, 2.0);
        let k = MarginalKernel::new(c);
        assert_eq!(k.loss(0.0), 0.0);
        assert_eq!(k.loss(2.0 * c.threshold()), k.loss(c.threshold()));
        // continuity into the constant branch
        assert!((k.loss(c.threshold() - 1e-9) - k.rho_max()).abs() < 1e-9 * k.rho_max());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for n in [2, 3, 4, 6] {
            let k = MarginalKernel::new(config(n, 3.0));
            for &r in &[0.05, 1.0, 4.0, 9.0] {
                let h = 1e-6;
                let fd = (k.weight(r + h) - k.weight(r - h)) / (2.0 * h);
                let d = k.weight_derivative(r);
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-3), "n={n} r={r}: {fd} vs {d}");
            }
        }
    }
}
