#![allow(dead_code, clippy::excessive_precision)]

use magsac_core::geometry::{solve_homography_minimal, transfer};
use magsac_core::{Correspondence, ImageSizes, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// Adaptive Gauss-Kronrod (7, 15) quadrature of `f` over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel: f64, abs: f64) -> f64 {
    fn recurse<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        whole: (f64, f64),
        rel: f64,
        abs: f64,
        depth: u32,
    ) -> f64 {
        let (value, err) = whole;
        if err <= abs.max(rel * value.abs()) || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        let left = kronrod(f, a, mid);
        let right = kronrod(f, mid, b);
        recurse(f, a, mid, left, rel, 0.5 * abs, depth - 1) + recurse(f, mid, b, right, rel, 0.5 * abs, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let whole = kronrod(&mut f, a, b);
    recurse(&mut f, a, b, whole, rel, abs, 40)
}

/// Gamma function from the Lanczos series, independent of the crate's own.
pub fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// χ density of a residual magnitude in `n` dimensions, untrimmed.
pub fn chi_pdf(r: f64, sigma: f64, n: u32) -> f64 {
    let nf = n as f64;
    let c = 1.0 / (2f64.powf(nf / 2.0) * gamma_fn(nf / 2.0));
    2.0 * c * sigma.powf(-nf) * (-r * r / (2.0 * sigma * sigma)).exp() * r.powf(nf - 1.0)
}

/// Marginal weight ∫ g(r | σ) / σ_max dσ over the σ for which r is under
/// the trimming quantile, by quadrature.
pub fn weight_by_quadrature(r: f64, n: u32, k: f64, sigma_max: f64) -> f64 {
    let lo = r / k;
    if lo >= sigma_max {
        return 0.0;
    }
    integrate(|s| chi_pdf(r, s, n) / sigma_max, lo, sigma_max, 1e-12, 1e-300)
}

/// ρ(r) = ∫₀ʳ x·w(x) dx by nested quadrature, with the order of integration
/// swapped so both integrands are smooth.
pub fn loss_by_quadrature(r: f64, n: u32, k: f64, sigma_max: f64) -> f64 {
    let inner = |s: f64| {
        let upper = r.min(k * s);
        integrate(|x| x * chi_pdf(x, s, n), 0.0, upper, 1e-12, 1e-300) / sigma_max
    };
    let kink = (r / k).min(sigma_max);
    integrate(inner, 0.0, kink, 1e-11, 1e-300) + integrate(inner, kink, sigma_max, 1e-11, 1e-300)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub struct Scene {
    pub points: Vec<Correspondence>,
    pub labels: Vec<bool>,
    pub truth: Model,
    pub sizes: ImageSizes,
}

impl Scene {
    pub fn inliers(&self) -> Vec<Correspondence> {
        self.points
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l)
            .map(|(p, _)| *p)
            .collect()
    }
}

/// A random homography moving the corners of a `w`×`w` image by up to 15%.
pub fn random_homography(rng: &mut impl Rng, w: f64) -> Model {
    let corners = [(0.0, 0.0), (w, 0.0), (w, w), (0.0, w)];
    let sample: Vec<Correspondence> = corners
        .iter()
        .map(|&(u, v)| {
            let du = rng.random_range(-0.15..0.15) * w;
            let dv = rng.random_range(-0.15..0.15) * w;
            Correspondence::new(u, v, u + du, v + dv)
        })
        .collect();
    solve_homography_minimal(&sample).expect("corner perturbation keeps the quad convex")
}

/// Homography scene in 1000×1000 images: `inliers` noisy matches under a
/// random H (noise on the second image only) and uniform outliers.
pub fn homography_scene(seed: u64, n: usize, inlier_ratio: f64, noise: f64) -> Scene {
    let w = 1000.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = random_homography(&mut rng, w);
    let n_in = (n as f64 * inlier_ratio).round() as usize;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    while points.len() < n_in {
        let u = rng.random_range(0.0..w);
        let v = rng.random_range(0.0..w);
        let Some((x, y)) = transfer(truth.matrix(), u, v) else {
            continue;
        };
        let x = x + noise * gaussian(&mut rng);
        let y = y + noise * gaussian(&mut rng);
        if (0.0..w).contains(&x) && (0.0..w).contains(&y) {
            points.push(Correspondence::new(u, v, x, y));
            labels.push(true);
        }
    }
    while points.len() < n {
        let p = Correspondence::new(
            rng.random_range(0.0..w),
            rng.random_range(0.0..w),
            rng.random_range(0.0..w),
            rng.random_range(0.0..w),
        );
        points.push(p);
        labels.push(false);
    }
    // Shuffle so that inliers are not a prefix.
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        points.swap(i, j);
        labels.swap(i, j);
    }
    Scene {
        points,
        labels,
        truth,
        sizes: ImageSizes::square(w, w),
    }
}
