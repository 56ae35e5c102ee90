//! Kolmogorov–Smirnov tests with the asymptotic Kolmogorov distribution.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub distance: f64,
    pub p_value: f64,
}

/// `Q_KS(λ) = 2 Σ_{k>=1} (-1)^{k-1} e^{-2 k² λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// p-value for distance `d` at effective sample size `n`, with Stephens'
/// small-sample correction of `λ`.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let root = n.sqrt();
    kolmogorov_q((root + 0.12 + 0.11 / root) * d)
}

/// One-sample test of `samples` against the continuous CDF `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let distance = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max);
    KsResult { distance, p_value: ks_p_value(distance, n) }
}

/// One-sample test against `N(0, 1)`.
pub fn ks_standard_normal(samples: &[f64]) -> KsResult {
    let normal = Normal::standard();
    ks_one_sample(samples, |x| normal.cdf(x))
}

/// Two-sample test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut distance: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        distance = distance.max((i as f64 / n - j as f64 / m).abs());
    }
    KsResult { distance, p_value: ks_p_value(distance, n * m / (n + m)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, StandardNormal, Uniform};

    #[test]
    fn kolmogorov_distribution_values() {
        // Reference values of 1 - K(λ).
        assert!((kolmogorov_q(1.0) - 0.269_999_671_677_354_3).abs() < 1e-12);
        assert!((kolmogorov_q(1.358_098_8) - 0.049_999_956_358_897).abs() < 1e-12);
        assert!((kolmogorov_q(1.949_58) - 0.000_999_178_444_279).abs() < 1e-12);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn detects_and_accepts() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..2000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = ks_standard_normal(&xs);
        assert!(r.p_value > 1e-3, "{r:?}");
        let scaled: Vec<f64> = xs.iter().map(|x| 1.5 * x).collect();
        assert!(ks_standard_normal(&scaled).p_value < 1e-3);
        let u = Uniform::new(-2.0, 2.0).unwrap();
        let ys: Vec<f64> = (0..2000).map(|_| u.sample(&mut rng)).collect();
        assert!(ks_two_sample(&xs, &ys).p_value < 1e-3);
        let zs: Vec<f64> = (0..3000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(ks_two_sample(&xs, &zs).p_value > 1e-3);
    }

    #[test]
    fn exact_small_cases() {
        let r = ks_one_sample(&[0.5], |x| x);
        assert!((r.distance - 0.5).abs() < 1e-15);
        let r = ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]);
        assert_eq!(r.distance, 0.0);
        let r = ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(r.distance, 1.0);
    }
}
