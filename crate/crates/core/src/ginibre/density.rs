//! Determinantal formulas for the Ginibre eigenvalues. The correlation kernel
//! is `K_N(z, w) = Σ_{k<N} ψ_k(z) conj(ψ_k(w))` with the orthonormal functions
//! `ψ_k(r e^{iθ}) = √(N/π) g_k(r) e^{ikθ}`,
//! `g_k(r) = (√N r)^k e^{-N r²/2} / √k!`, all evaluated in log form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::quadrature::DiskQuadrature;

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `g_0(r), ..., g_{N-1}(r)`.
fn radial_orthonormal(n: usize, r: f64, ln_fact: &[f64]) -> Vec<f64> {
    let nf = n as f64;
    let ln_sr = (nf.sqrt() * r).ln();
    let base = -0.5 * nf * r * r;
    (0..n).map(|k| (k as f64 * ln_sr - 0.5 * ln_fact[k] + base).exp()).collect()
}

/// `ρ_N(z) = (N/π) e^{-N|z|²} Σ_{k<N} (N|z|²)^k / k!`.
pub fn one_point_density(n: usize, z: Complex64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix size N must be positive".into()));
    }
    Ok(density_at(n, z.norm(), &ln_factorials(n)))
}

fn density_at(n: usize, r: f64, ln_fact: &[f64]) -> f64 {
    let nf = n as f64;
    if r == 0.0 {
        return nf / PI;
    }
    nf / PI * radial_orthonormal(n, r, ln_fact).iter().map(|g| g * g).sum::<f64>()
}

/// `|Σ_{k<N} (N z w̄)^k / k!|² e^{-N|z|² - N|w|²}`, the squared modulus of
/// `(π/N) K_N(z, w)`.
pub fn kernel_abs_sq(n: usize, z: Complex64, w: Complex64) -> f64 {
    let nf = n as f64;
    let x = z * w.conj() * nf;
    let ln_fact = ln_factorials(n);
    let base = -0.5 * nf * (z.norm_sqr() + w.norm_sqr());
    if x.norm() == 0.0 {
        return (2.0 * base).exp();
    }
    let (ln_r, phase) = (x.norm().ln(), x.arg());
    let s: Complex64 = (0..n)
        .map(|k| Complex64::from_polar((k as f64 * ln_r - ln_fact[k] + base).exp(), k as f64 * phase))
        .sum();
    s.norm_sqr()
}

/// `∫_C |z|^{2m} e^{-N|z|²} d²z = π m! / N^{m+1}`, in log form.
pub fn ln_gaussian_moment(m: u32, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let ln_fact: f64 = (2..=m).map(|i| (i as f64).ln()).sum();
    Ok(PI.ln() + ln_fact - (m as f64 + 1.0) * (n as f64).ln())
}

pub fn gaussian_moment(m: u32, n: usize) -> Result<f64> {
    ln_gaussian_moment(m, n).map(f64::exp)
}

/// Polar product rule on `|z| <= 1 + 7/√N` adapted to `ρ_N`: Gauss–Legendre
/// panels no wider than `min(1/4, 1/√N)` with a break at the edge `|z| = 1`.
/// Beyond the outer radius the density is below `e^{-49}` of its bulk value.
#[derive(Debug, Clone)]
pub struct PlaneQuadrature {
    n: usize,
    disk: DiskQuadrature,
    density: Vec<f64>,
    ln_fact: Vec<f64>,
}

impl PlaneQuadrature {
    pub fn new(n: usize) -> Result<Self> {
        let angular = (2 * n + 64).next_power_of_two();
        Self::with_orders(n, 16, angular)
    }

    pub fn with_orders(n: usize, nodes_per_panel: usize, angular: usize) -> Result<Self> {
        if n == 0 || nodes_per_panel == 0 || angular == 0 {
            return Err(Error::InvalidArgument("N, radial and angular orders must be positive".into()));
        }
        let inv_sqrt = 1.0 / (n as f64).sqrt();
        let width = inv_sqrt.min(0.25);
        let outer = 1.0 + 7.0 * inv_sqrt;
        let mut breaks = vec![0.0];
        let inner_panels = (1.0 / width).ceil() as usize;
        breaks.extend((1..=inner_panels).map(|i| i as f64 / inner_panels as f64));
        let outer_panels = ((outer - 1.0) / width).ceil() as usize;
        breaks.extend((1..=outer_panels).map(|i| 1.0 + (outer - 1.0) * i as f64 / outer_panels as f64));
        let disk = DiskQuadrature::with_breaks(&breaks, nodes_per_panel, angular);
        let ln_fact = ln_factorials(n);
        let density = disk.radial().iter().map(|node| density_at(n, node.r, &ln_fact)).collect();
        Ok(PlaneQuadrature { n, disk, density, ln_fact })
    }

    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn disk(&self) -> &DiskQuadrature {
        &self.disk
    }

    pub fn radius(&self) -> f64 {
        self.disk.radius()
    }

    /// `∫ f ρ_N d²z`.
    pub fn expect<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        let dtheta = 2.0 * PI / self.disk.angular() as f64;
        self.disk
            .radial()
            .iter()
            .zip(&self.density)
            .map(|(node, rho)| {
                let ring: Complex64 = (0..self.disk.angular())
                    .map(|a| f(Complex64::from_polar(node.r, self.disk.angle(a))))
                    .sum();
                ring * (node.weight * dtheta * rho)
            })
            .sum()
    }
}

/// `E Σ_i f(z_i) = ∫ f ρ_N d²z`.
pub fn expected_linear_statistic<F: Fn(Complex64) -> Complex64>(f: F, quad: &PlaneQuadrature) -> Complex64 {
    quad.expect(f)
}

/// Exact `E|Σ_i (f(z_i) - E f(z_i))|²` at finite `N`.
///
/// Expanding `|K_N|²` in the `ψ_k` gives
/// `Var = ∫|f|² ρ_N - Σ_{k,l<N} |M_kl|²` with `M_kl = ∫ f conj(ψ_k) ψ_l`,
/// which equals the symmetric double-integral form
/// `½ ∫∫ |f(z) - f(w)|² |K_N(z, w)|²`. Angular integrals use an FFT on each
/// quadrature ring; the ring size must exceed `N - 1` plus the angular
/// bandwidth of `f` for the result to be free of aliasing.
pub fn pair_variance<F: Fn(Complex64) -> Complex64>(f: F, quad: &PlaneQuadrature) -> f64 {
    let n = quad.n;
    let nf = n as f64;
    let angular = quad.disk.angular();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(angular);
    let mut first = 0.0;
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    let mut ring = vec![Complex64::new(0.0, 0.0); angular];
    for (node, rho) in quad.disk.radial().iter().zip(&quad.density) {
        for (a, slot) in ring.iter_mut().enumerate() {
            *slot = f(Complex64::from_polar(node.r, quad.disk.angle(a)));
        }
        first += node.weight * rho * 2.0 * PI * ring.iter().map(|v| v.norm_sqr()).sum::<f64>() / angular as f64;
        fft.process(&mut ring);
        // ring[m mod A] / A is the Fourier coefficient f̂_m(r).
        let g = radial_orthonormal(n, node.r, &quad.ln_fact);
        let w = node.weight * nf / PI * 2.0 * PI / angular as f64;
        for k in 0..n {
            let wk = w * g[k];
            for l in 0..n {
                let idx = (k + angular - l) % angular;
                m[k * n + l] += ring[idx] * (wk * g[l]);
            }
        }
    }
    first - m.iter().map(|v| v.norm_sqr()).sum::<f64>()
}

/// [`pair_variance`] for a single angular harmonic `f(r e^{iθ}) = R(r) e^{-inθ}`
/// (the shape of every `α_{n,k}`): only `M_{k,k+n}` survives.
pub fn pair_variance_harmonic<F: Fn(f64) -> f64>(profile: F, n_harmonic: i32, quad: &PlaneQuadrature) -> f64 {
    let n = quad.n;
    let nf = n as f64;
    let shift = n_harmonic.unsigned_abs() as usize;
    let mut first = 0.0;
    let mut diag = vec![0.0; n.saturating_sub(shift)];
    for (node, rho) in quad.disk.radial().iter().zip(&quad.density) {
        let r_val = profile(node.r);
        first += node.weight * rho * 2.0 * PI * r_val * r_val;
        if diag.is_empty() {
            continue;
        }
        let g = radial_orthonormal(n, node.r, &quad.ln_fact);
        let w = node.weight * nf / PI * 2.0 * PI * r_val;
        for (k, d) in diag.iter_mut().enumerate() {
            *d += w * g[k] * g[k + shift];
        }
    }
    // The ±n pairs carry the same radial integral; each appears once.
    first - diag.iter().map(|d| d * d).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::DiskQuadrature;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_values_and_mass() {
        for n in [1usize, 2, 8, 64, 256, 1024] {
            assert!((one_point_density(n, c(0.0, 0.0)).unwrap() - n as f64 / PI).abs() < 1e-12 * n as f64);
            let q = PlaneQuadrature::new(n).unwrap();
            let mass = expected_linear_statistic(|_| c(1.0, 0.0), &q);
            assert!((mass.re - n as f64).abs() < 1e-8 * n as f64, "N = {n}: {mass}");
            let r2 = expected_linear_statistic(|z| c(z.norm_sqr(), 0.0), &q);
            assert!((r2.re - (n as f64 + 1.0) / 2.0).abs() < 1e-8 * n as f64, "N = {n}: {r2}");
            assert!(expected_linear_statistic(|z| z, &q).norm() < 1e-10);
        }
        let a = one_point_density(16, Complex64::from_polar(0.7, 0.3)).unwrap();
        let b = one_point_density(16, Complex64::from_polar(0.7, 2.1)).unwrap();
        assert!((a - b).abs() < 1e-14 * a);
    }

    #[test]
    fn gaussian_moments() {
        assert!((gaussian_moment(0, 5).unwrap() - PI / 5.0).abs() < 1e-15);
        assert!((gaussian_moment(1, 1).unwrap() - PI).abs() < 1e-15);
        let q = DiskQuadrature::with_breaks(&[0.0, 1.0, 2.0, 4.0, 7.0], 40, 4);
        let num = q.integrate_real(|z| z.norm_sqr().powi(3) * (-2.0 * z.norm_sqr()).exp());
        assert!((num - gaussian_moment(3, 2).unwrap()).abs() < 1e-10, "{num}");
        assert!((gaussian_moment(3, 2).unwrap() - PI * 6.0 / 16.0).abs() < 1e-15);
        assert!(ln_gaussian_moment(5000, 10).unwrap().is_finite());
    }

    #[test]
    fn pair_variance_of_identity_is_one() {
        for n in [1usize, 2, 8, 32, 64, 256] {
            let q = PlaneQuadrature::new(n).unwrap();
            let v = pair_variance(|z| z, &q);
            assert!((v - 1.0).abs() < 1e-6, "N = {n}: {v}");
            assert!(pair_variance(|_| c(3.0, -1.0), &q).abs() < 1e-9);
            // z ↦ z̄ has the same variance; z ↦ z^N is outside the kernel's band.
            assert!((pair_variance(|z| z.conj(), &q) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn harmonic_fast_path_agrees() {
        let q = PlaneQuadrature::new(12).unwrap();
        for n in [0i32, 1, 3, -2, 15] {
            let profile = |r: f64| (1.0 + r * r).ln() * r.powi(n.abs());
            let general = pair_variance(|z| Complex64::from_polar(profile(z.norm()), -n as f64 * z.arg()), &q);
            let fast = pair_variance_harmonic(profile, n, &q);
            assert!((general - fast).abs() < 1e-10 * (1.0 + general), "{n}: {general} {fast}");
        }
    }

    #[test]
    fn projection_formula_matches_double_integral() {
        // Brute-force ½ (N/π)² ∫∫ |f(z)-f(w)|² |Σ (N z w̄)^k/k!|² e^{-N|z|²-N|w|²}.
        let n = 3;
        let f = |z: Complex64| c(z.re * z.re - 0.3 * z.im, z.im * z.re);
        let q = DiskQuadrature::with_breaks(&[0.0, 0.5, 1.0, 2.0, 4.0], 16, 16);
        let nodes: Vec<_> = q.nodes().collect();
        let mut brute = 0.0;
        for (z, wz) in &nodes {
            for (w, ww) in &nodes {
                brute += wz * ww * (f(*z) - f(*w)).norm_sqr() * kernel_abs_sq(n, *z, *w);
            }
        }
        brute *= 0.5 * (n as f64 / PI).powi(2);
        let exact = pair_variance(f, &PlaneQuadrature::new(n).unwrap());
        assert!((brute - exact).abs() < 1e-8, "{brute} vs {exact}");
    }
}
