//! Fourier–Bessel coefficients of `z ↦ z^n` and `z ↦ log|z - w|`.
//!
//! Writing `w = ρ e^{iθ}` and `m = |n|`, the coefficient of `e_{n,k}` in
//! `log|· - w|` factors as `α_{n,k}(w) = R_{m,k}(ρ) e^{-inθ}` with
//!
//! ```text
//! ρ < 1:  R = -2√π J_m(jρ) / (j² J_{m+1}(j))  -  1(m>0) √π ρ^m / (m j)
//! ρ ≥ 1:  R = (2√π / j) (δ_{m0} log ρ  -  1(m>0) ρ^{-m} / (2m))
//! ```
//!
//! Both branches vanish-match at `ρ = 1` together with their first radial
//! derivative, because `J_m'(j) = -J_{m+1}(j)` at a zero of `J_m`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{DiskBasis, EigenIndex};
use crate::error::{Error, Result};
use crate::summation::Neumaier;
use crate::specfun::{bessel_root, bessel_roots, jn, jn_prime, RootTable};

/// `2√π / j_{n,k}`: the coefficient of `e_{n,k}` in `z^n` (for `n >= 0`).
pub fn power_coeff(n: u32, k: u32) -> Result<f64> {
    Ok(2.0 * PI.sqrt() / bessel_root(n as i32, k)?)
}

/// `α_{n,k}(w)`, evaluated for a fixed index at arbitrary source points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaKernel {
    n: i32,
    j: f64,
    j_next: f64,
}

/// Value and radial derivative of `R_{|n|,k}` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub value: f64,
    pub derivative: f64,
}

impl AlphaKernel {
    pub fn new(n: i32, k: u32) -> Result<Self> {
        let m = n.unsigned_abs();
        let j = bessel_root(m as i32, k)?;
        Ok(Self::from_root(n, j))
    }

    pub fn from_basis(basis: &DiskBasis, idx: EigenIndex) -> Result<Self> {
        Ok(Self::from_root(idx.n, basis.root(idx)?))
    }

    pub fn from_table(table: &RootTable, idx: EigenIndex) -> Result<Self> {
        Ok(Self::from_root(idx.n, table.root(idx.n, idx.k)?))
    }

    fn from_root(n: i32, j: f64) -> Self {
        AlphaKernel { n, j, j_next: jn(n.unsigned_abs() + 1, j) }
    }

    pub fn n(&self) -> i32 {
        self.n
    }

    pub fn root(&self) -> f64 {
        self.j
    }

    /// `R_{|n|,k}(ρ)` and `R'_{|n|,k}(ρ)`; `ρ = 1` uses the exterior branch.
    pub fn profile(&self, rho: f64) -> RadialProfile {
        let m = self.n.unsigned_abs();
        let mf = m as f64;
        let (j, sqrt_pi) = (self.j, PI.sqrt());
        if rho < 1.0 {
            let a = -2.0 * sqrt_pi / (j * j * self.j_next);
            let mut value = a * jn(m, j * rho);
            let mut derivative = a * j * jn_prime(m, j * rho);
            if m > 0 {
                let b = sqrt_pi / (mf * j);
                value -= b * rho.powi(m as i32);
                derivative -= b * mf * rho.powi(m as i32 - 1);
            }
            RadialProfile { value, derivative }
        } else if m == 0 {
            let a = 2.0 * sqrt_pi / j;
            RadialProfile { value: a * rho.ln(), derivative: a / rho }
        } else {
            let a = sqrt_pi / (mf * j);
            let p = rho.powi(-(m as i32));
            RadialProfile { value: -a * p, derivative: a * mf * p / rho }
        }
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        let (rho, theta) = w.to_polar();
        Complex64::from_polar(1.0, -self.n as f64 * theta) * self.profile(rho).value
    }

    /// Cartesian gradient `(∂_x α, ∂_y α)`; zero at the origin unless `|n| = 1`.
    pub fn gradient(&self, w: Complex64) -> [Complex64; 2] {
        let (rho, theta) = w.to_polar();
        let p = self.profile(rho);
        let phase = Complex64::from_polar(1.0, -self.n as f64 * theta);
        let radial = phase * p.derivative;
        let tangential = if rho > 0.0 {
            phase * Complex64::new(0.0, -self.n as f64) * (p.value / rho)
        } else if self.n.abs() == 1 {
            phase * Complex64::new(0.0, -self.n as f64) * p.derivative
        } else {
            Complex64::new(0.0, 0.0)
        };
        let (s, c) = theta.sin_cos();
        [radial * c - tangential * s, radial * s + tangential * c]
    }

    /// `|∇α(w)| = sqrt(R'^2 + (n R / ρ)^2)`.
    pub fn gradient_norm(&self, w: Complex64) -> f64 {
        let rho = w.norm();
        let p = self.profile(rho);
        let tangential = if rho > 0.0 { self.n as f64 * p.value / rho } else { 0.0 };
        p.derivative.hypot(tangential)
    }
}

/// `α_{n,k}(w)` from scratch.
pub fn alpha(n: i32, k: u32, w: Complex64) -> Result<Complex64> {
    Ok(AlphaKernel::new(n, k)?.eval(w))
}

/// Truncation of the double series `Σ_{|n| <= n_max, k <= k_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoff {
    pub n_max: u32,
    pub k_max: u32,
}

impl Cutoff {
    pub fn new(n_max: u32, k_max: u32) -> Self {
        Cutoff { n_max, k_max }
    }

    pub fn square(k: u32) -> Self {
        Cutoff { n_max: k, k_max: k }
    }
}

/// Partial sum of `Σ α_{n,k}(w) e_{n,k}(z)`, an approximation to `log|z - w|`.
///
/// Roots are generated one row at a time, so `k_max` may run into the
/// millions without a table in memory. The `±n` terms are conjugate pairs and
/// are summed as `2 Re`.
pub fn log_abs_reconstruct(z: Complex64, w: Complex64, cutoff: Cutoff) -> Result<f64> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("z = {z} must lie in the open unit disk")));
    }
    if z == w {
        return Err(Error::Singularity("log|z - w| at z = w".into()));
    }
    let (r, phi) = z.to_polar();
    let (rho, theta) = w.to_polar();
    let rows: Vec<f64> = (0..=cutoff.n_max)
        .into_par_iter()
        .map(|m| -> Result<f64> {
            let roots = bessel_roots(m as i32, cutoff.k_max as usize)?;
            let mut acc = Neumaier::default();
            for j in roots {
                let kernel = AlphaKernel::from_root(m as i32, j);
                let norm = 1.0 / (PI.sqrt() * kernel.j_next);
                acc.add(kernel.profile(rho).value * norm * jn(m, j * r));
            }
            let weight = if m == 0 { 1.0 } else { 2.0 * (m as f64 * (phi - theta)).cos() };
            Ok(weight * acc.sum())
        })
        .collect::<Result<_>>()?;
    let mut total = Neumaier::default();
    rows.into_iter().for_each(|v| total.add(v));
    Ok(total.sum())
}

/// Finite-difference supremum of `|∇α_{n,k}|` over `|w| <= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientSup {
    pub interior: f64,
    pub exterior: f64,
}

impl GradientSup {
    pub fn overall(&self) -> f64 {
        self.interior.max(self.exterior)
    }
}

/// Scans a polar grid on `|w| <= 2` with central Cartesian differences of
/// step `h`. Radial grid lines keep a distance of at least `2h` from the unit
/// circle, so no stencil straddles the kink in the second derivative.
pub fn grad_alpha_sup(n: i32, k: u32, radial: usize, angular: usize) -> Result<GradientSup> {
    let kernel = AlphaKernel::new(n, k)?;
    let h = 1e-6;
    let mut sup = GradientSup { interior: 0.0, exterior: 0.0 };
    for i in 0..radial {
        let rho = 2.0 * (i as f64 + 0.5) / radial as f64;
        if (rho - 1.0).abs() < 2.0 * h {
            continue;
        }
        for a in 0..angular {
            let w = Complex64::from_polar(rho, 2.0 * PI * a as f64 / angular as f64);
            let dx = (kernel.eval(w + h) - kernel.eval(w - h)) / (2.0 * h);
            let dy = (kernel.eval(w + Complex64::i() * h) - kernel.eval(w - Complex64::i() * h)) / (2.0 * h);
            let g = (dx.norm_sqr() + dy.norm_sqr()).sqrt();
            let slot = if rho < 1.0 { &mut sup.interior } else { &mut sup.exterior };
            *slot = slot.max(g);
        }
    }
    Ok(sup)
}
