//! Centered linear statistics `γ_{n,k}^{(N)} = Σ_i (α_{n,k}(z_i) - E α_{n,k}(z_i))`,
//! their Gaussian limit, and the limiting variance functional of smooth
//! linear statistics of Ginibre eigenvalues,
//!
//! ```text
//! σ²(f) = (1/4π) ∫_U |∇f|² + ½ Σ_m |m| |f̂(m)|².
//! ```
//!
//! In the limit `γ_{0,k} = (√π/j_{0,k}) A_k` with `A_k` real standard normal,
//! and for `n >= 1`, `γ_{n,k} = (√π/j_{n,k}) (Z_{n,k} + W_n/√n)` with standard
//! complex Gaussians (`E|Z|² = 1`) and `W_n` shared by every `k`.

mod experiments;
pub mod ks;

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::basis::EigenIndex;
use crate::error::{Error, Result};
use crate::ginibre::{PlaneQuadrature, SpectrumSample};
use crate::log_kernel::AlphaKernel;
use crate::quadrature::DiskQuadrature;
use crate::specfun::RootTable;
use crate::summation::ComplexNeumaier;

pub use experiments::{
    interior_l2_sq,
    clt_experiment, clt_report, decay_check, exact_gamma_variance, tail_check, variance_bound_check, Check, CltConfig,
    CltReport, DecayEntry, DecayReport, Estimate, MarginalTest, TailCheck, VarianceBoundEntry, VarianceBoundReport,
    KS_LEVEL,
};
pub use ks::{kolmogorov_q, ks_one_sample, ks_p_value, ks_standard_normal, ks_two_sample, KsResult};

/// `γ^{(N)}` over an index set for one draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSample {
    pub indices: Vec<EigenIndex>,
    pub values: Vec<Complex64>,
    pub matrix_size: usize,
    pub seed: u64,
}

impl GammaSample {
    /// `γ_{n,k}`, using `γ_{-n,k} = conj(γ_{n,k})` for negative `n`.
    pub fn get(&self, idx: EigenIndex) -> Option<Complex64> {
        let pos = EigenIndex { n: idx.n.abs(), k: idx.k };
        let v = self.indices.iter().position(|i| *i == pos).map(|p| self.values[p])?;
        Some(if idx.n < 0 { v.conj() } else { v })
    }

    /// The same draw over a sub-index set (any sign of `n`).
    pub fn restrict(&self, indices: &[EigenIndex]) -> Result<GammaSample> {
        let values = indices
            .iter()
            .map(|i| self.get(*i).ok_or_else(|| Error::InvalidArgument(format!("index {i} was not evaluated"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(GammaSample { indices: indices.to_vec(), values, matrix_size: self.matrix_size, seed: self.seed })
    }
}

fn check_nonnegative(indices: &[EigenIndex]) -> Result<()> {
    match indices.iter().find(|i| i.n < 0) {
        Some(i) => Err(Error::InvalidArgument(format!("index {i} has n < 0; use γ_(-n,k) = conj γ_(n,k)"))),
        None => Ok(()),
    }
}

/// `E α(z_i)` summed over the eigenvalues, `∫ α ρ_N`. Exactly zero for
/// `n ≠ 0`, where the angular integral vanishes.
pub fn alpha_centering(kernel: &AlphaKernel, quad: &PlaneQuadrature) -> f64 {
    if kernel.n() != 0 {
        return 0.0;
    }
    quad.expect(|z| Complex64::new(kernel.profile(z.norm()).value, 0.0)).re
}

/// Kernels and centering constants for a fixed index set and matrix size.
#[derive(Debug, Clone)]
pub struct GammaEvaluator {
    indices: Vec<EigenIndex>,
    kernels: Vec<AlphaKernel>,
    centering: Vec<f64>,
    matrix_size: usize,
}

impl GammaEvaluator {
    pub fn new(table: &RootTable, indices: &[EigenIndex], quad: &PlaneQuadrature) -> Result<Self> {
        check_nonnegative(indices)?;
        let kernels = indices.iter().map(|i| AlphaKernel::from_table(table, *i)).collect::<Result<Vec<_>>>()?;
        let centering = kernels.iter().map(|k| alpha_centering(k, quad)).collect();
        Ok(GammaEvaluator { indices: indices.to_vec(), kernels, centering, matrix_size: quad.matrix_size() })
    }

    pub fn indices(&self) -> &[EigenIndex] {
        &self.indices
    }

    pub fn kernels(&self) -> &[AlphaKernel] {
        &self.kernels
    }

    pub fn centering(&self) -> &[f64] {
        &self.centering
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn evaluate(&self, sample: &SpectrumSample) -> Result<GammaSample> {
        if sample.matrix_size != self.matrix_size || sample.eigenvalues.len() != self.matrix_size {
            return Err(Error::InvalidArgument(format!(
                "spectrum of size {} given to an evaluator built for N = {}",
                sample.eigenvalues.len(),
                self.matrix_size
            )));
        }
        let values = self
            .kernels
            .iter()
            .zip(&self.centering)
            .map(|(kernel, c)| {
                let total = sample.eigenvalues.iter().map(|z| kernel.eval(*z)).collect::<ComplexNeumaier>().sum();
                if kernel.n() == 0 {
                    // Real by construction; drop rounding in the imaginary part.
                    Complex64::new(total.re - c, 0.0)
                } else {
                    total
                }
            })
            .collect();
        Ok(GammaSample { indices: self.indices.clone(), values, matrix_size: sample.matrix_size, seed: sample.seed })
    }
}

/// `γ^{(N)}` of one spectrum; builds the centering from scratch.
pub fn gamma(sample: &SpectrumSample, indices: &[EigenIndex], table: &RootTable) -> Result<GammaSample> {
    let quad = PlaneQuadrature::new(sample.matrix_size)?;
    GammaEvaluator::new(table, indices, &quad)?.evaluate(sample)
}

/// Second moments of the limit: `E γ_a conj(γ_b)` and `E γ_a γ_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitMoments {
    pub hermitian: Complex64,
    pub plain: Complex64,
}

pub fn limit_covariance(a: EigenIndex, b: EigenIndex, table: &RootTable) -> Result<LimitMoments> {
    check_nonnegative(&[a, b])?;
    let zero = Complex64::new(0.0, 0.0);
    if a.n != b.n {
        return Ok(LimitMoments { hermitian: zero, plain: zero });
    }
    let (ja, jb) = (table.root(a.n, a.k)?, table.root(b.n, b.k)?);
    let delta = if a.k == b.k { 1.0 } else { 0.0 };
    if a.n == 0 {
        let v = Complex64::new(PI * delta / (ja * jb), 0.0);
        return Ok(LimitMoments { hermitian: v, plain: v });
    }
    let v = PI / (ja * jb) * (delta + 1.0 / a.n as f64);
    Ok(LimitMoments { hermitian: Complex64::new(v, 0.0), plain: zero })
}

/// Real covariance of `(Re a, Im a)` against `(Re b, Im b)` from the
/// Hermitian and plain second moments.
pub fn real_imag_covariance(m: LimitMoments) -> [[f64; 2]; 2] {
    let (h, p) = (m.hermitian, m.plain);
    [
        [0.5 * (h.re + p.re), 0.5 * (p.im - h.im)],
        [0.5 * (p.im + h.im), 0.5 * (h.re - p.re)],
    ]
}

/// The limiting Gaussian law over a finite index set (all `n >= 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitLawSpec {
    indices: Vec<EigenIndex>,
    roots: Vec<f64>,
}

impl LimitLawSpec {
    pub fn new(indices: &[EigenIndex], table: &RootTable) -> Result<Self> {
        check_nonnegative(indices)?;
        let roots = indices.iter().map(|i| table.root(i.n, i.k)).collect::<Result<_>>()?;
        Ok(LimitLawSpec { indices: indices.to_vec(), roots })
    }

    pub fn indices(&self) -> &[EigenIndex] {
        &self.indices
    }

    /// `√π / j_{n,k}`.
    pub fn scale(&self, i: usize) -> f64 {
        PI.sqrt() / self.roots[i]
    }

    /// Weight `1/√n` of the shared noise `W_n`; zero for `n = 0`.
    pub fn shared_weight(&self, i: usize) -> f64 {
        match self.indices[i].n {
            0 => 0.0,
            n => 1.0 / (n as f64).sqrt(),
        }
    }

    pub fn moments(&self, a: usize, b: usize) -> LimitMoments {
        let (ia, ib) = (self.indices[a], self.indices[b]);
        let zero = Complex64::new(0.0, 0.0);
        if ia.n != ib.n {
            return LimitMoments { hermitian: zero, plain: zero };
        }
        let base = self.scale(a) * self.scale(b);
        let delta = if ia.k == ib.k { 1.0 } else { 0.0 };
        if ia.n == 0 {
            let v = Complex64::new(base * delta, 0.0);
            LimitMoments { hermitian: v, plain: v }
        } else {
            let v = base * (delta + self.shared_weight(a) * self.shared_weight(b));
            LimitMoments { hermitian: Complex64::new(v, 0.0), plain: zero }
        }
    }

    /// `E γ_a conj(γ_b)` over the index set.
    pub fn hermitian_matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.indices.len();
        (0..m).map(|a| (0..m).map(|b| self.moments(a, b).hermitian).collect()).collect()
    }

    /// Covariance of the real vector `(Re γ_1, Im γ_1, Re γ_2, ...)`.
    pub fn real_covariance(&self) -> Vec<Vec<f64>> {
        let m = self.indices.len();
        let mut out = vec![vec![0.0; 2 * m]; 2 * m];
        for a in 0..m {
            for b in 0..m {
                let block = real_imag_covariance(self.moments(a, b));
                for (p, row) in block.iter().enumerate() {
                    for (q, v) in row.iter().enumerate() {
                        out[2 * a + p][2 * b + q] = *v;
                    }
                }
            }
        }
        out
    }

    /// Variance of `Σ_i t_i Re γ_i + s_i Im γ_i`.
    pub fn combination_variance(&self, t: &[f64], s: &[f64]) -> f64 {
        let c = self.real_covariance();
        let x: Vec<f64> = t.iter().zip(s).flat_map(|(t, s)| [*t, *s]).collect();
        x.iter().enumerate().map(|(i, xi)| xi * x.iter().zip(&c[i]).map(|(xj, cij)| xj * cij).sum::<f64>()).sum()
    }
}

/// A real test function with a gradient, for the limiting variance.
pub trait SmoothFunction: Sync {
    fn value(&self, z: Complex64) -> f64;

    /// Central differences unless overridden.
    fn gradient(&self, z: Complex64) -> [f64; 2] {
        let h = 1e-6;
        [
            (self.value(z + h) - self.value(z - h)) / (2.0 * h),
            (self.value(z + Complex64::new(0.0, h)) - self.value(z - Complex64::new(0.0, h))) / (2.0 * h),
        ]
    }
}

/// `f = Σ t_{n,k} Re α_{n,k} + s_{n,k} Im α_{n,k}` over indices with `n >= 0`.
#[derive(Debug, Clone)]
pub struct AlphaCombination {
    terms: Vec<(EigenIndex, AlphaKernel, f64, f64)>,
}

impl AlphaCombination {
    pub fn new(table: &RootTable, terms: &[(EigenIndex, f64, f64)]) -> Result<Self> {
        check_nonnegative(&terms.iter().map(|t| t.0).collect::<Vec<_>>())?;
        let terms = terms
            .iter()
            .map(|(i, t, s)| Ok((*i, AlphaKernel::from_table(table, *i)?, *t, *s)))
            .collect::<Result<_>>()?;
        Ok(AlphaCombination { terms })
    }

    pub fn indices(&self) -> Vec<EigenIndex> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn t(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.2).collect()
    }

    pub fn s(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.3).collect()
    }
}

impl SmoothFunction for AlphaCombination {
    fn value(&self, z: Complex64) -> f64 {
        self.terms.iter().map(|(_, k, t, s)| {
            let a = k.eval(z);
            t * a.re + s * a.im
        }).sum()
    }

    fn gradient(&self, z: Complex64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (_, k, t, s) in &self.terms {
            let [gx, gy] = k.gradient(z);
            g[0] += t * gx.re + s * gx.im;
            g[1] += t * gy.re + s * gy.im;
        }
        g
    }
}

/// The two parts of `σ²(f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RvVariance {
    pub dirichlet: f64,
    pub boundary: f64,
}

impl RvVariance {
    pub fn total(&self) -> f64 {
        self.dirichlet + self.boundary
    }
}

/// `σ²(f)`: the Dirichlet energy by disk quadrature, the boundary term from
/// an FFT of `f` on `circle_points` equispaced points of the unit circle.
pub fn rv_variance(f: &dyn SmoothFunction, disk: &DiskQuadrature, circle_points: usize) -> RvVariance {
    let energy: f64 = disk.nodes().map(|(z, w)| {
        let [gx, gy] = f.gradient(z);
        w * (gx * gx + gy * gy)
    }).sum();
    let mut ring: Vec<Complex64> = (0..circle_points)
        .map(|a| Complex64::new(f.value(Complex64::from_polar(1.0, 2.0 * PI * a as f64 / circle_points as f64)), 0.0))
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(circle_points).process(&mut ring);
    let scale = 1.0 / circle_points as f64;
    let boundary: f64 = (1..circle_points.div_ceil(2))
        .map(|m| m as f64 * ((ring[m] * scale).norm_sqr() + (ring[circle_points - m] * scale).norm_sqr()))
        .sum::<f64>()
        * 0.5;
    RvVariance { dirichlet: energy / (4.0 * PI), boundary }
}

/// Real-valued test function from a closure, differentiated numerically.
pub struct FnSmooth<F>(pub F);

impl<F: Fn(Complex64) -> f64 + Sync> SmoothFunction for FnSmooth<F> {
    fn value(&self, z: Complex64) -> f64 {
        (self.0)(z)
    }
}
