//! The limiting Gaussian field
//!
//! ```text
//! h = √π Σ_k A_k e_{0,k} / j_{0,k} + 2√π Re Σ_{n,k>=1} (Z_{n,k} + W_n/√n) e_{n,k} / j_{n,k}
//! ```
//!
//! held as eigenbasis coefficients, and the finite-`N` field
//! `h_N(z) = Σ_i log|z - z_i| - E(…)`, whose `(n, k)` coefficient is `γ_{n,k}^{(N)}`.
//! Pointwise values are always those of a truncated series: `h` is a
//! distribution with covariance `-½ log|z - w|` and no pointwise limit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::basis::{pairing, CoeffVector, DiskBasis, EigenIndex};
use crate::error::{Error, Result};
use crate::ginibre::{complex_gaussian, derive_seed, one_point_density, PlaneQuadrature, SpectrumSample};
use crate::log_kernel::Cutoff;
use crate::quadrature::gauss_legendre_on;
use crate::specfun::{build_root_table, RootTable};
use crate::statistics::{
    exact_gamma_variance, ks_two_sample, Check, Estimate, GammaEvaluator, GammaSample, KsResult, KS_LEVEL,
};
use crate::summation::Neumaier;

/// A coefficient draw (or a finite-`N` field) truncated at `cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub coeffs: CoeffVector,
    pub cutoff: Cutoff,
    pub seed: u64,
}

impl FieldSample {
    /// The truncated series at `z`, `|z| <= 1`.
    pub fn eval(&self, basis: &DiskBasis, z: Complex64) -> Result<f64> {
        let mut acc = Neumaier::default();
        for (idx, c) in self.coeffs.iter() {
            acc.add((c * basis.eval(idx, z)?).re);
        }
        Ok(acc.sum())
    }

    /// `‖h‖²_{-s}` of the truncation.
    pub fn norm_sq(&self, s: f64, table: &RootTable) -> Result<f64> {
        crate::basis::sobolev_norm_sq(&self.coeffs, -s, table)
    }
}

/// Indices `0 <= n <= n_max`, `1 <= k <= k_max` in row order.
pub fn cutoff_indices(cutoff: Cutoff) -> Vec<EigenIndex> {
    (0..=cutoff.n_max as i32).flat_map(|n| (1..=cutoff.k_max).map(move |k| EigenIndex::new(n, k))).collect()
}

fn table_for(cutoff: Cutoff) -> Result<RootTable> {
    build_root_table(cutoff.n_max.max(1), cutoff.k_max.max(1))
}

fn check_cutoff(cutoff: Cutoff) -> Result<()> {
    if cutoff.k_max == 0 {
        return Err(Error::InvalidArgument("cutoff needs k_max >= 1".into()));
    }
    Ok(())
}

/// Coefficients for `n >= 0` in the layout of [`cutoff_indices`], split into
/// the `A`/`Z` part and the `W` part.
struct Draw {
    gff: Vec<Complex64>,
    harmonic: Vec<Complex64>,
}

/// Sampler for `h` at a fixed cutoff.
#[derive(Debug, Clone)]
pub struct LimitField {
    cutoff: Cutoff,
    /// `√π / j_{n,k}` in layout order.
    scale: Vec<f64>,
    roots: Vec<f64>,
}

impl LimitField {
    pub fn new(cutoff: Cutoff) -> Result<Self> {
        check_cutoff(cutoff)?;
        Self::with_table(&table_for(cutoff)?, cutoff)
    }

    pub fn with_table(table: &RootTable, cutoff: Cutoff) -> Result<Self> {
        check_cutoff(cutoff)?;
        let roots = cutoff_indices(cutoff).iter().map(|i| table.root(i.n, i.k)).collect::<Result<Vec<_>>>()?;
        let scale = roots.iter().map(|j| PI.sqrt() / j).collect();
        Ok(LimitField { cutoff, scale, roots })
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    fn k_max(&self) -> usize {
        self.cutoff.k_max as usize
    }

    /// Draw order: `A_1..A_K`, then per `n >= 1`: `W_n`, `Z_{n,1}..Z_{n,K}`.
    fn draw(&self, seed: u64) -> Draw {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kk = self.k_max();
        let len = self.scale.len();
        let mut gff = vec![Complex64::new(0.0, 0.0); len];
        let mut harmonic = vec![Complex64::new(0.0, 0.0); len];
        for (k, slot) in gff.iter_mut().take(kk).enumerate() {
            let a: f64 = rng.sample(StandardNormal);
            *slot = Complex64::new(a * self.scale[k], 0.0);
        }
        for n in 1..=self.cutoff.n_max as usize {
            let w = complex_gaussian(&mut rng) / (n as f64).sqrt();
            for k in 0..kk {
                let p = n * kk + k;
                harmonic[p] = w * self.scale[p];
                gff[p] = complex_gaussian(&mut rng) * self.scale[p];
            }
        }
        Draw { gff, harmonic }
    }

    fn to_sample(&self, coeffs: &[Complex64], seed: u64) -> FieldSample {
        let mut v = CoeffVector::new_real_field();
        for (idx, c) in cutoff_indices(self.cutoff).into_iter().zip(coeffs) {
            // Layout values at n = 0 are real by construction.
            v.set(idx, *c).expect("real-field coefficient");
        }
        FieldSample { coeffs: v, cutoff: self.cutoff, seed }
    }

    /// One draw of the truncated `h`.
    pub fn sample(&self, seed: u64) -> FieldSample {
        let d = self.draw(seed);
        let sum: Vec<Complex64> = d.gff.iter().zip(&d.harmonic).map(|(a, b)| a + b).collect();
        self.to_sample(&sum, seed)
    }

    /// The same draw split into the `A, Z` part (the Dirichlet free field
    /// piece) and the `W` part; the two add up to [`LimitField::sample`].
    pub fn sample_parts(&self, seed: u64) -> (FieldSample, FieldSample) {
        let d = self.draw(seed);
        (self.to_sample(&d.gff, seed), self.to_sample(&d.harmonic, seed))
    }

    /// `E‖h‖²_{-s}` over the cutoff.
    pub fn expected_norm_sq(&self, s: f64) -> f64 {
        let kk = self.k_max();
        self.roots
            .iter()
            .enumerate()
            .map(|(p, j)| {
                let n = p / kk;
                let w = if n == 0 { PI } else { 2.0 * PI * (1.0 + 1.0 / n as f64) };
                w * j.powf(-2.0 - 2.0 * s)
            })
            .collect::<Neumaier>()
            .sum()
    }

    /// Monte-Carlo mean of `‖h‖²_{-s}` over `m` draws seeded by
    /// `derive_seed(seed, i)`.
    pub fn norm_sq_mc(&self, s: f64, m: usize, seed: u64) -> Estimate {
        let kk = self.k_max();
        let weights: Vec<f64> = self
            .roots
            .iter()
            .enumerate()
            .map(|(p, j)| if p < kk { 1.0 } else { 2.0 } * j.powf(-2.0 * s))
            .collect();
        let values: Vec<f64> = (0..m as u64)
            .into_par_iter()
            .map(|i| {
                let d = self.draw(derive_seed(seed, i));
                d.gff.iter().zip(&d.harmonic).zip(&weights).map(|((a, b), w)| w * (a + b).norm_sqr()).sum()
            })
            .collect();
        Estimate::from_samples(&values)
    }
}

/// `h` truncated at `cutoff`, drawn from `seed`.
pub fn sample_h(cutoff: Cutoff, seed: u64) -> Result<FieldSample> {
    Ok(LimitField::new(cutoff)?.sample(seed))
}

/// `E‖h‖²_{-s}`: the sum over the cutoff and an upper bound for the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormSum {
    pub truncated: f64,
    pub tail_bound: f64,
}

/// `E‖h‖²_{-s} = π Σ_k j_{0,k}^{-2-2s} + 2π Σ_{n,k>=1} (1 + 1/n) j_{n,k}^{-2-2s}`.
///
/// The remainder is bounded through `j_{n,k}² > n² + (k - 1/4)² π²`,
/// comparing each monotone sum with its integral.
pub fn expected_norm_sq(s: f64, cutoff: Cutoff) -> Result<NormSum> {
    if s <= 0.0 {
        return Err(Error::Domain(format!("E‖h‖²_(-s) needs s > 0, got {s}")));
    }
    let field = LimitField::new(cutoff)?;
    Ok(NormSum { truncated: field.expected_norm_sq(s), tail_bound: norm_tail_bound(s, cutoff) })
}

fn norm_tail_bound(s: f64, cutoff: Cutoff) -> f64 {
    let p = 1.0 + s;
    let (nm, km) = (cutoff.n_max as f64, cutoff.k_max as f64);
    // Σ_{m >= m0} f(m) <= f(m0) + ∫_{m0}^∞ f for decreasing f.
    let power_tail = |m0: f64, e: f64| m0.powf(-e) + m0.powf(1.0 - e) / (e - 1.0);
    // Rows |n| <= n_max, k > k_max: j^{-2p} <= (π (k - 1/4))^{-2p}.
    let row_weight = PI + 2.0 * PI * 2.0 * nm;
    let columns = row_weight * PI.powf(-2.0 * p) * power_tail(km + 0.75, 2.0 * p);
    // Rows n > n_max: Σ_k (n² + π²(k - 1/4)²)^{-p} <= n^{-2p} + n^{1-2p} I,
    // I = ∫_0^∞ (1 + π²u²)^{-p} du = Γ(p - 1/2) / (2√π Γ(p)).
    let integral = (ln_gamma(p - 0.5) - ln_gamma(p)).exp() / (2.0 * PI.sqrt());
    let n0 = nm + 1.0;
    let rows = 2.0 * PI * 2.0 * (power_tail(n0, 2.0 * p) + integral * power_tail(n0, 2.0 * p - 1.0));
    columns + rows
}

/// Eigenfunction values at a fixed point, in layout order.
fn basis_row(basis: &DiskBasis, cutoff: Cutoff, z: Complex64) -> Result<Vec<Complex64>> {
    cutoff_indices(cutoff).into_iter().map(|i| basis.eval(i, z)).collect()
}

/// `h(z)` from layout coefficients: `Σ_{n=0} c e + 2 Re Σ_{n>=1} c e`.
fn layout_value(coeffs: &[Complex64], row: &[Complex64], k_max: usize) -> f64 {
    coeffs
        .iter()
        .zip(row)
        .enumerate()
        .map(|(p, (c, e))| if p < k_max { 1.0 } else { 2.0 } * (c * e).re)
        .sum()
}

fn check_points(z: Complex64, w: Complex64) -> Result<()> {
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(Error::Domain(format!("points must lie in the open disk, got {z} and {w}")));
    }
    if z == w {
        return Err(Error::Singularity(format!("covariance kernel is singular at z = w = {z}")));
    }
    Ok(())
}

/// Monte-Carlo estimate of `E h(z) h(w)` for the truncated field, over `m`
/// draws seeded by `derive_seed(seed, i)`.
pub fn covariance_mc(z: Complex64, w: Complex64, cutoff: Cutoff, m: usize, seed: u64) -> Result<Estimate> {
    check_points(z, w)?;
    let table = table_for(cutoff)?;
    let field = LimitField::with_table(&table, cutoff)?;
    let basis = DiskBasis::from_table(table);
    let (rz, rw) = (basis_row(&basis, cutoff, z)?, basis_row(&basis, cutoff, w)?);
    let kk = cutoff.k_max as usize;
    let products: Vec<f64> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let d = field.draw(derive_seed(seed, i));
            let c: Vec<Complex64> = d.gff.iter().zip(&d.harmonic).map(|(a, b)| a + b).collect();
            layout_value(&c, &rz, kk) * layout_value(&c, &rw, kk)
        })
        .collect();
    Ok(Estimate::from_samples(&products))
}

/// `E h(z) h(w)` of the truncated field, summed exactly from the
/// coefficient covariances.
pub fn covariance_truncated(z: Complex64, w: Complex64, cutoff: Cutoff) -> Result<f64> {
    let table = table_for(cutoff)?;
    let basis = DiskBasis::from_table(table);
    let mut acc = Neumaier::default();
    for n in 0..=cutoff.n_max as i32 {
        let mut u = Vec::with_capacity(cutoff.k_max as usize);
        let mut v = Vec::with_capacity(cutoff.k_max as usize);
        for k in 1..=cutoff.k_max {
            let idx = EigenIndex::new(n, k);
            let j = basis.root(idx)?;
            u.push(basis.eval(idx, z)? / j);
            v.push(basis.eval(idx, w)? / j);
        }
        if n == 0 {
            acc.add(PI * u.iter().zip(&v).map(|(a, b)| (a * b).re).sum::<f64>());
        } else {
            let diag: Complex64 = u.iter().zip(&v).map(|(a, b)| a * b.conj()).sum();
            let shared = u.iter().sum::<Complex64>() * v.iter().sum::<Complex64>().conj() / n as f64;
            acc.add(2.0 * PI * (diag + shared).re);
        }
    }
    Ok(acc.sum())
}

/// `-½ log|z - w|`.
pub fn covariance_kernel(z: Complex64, w: Complex64) -> f64 {
    -0.5 * (z - w).norm().ln()
}

/// `E Σ_i log|z - z_i| = ∫ log|z - w| ρ_N(w) d²w`. The angular mean of
/// `log|z - r e^{iθ}|` is `log max(|z|, r)`, so this is
/// `N log|z| + 2π ∫_{|z|}^∞ log(r/|z|) ρ_N(r) r dr`.
pub fn expected_log_abs(z: Complex64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix size N must be positive".into()));
    }
    let a = z.norm();
    let nf = n as f64;
    let outer = 1.0 + 8.0 / nf.sqrt();
    if a >= outer {
        return Ok(nf * a.ln());
    }
    let width = (1.0 / nf.sqrt()).min(0.25);
    // Geometric grading near the origin resolves the r log r behaviour.
    let mut breaks = vec![a];
    let mut t = a.max(width * 2f64.powi(-40));
    if t > a {
        breaks.push(t);
    }
    while t < width {
        t = (2.0 * t).min(width);
        breaks.push(t);
    }
    for stop in [1.0, outer] {
        let from = *breaks.last().unwrap();
        if from < stop {
            let panels = ((stop - from) / width).ceil() as usize;
            breaks.extend((1..=panels).map(|i| from + (stop - from) * i as f64 / panels as f64));
        }
    }
    let mut acc = Neumaier::default();
    for pair in breaks.windows(2) {
        for (r, wt) in gauss_legendre_on(24, pair[0], pair[1]) {
            let log = if a > 0.0 { (r / a).ln() } else { r.ln() };
            acc.add(wt * r * one_point_density(n, Complex64::new(r, 0.0))? * log);
        }
    }
    let base = if a > 0.0 { nf * a.ln() } else { 0.0 };
    Ok(base + 2.0 * PI * acc.sum())
}

/// `h_N(z)` evaluated directly from the eigenvalues.
pub fn centered_log_abs(z: Complex64, sample: &SpectrumSample) -> Result<f64> {
    let direct: f64 = sample.eigenvalues.iter().map(|zi| (z - zi).norm().ln()).collect::<Neumaier>().sum();
    Ok(direct - expected_log_abs(z, sample.matrix_size)?)
}

/// The coefficients `γ_{n,k}^{(N)}` of `h_N` over the evaluator's index set,
/// extended to negative `n` by conjugation.
pub fn field_from_gamma(gamma: &GammaSample, cutoff: Cutoff) -> Result<FieldSample> {
    let mut coeffs = CoeffVector::new_real_field();
    for (idx, v) in gamma.indices.iter().zip(&gamma.values) {
        if idx.n.unsigned_abs() > cutoff.n_max || idx.k > cutoff.k_max {
            continue;
        }
        coeffs.set(*idx, *v)?;
    }
    Ok(FieldSample { coeffs, cutoff, seed: gamma.seed })
}

/// `h_N` of one spectrum as a coefficient vector truncated at `cutoff`.
pub fn h_n_coeffs(sample: &SpectrumSample, cutoff: Cutoff, table: &RootTable) -> Result<FieldSample> {
    let quad = PlaneQuadrature::new(sample.matrix_size)?;
    let eval = GammaEvaluator::new(table, &cutoff_indices(cutoff), &quad)?;
    field_from_gamma(&eval.evaluate(sample)?, cutoff)
}

/// Weight `j^{-2s'}` of `(n, k)` counted once for `n = 0` and twice otherwise.
fn tightness_weights(indices: &[EigenIndex], s_prime: f64, table: &RootTable) -> Result<Vec<f64>> {
    indices
        .iter()
        .map(|i| Ok(if i.n == 0 { 1.0 } else { 2.0 } * table.root(i.n, i.k)?.powf(-2.0 * s_prime)))
        .collect()
}

/// Empirical mean of `‖h_N‖²_{-s'} = Σ_{n,k} |γ_{n,k}|² j^{-2s'}` over the
/// common index set of `runs` (with `±n` both counted).
pub fn tightness_statistic(runs: &[GammaSample], s_prime: f64, table: &RootTable) -> Result<Estimate> {
    let first = runs.first().ok_or_else(|| Error::InvalidArgument("tightness needs at least one run".into()))?;
    if s_prime <= 2.0 {
        return Err(Error::Domain(format!("tightness is stated for s' > 2, got {s_prime}")));
    }
    if runs.iter().any(|r| r.indices != first.indices) {
        return Err(Error::InvalidArgument("runs do not share an index set".into()));
    }
    let weights = tightness_weights(&first.indices, s_prime, table)?;
    let values: Vec<f64> =
        runs.iter().map(|r| r.values.iter().zip(&weights).map(|(g, w)| w * g.norm_sqr()).sum()).collect();
    if values.len() == 1 {
        return Ok(Estimate { value: values[0], se: f64::NAN });
    }
    Ok(Estimate::from_samples(&values))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessEntry {
    pub matrix_size: usize,
    pub draws: usize,
    pub statistic: Estimate,
    /// `Σ E|γ^{(N)}|² j^{-2s'}` from exact variances.
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    pub s_prime: f64,
    pub entries: Vec<TightnessEntry>,
    /// `E‖h‖²_{-s'}` over the same index set.
    pub limit: f64,
    /// `C Σ j^{2-2s'}` over the index set with the calibrated `C`.
    pub bound: f64,
    pub constant: f64,
    /// Least-squares slope of the statistic against `ln N`.
    pub slope: f64,
}

impl TightnessReport {
    pub fn checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        for e in &self.entries {
            let n = e.matrix_size;
            out.push(Check::within(format!("‖h_N‖² MC vs exact, N = {n}"), e.statistic.value, e.exact, 4.0 * e.statistic.se));
            out.push(Check::at_most(format!("‖h_N‖² exact <= limit, N = {n}"), e.exact, self.limit * (1.0 + 1e-9)));
            out.push(Check::at_most(format!("‖h_N‖² <= C Σ j^(2-2s'), N = {n}"), e.statistic.value, self.bound));
        }
        if let (Some(a), Some(b)) = (self.entries.first(), self.entries.last()) {
            let se = (a.statistic.se.powi(2) + b.statistic.se.powi(2)).sqrt();
            out.push(Check::at_most(
                format!("growth from N = {} to N = {}", a.matrix_size, b.matrix_size),
                b.statistic.value - a.statistic.value,
                4.0 * se + (b.exact - a.exact).max(0.0),
            ));
        }
        out
    }
}

/// Tightness summary over runs grouped by matrix size (all sharing one
/// index set); `constant` is the calibrated variance-bound `C`.
pub fn tightness_report(
    runs_by_size: &[(usize, &[GammaSample])],
    s_prime: f64,
    constant: f64,
    table: &RootTable,
) -> Result<TightnessReport> {
    let indices = runs_by_size
        .first()
        .and_then(|(_, r)| r.first())
        .map(|g| g.indices.clone())
        .ok_or_else(|| Error::InvalidArgument("tightness needs at least one run".into()))?;
    let weights = tightness_weights(&indices, s_prime, table)?;
    let mut entries = Vec::new();
    for (size, runs) in runs_by_size {
        if runs.iter().any(|r| r.matrix_size != *size || r.indices != indices) {
            return Err(Error::InvalidArgument(format!("runs for N = {size} do not match the common index set")));
        }
        let statistic = tightness_statistic(runs, s_prime, table)?;
        let quad = PlaneQuadrature::new(*size)?;
        let mut exact = Neumaier::default();
        for (idx, w) in indices.iter().zip(&weights) {
            exact.add(w * exact_gamma_variance(table, *idx, &quad)?);
        }
        entries.push(TightnessEntry { matrix_size: *size, draws: runs.len(), statistic, exact: exact.sum() });
    }
    let mut limit = Neumaier::default();
    let mut bound = Neumaier::default();
    for idx in &indices {
        let j = table.root(idx.n, idx.k)?;
        let mult = if idx.n == 0 { 1.0 } else { 2.0 };
        let var = if idx.n == 0 { PI / (j * j) } else { PI / (j * j) * (1.0 + 1.0 / idx.n as f64) };
        limit.add(mult * var * j.powf(-2.0 * s_prime));
        bound.add(mult * constant * j.powf(2.0 - 2.0 * s_prime));
    }
    let xs: Vec<f64> = entries.iter().map(|e| (e.matrix_size as f64).ln()).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.statistic.value).collect();
    let slope = least_squares_slope(&xs, &ys);
    Ok(TightnessReport { s_prime, entries, limit: limit.sum(), bound: bound.sum(), constant, slope })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Law of `h_N(f)` against `h(f)` for one test function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingComparison {
    pub name: String,
    pub finite_mean: Estimate,
    pub limit_mean: Estimate,
    pub finite_variance: Estimate,
    pub limit_variance: Estimate,
    pub ks: KsResult,
}

impl PairingComparison {
    pub fn new(name: impl Into<String>, finite: &[f64], limit: &[f64]) -> Self {
        let variance = |xs: &[f64]| {
            let mu = Estimate::from_samples(xs).value;
            let sq: Vec<f64> = xs.iter().map(|x| (x - mu).powi(2)).collect();
            Estimate::from_samples(&sq)
        };
        PairingComparison {
            name: name.into(),
            finite_mean: Estimate::from_samples(finite),
            limit_mean: Estimate::from_samples(limit),
            finite_variance: variance(finite),
            limit_variance: variance(limit),
            ks: ks_two_sample(finite, limit),
        }
    }

    /// Means within 4 se, variances within 5 se, KS above the threshold.
    pub fn checks(&self) -> Vec<Check> {
        let se = |a: Estimate, b: Estimate| (a.se.powi(2) + b.se.powi(2)).sqrt();
        vec![
            Check::within(
                format!("{} mean", self.name),
                self.finite_mean.value - self.limit_mean.value,
                0.0,
                4.0 * se(self.finite_mean, self.limit_mean),
            ),
            Check::within(
                format!("{} variance", self.name),
                self.finite_variance.value - self.limit_variance.value,
                0.0,
                5.0 * se(self.finite_variance, self.limit_variance),
            ),
            Check::at_least(format!("{} KS p", self.name), self.ks.p_value, KS_LEVEL),
        ]
    }
}

/// `h(f)` for each field; real for real fields and real `f`.
pub fn pairings(fields: &[FieldSample], f: &CoeffVector) -> Vec<f64> {
    fields.iter().map(|h| pairing(&h.coeffs, f).re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ginibre::HessenbergQr;
    use crate::statistics::limit_covariance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sample_is_real_field_and_deterministic() {
        let cut = Cutoff::new(4, 3);
        let a = sample_h(cut, 11).unwrap();
        assert_eq!(a, sample_h(cut, 11).unwrap());
        assert_ne!(a, sample_h(cut, 12).unwrap());
        assert!(a.coeffs.is_real_field());
        assert_eq!(a.coeffs.len(), 3 + 2 * 4 * 3);
        for (idx, v) in a.coeffs.iter() {
            assert_eq!(a.coeffs.get(idx.mirror()), v.conj());
            if idx.n == 0 {
                assert_eq!(v.im, 0.0);
            }
        }
        let json = serde_json::to_string(&a).unwrap();
        let back: FieldSample = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn parts_add_up() {
        let field = LimitField::new(Cutoff::new(3, 4)).unwrap();
        let h = field.sample(5);
        let (g, w) = field.sample_parts(5);
        for (idx, v) in h.coeffs.iter() {
            assert_eq!(v, g.coeffs.get(idx) + w.coeffs.get(idx));
            if idx.n == 0 {
                assert_eq!(w.coeffs.get(idx), c(0.0, 0.0));
            }
        }
        // W_n is shared across k: the harmonic part at fixed n is W_n √π/(j √n).
        let table = build_root_table(3, 4).unwrap();
        let ratio = |k| w.coeffs.get(EigenIndex::new(2, k)) * table.root(2, k).unwrap();
        assert!((ratio(1) - ratio(4)).norm() < 1e-14 * ratio(1).norm());
    }

    #[test]
    fn coefficient_law_matches_limit_covariance() {
        let table = build_root_table(2, 3).unwrap();
        let field = LimitField::with_table(&table, Cutoff::new(2, 3)).unwrap();
        // Second moments of the sampler in closed form: scale² (δ + 1/n).
        let pairs = [((0, 1), (0, 1)), ((1, 1), (1, 2)), ((2, 3), (2, 3)), ((1, 2), (2, 2))];
        for ((n1, k1), (n2, k2)) in pairs {
            let (a, b) = (EigenIndex::new(n1, k1), EigenIndex::new(n2, k2));
            let pa = n1 as usize * 3 + (k1 - 1) as usize;
            let pb = n2 as usize * 3 + (k2 - 1) as usize;
            let expected = if n1 != n2 {
                0.0
            } else if n1 == 0 {
                if k1 == k2 { field.scale[pa] * field.scale[pb] } else { 0.0 }
            } else {
                field.scale[pa] * field.scale[pb] * (if k1 == k2 { 1.0 } else { 0.0 } + 1.0 / n1 as f64)
            };
            let lc = limit_covariance(a, b, &table).unwrap().hermitian.re;
            assert!((expected - lc).abs() <= 1e-15 * lc.abs().max(1e-300), "{a} {b}");
        }
    }

    #[test]
    fn expected_norm_properties() {
        let cut = Cutoff::square(16);
        let one = expected_norm_sq(1.0, cut).unwrap();
        let two = expected_norm_sq(2.0, cut).unwrap();
        assert!(two.truncated < one.truncated);
        assert!(one.truncated > expected_norm_sq(1.0, Cutoff::square(8)).unwrap().truncated);
        let big = expected_norm_sq(1.0, Cutoff::square(48)).unwrap();
        assert!(big.truncated - one.truncated <= one.tail_bound);
        assert!(big.tail_bound < one.tail_bound);
        assert!(expected_norm_sq(0.0, cut).is_err());
        // Single-term check of the formula.
        let j = crate::specfun::bessel_root(0, 1).unwrap();
        let only = expected_norm_sq(1.0, Cutoff::new(0, 1)).unwrap();
        assert!((only.truncated - PI * j.powi(-4)).abs() < 1e-15);
    }

    #[test]
    fn truncated_covariance_symmetric_and_close_to_kernel() {
        let (z, w) = (c(0.3, 0.0), c(-0.4, 0.0));
        let cut = Cutoff::square(32);
        let a = covariance_truncated(z, w, cut).unwrap();
        let b = covariance_truncated(w, z, cut).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - covariance_kernel(z, w)).abs() < 2e-2, "{a}");
        assert!(covariance_mc(z, z, cut, 4, 1).is_err());
        assert!(covariance_mc(z, c(1.2, 0.0), cut, 4, 1).is_err());
    }

    #[test]
    fn covariance_mc_order_symmetry() {
        let (z, w) = (c(0.1, 0.2), c(-0.3, 0.1));
        let cut = Cutoff::square(6);
        let a = covariance_mc(z, w, cut, 200, 3).unwrap();
        let b = covariance_mc(w, z, cut, 200, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn expected_log_abs_closed_forms() {
        // N = 1: ρ_1 = e^{-r²}/π, so E log|z_1| = -γ_E/2 at z = 0.
        let euler = 0.577_215_664_901_532_9;
        assert!((expected_log_abs(c(0.0, 0.0), 1).unwrap() + euler / 2.0).abs() < 1e-10);
        // For |z| far outside the support the mean is N log|z| up to e^{-N}.
        let far = expected_log_abs(c(3.0, 0.0), 16).unwrap();
        assert!((far - 16.0 * 3f64.ln()).abs() < 1e-12);
        // Radial symmetry and continuity through r = 0.
        let a = expected_log_abs(Complex64::from_polar(0.5, 0.3), 8).unwrap();
        let b = expected_log_abs(Complex64::from_polar(0.5, 2.0), 8).unwrap();
        assert!((a - b).abs() < 1e-13);
        let near = expected_log_abs(c(1e-9, 0.0), 8).unwrap();
        assert!((near - expected_log_abs(c(0.0, 0.0), 8).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn h_n_pairing_single_index() {
        let table = build_root_table(3, 3).unwrap();
        let s = SpectrumSample::draw(8, 2, &HessenbergQr::default()).unwrap();
        let cut = Cutoff::new(3, 3);
        let h = h_n_coeffs(&s, cut, &table).unwrap();
        assert!(h.coeffs.is_real_field());
        let mut f = CoeffVector::new();
        f.set(EigenIndex::new(-2, 3), c(0.5, -1.0)).unwrap();
        let got = pairing(&h.coeffs, &f);
        assert_eq!(got, h.coeffs.get(EigenIndex::new(2, 3)) * c(0.5, -1.0));
    }

    #[test]
    fn tightness_preconditions() {
        let table = build_root_table(2, 2).unwrap();
        assert!(tightness_statistic(&[], 2.5, &table).is_err());
        let g = GammaSample {
            indices: vec![EigenIndex::new(0, 1), EigenIndex::new(1, 1)],
            values: vec![c(1.0, 0.0), c(0.0, 2.0)],
            matrix_size: 4,
            seed: 0,
        };
        assert!(tightness_statistic(std::slice::from_ref(&g), 2.0, &table).is_err());
        let v = tightness_statistic(std::slice::from_ref(&g), 2.5, &table).unwrap().value;
        let expect = table.root(0, 1).unwrap().powf(-5.0) + 2.0 * 4.0 * table.root(1, 1).unwrap().powf(-5.0);
        assert!((v - expect).abs() < 1e-15);
        let v3 = tightness_statistic(&[g], 3.0, &table).unwrap().value;
        assert!(v3 < v);
    }
}
