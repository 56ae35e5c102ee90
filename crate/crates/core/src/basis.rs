//! The Dirichlet eigenbasis of the unit disk,
//!
//! ```text
//! e_{n,k}(r e^{iφ}) = C_{n,k} J_{|n|}(j_{|n|,k} r) e^{inφ},   C_{n,k} = 1 / (√π J_{|n|+1}(j_{|n|,k})),
//! ```
//!
//! together with the Dirichlet Green's function and the coefficient algebra
//! of the Sobolev scale `H^s` built on it.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::DiskQuadrature;
use crate::specfun::{self, bessel_root, jn, jn_prime, RootTable};

/// Index `(n, k)` of the eigenfunction `e_{n,k}`; `n` is any integer, `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EigenIndex {
    pub n: i32,
    pub k: u32,
}

impl EigenIndex {
    /// Panics if `k == 0`; use [`EigenIndex::try_new`] for untrusted input.
    pub fn new(n: i32, k: u32) -> Self {
        assert!(k >= 1, "eigen index k must be >= 1");
        EigenIndex { n, k }
    }

    pub fn try_new(n: i32, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("eigen index k must be >= 1".into()));
        }
        Ok(EigenIndex { n, k })
    }

    /// `(-n, k)`.
    pub fn mirror(self) -> Self {
        EigenIndex { n: -self.n, k: self.k }
    }
}

impl fmt::Display for EigenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.k)
    }
}

/// `C_{n,k}`, computed from scratch (no table).
pub fn normalization_constant(n: i32, k: u32) -> Result<f64> {
    let m = n.unsigned_abs();
    let j = bessel_root(m as i32, k)?;
    Ok(1.0 / (PI.sqrt() * jn(m + 1, j)))
}

/// Root table plus the normalisation constants `C_{n,k}` it implies.
#[derive(Debug, Clone)]
pub struct DiskBasis {
    table: RootTable,
    norms: Vec<f64>,
}

impl DiskBasis {
    /// Basis truncated to `|n| <= n_max`, `k <= k_max`.
    pub fn new(n_max: u32, k_max: u32) -> Result<Self> {
        Ok(Self::from_table(specfun::build_root_table(n_max, k_max)?))
    }

    pub fn from_table(table: RootTable) -> Self {
        let sqrt_pi = PI.sqrt();
        let norms = table.iter().map(|(n, _, j)| 1.0 / (sqrt_pi * jn(n + 1, j))).collect();
        DiskBasis { table, norms }
    }

    pub fn table(&self) -> &RootTable {
        &self.table
    }

    pub fn n_max(&self) -> u32 {
        self.table.n_max()
    }

    pub fn k_max(&self) -> u32 {
        self.table.k_max()
    }

    pub fn contains(&self, idx: EigenIndex) -> bool {
        self.table.get(idx.n, idx.k).is_some()
    }

    pub fn root(&self, idx: EigenIndex) -> Result<f64> {
        self.table.root(idx.n, idx.k)
    }

    pub fn norm(&self, idx: EigenIndex) -> Result<f64> {
        self.root(idx)?;
        Ok(self.norm_unchecked(idx.n.unsigned_abs(), idx.k))
    }

    pub(crate) fn root_unchecked(&self, m: u32, k: u32) -> f64 {
        self.table.row(m)[k as usize - 1]
    }

    pub(crate) fn norm_unchecked(&self, m: u32, k: u32) -> f64 {
        self.norms[(m * self.table.k_max() + k - 1) as usize]
    }

    /// Radial profile `C_{m,k} J_m(j_{m,k} r)`.
    pub(crate) fn radial(&self, m: u32, k: u32, r: f64) -> f64 {
        self.norm_unchecked(m, k) * jn(m, self.root_unchecked(m, k) * r)
    }

    /// Derivative of the radial profile in `r`.
    pub(crate) fn radial_derivative(&self, m: u32, k: u32, r: f64) -> f64 {
        let j = self.root_unchecked(m, k);
        self.norm_unchecked(m, k) * j * jn_prime(m, j * r)
    }

    /// All indices `|n| <= n_max`, `k <= k_max`, ordered by `(n, k)`.
    pub fn indices(&self) -> impl Iterator<Item = EigenIndex> + '_ {
        let n_max = self.n_max() as i32;
        let k_max = self.k_max();
        (-n_max..=n_max).flat_map(move |n| (1..=k_max).map(move |k| EigenIndex { n, k }))
    }

    /// `e_{n,k}(z)` for `|z| <= 1`.
    pub fn eval(&self, idx: EigenIndex, z: Complex64) -> Result<Complex64> {
        self.root(idx)?;
        check_in_closed_disk(z)?;
        Ok(self.eval_unchecked(idx, z))
    }

    pub(crate) fn eval_unchecked(&self, idx: EigenIndex, z: Complex64) -> Complex64 {
        let (r, phi) = z.to_polar();
        let m = idx.n.unsigned_abs();
        Complex64::from_polar(1.0, idx.n as f64 * phi) * self.radial(m, idx.k, r.min(1.0))
    }

    /// Cartesian gradient `(∂_x e, ∂_y e)` for `|z| <= 1`.
    pub fn gradient(&self, idx: EigenIndex, z: Complex64) -> Result<[Complex64; 2]> {
        self.root(idx)?;
        check_in_closed_disk(z)?;
        let (r, phi) = z.to_polar();
        let m = idx.n.unsigned_abs();
        let phase = Complex64::from_polar(1.0, idx.n as f64 * phi);
        let d_r = phase * self.radial_derivative(m, idx.k, r);
        // (1/r) ∂_φ e; the limit at r = 0 is finite (only |n| = 1 survives).
        let d_phi = if r > 0.0 {
            phase * Complex64::new(0.0, idx.n as f64) * (self.radial(m, idx.k, r) / r)
        } else if m == 1 {
            phase * Complex64::new(0.0, idx.n as f64) * self.radial_derivative(m, idx.k, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        let (s, c) = phi.sin_cos();
        Ok([d_r * c - d_phi * s, d_r * s + d_phi * c])
    }
}

fn check_in_closed_disk(z: Complex64) -> Result<()> {
    if z.norm() <= 1.0 + 1e-12 {
        Ok(())
    } else {
        Err(Error::Domain(format!("point {z} lies outside the closed unit disk")))
    }
}

fn check_in_open_disk(z: Complex64, name: &str) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {z} must lie in the open unit disk")))
    }
}

/// `⟨e_a, e_b⟩` by quadrature over `indices`; each eigenfunction is
/// tabulated once on the nodes.
pub fn gram_matrix(basis: &DiskBasis, indices: &[EigenIndex], quad: &DiskQuadrature) -> Result<Vec<Vec<Complex64>>> {
    let nodes: Vec<(Complex64, f64)> = quad.nodes().collect();
    let values = indices
        .iter()
        .map(|i| nodes.iter().map(|(z, w)| Ok(basis.eval(*i, *z)? * w.sqrt())).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(values
        .iter()
        .map(|a| values.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()).collect())
        .collect())
}

/// Largest entry of `|G - I|`.
pub fn gram_deviation(gram: &[Vec<Complex64>]) -> f64 {
    gram.iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, g)| (g - if a == b { 1.0 } else { 0.0 }).norm()))
        .fold(0.0, f64::max)
}

/// `G_D(z, w) = (log|z - w| - log|1 - z̄ w|) / 2π`.
pub fn green_dirichlet_closed(z: Complex64, w: Complex64) -> Result<f64> {
    check_in_open_disk(z, "z")?;
    check_in_open_disk(w, "w")?;
    if z == w {
        return Err(Error::Singularity("Green's function at z = w".into()));
    }
    Ok(((z - w).norm().ln() - (1.0 - z.conj() * w).norm().ln()) / (2.0 * PI))
}

/// Partial sum `-Σ e_{n,k}(z) e_{-n,k}(w) / j_{n,k}^2` over `|n| <= n_max`, `k <= k_max`.
///
/// The `n` and `-n` terms are conjugate to one another, so the result is real
/// up to rounding; the imaginary part is returned for inspection.
pub fn green_dirichlet_partial_sum(
    z: Complex64,
    w: Complex64,
    basis: &DiskBasis,
    n_max: u32,
    k_max: u32,
) -> Result<Complex64> {
    check_in_open_disk(z, "z")?;
    check_in_open_disk(w, "w")?;
    if z == w {
        return Err(Error::Singularity("Green's function at z = w".into()));
    }
    if n_max > basis.n_max() || k_max > basis.k_max() {
        return Err(Error::MissingRoot { n: n_max as i32, k: k_max, n_max: basis.n_max(), k_max: basis.k_max() });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for n in -(n_max as i32)..=n_max as i32 {
        for k in 1..=k_max {
            let idx = EigenIndex { n, k };
            let j = basis.root_unchecked(n.unsigned_abs(), k);
            sum -= basis.eval_unchecked(idx, z) * basis.eval_unchecked(idx.mirror(), w) / (j * j);
        }
    }
    Ok(sum)
}

/// Eigen-expansion of `G_D` truncated to the whole table.
pub fn green_dirichlet_series(z: Complex64, w: Complex64, basis: &DiskBasis) -> Result<f64> {
    Ok(green_dirichlet_partial_sum(z, w, basis, basis.n_max(), basis.k_max())?.re)
}

/// Finitely supported coefficient vector `Σ a_{n,k} e_{n,k}`.
///
/// A `real_field` vector represents a real-valued function and keeps
/// `a_{-n,k} = conj(a_{n,k})`: setting one entry also sets its mirror.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "Vec<CoeffRecord>", try_from = "Vec<CoeffRecord>")]
pub struct CoeffVector {
    entries: BTreeMap<EigenIndex, Complex64>,
    real_field: bool,
}

/// JSON record `{n, k, re, im}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffRecord {
    pub n: i32,
    pub k: u32,
    pub re: f64,
    pub im: f64,
}

impl From<CoeffVector> for Vec<CoeffRecord> {
    fn from(v: CoeffVector) -> Self {
        v.entries
            .iter()
            .map(|(idx, c)| CoeffRecord { n: idx.n, k: idx.k, re: c.re, im: c.im })
            .collect()
    }
}

impl TryFrom<Vec<CoeffRecord>> for CoeffVector {
    type Error = Error;

    fn try_from(records: Vec<CoeffRecord>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for r in records {
            let idx = EigenIndex::try_new(r.n, r.k)?;
            if entries.insert(idx, Complex64::new(r.re, r.im)).is_some() {
                return Err(Error::Parse(format!("duplicate coefficient index {idx}")));
            }
        }
        let real_field = entries
            .iter()
            .all(|(idx, c)| entries.get(&idx.mirror()).is_some_and(|m| *m == c.conj()));
        Ok(CoeffVector { entries, real_field })
    }
}

impl CoeffVector {
    /// Empty complex-valued vector.
    pub fn new() -> Self {
        Self::default()
    }

    /// Empty vector constrained to the real-field symmetry.
    pub fn new_real_field() -> Self {
        CoeffVector { entries: BTreeMap::new(), real_field: true }
    }

    pub fn is_real_field(&self) -> bool {
        self.real_field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Coefficient at `idx`, zero when absent.
    pub fn get(&self, idx: EigenIndex) -> Complex64 {
        self.entries.get(&idx).copied().unwrap_or_default()
    }

    /// Sets `a_idx`. For real-field vectors the mirror entry is set to the
    /// conjugate, and an `n = 0` value must be real (up to 1e-10 relative).
    pub fn set(&mut self, idx: EigenIndex, value: Complex64) -> Result<()> {
        if !self.real_field {
            self.entries.insert(idx, value);
            return Ok(());
        }
        if idx.n == 0 {
            if value.im.abs() > 1e-10 * value.re.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "real-field coefficient at {idx} must be real, got {value}"
                )));
            }
            self.entries.insert(idx, Complex64::new(value.re, 0.0));
        } else {
            self.entries.insert(idx, value);
            self.entries.insert(idx.mirror(), value.conj());
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (EigenIndex, Complex64)> + '_ {
        self.entries.iter().map(|(i, c)| (*i, *c))
    }

    /// `c · v`; a complex factor drops the real-field constraint.
    pub fn scaled(&self, c: Complex64) -> Self {
        CoeffVector {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
            real_field: self.real_field && c.im == 0.0,
        }
    }

    /// Whether `a_{-n,k} = conj(a_{n,k})` holds for every stored entry.
    pub fn has_conjugate_symmetry(&self, tol: f64) -> bool {
        self.entries.iter().all(|(idx, c)| (self.get(idx.mirror()) - c.conj()).norm() <= tol)
    }
}

/// `‖v‖_s^2 = Σ |a_{n,k}|^2 j_{n,k}^{2s}`.
pub fn sobolev_norm_sq(v: &CoeffVector, s: f64, table: &RootTable) -> Result<f64> {
    v.iter().try_fold(0.0, |acc, (idx, c)| {
        let j = table.root(idx.n, idx.k)?;
        Ok(acc + c.norm_sqr() * j.powf(2.0 * s))
    })
}

/// `‖v‖_s`.
pub fn sobolev_norm(v: &CoeffVector, s: f64, table: &RootTable) -> Result<f64> {
    sobolev_norm_sq(v, s, table).map(f64::sqrt)
}

/// Duality pairing `φ(f) = Σ α_{n,k} a_{-n,k}`.
pub fn pairing(phi: &CoeffVector, f: &CoeffVector) -> Complex64 {
    let (small, large) = if phi.len() <= f.len() { (phi, f) } else { (f, phi) };
    small
        .iter()
        .filter_map(|(idx, c)| large.entries.get(&idx.mirror()).map(|d| c * d))
        .sum()
}

/// `max |e_{n,k}|` and `max |∇e_{n,k}|` over a polar verification grid,
/// with the gradient taken by central finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorms {
    pub value: f64,
    pub gradient: f64,
}

/// Polar verification grid for sup-norm checks (not a proof of the bound).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupGrid {
    pub radial: usize,
    pub angular: usize,
}

impl Default for SupGrid {
    fn default() -> Self {
        SupGrid { radial: 256, angular: 512 }
    }
}

pub fn eigenfunction_sup_norms(basis: &DiskBasis, idx: EigenIndex, grid: SupGrid) -> Result<SupNorms> {
    basis.root(idx)?;
    let h = 1e-6;
    let mut value: f64 = 0.0;
    let mut gradient: f64 = 0.0;
    for i in 0..grid.radial {
        let r = (i as f64 + 0.5) / grid.radial as f64 * (1.0 - 2.0 * h);
        for a in 0..grid.angular {
            let z = Complex64::from_polar(r, 2.0 * PI * a as f64 / grid.angular as f64);
            let e = |p: Complex64| basis.eval_unchecked(idx, p);
            value = value.max(e(z).norm());
            let dx = (e(z + h) - e(z - h)) / (2.0 * h);
            let dy = (e(z + Complex64::i() * h) - e(z - Complex64::i() * h)) / (2.0 * h);
            gradient = gradient.max((dx.norm_sqr() + dy.norm_sqr()).sqrt());
        }
    }
    Ok(SupNorms { value, gradient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{disk_integrate, DiskQuadrature};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalization_of_first_mode() {
        let c01 = normalization_constant(0, 1).unwrap();
        let want = 1.0 / (PI.sqrt() * jn(1, 2.404_825_557_695_773));
        assert!((c01 - want).abs() < 1e-12);
        assert!((c01 - 1.0868).abs() < 1e-4);
        assert_eq!(normalization_constant(3, 2).unwrap(), normalization_constant(-3, 2).unwrap());
        let basis = DiskBasis::new(4, 4).unwrap();
        assert!((basis.norm(EigenIndex::new(0, 1)).unwrap() - c01).abs() < 1e-14);
        // Sign alternates in k together with J_{|n|+1}(j).
        for k in 1..4 {
            let a = basis.norm(EigenIndex::new(2, k)).unwrap();
            let b = basis.norm(EigenIndex::new(2, k + 1)).unwrap();
            assert!(a * b < 0.0);
        }
        let q = DiskQuadrature::new(48, 8);
        let idx = EigenIndex::new(0, 1);
        let mass = q.integrate_real(|z| basis.eval(idx, z).unwrap().norm_sqr());
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn eigenfunction_values() {
        let basis = DiskBasis::new(4, 4).unwrap();
        let c01 = basis.norm(EigenIndex::new(0, 1)).unwrap();
        assert!((basis.eval(EigenIndex::new(0, 1), c(0.0, 0.0)).unwrap() - c01).norm() < 1e-15);
        assert_eq!(basis.eval(EigenIndex::new(1, 1), c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        for i in 0..32 {
            let z = Complex64::from_polar(1.0, 0.2 * i as f64);
            assert!(basis.eval(EigenIndex::new(3, 2), z).unwrap().norm() < 1e-10);
            let w = Complex64::from_polar(0.63, 0.2 * i as f64);
            let a = basis.eval(EigenIndex::new(3, 2), w).unwrap().conj();
            let b = basis.eval(EigenIndex::new(-3, 2), w).unwrap();
            assert!((a - b).norm() < 1e-15);
        }
        assert!(matches!(basis.eval(EigenIndex::new(0, 1), c(1.1, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(basis.eval(EigenIndex::new(5, 1), c(0.1, 0.0)), Err(Error::MissingRoot { .. })));
    }

    #[test]
    fn gram_matrix_is_identity() {
        let basis = DiskBasis::new(4, 4).unwrap();
        let q = DiskQuadrature::new(48, 32);
        let idx: Vec<_> = basis.indices().collect();
        for a in &idx {
            for b in &idx {
                let g = disk_integrate(|z| basis.eval_unchecked(*a, z) * basis.eval_unchecked(*b, z).conj(), &q);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - want).norm() < 1e-8, "{a} {b}: {g}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let basis = DiskBasis::new(5, 5).unwrap();
        let h = 1e-6;
        for idx in [EigenIndex::new(0, 2), EigenIndex::new(1, 1), EigenIndex::new(-4, 3), EigenIndex::new(5, 5)] {
            for z in [c(0.3, -0.2), c(-0.7, 0.1), c(0.0, 0.9)] {
                let g = basis.gradient(idx, z).unwrap();
                let e = |p| basis.eval_unchecked(idx, p);
                let dx = (e(z + h) - e(z - h)) / (2.0 * h);
                let dy = (e(z + c(0.0, h)) - e(z - c(0.0, h))) / (2.0 * h);
                assert!((g[0] - dx).norm() < 1e-6 * (1.0 + dx.norm()), "{idx} {z}");
                assert!((g[1] - dy).norm() < 1e-6 * (1.0 + dy.norm()), "{idx} {z}");
            }
        }
        let g = basis.gradient(EigenIndex::new(1, 1), c(0.0, 0.0)).unwrap();
        let d = basis.radial_derivative(1, 1, 0.0);
        assert!((g[0] - d).norm() < 1e-14 && (g[1] - c(0.0, d)).norm() < 1e-14);
    }

    #[test]
    fn discrete_laplacian_eigenvalue() {
        let basis = DiskBasis::new(3, 3).unwrap();
        let idx = EigenIndex::new(2, 3);
        let j = basis.root(idx).unwrap();
        let z = c(0.31, 0.27);
        let e = |p| basis.eval_unchecked(idx, p);
        let err = |h: f64| {
            let lap = (e(z + h) + e(z - h) + e(z + c(0.0, h)) + e(z - c(0.0, h)) - e(z) * 4.0) / (h * h);
            (lap + e(z) * (j * j)).norm() / (j * j * e(z).norm())
        };
        let (e1, e2) = (err(4e-3), err(2e-3));
        assert!(e1 < 1e-3);
        // Second-order stencil: halving h divides the error by about four.
        assert!((e1 / e2 - 4.0).abs() < 0.5, "{e1} {e2}");
    }

    #[test]
    fn green_closed_form() {
        let g = green_dirichlet_closed(c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((g - 0.5f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!((g + 0.110_32).abs() < 1e-5);
        let (z, w) = (c(0.2, -0.4), c(-0.5, 0.1));
        assert_eq!(green_dirichlet_closed(z, w).unwrap(), green_dirichlet_closed(w, z).unwrap());
        for i in 0..16 {
            let z = Complex64::from_polar(0.999, 0.4 * i as f64);
            assert!(green_dirichlet_closed(z, c(0.3, 0.0)).unwrap().abs() < 0.01);
        }
        assert!(matches!(green_dirichlet_closed(w, w), Err(Error::Singularity(_))));
        assert!(green_dirichlet_closed(c(1.0, 0.0), w).is_err());
    }

    #[test]
    fn green_series_converges_to_closed_form() {
        let basis = DiskBasis::new(60, 60).unwrap();
        let (z, w) = (c(0.0, 0.0), c(0.5, 0.0));
        let exact = green_dirichlet_closed(z, w).unwrap();
        let errors: Vec<f64> = [20, 30, 40, 50, 60]
            .iter()
            .map(|&k| (green_dirichlet_partial_sum(z, w, &basis, k, k).unwrap().re - exact).abs())
            .collect();
        assert!(errors.windows(2).all(|p| p[1] < p[0]), "{errors:?}");
        assert!(errors[4] < 2e-2);

        let (z, w) = (c(0.2, 0.0), Complex64::from_polar(0.2, PI / 3.0));
        let s = green_dirichlet_partial_sum(z, w, &basis, 60, 60).unwrap();
        assert!((s.re - green_dirichlet_closed(z, w).unwrap()).abs() < 2e-2);
        assert!(s.im.abs() < 1e-12);
        assert!((green_dirichlet_series(z, w, &basis).unwrap() - s.re).abs() < 1e-15);
    }

    #[test]
    fn sobolev_norm_examples() {
        let table = specfun::build_root_table(2, 2).unwrap();
        let mut v = CoeffVector::new();
        v.set(EigenIndex::new(0, 1), c(1.0, 0.0)).unwrap();
        let j01 = table.root(0, 1).unwrap();
        assert!((sobolev_norm_sq(&v, -1.0, &table).unwrap() - j01.powi(-2)).abs() < 1e-15);
        assert!((sobolev_norm_sq(&v, -1.0, &table).unwrap() - 0.172_91).abs() < 1e-5);
        assert_eq!(sobolev_norm(&CoeffVector::new(), 1.5, &table).unwrap(), 0.0);
        v.set(EigenIndex::new(-2, 2), c(0.5, -1.0)).unwrap();
        let base = sobolev_norm_sq(&v, 0.7, &table).unwrap();
        let scaled = sobolev_norm_sq(&v.scaled(c(2.0, 1.0)), 0.7, &table).unwrap();
        assert!((scaled - 5.0 * base).abs() < 1e-12 * scaled);
        v.set(EigenIndex::new(3, 1), c(1.0, 0.0)).unwrap();
        assert!(matches!(sobolev_norm_sq(&v, 1.0, &table), Err(Error::MissingRoot { .. })));
    }

    #[test]
    fn pairing_examples() {
        let mut phi = CoeffVector::new();
        phi.set(EigenIndex::new(2, 3), c(1.0, 0.0)).unwrap();
        let mut f = CoeffVector::new();
        f.set(EigenIndex::new(-2, 3), c(1.0, 0.0)).unwrap();
        assert_eq!(pairing(&phi, &f), c(1.0, 0.0));
        let mut g = CoeffVector::new();
        g.set(EigenIndex::new(1, 1), c(1.0, 0.0)).unwrap();
        let mut h = CoeffVector::new();
        h.set(EigenIndex::new(1, 1), c(1.0, 0.0)).unwrap();
        assert_eq!(pairing(&g, &h), c(0.0, 0.0));
    }

    #[test]
    fn pairing_with_constant_is_the_disk_integral() {
        // f = (1 - |z|^2)^3 has ∫ f = π/4; its coefficients come from quadrature.
        let k_max = 40;
        let basis = DiskBasis::new(1, k_max).unwrap();
        let q = DiskQuadrature::new(200, 4);
        let f = |z: Complex64| (1.0 - z.norm_sqr()).powi(3);
        let mut one = CoeffVector::new_real_field();
        let mut coeffs = CoeffVector::new_real_field();
        for k in 1..=k_max {
            let idx = EigenIndex::new(0, k);
            let j = basis.root(idx).unwrap();
            one.set(idx, c(2.0 * PI.sqrt() / j, 0.0)).unwrap();
            let a = q.integrate(|z| basis.eval_unchecked(idx, z).conj() * f(z));
            coeffs.set(idx, a).unwrap();
        }
        let p = pairing(&one, &coeffs);
        assert!((p.re - PI / 4.0).abs() < 1e-7, "{p}");
        assert!(p.im.abs() < 1e-12);
    }

    #[test]
    fn real_field_vectors() {
        let mut v = CoeffVector::new_real_field();
        v.set(EigenIndex::new(2, 1), c(0.3, -0.4)).unwrap();
        assert_eq!(v.get(EigenIndex::new(-2, 1)), c(0.3, 0.4));
        assert!(v.set(EigenIndex::new(0, 1), c(1.0, 0.5)).is_err());
        v.set(EigenIndex::new(0, 1), c(1.0, 1e-14)).unwrap();
        assert_eq!(v.get(EigenIndex::new(0, 1)), c(1.0, 0.0));
        assert!(v.has_conjugate_symmetry(0.0));
        let mut w = CoeffVector::new_real_field();
        w.set(EigenIndex::new(-2, 1), c(0.1, 0.2)).unwrap();
        assert!(pairing(&v, &w).im.abs() < 1e-15);
    }

    #[test]
    fn json_records() {
        let mut v = CoeffVector::new_real_field();
        v.set(EigenIndex::new(1, 2), c(0.5, 0.25)).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(
            text,
            r#"[{"n":-1,"k":2,"re":0.5,"im":-0.25},{"n":1,"k":2,"re":0.5,"im":0.25}]"#
        );
        let back: CoeffVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        let lone: CoeffVector = serde_json::from_str(r#"[{"n":1,"k":2,"re":0.5,"im":0.25}]"#).unwrap();
        assert!(!lone.is_real_field());
        assert!(serde_json::from_str::<CoeffVector>(r#"[{"n":1,"k":0,"re":0.5,"im":0.25}]"#).is_err());
    }

    #[test]
    fn sup_norm_ratios_are_bounded() {
        let basis = DiskBasis::new(8, 8).unwrap();
        let grid = SupGrid { radial: 128, angular: 4 };
        let mut c_value: f64 = 0.0;
        let mut c_grad: f64 = 0.0;
        for idx in basis.indices().filter(|i| i.n >= 0) {
            let j = basis.root(idx).unwrap();
            let s = eigenfunction_sup_norms(&basis, idx, grid).unwrap();
            c_value = c_value.max(s.value / j);
            c_grad = c_grad.max(s.gradient / j.powi(3));
        }
        assert!(c_value.is_finite() && c_value < 1.0, "{c_value}");
        assert!(c_grad.is_finite() && c_grad < 1.0, "{c_grad}");
    }

    fn arb_vector() -> impl Strategy<Value = CoeffVector> {
        proptest::collection::vec((-3i32..=3, 1u32..=3, -2.0f64..2.0, -2.0f64..2.0), 0..8).prop_map(|entries| {
            let mut v = CoeffVector::new();
            for (n, k, re, im) in entries {
                v.set(EigenIndex::new(n, k), c(re, im)).unwrap();
            }
            v
        })
    }

    proptest! {
        #[test]
        fn pairing_ignores_zero_padding(phi in arb_vector(), f in arb_vector(), n in -5i32..=5, k in 1u32..=5) {
            let base = pairing(&phi, &f);
            let mut padded = f.clone();
            if padded.get(EigenIndex::new(n, k)) == c(0.0, 0.0) {
                padded.set(EigenIndex::new(n, k), c(0.0, 0.0)).unwrap();
            }
            prop_assert!((pairing(&phi, &padded) - base).norm() < 1e-14);
            prop_assert!((pairing(&f, &phi) - base).norm() < 1e-12);
        }

        #[test]
        fn coeff_json_round_trip(v in arb_vector()) {
            let text = serde_json::to_string(&v).unwrap();
            let back: CoeffVector = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(Vec::<CoeffRecord>::from(back), Vec::<CoeffRecord>::from(v));
        }
    }
}
