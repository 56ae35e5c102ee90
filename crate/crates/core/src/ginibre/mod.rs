//! The Ginibre ensemble: `G_N = Z / √N` with i.i.d. standard complex Gaussian
//! entries (`E|Z|² = 1`, real and imaginary parts independent `N(0, 1/2)`),
//! its eigenvalues, and the exact determinantal formulas for its one- and
//! two-point structure.

mod density;
mod eigen;

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use density::{
    expected_linear_statistic, gaussian_moment, kernel_abs_sq, ln_gaussian_moment, one_point_density,
    pair_variance, pair_variance_harmonic, PlaneQuadrature,
};
pub use eigen::{eigenvalues, EigenBackend, HessenbergQr};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        CMatrix { n, data: rows.concat() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for i in col + 1..n {
                let factor = a[i * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[i * n + j] -= factor * v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Standard complex Gaussian: `E Z = 0`, `E|Z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

/// `G_N` filled row by row from `ChaCha20(seed)`.
pub fn sample_matrix(n: usize, seed: u64) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix size N must be positive".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let data = (0..n * n).map(|_| complex_gaussian(&mut rng) * scale).collect();
    Ok(CMatrix { n, data })
}

/// Seed of draw number `index` under `master`: the first output of
/// `ChaCha20(master)` on stream `index`. Independent of scheduling.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// The eigenvalues of one Ginibre draw and how to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SpectrumRecord", try_from = "SpectrumRecord")]
pub struct SpectrumSample {
    pub matrix_size: usize,
    pub seed: u64,
    pub eigenvalues: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRecord {
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
    eigenvalues: Vec<[f64; 2]>,
}

impl From<SpectrumSample> for SpectrumRecord {
    fn from(s: SpectrumSample) -> Self {
        SpectrumRecord {
            n: s.matrix_size,
            seed: s.seed,
            eigenvalues: s.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<SpectrumRecord> for SpectrumSample {
    type Error = Error;

    fn try_from(r: SpectrumRecord) -> Result<Self> {
        if r.eigenvalues.len() != r.n {
            return Err(Error::Parse(format!("expected {} eigenvalues, found {}", r.n, r.eigenvalues.len())));
        }
        Ok(SpectrumSample {
            matrix_size: r.n,
            seed: r.seed,
            eigenvalues: r.eigenvalues.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        })
    }
}

impl SpectrumSample {
    /// Samples `G_N` from `seed` and diagonalises it with `backend`.
    pub fn draw(n: usize, seed: u64, backend: &dyn EigenBackend) -> Result<Self> {
        let a = sample_matrix(n, seed)?;
        let eigenvalues = backend.eigenvalues(&a)?;
        Ok(SpectrumSample { matrix_size: n, seed, eigenvalues })
    }
}

/// `draws` spectra at size `n`; draw `i` uses `derive_seed(master, i)`. The
/// output order is the draw order whatever the thread count.
pub fn sample_spectra(n: usize, master: u64, draws: usize, backend: &dyn EigenBackend) -> Result<Vec<SpectrumSample>> {
    (0..draws as u64)
        .into_par_iter()
        .map(|i| SpectrumSample::draw(n, derive_seed(master, i), backend))
        .collect()
}

/// `ln Z_N = Σ_{k<=N} ln k! - N(N-1)/2 · ln N`.
pub fn ln_ginibre_normalization(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix size N must be positive".into()));
    }
    let nf = n as f64;
    let ln_fact_sum: f64 = (1..=n).map(|k| (2..=k).map(|i| (i as f64).ln()).sum::<f64>()).sum();
    Ok(ln_fact_sum - 0.5 * nf * (nf - 1.0) * nf.ln())
}

/// `Z_N = Π_{k<=N} k! / N^{N(N-1)/2}`; overflows to infinity for large `N`,
/// use [`ln_ginibre_normalization`] there.
pub fn ginibre_normalization(n: usize) -> Result<f64> {
    ln_ginibre_normalization(n).map(f64::exp)
}
