//! Eigenvalues of a general complex matrix: balancing, Householder reduction
//! to upper Hessenberg form, then implicitly shifted single-shift QR sweeps
//! with Givens rotations and deflation.

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

/// Something that can compute all eigenvalues of a square complex matrix.
pub trait EigenBackend: Sync {
    fn eigenvalues(&self, a: &CMatrix) -> Result<Vec<Complex64>>;
}

/// The in-repo solver. `sweeps_per_dim` bounds the total number of QR sweeps
/// by `sweeps_per_dim · N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HessenbergQr {
    pub sweeps_per_dim: usize,
}

impl Default for HessenbergQr {
    fn default() -> Self {
        HessenbergQr { sweeps_per_dim: 40 }
    }
}

impl EigenBackend for HessenbergQr {
    fn eigenvalues(&self, a: &CMatrix) -> Result<Vec<Complex64>> {
        let n = a.size();
        let mut h = a.clone();
        balance(&mut h);
        hessenberg(&mut h);
        hessenberg_qr(&mut h, self.sweeps_per_dim * n.max(1))
    }
}

/// Eigenvalues with the default backend.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    HessenbergQr::default().eigenvalues(a)
}

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity by powers of two that equalises row and column norms.
fn balance(a: &mut CMatrix) {
    let n = a.size();
    const RADIX: f64 = 2.0;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                c += l1(a[(j, i)]);
                r += l1(a[(i, j)]);
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place unitary reduction to upper Hessenberg form.
fn hessenberg(a: &mut CMatrix) {
    let n = a.size();
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut s_row = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0 == Complex64::new(0.0, 0.0) { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for x in &mut v[k + 1..n] {
            *x /= vnorm;
        }
        // A <- (I - 2 v v*) A, row by row for contiguous access.
        s_row[k..n].iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for i in k + 1..n {
            let vi = v[i].conj();
            for j in k..n {
                s_row[j] += vi * a[(i, j)];
            }
        }
        for i in k + 1..n {
            let vi = v[i] * 2.0;
            for j in k..n {
                a[(i, j)] -= vi * s_row[j];
            }
        }
        // A <- A (I - 2 v v*)
        for i in 0..n {
            let s: Complex64 = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum();
            for j in k + 1..n {
                a[(i, j)] -= s * v[j].conj() * 2.0;
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Rotation `[c s; -s̄ c]` mapping `(x, y)` to `(·, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let (ax, ay) = (x.norm(), y.norm());
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let (l1, l2) = (d + half + disc, d + half - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(h: &mut CMatrix, budget: usize) -> Result<Vec<Complex64>> {
    let n = h.size();
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| l1(h[(i, j)]))
        .fold(0.0, f64::max);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    let mut sweeps = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // Find the top of the active unreduced block.
        let mut l = hi;
        while l > 0 {
            let mut tst = l1(h[(l - 1, l - 1)]) + l1(h[(l, l)]);
            if tst == 0.0 {
                tst = scale;
            }
            if l1(h[(l, l - 1)]) <= eps * tst {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        sweeps += 1;
        since_deflation += 1;
        if sweeps > budget {
            return Err(Error::NoConvergence { budget });
        }
        let d = h[(hi, hi)];
        let mu = if since_deflation.is_multiple_of(10) {
            let below = if hi >= 2 { h[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            d + h[(hi, hi - 1)].re.abs() + below
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], d)
        };
        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            let (c, s) = givens(x, y);
            let first = if k > l { k - 1 } else { l };
            for j in first..=hi {
                let (a, b) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
            for i in l..=(k + 2).min(hi) {
                let (a, b) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn diagonal_and_companion() {
        let a = CMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
        let e = sorted(eigenvalues(&a).unwrap());
        let want = [c(-3.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)];
        for (g, w) in e.iter().zip(&want) {
            assert!((g - w).norm() < 1e-14);
        }
        let comp = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let e = sorted(eigenvalues(&comp).unwrap());
        assert!((e[0] + 1.0).norm() < 1e-14 && (e[1] - 1.0).norm() < 1e-14);
        assert!(eigenvalues(&CMatrix::zeros(0)).unwrap().is_empty());
        assert_eq!(eigenvalues(&CMatrix::diagonal(&[c(2.0, -1.0)])).unwrap(), vec![c(2.0, -1.0)]);
    }

    #[test]
    fn jordan_block_and_nilpotent() {
        // Defective: a single Jordan block has one eigenvalue of multiplicity 4.
        let mut a = CMatrix::zeros(4);
        for i in 0..4 {
            a[(i, i)] = c(0.5, 0.5);
            if i + 1 < 4 {
                a[(i, i + 1)] = c(1.0, 0.0);
            }
        }
        for e in eigenvalues(&a).unwrap() {
            assert!((e - c(0.5, 0.5)).norm() < 1e-3);
        }
        let mut shift = CMatrix::zeros(5);
        for i in 0..4 {
            shift[(i + 1, i)] = c(1.0, 0.0);
        }
        shift[(0, 4)] = c(1.0, 0.0);
        // Cyclic shift: the fifth roots of unity, a classic stall case for unshifted QR.
        let e = eigenvalues(&shift).unwrap();
        for z in &e {
            assert!((z.norm() - 1.0).abs() < 1e-12 && (z.powu(5) - 1.0).norm() < 1e-11);
        }
    }

    #[test]
    fn hessenberg_is_a_similarity() {
        let a = super::super::sample_matrix(7, 3).unwrap();
        let mut h = a.clone();
        hessenberg(&mut h);
        for i in 0..7usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], c(0.0, 0.0));
            }
        }
        assert!((h.trace() - a.trace()).norm() < 1e-12);
        let fro = |m: &CMatrix| (0..7).flat_map(|i| (0..7).map(move |j| (i, j))).map(|p| m[p].norm_sqr()).sum::<f64>();
        assert!((fro(&h) - fro(&a)).abs() < 1e-12);
    }
}
