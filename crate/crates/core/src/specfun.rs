//! Bessel functions of the first kind `J_n` of non-negative integer order and
//! their positive zeros `j_{n,k}`.
//!
//! Evaluation switches between three regimes:
//!
//! * the power series when `x^2 < 4 (n + 1)`, where every term is smaller
//!   than the previous one and there is no cancellation;
//! * Hankel's asymptotic expansion once `x >= max(400, n^2)`;
//! * Miller's backward recurrence, normalised with
//!   `J_0 + 2 (J_2 + J_4 + ...) = 1`, everywhere in between.
//!
//! Zeros are bracketed by sign changes (or by interlacing with the previous
//! order when a whole table is built) and polished by Newton steps that fall
//! back to bisection whenever an iterate leaves its bracket.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const ASYMPTOTIC_MIN_X: f64 = 400.0;
const RESCALE_AT: f64 = 1e250;

/// `J_n(x)` for `n >= 0` and `x >= 0`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    let n = check_order(n)?;
    check_argument(x)?;
    Ok(jn(n, x))
}

/// `J_n'(x)` for `n >= 0` and `x >= 0`.
pub fn bessel_j_prime(n: i32, x: f64) -> Result<f64> {
    let n = check_order(n)?;
    check_argument(x)?;
    Ok(jn_prime(n, x))
}

/// The `k`-th positive zero of `J_n`.
pub fn bessel_root(n: i32, k: u32) -> Result<f64> {
    let n = check_order(n)?;
    if k == 0 {
        return Err(Error::Domain("root index k must be at least 1".into()));
    }
    if mcmahon_reliable(n, k) {
        let guess = mcmahon(n, k);
        if let Some(root) = refine_root(n, guess - 0.5, guess + 0.5, Some(guess)) {
            return Ok(root);
        }
    }
    let row = bessel_roots(n as i32, k as usize)?;
    Ok(row[k as usize - 1])
}

/// The first `count` positive zeros of `J_n`, in increasing order.
///
/// Zeros are found one after the other: each is bracketed either around
/// McMahon's asymptotic guess or by stepping forward from the previous zero.
/// Consecutive zeros are more than `3.1` apart for every order, so a unit
/// step never skips one.
pub fn bessel_roots(n: i32, count: usize) -> Result<Vec<f64>> {
    let n = check_order(n)?;
    let mut roots = Vec::with_capacity(count);
    // J_n has no zero in (0, n].
    let mut prev = n as f64;
    for k in 1..=count as u32 {
        let root = next_root(n, k, prev, k == 1)?;
        roots.push(root);
        prev = root;
    }
    Ok(roots)
}

fn next_root(n: u32, k: u32, prev: f64, first: bool) -> Result<f64> {
    if !first && mcmahon_reliable(n, k) {
        let guess = mcmahon(n, k);
        if let Some(root) = polish_far_root(n, guess).filter(|r| *r > prev + 2.0) {
            return Ok(root);
        }
        let (lo, hi) = (guess - 0.5, guess + 0.5);
        if lo > prev + 2.0 && hi < prev + 5.5 {
            if let Some(root) = refine_root(n, lo, hi, Some(guess)) {
                return Ok(root);
            }
        }
    }
    let mut lo = if first { prev } else { prev + 1.0 };
    let mut f_lo = jn(n, lo);
    for _ in 0..64 {
        let hi = lo + 1.0;
        let f_hi = jn(n, hi);
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_lo.signum() != f_hi.signum() {
            let guess = mcmahon(n, k);
            return refine_root(n, lo, hi, Some(guess)).ok_or_else(|| Error::RootNotFound {
                n,
                k,
                reason: format!("Newton/bisection failed inside [{lo}, {hi}]"),
            });
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::RootNotFound {
        n,
        k,
        reason: format!("no sign change within 64 steps after {prev}"),
    })
}

/// McMahon's large-zero expansion with `beta = (k + n/2 - 1/4) pi`.
pub fn mcmahon(n: u32, k: u32) -> f64 {
    let beta = (k as f64 + 0.5 * n as f64 - 0.25) * PI;
    let mu = 4.0 * (n as f64) * (n as f64);
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
}

fn mcmahon_reliable(n: u32, k: u32) -> bool {
    let beta = (k as f64 + 0.5 * n as f64 - 0.25) * PI;
    let mu = 4.0 * (n as f64) * (n as f64);
    beta >= 40.0_f64.max(2.0 * mu)
}

/// Far out along a row McMahon's guess is already accurate to a few ulps, so
/// plain Newton converges in one or two steps; the bracketing of
/// [`refine_root`] is skipped. `None` sends the caller back to the safe path.
fn polish_far_root(n: u32, guess: f64) -> Option<f64> {
    let mu = 4.0 * (n as f64) * (n as f64);
    if guess < ASYMPTOTIC_MIN_X.max(8.0 * mu) {
        return None;
    }
    let mut x = guess;
    for _ in 0..4 {
        let (f, f_next) = jn_pair(n, x);
        let step = f / (n as f64 / x * f - f_next);
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            return ((x - guess).abs() < 0.25).then_some(x);
        }
    }
    None
}

/// Safeguarded Newton iteration inside a sign-change bracket `[a, b]`.
fn refine_root(n: u32, mut a: f64, mut b: f64, guess: Option<f64>) -> Option<f64> {
    let mut fa = jn(n, a);
    let fb = jn(n, b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut x = match guess {
        Some(g) if g > a && g < b => g,
        _ => 0.5 * (a + b),
    };
    for _ in 0..200 {
        let (f, f_next) = jn_pair(n, x);
        if f == 0.0 {
            return Some(x);
        }
        if f.signum() == fa.signum() {
            a = x;
            fa = f;
        } else {
            b = x;
        }
        let slope = n as f64 / x * f - f_next;
        let mut next = x - f / slope;
        if !next.is_finite() || next <= a || next >= b {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * x || b - a <= 4.0 * f64::EPSILON * b {
            return Some(next);
        }
        x = next;
    }
    None
}

fn check_order(n: i32) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Domain(format!("negative Bessel order {n}")))
}

fn check_argument(x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bessel argument must be finite and >= 0, got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Series,
    Recurrence,
    Asymptotic,
}

fn regime(n: u32, x: f64) -> Regime {
    let nf = n as f64;
    if x * x < 4.0 * (nf + 1.0) {
        Regime::Series
    } else if x >= ASYMPTOTIC_MIN_X && x >= nf * nf {
        Regime::Asymptotic
    } else {
        Regime::Recurrence
    }
}

/// Unchecked `J_n(x)`.
pub(crate) fn jn(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    match regime(n, x) {
        Regime::Series => series(n, x),
        Regime::Asymptotic => hankel(n, x),
        Regime::Recurrence => miller(n, n, x)[0],
    }
}

/// Unchecked `(J_n(x), J_{n+1}(x))`.
pub(crate) fn jn_pair(n: u32, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (if n == 0 { 1.0 } else { 0.0 }, 0.0);
    }
    match (regime(n, x), regime(n + 1, x)) {
        (Regime::Recurrence, _) | (_, Regime::Recurrence) => {
            let v = miller(n, n + 1, x);
            (v[0], v[1])
        }
        _ => (jn(n, x), jn(n + 1, x)),
    }
}

pub(crate) fn jn_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        return -jn(1, x);
    }
    if x == 0.0 {
        return if n == 1 { 0.5 } else { 0.0 };
    }
    let (below, above) = match regime(n, x) {
        Regime::Recurrence => {
            let v = miller(n - 1, n + 1, x);
            (v[0], v[2])
        }
        _ => (jn(n - 1, x), jn(n + 1, x)),
    };
    0.5 * (below - above)
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let first = (n as f64 * half.ln() - ln_factorial(n)).exp();
    if first == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200u32 {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    first * sum
}

/// Hankel's expansion `J_n(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi)`,
/// `chi = x - (2n + 1) pi / 4`.
fn hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    for m in 1..400u32 {
        let odd = (2 * m - 1) as f64;
        let next = term * (mu - odd * odd) / (m as f64 * eight_x);
        if next.abs() > term.abs() && m > 2 {
            break;
        }
        term = next;
        match m % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    // (2n + 1) pi / 4 reduced modulo 2 pi.
    let (cos_phi, sin_phi) = match (2 * n + 1) % 8 {
        1 => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        3 => (-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        5 => (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        _ => (FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    };
    let (sin_x, cos_x) = x.sin_cos();
    let cos_chi = cos_x * cos_phi + sin_x * sin_phi;
    let sin_chi = sin_x * cos_phi - cos_x * sin_phi;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Miller's backward recurrence, returning `J_lo(x), ..., J_hi(x)`.
fn miller(lo: u32, hi: u32, x: f64) -> Vec<f64> {
    let top = (hi as f64).max(x);
    let mut start = (top + 12.0 * top.cbrt() + 20.0).ceil() as u32;
    start += start & 1;
    let mut out = vec![0.0; (hi - lo + 1) as usize];
    let mut above = 0.0; // J_{m+1}
    let mut current = 1.0; // J_m up to scale
    let mut norm = 0.0;
    let two_over_x = 2.0 / x;
    for m in (1..=start).rev() {
        if m % 2 == 0 {
            norm += 2.0 * current;
        }
        if (lo..=hi).contains(&m) {
            out[(m - lo) as usize] = current;
        }
        let below = m as f64 * two_over_x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            current *= s;
            above *= s;
            norm *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    norm += current;
    if lo == 0 {
        out[0] = current;
    }
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// Dense table of zeros `j_{n,k}` for `0 <= n <= n_max`, `1 <= k <= k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootTable {
    n_max: u32,
    k_max: u32,
    roots: Vec<f64>,
}

/// Builds the zero table by interlacing: `j_{n-1,k} < j_{n,k} < j_{n-1,k+1}`,
/// so every zero of order `n` is isolated by two zeros of order `n - 1`.
pub fn build_root_table(n_max: u32, k_max: u32) -> Result<RootTable> {
    if n_max < 1 || k_max < 1 {
        return Err(Error::InvalidArgument(format!(
            "root table needs n_max, k_max >= 1 (got {n_max}, {k_max})"
        )));
    }
    let width = (k_max + n_max) as usize;
    let mut previous = bessel_roots(0, width)?;
    let mut roots = Vec::with_capacity(((n_max + 1) * k_max) as usize);
    roots.extend_from_slice(&previous[..k_max as usize]);
    for n in 1..=n_max {
        let len = width - n as usize;
        let mut row = Vec::with_capacity(len);
        for k in 0..len {
            let (a, b) = (previous[k], previous[k + 1]);
            let root = refine_root(n, a, b, Some(mcmahon(n, k as u32 + 1).clamp(a, b)))
                .ok_or_else(|| Error::RootNotFound {
                    n,
                    k: k as u32 + 1,
                    reason: format!("interlacing bracket [{a}, {b}] has no sign change"),
                })?;
            row.push(root);
        }
        roots.extend_from_slice(&row[..k_max as usize]);
        previous = row;
    }
    Ok(RootTable { n_max, k_max, roots })
}

impl RootTable {
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    /// `j_{|n|,k}`, if the table covers it.
    pub fn get(&self, n: i32, k: u32) -> Option<f64> {
        let m = n.unsigned_abs();
        if m > self.n_max || k == 0 || k > self.k_max {
            return None;
        }
        Some(self.roots[(m * self.k_max + k - 1) as usize])
    }

    pub fn root(&self, n: i32, k: u32) -> Result<f64> {
        self.get(n, k).ok_or(Error::MissingRoot {
            n,
            k,
            n_max: self.n_max,
            k_max: self.k_max,
        })
    }

    /// Zeros of `J_n` for `k = 1..=k_max`.
    pub fn row(&self, n: u32) -> &[f64] {
        let start = (n * self.k_max) as usize;
        &self.roots[start..start + self.k_max as usize]
    }

    /// `(n, k, j_{n,k})` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.roots.iter().enumerate().map(move |(i, &v)| {
            let i = i as u32;
            (i / self.k_max, i % self.k_max + 1, v)
        })
    }

    /// Plain-text cache format: one `n k value` line per entry, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.roots.len() * 32);
        for (n, k, v) in self.iter() {
            let _ = writeln!(out, "{n} {k} {v:.16e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("root cache line {}: {line:?}", line_no + 1));
            let mut parts = line.split_whitespace();
            let n: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let k: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let v: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if k == 0 || parts.next().is_some() {
                return Err(bad());
            }
            entries.push((n, k, v));
        }
        let n_max = entries.iter().map(|e| e.0).max().ok_or_else(|| Error::Parse("empty root cache".into()))?;
        let k_max = entries.iter().map(|e| e.1).max().unwrap_or(0);
        let mut roots = vec![f64::NAN; ((n_max + 1) * k_max) as usize];
        for (n, k, v) in entries {
            roots[(n * k_max + k - 1) as usize] = v;
        }
        if roots.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse(format!("root cache is not a dense {}x{k_max} table", n_max + 1)));
        }
        Ok(RootTable { n_max, k_max, roots })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an independent 40-digit evaluation.
    const J_REFERENCE: &[(u32, f64, f64)] = &[
        (0, 0.5, 0.938_469_807_240_812_9),
        (0, 12.0, 0.047_689_310_796_833_54),
        (1, 7.25, 0.068_581_700_653_131_74),
        (2, 0.001, 1.249_999_895_833_336_6e-7),
        (3, 35.5, 0.037_116_705_230_359_36),
        (5, 3000.25, 0.009_953_275_645_118_77),
        (0, 1000.5, 0.019_486_559_987_130_14),
        (30, 45.7, -0.025_167_423_306_180_06),
        (64, 300.0, -0.010_997_809_965_596_59),
        (100, 20.0, 3.961_755_094_336_252e-59),
        (12, 250.0, -0.012_709_978_683_778_975),
        (16, 2.0e5, 0.001_169_062_405_897_401_2),
        (1, 987_654.321, -0.000_284_953_237_917_759_7),
    ];

    #[allow(clippy::excessive_precision)]
    const ROOT_REFERENCE: &[(u32, u32, f64)] = &[
        (0, 1, 2.404_825_557_695_772_8),
        (0, 2, 5.520_078_110_286_311),
        (1, 1, 3.831_705_970_207_512_3),
        (5, 3, 15.700_174_079_711_671),
        (16, 16, 72.850_543_506_754_24),
        (64, 64, 293.809_502_855_317_5),
        (0, 1000, 3_140.807_295_225_078_6),
        (3, 100_000, 314_163.192_335_870_4),
    ];

    /// Power series summed term by term; adequate for small arguments.
    fn series_oracle(n: u32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        let mut sum = term;
        for m in 1..80 {
            term *= -0.25 * x * x / (m as f64 * (m + n) as f64);
            sum += term;
        }
        sum
    }

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_prime(0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_prime(1, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_j(-1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j_prime(2, f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(bessel_root(0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn first_zero_of_j0_matches_series_bisection() {
        let oracle = bisect(|x| series_oracle(0, x), 2.0, 3.0);
        assert!((oracle - 2.404_825_557_695_773).abs() < 1e-14);
        assert!(bessel_j(0, 2.404_825_557_695_773).unwrap().abs() < 1e-12);
        assert!((bessel_root(0, 1).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn matches_reference_values() {
        for &(n, x, want) in J_REFERENCE {
            let got = bessel_j(n as i32, x).unwrap();
            let scale = want.abs().max(1e-3 * (2.0 / (PI * x)).sqrt().min(1.0));
            assert!(
                ((got - want) / scale).abs() < 1e-12,
                "J_{n}({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn roots_match_reference_values() {
        for &(n, k, want) in ROOT_REFERENCE {
            let got = bessel_root(n as i32, k).unwrap();
            assert!(((got - want) / want).abs() < 2e-15, "j_({n},{k}) = {got}, want {want}");
            assert!(jn(n, got).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_identities() {
        let j01 = bessel_root(0, 1).unwrap();
        let d = bessel_j_prime(0, j01).unwrap();
        assert!((d + bessel_j(1, j01).unwrap()).abs() < 1e-12);
        for i in 0..200 {
            let x = 0.25 * i as f64;
            assert!((jn_prime(0, x) + jn(1, x)).abs() < 1e-12);
        }
        // d/dx (x^{n+1} J_{n+1}(x)) = x^{n+1} J_n(x)
        let h = 1e-6;
        for n in 0..8u32 {
            for i in 1..40 {
                let x = 0.37 * i as f64;
                let g = |t: f64| t.powi(n as i32 + 1) * jn(n + 1, t);
                let fd = (g(x + h) - g(x - h)) / (2.0 * h);
                let exact = x.powi(n as i32 + 1) * jn(n, x);
                assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn regimes_agree_where_they_overlap() {
        // Asymptotic expansion against the recurrence just above its threshold.
        for n in [0u32, 1, 5, 12, 20] {
            for i in 0..50 {
                let x = ASYMPTOTIC_MIN_X.max((n * n) as f64) + 1.37 * i as f64;
                let a = hankel(n, x);
                let m = miller(n, n, x)[0];
                assert!((a - m).abs() < 1e-14, "n={n} x={x}: {a} vs {m}");
            }
        }
        // Series against the recurrence near the series threshold.
        for n in 0..30u32 {
            let x = 2.0 * ((n + 1) as f64).sqrt() * 0.999;
            let s = series(n, x);
            let m = miller(n, n, x)[0];
            assert!(((s - m) / s).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn upward_recurrence_agrees_in_its_stable_range() {
        for i in 1..=500 {
            let x = 0.1 * i as f64;
            let mut prev = jn(0, x);
            let mut cur = jn(1, x);
            for n in 1..32u32 {
                if (n as f64) < x {
                    assert!((cur - jn(n, x)).abs() < 1e-10, "n={n} x={x}");
                }
                let next = 2.0 * n as f64 / x * cur - prev;
                prev = cur;
                cur = next;
            }
        }
    }

    #[test]
    fn interlacing_against_grid_sign_changes() {
        let zeros = |n: u32| {
            let mut out = Vec::new();
            let mut prev = series_oracle(n, 1e-3);
            for i in 1..=8000 {
                let x = 1e-3 * i as f64;
                let v = series_oracle(n, x);
                if v.signum() != prev.signum() {
                    out.push(x);
                }
                prev = v;
            }
            out
        };
        let z0 = zeros(0);
        let z1 = zeros(1);
        assert!(z0[0] < z1[0] && z1[0] < z0[1]);
        let (a, b, c) = (bessel_root(0, 1).unwrap(), bessel_root(1, 1).unwrap(), bessel_root(0, 2).unwrap());
        assert!(a < b && b < c);
        assert!((a - z0[0]).abs() < 1e-3 && (b - z1[0]).abs() < 1e-3 && (c - z0[1]).abs() < 1e-3);
    }

    #[test]
    fn mcmahon_lower_bound() {
        for n in 0..=64u32 {
            let row = bessel_roots(n as i32, 64).unwrap();
            for (i, &j) in row.iter().enumerate() {
                let k = (i + 1) as f64;
                let bound = (n * n) as f64 + ((k - 0.25) * PI).powi(2);
                assert!(j * j > bound, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn small_table_shape_and_determinism() {
        let t = build_root_table(1, 1).unwrap();
        assert_eq!(t.iter().count(), 2);
        assert_eq!(t.get(0, 1), Some(bessel_root(0, 1).unwrap()));
        assert!((t.get(1, 1).unwrap() - 3.831_705_970_207_512).abs() < 1e-12);
        assert_eq!(t.get(-1, 1), t.get(1, 1));
        assert!(t.get(2, 1).is_none());
        assert!(matches!(t.root(0, 2), Err(Error::MissingRoot { .. })));
        assert!(build_root_table(0, 4).is_err());

        let a = build_root_table(8, 8).unwrap();
        let b = build_root_table(8, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn table_invariants() {
        let t = build_root_table(24, 24).unwrap();
        for (n, k, j) in t.iter() {
            assert!(jn(n, j).abs() < 1e-12);
            let bound = (n * n) as f64 + ((k as f64 - 0.25) * PI).powi(2);
            assert!(j * j > bound);
            if k < t.k_max() {
                assert!(j < t.get(n as i32, k + 1).unwrap());
            }
            if n < t.n_max() {
                assert!(j < t.get(n as i32 + 1, k).unwrap());
            }
            let direct = bessel_root(n as i32, k).unwrap();
            assert!((direct - j).abs() < 1e-12 * j);
        }
    }

    #[test]
    fn cache_round_trip() {
        let t = build_root_table(3, 5).unwrap();
        let text = t.to_text();
        assert_eq!(text.lines().count(), 20);
        let first = text.lines().next().unwrap();
        let mantissa = first.split_whitespace().nth(2).unwrap().split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{first}");
        let back = RootTable::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert!(RootTable::from_text("0 1 2.4\n1 2 3.0\n").is_err());
        assert!(RootTable::from_text("0 x 1.0").is_err());
    }
}
