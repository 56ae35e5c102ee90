//! Gauss–Legendre rules and polar product quadrature on disks.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_on(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(&x, &w)| (mid + half * x, half * w)).collect()
}

/// A radial node of a polar rule; `weight` already contains the Jacobian `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialNode {
    pub r: f64,
    pub weight: f64,
}

/// Polar product rule on a disk `|z| <= R`: Gauss–Legendre in `r` (piecewise
/// between break points) tensored with a uniform angular grid.
///
/// The angular grid integrates `e^{i m theta}` exactly for `|m| < angular`,
/// so orthogonality between different harmonics holds to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskQuadrature {
    radial: Vec<RadialNode>,
    angular: usize,
    radius: f64,
}

impl DiskQuadrature {
    /// Rule on the unit disk.
    pub fn new(radial_order: usize, angular_order: usize) -> Self {
        Self::with_breaks(&[0.0, 1.0], radial_order, angular_order)
    }

    /// Rule on `|z| <= breaks.last()`, with an independent Gauss–Legendre
    /// panel of `radial_order` nodes between consecutive break points.
    pub fn with_breaks(breaks: &[f64], radial_order: usize, angular_order: usize) -> Self {
        assert!(breaks.len() >= 2 && angular_order >= 1);
        let mut radial = Vec::with_capacity(radial_order * (breaks.len() - 1));
        for pair in breaks.windows(2) {
            for (r, w) in gauss_legendre_on(radial_order, pair[0], pair[1]) {
                radial.push(RadialNode { r, weight: w * r });
            }
        }
        DiskQuadrature {
            radial,
            angular: angular_order,
            radius: *breaks.last().unwrap(),
        }
    }

    pub fn radial(&self) -> &[RadialNode] {
        &self.radial
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.angular as f64
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.angular
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All nodes with their full weights.
    pub fn nodes(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        let dtheta = 2.0 * PI / self.angular as f64;
        self.radial.iter().flat_map(move |node| {
            (0..self.angular).map(move |j| (Complex64::from_polar(node.r, self.angle(j)), node.weight * dtheta))
        })
    }

    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes().map(|(z, w)| f(z) * w).sum()
    }

    pub fn integrate_real<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        self.nodes().map(|(z, w)| f(z) * w).sum()
    }
}

/// `∫_{|z|<1} f(z) d²z` with the given rule.
pub fn disk_integrate<F: Fn(Complex64) -> Complex64>(f: F, quad: &DiskQuadrature) -> Complex64 {
    quad.integrate(f)
}

/// `∫_{|z|<1} f(z) d²z` in polar coordinates centred at an interior point
/// `w`, for integrands with an integrable (e.g. logarithmic) singularity at
/// `w`. Along each ray the substitution `rho = rho_max t^2` smooths the
/// `rho log rho` behaviour at the centre.
pub fn integrate_disk_centered<F>(w: Complex64, f: F, radial_order: usize, angular_order: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    assert!(w.norm() < 1.0, "centre must lie inside the unit disk");
    let rule = gauss_legendre_on(radial_order, 0.0, 1.0);
    let dpsi = 2.0 * PI / angular_order as f64;
    let w2 = w.norm_sqr();
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..angular_order {
        let dir = Complex64::from_polar(1.0, dpsi * j as f64);
        let b = (w.conj() * dir).re;
        let rho_max = -b + (b * b + 1.0 - w2).sqrt();
        let mut ray = Complex64::new(0.0, 0.0);
        for &(t, wt) in &rule {
            let rho = rho_max * t * t;
            let jac = 2.0 * rho_max * t * rho;
            ray += f(w + dir * rho) * (wt * jac);
        }
        total += ray * dpsi;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for order in [1usize, 2, 5, 16, 64, 200] {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for p in 0..(2 * order).min(40) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let want = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "order {order}, p {p}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn unit_disk_area_and_moments() {
        let q = DiskQuadrature::new(24, 16);
        let area = disk_integrate(|_| Complex64::new(1.0, 0.0), &q);
        assert!((area.re - PI).abs() < 1e-12 && area.im.abs() < 1e-12);
        for m in 0..12 {
            let v = q.integrate_real(|z| z.norm_sqr().powi(m));
            assert!((v - PI / (m as f64 + 1.0)).abs() < 1e-12, "m = {m}");
        }
        // Harmonics below the grid size integrate to zero.
        for m in 1..16 {
            let v = q.integrate(|z| Complex64::from_polar(1.0, m as f64 * z.arg()));
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn broken_rule_on_larger_disk() {
        let q = DiskQuadrature::with_breaks(&[0.0, 1.0, 3.0], 20, 8);
        assert_eq!(q.radius(), 3.0);
        assert_eq!(q.len(), 40 * 8);
        assert!((q.integrate_real(|_| 1.0) - 9.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn centered_rule_handles_log_singularity() {
        // ∫ log|z - w| d²z over the unit disk equals pi (|w|^2 - 1) / 2.
        for w in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(-0.3, 0.6)] {
            let v = integrate_disk_centered(w, |z| Complex64::new((z - w).norm().ln(), 0.0), 48, 96);
            let want = PI * (w.norm_sqr() - 1.0) / 2.0;
            assert!((v.re - want).abs() < 1e-9, "w = {w}: {} vs {want}", v.re);
        }
    }
}
