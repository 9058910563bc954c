//! Gauss-Legendre rules and angular grids on the unit sphere.

use alloc::vec::Vec;

use crate::math::{cos, sin, sqrt, PI};
use crate::scatter::Vec3;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, exact for polynomials up to degree `2n − 1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
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
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Number of polar nodes used for integrands with phase bandwidth `extent`
/// (the largest `k·|rᵢ − rⱼ|` involved).
pub fn polar_order(extent: f64) -> usize {
    8 + 2 * crate::math::ceil(extent.max(0.0)) as usize
}

/// Directions and weights covering the full sphere; the weights sum to `4π`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    /// Product grid: Gauss-Legendre in `cos θ` times the trapezoid rule in `φ`,
    /// with polar axis `+z`.
    pub fn product(n_polar: usize, n_azimuth: usize) -> Self {
        let gl = GaussLegendre::new(n_polar);
        let mut directions = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        let dphi = 2.0 * PI / n_azimuth as f64;
        for (&ct, &w) in gl.nodes.iter().zip(&gl.weights) {
            let st = sqrt((1.0 - ct * ct).max(0.0));
            for j in 0..n_azimuth {
                let phi = dphi * j as f64;
                directions.push([st * cos(phi), st * sin(phi), ct]);
                weights.push(w * dphi);
            }
        }
        Self { directions, weights }
    }

    /// Grid resolving phases `e^{i k·(rᵢ − rⱼ)}` for pair separations up to `extent`.
    pub fn for_extent(extent: f64) -> Self {
        let n = polar_order(extent);
        Self::product(n, 2 * n)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(&Vec3) -> f64) -> f64 {
        self.directions.iter().zip(&self.weights).map(|(d, &w)| w * f(d)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in 1..30 {
            let gl = GaussLegendre::new(n);
            assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = gl.integrate(|x| libm::pow(x, deg as f64));
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn gauss_legendre_nodes_sorted_and_symmetric() {
        let gl = GaussLegendre::new(17);
        for w in gl.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..17 {
            assert!((gl.nodes[i] + gl.nodes[16 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn sphere_grid_weights_and_moments() {
        let g = SphereGrid::product(12, 24);
        assert!((g.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
        // ∫ x² dΩ = 4π/3
        let m = g.integrate(|d| d[0] * d[0]);
        assert!((m - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_grid_plane_wave_average_is_sinc() {
        let a = 7.3;
        let g = SphereGrid::for_extent(a);
        let dir = [0.3, -0.5, 0.81];
        let len = sqrt(dir.iter().map(|x| x * x).sum());
        let r = [a * dir[0] / len, a * dir[1] / len, a * dir[2] / len];
        let re = g.integrate(|d| cos(d[0] * r[0] + d[1] * r[1] + d[2] * r[2])) / (4.0 * PI);
        assert!((re - sin(a) / a).abs() < 1e-12);
    }
}
