//! Small dense complex linear algebra: LU with partial pivoting, a 1-norm
//! condition estimator, and a Hessenberg-QR eigensolver for general complex
//! matrices.
//!
//! Sizes here are a few dozen at most, so everything is row-major `Vec`
//! storage with straightforward loops.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n_rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n_cols)
            .map(|j| (0..self.n_rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        crate::math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n_cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// `PA = LU` with unit-diagonal `L`, both packed into one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    norm_one: f64,
}

impl Lu {
    /// Factorizes a square matrix. Fails with [`Error::SingularSystem`] only on
    /// an exactly zero pivot; use [`Lu::condition_estimate`] for the numerical test.
    pub fn factorize(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument("LU requires a square matrix"));
        }
        let n = a.n_rows();
        let norm_one = a.norm_one();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::SingularSystem(f64::INFINITY));
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= factor * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // Aᴴ = Uᴴ Lᴴ P, so solve Uᴴ w = b, Lᴴ v = w, x = Pᵀ v.
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[(j, i)].conj() * w[j];
            }
            w[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)].conj() * w[j];
            }
            w[i] = s;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = w[k];
        }
        x
    }

    /// Estimate of `‖A‖₁·‖A⁻¹‖₁` (Hager's method with Higham's safeguard).
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 0.0;
        }
        let norm1 = |v: &[Complex64]| v.iter().map(|z| z.norm()).sum::<f64>();
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut estimate = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = norm1(&y);
            let xi: Vec<Complex64> = y
                .iter()
                .map(|z| {
                    let m = z.norm();
                    if m > 0.0 {
                        z / m
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![Complex64::new(0.0, 0.0); n];
            x[j] = Complex64::new(1.0, 0.0);
        }
        // Alternating-sign probe catches the classic counterexamples.
        let alt: Vec<Complex64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * (1.0 + i as f64 / (n.max(2) - 1) as f64), 0.0)
            })
            .collect();
        let y = self.solve(&alt);
        let alt_estimate = 2.0 * norm1(&y) / (3.0 * n as f64);
        let inv_norm = if alt_estimate > estimate { alt_estimate } else { estimate };
        inv_norm * self.norm_one
    }
}

/// Eigen-decomposition `A V = V Λ` of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Column `n` is the unit-2-norm right eigenvector for `values[n]`.
    pub vectors: CMatrix,
}

/// Reduces `a` to upper Hessenberg form by Householder reflections,
/// returning `(H, Q)` with `A = Q H Qᴴ`.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.n_rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = crate::math::sqrt((k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum());
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        // v = x + phase·‖x‖·e₁, reflector P = I − 2 v vᴴ / (vᴴ v)
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let scale = 2.0 / vnorm2;
        // H ← P H
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)]).sum();
            let f = dot * scale;
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * f;
            }
        }
        // H ← H P, Q ← Q P
        for i in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| h[(i, k + 1 + t)] * vi).sum();
            let f = dot * scale;
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= f * vi.conj();
            }
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| q[(i, k + 1 + t)] * vi).sum();
            let f = dot * scale;
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + 1 + t)] -= f * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Rotation `[c s; −s̄ c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let rho = crate::math::hypot(an, bn);
    let phase = a / an;
    (an / rho, phase * b.conj() / rho)
}

/// Complex Schur form `A = Z T Zᴴ` by shifted QR on the Hessenberg form.
fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = a.n_rows();
    let (mut t, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok((t, z));
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 60 * n;
    let mut total = 0usize;
    while hi > 0 {
        // Find the lowest l with a negligible subdiagonal at l.
        let mut lo = hi;
        while lo > 0 {
            let s = t[(lo - 1, lo - 1)].l1_norm() + t[(lo, lo)].l1_norm();
            let sub = t[(lo, lo - 1)].l1_norm();
            if sub <= EPS * s || sub < f64::MIN_POSITIVE {
                t[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::EigenFailure);
        }
        let shift = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            t[(hi, hi)] + Complex64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };
        for k in lo..=hi {
            t[(k, k)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            for j in k..n {
                let x = t[(k, j)];
                let y = t[(k + 1, j)];
                t[(k, j)] = x * c + s * y;
                t[(k + 1, j)] = -s.conj() * x + y * c;
            }
            t[(k + 1, k)] = Complex64::new(0.0, 0.0);
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let rows = (k + 2).min(hi + 1);
            for i in 0..rows {
                let x = t[(i, k)];
                let y = t[(i, k + 1)];
                t[(i, k)] = x * c + y * s.conj();
                t[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = x * c + y * s.conj();
                z[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            t[(k, k)] += shift;
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((t, z))
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = d - (b * c) / (half + disc);
    let mu2 = d - (b * c) / (half - disc);
    let pick = |m: Complex64| if m.is_finite() { Some(m) } else { None };
    match (pick(mu1), pick(mu2)) {
        (Some(x), Some(y)) => {
            if (x - d).norm() <= (y - d).norm() {
                x
            } else {
                y
            }
        }
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => d,
    }
}

/// Eigenvalues and unit right eigenvectors of a general complex matrix.
pub fn eigen(a: &CMatrix) -> Result<Eigen> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("eigen requires a square matrix"));
    }
    let n = a.n_rows();
    let (t, z) = schur(a)?;
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let small = EPS * t.norm_frobenius().max(f64::MIN_POSITIVE);
    let mut vectors = CMatrix::zeros(n, n);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        for v in y.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        y[k] = Complex64::new(1.0, 0.0);
        let lambda = t[(k, k)];
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            y[i] = -s / denom;
        }
        let mut x: Vec<Complex64> = (0..n).map(|i| (0..=k).map(|j| z[(i, j)] * y[j]).sum()).collect();
        let norm = crate::math::sqrt(x.iter().map(|v| v.norm_sqr()).sum());
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::EigenFailure);
        }
        for v in x.iter_mut() {
            *v /= norm;
        }
        for i in 0..n {
            vectors[(i, k)] = x[i];
        }
    }
    Ok(Eigen { values, vectors })
}
