//! Foldy-Lax multiple scattering by identical resonant point scatterers.
//!
//! The field incident on scatterer `i` obeys `Ψᵢ = Ψ₀(rᵢ) + k f Σⱼ Gᵢⱼ Ψⱼ` with
//! `k f = 1/(δ/γ − i)` and the Green matrix `Gᵢⱼ = e^{i dᵢⱼ}/dᵢⱼ` (zero diagonal).
//! The total cross section in units of `4π/k²` is
//! `Im⟨Ψ₀|(δ/γ − i − G)⁻¹|Ψ₀⟩ / |Ψ₀|²`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Lu};
use crate::math::{cos, sin, sqrt, PI};
use crate::quadrature::{polar_order, GaussLegendre, SphereGrid};

/// A point or direction in dimensionless units (`k·x`).
pub type Vec3 = [f64; 3];

/// Pairs closer than this cannot be represented by the `1/d` propagator.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-12;

/// Linear solves with a larger 1-norm condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e14;

const COLLINEAR_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn norm(a: &Vec3) -> f64 {
    sqrt(dot(a, a))
}

#[inline]
pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn cis(phase: f64) -> Complex64 {
    Complex64::new(cos(phase), sin(phase))
}

/// Positions of `N ≥ 1` distinct point scatterers.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<Vec3>", into = "Vec<Vec3>"))]
pub struct Configuration {
    positions: Vec<Vec3>,
}

impl TryFrom<Vec<Vec3>> for Configuration {
    type Error = Error;
    fn try_from(positions: Vec<Vec3>) -> Result<Self> {
        Self::new(positions)
    }
}

impl From<Configuration> for Vec<Vec3> {
    fn from(c: Configuration) -> Self {
        c.positions
    }
}

impl Configuration {
    pub fn new(positions: Vec<Vec3>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidConfiguration("at least one scatterer is required"));
        }
        if positions.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfiguration("positions must be finite"));
        }
        let config = Self { positions };
        config.check_separation(COINCIDENCE_THRESHOLD)?;
        Ok(config)
    }

    /// Scatterers on the `z` axis at the given `k·z` values.
    pub fn on_axis(z: &[f64]) -> Result<Self> {
        Self::new(z.iter().map(|&z| [0.0, 0.0, z]).collect())
    }

    /// Fails with the first pair closer than `min_distance`.
    pub fn check_separation(&self, min_distance: f64) -> Result<()> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if !(self.distance(i, j) >= min_distance) {
                    return Err(Error::CoincidentScatterers(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        norm(&sub(&self.positions[i], &self.positions[j]))
    }

    /// Largest pairwise distance (zero for a single scatterer).
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }

    /// Smallest pairwise distance (infinite for a single scatterer).
    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                d = d.min(self.distance(i, j));
            }
        }
        d
    }

    pub fn z_coordinates(&self) -> Vec<f64> {
        self.positions.iter().map(|p| p[2]).collect()
    }

    pub fn translated(&self, shift: Vec3) -> Self {
        Self {
            positions: self
                .positions
                .iter()
                .map(|p| [p[0] + shift[0], p[1] + shift[1], p[2] + shift[2]])
                .collect(),
        }
    }

    /// Applies the 3×3 matrix `rotation` (rows) to every position.
    pub fn rotated(&self, rotation: &[Vec3; 3]) -> Self {
        Self {
            positions: self.positions.iter().map(|p| apply(rotation, p)).collect(),
        }
    }

    /// Unit vector along the common line of all scatterers, if there is one.
    /// A single scatterer is collinear with every axis and yields `+z`.
    pub fn collinear_axis(&self) -> Option<Vec3> {
        let n = self.len();
        if n == 1 {
            return Some([0.0, 0.0, 1.0]);
        }
        let (mut ia, mut ib, mut best) = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let d = self.distance(i, j);
                if d > best {
                    (ia, ib, best) = (i, j, d);
                }
            }
        }
        let v = sub(&self.positions[ib], &self.positions[ia]);
        let axis = [v[0] / best, v[1] / best, v[2] / best];
        let tol = COLLINEAR_TOL * best.max(1.0);
        let origin = self.positions[ia];
        let on_line = self
            .positions
            .iter()
            .all(|p| norm(&cross(&sub(p, &origin), &axis)) <= tol);
        on_line.then_some(axis)
    }

    /// True when all scatterers lie on one line parallel to `direction`.
    pub fn is_collinear_with(&self, direction: &Vec3) -> bool {
        match self.collinear_axis() {
            Some(axis) => self.len() == 1 || norm(&cross(&axis, direction)) <= COLLINEAR_TOL,
            None => false,
        }
    }

    /// Angular grid that integrates `e^{i k·(rᵢ − rⱼ)}` products over the sphere
    /// for this configuration: Gauss-Legendre along the axis for collinear
    /// configurations, a product grid otherwise.
    pub fn angular_grid(&self) -> SphereGrid {
        let extent = self.diameter();
        match self.collinear_axis() {
            Some(axis) => axial_grid(&axis, polar_order(extent)),
            None => SphereGrid::for_extent(extent),
        }
    }
}

pub(crate) fn apply(m: &[Vec3; 3], v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

/// Gauss-Legendre in `cos θ` about `axis`, one azimuth carrying the full `2π`.
/// Exact for integrands that depend on direction only through `k·axis`.
pub fn axial_grid(axis: &Vec3, order: usize) -> SphereGrid {
    let gl = GaussLegendre::new(order);
    let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let p = cross(axis, &helper);
    let pn = norm(&p);
    let perp = [p[0] / pn, p[1] / pn, p[2] / pn];
    let mut directions = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for (&ct, &w) in gl.nodes.iter().zip(&gl.weights) {
        let st = sqrt((1.0 - ct * ct).max(0.0));
        directions.push([
            ct * axis[0] + st * perp[0],
            ct * axis[1] + st * perp[1],
            ct * axis[2] + st * perp[2],
        ]);
        weights.push(2.0 * PI * w);
    }
    SphereGrid { directions, weights }
}

/// Identical resonant scatterers detuned by `δ/γ` from resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScattererModel {
    detuning: f64,
}

impl ScattererModel {
    pub fn new(detuning: f64) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::InvalidArgument("detuning must be finite"));
        }
        Ok(Self { detuning })
    }

    pub fn resonant() -> Self {
        Self { detuning: 0.0 }
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// `k f = 1/(δ/γ − i)`; satisfies `|kf|² = Im(kf)`.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) / Complex64::new(self.detuning, -1.0)
    }
}

impl Default for ScattererModel {
    fn default() -> Self {
        Self::resonant()
    }
}

/// Plane wave `Ψ₀ e^{i k_in·r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IncidentWave {
    direction: Vec3,
    amplitude: Complex64,
}

impl IncidentWave {
    pub fn new(direction: Vec3, amplitude: Complex64) -> Result<Self> {
        if (norm(&direction) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("incident direction must be a unit vector"));
        }
        if !(amplitude.is_finite() && amplitude.norm() > 0.0) {
            return Err(Error::InvalidArgument("incident amplitude must be finite and nonzero"));
        }
        Ok(Self { direction, amplitude })
    }

    /// Normalizes `direction` first.
    pub fn towards(direction: Vec3) -> Result<Self> {
        let n = norm(&direction);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidArgument("incident direction must be nonzero"));
        }
        Self::new([direction[0] / n, direction[1] / n, direction[2] / n], Complex64::new(1.0, 0.0))
    }

    /// Unit-amplitude wave travelling along `+z`.
    pub fn along_z() -> Self {
        Self { direction: [0.0, 0.0, 1.0], amplitude: Complex64::new(1.0, 0.0) }
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn reversed(&self) -> Self {
        let d = self.direction;
        Self { direction: [-d[0], -d[1], -d[2]], amplitude: self.amplitude }
    }

    pub fn rotated(&self, rotation: &[Vec3; 3]) -> Self {
        Self { direction: apply(rotation, &self.direction), amplitude: self.amplitude }
    }
}

impl Default for IncidentWave {
    fn default() -> Self {
        Self::along_z()
    }
}

/// Complex symmetric propagator matrix of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrix {
    matrix: CMatrix,
    config: Configuration,
}

impl GreenMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }
}

/// Builds `Gᵢⱼ = e^{i dᵢⱼ}/dᵢⱼ`, `Gᵢᵢ = 0`.
pub fn build_green_matrix(config: &Configuration) -> Result<GreenMatrix> {
    let n = config.len();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = config.distance(i, j);
            if !(d >= COINCIDENCE_THRESHOLD) {
                return Err(Error::CoincidentScatterers(i, j));
            }
            let g = cis(d) / d;
            m[(i, j)] = g;
            m[(j, i)] = g;
        }
    }
    Ok(GreenMatrix { matrix: m, config: config.clone() })
}

/// Field amplitudes at the scatterers.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldVector(pub Vec<Complex64>);

impl FieldVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.0.iter().map(|z| z.norm_sqr()).sum())
    }
}

/// `Ψ₀ e^{i k_in·rᵢ}` at each scatterer.
pub fn incident_field(config: &Configuration, wave: &IncidentWave) -> FieldVector {
    let d = wave.direction();
    FieldVector(
        config
            .positions()
            .iter()
            .map(|r| wave.amplitude() * cis(dot(&d, r)))
            .collect(),
    )
}

/// Factorization of `(δ/γ − i)·𝟙 − G` shared by all solves at one detuning.
fn resolvent_lu(g: &GreenMatrix, model: &ScattererModel) -> Result<Lu> {
    let n = g.dim();
    let shift = Complex64::new(model.detuning(), -1.0);
    let a = CMatrix::from_fn(n, n, |i, j| if i == j { shift } else { -g.get(i, j) });
    let lu = Lu::factorize(&a)?;
    let cond = lu.condition_estimate();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularSystem(cond));
    }
    Ok(lu)
}

/// Solves `Ψ = Ψ₀ + k f G Ψ` by a direct dense solve.
pub fn solve_fields(
    g: &GreenMatrix,
    psi0: &FieldVector,
    model: &ScattererModel,
) -> Result<FieldVector> {
    if psi0.len() != g.dim() {
        return Err(Error::InvalidArgument("field length does not match the Green matrix"));
    }
    let lu = resolvent_lu(g, model)?;
    let scaled = lu.solve(&psi0.0);
    let factor = Complex64::new(model.detuning(), -1.0);
    Ok(FieldVector(scaled.into_iter().map(|x| x * factor).collect()))
}

/// Solved scattering problem for one configuration, wave and detuning.
///
/// Holds `k f Ψᵢ / Ψ₀`, from which the far-field amplitude in any direction is
/// `Σᵢ e^{−i k_out·rᵢ} k f Ψᵢ/Ψ₀`.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    config: Configuration,
    wave: IncidentWave,
    sources: Vec<Complex64>,
    total: f64,
}

impl ScatteringSolution {
    pub fn new(config: &Configuration, wave: &IncidentWave, model: &ScattererModel) -> Result<Self> {
        let g = build_green_matrix(config)?;
        let lu = resolvent_lu(&g, model)?;
        let psi0 = incident_field(config, wave);
        // (δ − i − G)⁻¹ Ψ₀ equals k f Ψ.
        let x = lu.solve(&psi0.0);
        let overlap: Complex64 = psi0.0.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
        let amp = wave.amplitude();
        let total = overlap.im / amp.norm_sqr();
        let sources = x.into_iter().map(|v| v / amp).collect();
        Ok(Self { config: config.clone(), wave: *wave, sources, total })
    }

    /// `σ/σ_max^(1)` from the optical theorem.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn far_field_amplitude(&self, out_direction: &Vec3) -> Complex64 {
        self.config
            .positions()
            .iter()
            .zip(&self.sources)
            .map(|(r, s)| cis(-dot(out_direction, r)) * s)
            .sum()
    }

    /// `dσ/dΩ` in units of `1/k²`.
    pub fn differential(&self, out_direction: &Vec3) -> f64 {
        self.far_field_amplitude(out_direction).norm_sqr()
    }

    /// `∫ dΩ dσ/dΩ` in units of `σ_max^(1) = 4π/k²`.
    pub fn integrated_differential(&self) -> f64 {
        self.config.angular_grid().integrate(|d| self.differential(d)) / (4.0 * PI)
    }

    /// Angular profile `σ(cos θ) = 2π dσ/dΩ` in units of `σ_max^(1)`, where
    /// `cos θ` is measured from the incident direction.
    pub fn profile_at(&self, cos_theta: f64) -> f64 {
        let d = self.wave.direction();
        let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let p = cross(&d, &helper);
        let pn = norm(&p);
        let st = sqrt((1.0 - cos_theta * cos_theta).max(0.0));
        let dir = [
            cos_theta * d[0] + st * p[0] / pn,
            cos_theta * d[1] + st * p[1] / pn,
            cos_theta * d[2] + st * p[2] / pn,
        ];
        0.5 * self.differential(&dir)
    }
}

/// `σ/σ_max^(1)` via the direct solve.
pub fn total_cross_section(
    config: &Configuration,
    wave: &IncidentWave,
    model: &ScattererModel,
) -> Result<f64> {
    Ok(ScatteringSolution::new(config, wave, model)?.total())
}

/// `dσ/dΩ` (units `1/k²`) into `out_direction`.
pub fn differential_cross_section(
    config: &Configuration,
    wave: &IncidentWave,
    model: &ScattererModel,
    out_direction: &Vec3,
) -> Result<f64> {
    if (norm(out_direction) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("outgoing direction must be a unit vector"));
    }
    Ok(ScatteringSolution::new(config, wave, model)?.differential(out_direction))
}

/// Samples of `σ(cos θ)` on a uniform grid over `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularProfile {
    pub cos_theta: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Angular profile of a configuration lying on a line parallel to the wave.
pub fn angular_profile(
    config: &Configuration,
    wave: &IncidentWave,
    model: &ScattererModel,
    n_grid: usize,
) -> Result<AngularProfile> {
    if n_grid < 2 {
        return Err(Error::InvalidArgument("profile grid needs at least two points"));
    }
    if !config.is_collinear_with(&wave.direction()) {
        return Err(Error::NotCollinear);
    }
    let sol = ScatteringSolution::new(config, wave, model)?;
    let cos_theta: Vec<f64> = (0..n_grid)
        .map(|i| -1.0 + 2.0 * i as f64 / (n_grid - 1) as f64)
        .collect();
    let sigma = cos_theta.iter().map(|&c| sol.profile_at(c)).collect();
    Ok(AngularProfile { cos_theta, sigma })
}

/// Gauss-Legendre integral of the angular profile over `cos θ`; equals the
/// total cross section for configurations collinear with the wave.
pub fn integrate_angular_profile(
    config: &Configuration,
    wave: &IncidentWave,
    model: &ScattererModel,
) -> Result<f64> {
    if !config.is_collinear_with(&wave.direction()) {
        return Err(Error::NotCollinear);
    }
    let sol = ScatteringSolution::new(config, wave, model)?;
    let gl = GaussLegendre::new(polar_order(config.diameter()));
    Ok(gl.integrate(|c| sol.profile_at(c)))
}

/// Largest deviation of the quadrature of `∫dΩ e^{−i k_out·(rᵢ − rⱼ)}` from
/// `4π sin(dᵢⱼ)/dᵢⱼ` (and `4π` on the diagonal).
pub fn angular_identity_check(config: &Configuration) -> f64 {
    let grid = config.angular_grid();
    let n = config.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let diff = sub(&config.positions()[i], &config.positions()[j]);
            let value: Complex64 = grid
                .directions
                .iter()
                .zip(&grid.weights)
                .map(|(d, &w)| cis(-dot(d, &diff)) * w)
                .sum();
            let exact = 4.0 * PI * crate::math::sinc(config.distance(i, j));
            worst = worst.max((value - Complex64::new(exact, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn green_matrix_single_scatterer_is_zero() {
        let g = build_green_matrix(&Configuration::on_axis(&[0.0]).unwrap()).unwrap();
        assert_eq!(g.dim(), 1);
        assert_eq!(g.get(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn green_matrix_pair_at_pi() {
        let g = build_green_matrix(&Configuration::on_axis(&[0.0, PI]).unwrap()).unwrap();
        let v = g.get(0, 1);
        assert!(close(v.re, -1.0 / PI, 1e-15) && v.im.abs() < 1e-15);
        assert_eq!(g.get(0, 1), g.get(1, 0));
    }

    #[test]
    fn green_matrix_equilateral_unit_triangle() {
        let h = sqrt(3.0) / 2.0;
        let c = Configuration::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0]]).unwrap();
        let g = build_green_matrix(&c).unwrap();
        for i in 0..3 {
            assert_eq!(g.get(i, i), Complex64::new(0.0, 0.0));
            for j in 0..3 {
                if i != j {
                    assert!((g.get(i, j) - cis(1.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn coincident_scatterers_rejected() {
        assert_eq!(
            Configuration::on_axis(&[1.0, 1.0]),
            Err(Error::CoincidentScatterers(0, 1))
        );
    }

    #[test]
    fn incident_field_phases() {
        let w = IncidentWave::along_z();
        let f = incident_field(&Configuration::on_axis(&[0.0]).unwrap(), &w);
        assert_eq!(f.0[0], Complex64::new(1.0, 0.0));
        let f = incident_field(&Configuration::on_axis(&[PI]).unwrap(), &w);
        assert!((f.0[0] + 1.0).norm() < 1e-15);
        let d = 1.7;
        let amp = Complex64::new(0.3, -2.0);
        let w = IncidentWave::new([0.0, 0.0, 1.0], amp).unwrap();
        let f = incident_field(&Configuration::on_axis(&[-d / 2.0, d / 2.0]).unwrap(), &w);
        assert!((f.0[0] - amp * cis(-d / 2.0)).norm() < 1e-15);
        assert!((f.0[1] - amp * cis(d / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn incident_wave_requires_unit_direction() {
        assert!(IncidentWave::new([0.0, 0.0, 1.1], Complex64::new(1.0, 0.0)).is_err());
        assert!(IncidentWave::towards([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn model_amplitude_obeys_optical_theorem() {
        for d in [-3.0, -0.2, 0.0, 1.0, 40.0] {
            let f = ScattererModel::new(d).unwrap().amplitude();
            assert!((f.norm_sqr() - f.im).abs() < 1e-15);
        }
        assert!(ScattererModel::new(f64::NAN).is_err());
    }

    #[test]
    fn single_scatterer_fields_unchanged() {
        let c = Configuration::on_axis(&[0.4]).unwrap();
        let g = build_green_matrix(&c).unwrap();
        let psi0 = incident_field(&c, &IncidentWave::along_z());
        for d in [0.0, 2.5] {
            let psi = solve_fields(&g, &psi0, &ScattererModel::new(d).unwrap()).unwrap();
            assert!((psi.0[0] - psi0.0[0]).norm() < 1e-15);
        }
    }

    /// Oracle: explicit 2×2 inverse of `(−i𝟙 − G)` at δ = 0.
    #[test]
    fn pair_fields_match_analytic_inverse() {
        for d in [0.3, 1.0, 2.2, 5.9] {
            let c = Configuration::on_axis(&[-d / 2.0, d / 2.0]).unwrap();
            let g = build_green_matrix(&c).unwrap();
            let w = IncidentWave::along_z();
            let psi0 = incident_field(&c, &w);
            let psi = solve_fields(&g, &psi0, &ScattererModel::resonant()).unwrap();
            let a = Complex64::new(0.0, -1.0);
            let b = -cis(d) / d;
            let det = a * a - b * b;
            let inv = [[a / det, -b / det], [-b / det, a / det]];
            let i = Complex64::new(0.0, -1.0);
            for r in 0..2 {
                let expect = (inv[r][0] * psi0.0[0] + inv[r][1] * psi0.0[1]) * i;
                assert!((psi.0[r] - expect).norm() < 1e-13, "d={d}");
            }
            // residual of Ψ = Ψ₀ + kf G Ψ
            let kf = ScattererModel::resonant().amplitude();
            let gp = g.matrix().mul_vec(&psi.0);
            for r in 0..2 {
                assert!((psi.0[r] - psi0.0[r] - kf * gp[r]).norm() <= 1e-10 * psi0.norm());
            }
        }
    }

    #[test]
    fn far_detuned_fields_approach_incident() {
        let c = Configuration::on_axis(&[0.0, 1.0, 2.5]).unwrap();
        let g = build_green_matrix(&c).unwrap();
        let psi0 = incident_field(&c, &IncidentWave::along_z());
        let psi = solve_fields(&g, &psi0, &ScattererModel::new(1e6).unwrap()).unwrap();
        for (a, b) in psi.0.iter().zip(&psi0.0) {
            assert!((a - b).norm() < 1e-5);
        }
    }

    #[test]
    fn single_scatterer_lorentzian() {
        let c = Configuration::on_axis(&[0.0]).unwrap();
        let w = IncidentWave::along_z();
        for d in [-5.0, -1.0, 0.0, 0.5, 1.0, 3.0] {
            let s = total_cross_section(&c, &w, &ScattererModel::new(d).unwrap()).unwrap();
            assert!(close(s, 1.0 / (1.0 + d * d), 1e-12), "d={d} s={s}");
        }
    }

    #[test]
    fn single_scatterer_isotropic_differential() {
        let c = Configuration::on_axis(&[0.0]).unwrap();
        let w = IncidentWave::along_z();
        let m = ScattererModel::resonant();
        for dir in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, -0.6, 0.8]] {
            assert!(close(differential_cross_section(&c, &w, &m, &dir).unwrap(), 1.0, 1e-14));
        }
        let sol = ScatteringSolution::new(&c, &w, &m).unwrap();
        assert!(close(sol.integrated_differential(), 1.0, 1e-13));
        let p = angular_profile(&c, &w, &m, 5).unwrap();
        assert!(p.sigma.iter().all(|&s| close(s, 0.5, 1e-14)));
    }

    #[test]
    fn pair_profile_is_mirror_symmetric() {
        let c = Configuration::on_axis(&[0.0, PI]).unwrap();
        let p = angular_profile(&c, &IncidentWave::along_z(), &ScattererModel::resonant(), 101)
            .unwrap();
        for i in 0..101 {
            assert!(close(p.sigma[i], p.sigma[100 - i], 1e-13));
        }
    }

    #[test]
    fn profile_requires_collinear_configuration() {
        let c = Configuration::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]).unwrap();
        let r = angular_profile(&c, &IncidentWave::along_z(), &ScattererModel::resonant(), 11);
        assert_eq!(r.unwrap_err(), Error::NotCollinear);
        let r = angular_profile(
            &Configuration::on_axis(&[0.0, 1.0]).unwrap(),
            &IncidentWave::along_z(),
            &ScattererModel::resonant(),
            1,
        );
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn angular_identity_small_cases() {
        assert!(angular_identity_check(&Configuration::on_axis(&[0.0]).unwrap()) < 1e-13);
        assert!(angular_identity_check(&Configuration::on_axis(&[0.0, PI]).unwrap()) < 1e-12);
        let c = Configuration::new(vec![[0.0, 0.0, 0.0], [1.0, 2.0, 0.5], [-3.0, 0.2, 1.0]])
            .unwrap();
        assert!(angular_identity_check(&c) < 1e-10);
    }

    #[test]
    fn collinearity_detection() {
        let c = Configuration::new(vec![[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]).unwrap();
        let axis = c.collinear_axis().unwrap();
        assert!(close(axis[0].abs(), 1.0 / sqrt(3.0), 1e-12));
        assert!(!c.is_collinear_with(&[0.0, 0.0, 1.0]));
        let c = Configuration::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert!(c.collinear_axis().is_none());
    }
}
