//! Scattering resonances: eigenpairs of the Green matrix.
//!
//! Each eigenvalue `λₙ` of `G` gives a resonance at `δₙ/γ = Re λₙ` with width
//! `γₙ/γ = 1 + Im λₙ`. Because `G` is complex symmetric, the left eigenvector is
//! the unconjugated transpose of the right one, so the resonance weight is
//! `gₙ(k_in)·gₙ(−k_in)/Σᵢ cᵢ²` with emission amplitude `gₙ(k) = Σᵢ cᵢ e^{−i rᵢ·k}`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigen, CMatrix, Lu};
use crate::math::{cos, sin, sinc, sqrt, PI};
use crate::scatter::{
    build_green_matrix, dot, total_cross_section, Configuration, GreenMatrix, IncidentWave,
    ScattererModel, Vec3,
};

/// Below this `|Σᵢ cᵢ²|` the resonance weights are considered meaningless.
/// Rounding alone leaves an exactly defective pair near `√ε ≈ 1e-8`.
pub const DEFECT_THRESHOLD: f64 = 1e-6;

/// Above this eigenvector-matrix condition number the decomposition is
/// considered defective.
pub const EIGENVECTOR_CONDITION_THRESHOLD: f64 = 1e10;

/// Eigenvalues closer than this are treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Widths below this are recomputed from the emitted flux, a sum of
/// non-negative terms that keeps full relative precision for dark states.
pub const FLUX_REFINEMENT_BELOW: f64 = 1e-6;

#[inline]
fn cis(phase: f64) -> Complex64 {
    Complex64::new(cos(phase), sin(phase))
}

/// One scattering resonance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Resonance {
    pub eigenvalue: Complex64,
    /// Right eigenvector with `Σ|cᵢ|² = 1`, phased so that `Σ cᵢ²` is real and non-negative.
    pub coefficients: Vec<Complex64>,
    /// `Σᵢ cᵢ²`.
    pub biorthogonal_norm: Complex64,
    /// `γₙ/γ`.
    pub width: f64,
}

impl Resonance {
    /// `δₙ/γ = Re λₙ`.
    pub fn position(&self) -> f64 {
        self.eigenvalue.re
    }

    /// `1 + Im λₙ` straight from the eigenvalue.
    pub fn spectral_width(&self) -> f64 {
        1.0 + self.eigenvalue.im
    }

    pub fn emission_amplitude(&self, config: &Configuration, direction: &Vec3) -> Complex64 {
        emission_amplitude(&self.coefficients, config, direction)
    }

    /// `gₙ(k_in) gₙ(−k_in) / Σᵢ cᵢ²`, normalized by `|Ψ₀|²`.
    pub fn overlap(&self, config: &Configuration, wave: &IncidentWave) -> Complex64 {
        let d = wave.direction();
        let back = [-d[0], -d[1], -d[2]];
        self.emission_amplitude(config, &d) * self.emission_amplitude(config, &back)
            / self.biorthogonal_norm
    }

    /// `σₙ(δ)/σ_max^(1) = Im[overlap / (δ − δₙ − iγₙ)]` without the
    /// diagonalizability check.
    pub fn cross_section_unchecked(
        &self,
        config: &Configuration,
        wave: &IncidentWave,
        model: &ScattererModel,
    ) -> f64 {
        let denom = Complex64::new(model.detuning() - self.position(), -self.width);
        (self.overlap(config, wave) / denom).im
    }
}

/// All resonances of one configuration, sorted by width then position.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSet {
    pub resonances: Vec<Resonance>,
    pub diagonalizable: bool,
    /// `minₙ |Σᵢ (cᵢ⁽ⁿ⁾)²|`.
    pub defect_score: f64,
    pub eigenvector_condition: f64,
    /// Some pair of eigenvalues closer than [`DEGENERACY_THRESHOLD`];
    /// resonance-level outputs are then unreliable.
    pub degenerate: bool,
    config: Configuration,
}

impl ResonanceSet {
    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.resonances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resonances.is_empty()
    }

    /// Smallest width.
    pub fn min_width(&self) -> f64 {
        self.resonances.iter().map(|r| r.width).fold(f64::INFINITY, f64::min)
    }

    fn check_diagonalizable(&self) -> Result<()> {
        if self.diagonalizable {
            Ok(())
        } else {
            Err(Error::NotDiagonalizable(self.defect_score))
        }
    }

    /// Contribution of resonance `n` to the total cross section at `model`'s detuning.
    pub fn resonance_cross_section(
        &self,
        n: usize,
        wave: &IncidentWave,
        model: &ScattererModel,
    ) -> Result<f64> {
        self.check_diagonalizable()?;
        let r = self.resonances.get(n).ok_or(Error::InvalidArgument("resonance index out of range"))?;
        Ok(r.cross_section_unchecked(&self.config, wave, model))
    }

    /// `Σₙ σₙ(δ)`; equals the direct-solve cross section when diagonalizable.
    pub fn resonance_sum(&self, wave: &IncidentWave, model: &ScattererModel) -> Result<f64> {
        self.check_diagonalizable()?;
        Ok(self
            .resonances
            .iter()
            .map(|r| r.cross_section_unchecked(&self.config, wave, model))
            .sum())
    }

    /// Upper bound on the peak of `σₙ`:
    /// `|gₙ(k_in)gₙ(−k_in)/Σcᵢ²| · Σ|cᵢ|² / ∫dΩ/4π |gₙ|²`.
    pub fn resonance_upper_bound(&self, n: usize, wave: &IncidentWave) -> Result<f64> {
        self.check_diagonalizable()?;
        let r = self.resonances.get(n).ok_or(Error::InvalidArgument("resonance index out of range"))?;
        let flux = decay_rate_flux(&r.coefficients, &self.config).quadrature;
        let norm2: f64 = r.coefficients.iter().map(|c| c.norm_sqr()).sum();
        Ok(r.overlap(&self.config, wave).norm() * norm2 / flux)
    }

    /// Rows of the resonance table for `wave` at `δ = 0`.
    pub fn table(&self, wave: &IncidentWave) -> Vec<ResonanceRow> {
        let model = ScattererModel::resonant();
        self.resonances
            .iter()
            .enumerate()
            .map(|(n, r)| ResonanceRow {
                index: n,
                eigenvalue: r.eigenvalue,
                position: r.position(),
                width: r.width,
                overlap: r.overlap(&self.config, wave),
                sigma_at_resonance_zero: r.cross_section_unchecked(&self.config, wave, &model),
            })
            .collect()
    }
}

/// One line of a resonance table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResonanceRow {
    pub index: usize,
    pub eigenvalue: Complex64,
    pub position: f64,
    pub width: f64,
    pub overlap: Complex64,
    /// `σₙ(δ = 0)/σ_max^(1)`.
    pub sigma_at_resonance_zero: f64,
}

/// Eigen-decomposition of the Green matrix into resonances.
pub fn decompose(g: &GreenMatrix) -> Result<ResonanceSet> {
    let config = g.configuration().clone();
    let e = eigen(g.matrix())?;
    let n = g.dim();
    let mut resonances = Vec::with_capacity(n);
    for k in 0..n {
        let mut c = e.vectors.column(k);
        let s: Complex64 = c.iter().map(|x| x * x).sum();
        if s.norm() > 0.0 {
            let phase = cis(-0.5 * s.arg());
            for x in c.iter_mut() {
                *x *= phase;
            }
        }
        let s: Complex64 = c.iter().map(|x| x * x).sum();
        let eigenvalue = e.values[k];
        let mut width = 1.0 + eigenvalue.im;
        if width < FLUX_REFINEMENT_BELOW {
            width = decay_rate_flux(&c, &config).quadrature;
        }
        resonances.push(Resonance { eigenvalue, coefficients: c, biorthogonal_norm: s, width });
    }
    resonances.sort_by(|a, b| {
        a.width
            .total_cmp(&b.width)
            .then(a.position().total_cmp(&b.position()))
    });

    let defect_score = resonances
        .iter()
        .map(|r| r.biorthogonal_norm.norm())
        .fold(f64::INFINITY, f64::min);
    let v = CMatrix::from_fn(n, n, |i, j| resonances[j].coefficients[i]);
    let eigenvector_condition = match Lu::factorize(&v) {
        Ok(lu) => lu.condition_estimate(),
        Err(_) => f64::INFINITY,
    };
    let mut degenerate = false;
    for a in 0..n {
        for b in a + 1..n {
            if (resonances[a].eigenvalue - resonances[b].eigenvalue).norm() < DEGENERACY_THRESHOLD {
                degenerate = true;
            }
        }
    }
    let diagonalizable = defect_score > DEFECT_THRESHOLD
        && eigenvector_condition < EIGENVECTOR_CONDITION_THRESHOLD;
    Ok(ResonanceSet {
        resonances,
        diagonalizable,
        defect_score,
        eigenvector_condition,
        degenerate,
        config,
    })
}

/// `γ_min/γ`: the smallest resonance width of the configuration.
///
/// Skips the diagonalizability diagnostics of [`decompose`]; widths below
/// [`FLUX_REFINEMENT_BELOW`] are refined from the emitted flux as there.
pub fn min_decay_rate(config: &Configuration) -> Result<f64> {
    let g = build_green_matrix(config)?;
    let e = eigen(g.matrix())?;
    let mut best = f64::INFINITY;
    for (k, value) in e.values.iter().enumerate() {
        let mut width = 1.0 + value.im;
        if width < FLUX_REFINEMENT_BELOW {
            width = decay_rate_flux(&e.vectors.column(k), config).quadrature;
        }
        best = best.min(width);
    }
    Ok(best)
}

/// `gₙ(k) = Σᵢ cᵢ e^{−i rᵢ·k}`.
pub fn emission_amplitude(coefficients: &[Complex64], config: &Configuration, direction: &Vec3) -> Complex64 {
    coefficients
        .iter()
        .zip(config.positions())
        .map(|(c, r)| c * cis(-dot(r, direction)))
        .sum()
}

/// The two flux forms of a state's decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxDecay {
    /// `Σ|cᵢ|² + Σ_{i≠j} cᵢ cⱼ* sin(dᵢⱼ)/dᵢⱼ`.
    pub sinc_form: f64,
    /// `∫dΩ/4π |Σᵢ cᵢ e^{i rᵢ·k}|²` by quadrature.
    pub quadrature: f64,
}

/// Decay rate of the state `coefficients` from the flux it radiates.
/// For a unit eigenvector of `G` both forms equal `1 + Im λ`.
pub fn decay_rate_flux(coefficients: &[Complex64], config: &Configuration) -> FluxDecay {
    let n = config.len();
    assert_eq!(coefficients.len(), n, "coefficient count must match the configuration");
    let mut sinc_form = 0.0;
    for i in 0..n {
        sinc_form += coefficients[i].norm_sqr();
        for j in 0..n {
            if i != j {
                sinc_form += (coefficients[i] * coefficients[j].conj()).re * sinc(config.distance(i, j));
            }
        }
    }
    let grid = config.angular_grid();
    let quadrature = grid.integrate(|d| emission_amplitude(coefficients, config, d).norm_sqr())
        / (4.0 * PI);
    FluxDecay { sinc_form, quadrature }
}

/// Outcome of probing a configuration for a defective Green matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectReport {
    pub defect_score: f64,
    pub eigenvector_condition: f64,
    pub diagonalizable: bool,
    /// Direct-solve `σ(δ=0)/σ_max^(1)` for a wave along `+z`.
    pub total_cross_section: f64,
    pub cross_section_finite: bool,
}

/// Reports how close `G` is to defective alongside the direct-solve cross section,
/// which stays valid when the resonance decomposition does not.
pub fn defective_case_probe(config: &Configuration) -> Result<DefectReport> {
    let set = decompose(&build_green_matrix(config)?)?;
    let sigma = total_cross_section(config, &IncidentWave::along_z(), &ScattererModel::resonant());
    let total = sigma.as_ref().copied().unwrap_or(f64::NAN);
    Ok(DefectReport {
        defect_score: set.defect_score,
        eigenvector_condition: set.eigenvector_condition,
        diagonalizable: set.diagonalizable,
        total_cross_section: total,
        cross_section_finite: total.is_finite(),
    })
}

/// Planar isosceles triangle whose Green matrix is exactly non-diagonalizable:
/// `d₁₂ = d₁₃ = 3π(4+√2)/7`, `d₂₃ = 3π(1+2√2)/14`.
pub fn defective_triangle() -> Configuration {
    let s2 = sqrt(2.0);
    let leg = 3.0 * PI * (4.0 + s2) / 7.0;
    let base = 3.0 * PI * (1.0 + 2.0 * s2) / 14.0;
    let h = sqrt(leg * leg - base * base / 4.0);
    Configuration::new(alloc::vec![[0.0, 0.0, 0.0], [base / 2.0, h, 0.0], [-base / 2.0, h, 0.0]])
        .expect("triangle vertices are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(d: f64) -> Configuration {
        Configuration::on_axis(&[-d / 2.0, d / 2.0]).unwrap()
    }

    #[test]
    fn single_scatterer_resonance() {
        let c = Configuration::on_axis(&[0.0]).unwrap();
        let set = decompose(&build_green_matrix(&c).unwrap()).unwrap();
        assert_eq!(set.len(), 1);
        let r = &set.resonances[0];
        assert_eq!(r.eigenvalue, Complex64::new(0.0, 0.0));
        assert_eq!(r.width, 1.0);
        assert!(set.diagonalizable);
        assert_eq!(min_decay_rate(&c).unwrap(), 1.0);
        let w = IncidentWave::along_z();
        for d in [0.0, 1.0, -2.0] {
            let m = ScattererModel::new(d).unwrap();
            let sn = set.resonance_cross_section(0, &w, &m).unwrap();
            assert!((sn - total_cross_section(&c, &w, &m).unwrap()).abs() < 1e-14);
        }
        assert!((set.resonance_upper_bound(0, &w).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_closed_form() {
        for d in [0.2, 1.0, 2.0, PI, 4.5, 9.0] {
            let set = decompose(&build_green_matrix(&pair(d)).unwrap()).unwrap();
            let g = cis(d) / d;
            let mut expected = [1.0 - sin(d) / d, 1.0 + sin(d) / d];
            expected.sort_by(f64::total_cmp);
            assert!((set.resonances[0].width - expected[0]).abs() < 1e-12, "d={d}");
            assert!((set.resonances[1].width - expected[1]).abs() < 1e-12, "d={d}");
            for r in &set.resonances {
                let l = r.eigenvalue;
                assert!((l - g).norm() < 1e-12 || (l + g).norm() < 1e-12);
            }
            assert!(set.diagonalizable);
        }
    }

    #[test]
    fn flux_forms_for_simple_states() {
        let c = pair(1.3);
        let one = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let f = decay_rate_flux(&one, &c);
        assert!((f.sinc_form - 1.0).abs() < 1e-14 && (f.quadrature - 1.0).abs() < 1e-13);
        let h = 1.0 / sqrt(2.0);
        let anti = [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)];
        let f = decay_rate_flux(&anti, &c);
        let exact = 1.0 - sin(1.3) / 1.3;
        assert!((f.sinc_form - exact).abs() < 1e-14);
        assert!((f.quadrature - exact).abs() < 1e-13);
    }

    #[test]
    fn emission_amplitude_cancels_for_antisymmetric_pair() {
        let c = pair(2.0 * PI);
        let h = 1.0 / sqrt(2.0);
        let anti = [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)];
        assert!(emission_amplitude(&anti, &c, &[0.0, 0.0, 1.0]).norm() < 1e-14);
        let single = Configuration::on_axis(&[0.0]).unwrap();
        let one = [Complex64::new(1.0, 0.0)];
        for d in [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8]] {
            assert!((emission_amplitude(&one, &single, &d) - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn defective_triangle_is_flagged() {
        let report = defective_case_probe(&defective_triangle()).unwrap();
        assert!(!report.diagonalizable, "{report:?}");
        assert!(report.cross_section_finite);
    }

    #[test]
    fn resonance_errors_when_not_diagonalizable() {
        let c = defective_triangle();
        let set = decompose(&build_green_matrix(&c).unwrap()).unwrap();
        let w = IncidentWave::along_z();
        assert!(matches!(
            set.resonance_cross_section(0, &w, &ScattererModel::resonant()),
            Err(Error::NotDiagonalizable(_))
        ));
        assert!(matches!(set.resonance_upper_bound(0, &w), Err(Error::NotDiagonalizable(_))));
    }
}
