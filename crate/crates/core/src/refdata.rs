//! Published optimized configurations for `N = 8, 9` and the quadratic growth
//! fit of the maximal cross section.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scatter::Configuration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Family {
    /// Cross-section optimum without a central gap.
    Narrow,
    /// Cross-section optimum with a central gap.
    Wide,
    /// Minimal decay rate at exclusion radius `0.5`.
    Decay,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Narrow, Family::Wide, Family::Decay];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Narrow => "narrow",
            Family::Wide => "wide",
            Family::Decay => "decay",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "narrow" => Some(Family::Narrow),
            "wide" => Some(Family::Wide),
            "decay" => Some(Family::Decay),
            _ => None,
        }
    }
}

/// One tabulated configuration: scatterers on the `z` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceEntry {
    pub n: usize,
    pub family: Family,
    /// `k·z`, strictly increasing.
    pub positions: &'static [f64],
    /// `σ/σ_max^(1)` at `δ = 0`, wave along `+z`.
    pub sigma: f64,
    /// `γ_min/γ`.
    pub gamma_min: f64,
    pub note: &'static str,
}

impl ReferenceEntry {
    pub fn configuration(&self) -> Configuration {
        Configuration::on_axis(self.positions).expect("reference positions are distinct")
    }

    pub fn label(&self) -> alloc::string::String {
        alloc::format!("N={} {}", self.n, self.family.name())
    }
}

const CROSS_SECTION_NOTE: &str = "cross-section optimum; positions printed to 3 decimals";
const DECAY_NOTE: &str = "decay-rate optimum at k*r_excl = 0.5; positions printed to 5 decimals";

static ENTRIES: [ReferenceEntry; 6] = [
    ReferenceEntry {
        n: 8,
        family: Family::Narrow,
        positions: &[-8.341, -5.411, -2.908, -0.830, 0.830, 2.908, 5.411, 8.341],
        sigma: 23.6,
        gamma_min: 6.8e-3,
        note: CROSS_SECTION_NOTE,
    },
    ReferenceEntry {
        n: 8,
        family: Family::Wide,
        positions: &[-8.452, -5.667, -3.453, -2.004, 2.004, 3.453, 5.667, 8.452],
        sigma: 23.9,
        gamma_min: 1.7e-2,
        note: CROSS_SECTION_NOTE,
    },
    ReferenceEntry {
        n: 8,
        family: Family::Decay,
        positions: &[-3.32587, -1.92458, -0.95543, -0.25, 0.25, 0.95543, 1.92458, 3.32587],
        sigma: 1.3,
        gamma_min: 6.2e-10,
        note: DECAY_NOTE,
    },
    ReferenceEntry {
        n: 9,
        family: Family::Narrow,
        positions: &[-8.340, -5.458, -2.960, -0.843, 0.843, 2.851, 5.273, 8.100, 11.302],
        sigma: 26.1,
        gamma_min: 4.4e-3,
        note: CROSS_SECTION_NOTE,
    },
    ReferenceEntry {
        n: 9,
        family: Family::Wide,
        positions: &[-8.423, -5.679, -3.444, -1.989, 1.989, 3.460, 5.599, 8.301, 11.479],
        sigma: 26.2,
        gamma_min: 1.2e-2,
        note: CROSS_SECTION_NOTE,
    },
    ReferenceEntry {
        n: 9,
        family: Family::Decay,
        positions: &[-3.31104, -1.91837, -0.95357, -0.25, 0.25, 0.95338, 1.91681, 3.30431, 7.26926],
        sigma: 1.7,
        gamma_min: 4.6e-10,
        note: DECAY_NOTE,
    },
];

pub fn entries() -> &'static [ReferenceEntry] {
    &ENTRIES
}

pub fn get_reference(n: usize, family: Family) -> Result<&'static ReferenceEntry> {
    ENTRIES
        .iter()
        .find(|e| e.n == n && e.family == family)
        .ok_or(Error::NotAvailable(n))
}

/// Coefficients of `σ(N) = a N² + b N` with their quoted uncertainties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitCoefficients {
    pub a: f64,
    pub a_err: f64,
    pub b: f64,
    pub b_err: f64,
}

/// The published fit of the optimized cross sections.
pub const PUBLISHED_FIT: FitCoefficients = FitCoefficients { a: 0.172, a_err: 0.005, b: 1.43, b_err: 0.09 };

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    /// `σᵢ − (a Nᵢ² + b Nᵢ)` in input order.
    pub residuals: Vec<f64>,
}

/// Least-squares fit of `σ = a N² + b N` (no constant term).
pub fn quadratic_fit(points: &[(f64, f64)]) -> Result<QuadraticFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit);
    }
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit);
    }
    // Normal equations for the basis (N², N).
    let (mut s4, mut s3, mut s2, mut y2, mut y1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(n, s) in points {
        let n2 = n * n;
        s4 += n2 * n2;
        s3 += n2 * n;
        s2 += n2;
        y2 += s * n2;
        y1 += s * n;
    }
    let det = s4 * s2 - s3 * s3;
    if !(det.abs() > 1e-12 * s4 * s2) {
        return Err(Error::DegenerateFit);
    }
    let a = (y2 * s2 - y1 * s3) / det;
    let b = (s4 * y1 - s3 * y2) / det;
    let residuals = points.iter().map(|&(n, s)| s - (a * n * n + b * n)).collect();
    Ok(QuadraticFit { a, b, residuals })
}
