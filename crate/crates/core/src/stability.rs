//! Monte-Carlo averages of an objective when every scatterer is displaced
//! uniformly inside a ball of radius `δr` around its nominal position.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::optimize::ObjectiveKind;
use crate::par::{map_indexed, pairwise_sum};
use crate::rng::{in_ball, stream};
use crate::scatter::Configuration;

/// Perturbed configurations with a pair closer than this are redrawn.
pub const RESAMPLE_BELOW: f64 = 1e-9;

/// Redraws allowed per sample before it counts as failed.
pub const MAX_REDRAWS: usize = 100;

/// Fraction of failed samples above which a scan is rejected.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

/// Displaces each scatterer independently and uniformly within `delta_r`.
/// Fails only when two displaced scatterers coincide.
pub fn perturb(base: &Configuration, delta_r: f64, rng: &mut impl RngCore) -> Result<Configuration> {
    if delta_r == 0.0 {
        return Ok(base.clone());
    }
    let positions = base
        .positions()
        .iter()
        .map(|p| {
            let d = in_ball(rng, delta_r);
            [p[0] + d[0], p[1] + d[1], p[2] + d[2]]
        })
        .collect();
    Configuration::new(positions)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityRequest {
    pub base: Configuration,
    /// `k·δr`.
    pub delta_r: f64,
    pub samples: usize,
    pub objective: ObjectiveKind,
    pub seed: u64,
    /// Probabilities in `[0, 1]` at which to report empirical quantiles.
    pub quantiles: Vec<f64>,
}

impl StabilityRequest {
    pub fn new(base: Configuration, delta_r: f64, objective: ObjectiveKind, seed: u64) -> Self {
        Self { base, delta_r, samples: 100_000, objective, seed, quantiles: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_r.is_finite() && self.delta_r >= 0.0) {
            return Err(Error::InvalidArgument("delta_r must be finite and non-negative"));
        }
        if self.samples == 0 {
            return Err(Error::InvalidArgument("at least one sample is required"));
        }
        if self.quantiles.iter().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::InvalidArgument("quantile probabilities must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityResult {
    pub mean: f64,
    /// Sample standard deviation over `√samples`.
    pub stderr: f64,
    /// Successfully evaluated samples.
    pub samples: usize,
    pub failed: usize,
    /// Redraws caused by near-coincident scatterers.
    pub resampled: usize,
    pub min: f64,
    pub max: f64,
    /// `(probability, value)` pairs, nearest-rank.
    pub quantiles: Vec<(f64, f64)>,
}

struct Sample {
    value: Option<f64>,
    redraws: usize,
}

fn draw(req: &StabilityRequest, index: usize) -> Sample {
    let mut rng = stream(req.seed, index as u64);
    let mut redraws = 0;
    loop {
        match perturb(&req.base, req.delta_r, &mut rng) {
            Ok(c) if c.min_distance() >= RESAMPLE_BELOW || c.len() == 1 => {
                return Sample { value: req.objective.evaluate(&c).ok().filter(|v| v.is_finite()), redraws };
            }
            _ => {
                redraws += 1;
                if redraws > MAX_REDRAWS {
                    return Sample { value: None, redraws };
                }
            }
        }
    }
}

/// Mean, spread and extremes of the objective over `req.samples` perturbations.
/// Sample `i` draws from stream `i` of `req.seed`.
pub fn stability_scan(req: &StabilityRequest) -> Result<StabilityResult> {
    req.validate()?;
    let draws = map_indexed(req.samples, |i| draw(req, i));
    let resampled = draws.iter().map(|s| s.redraws).sum();
    let values: Vec<f64> = draws.iter().filter_map(|s| s.value).collect();
    let failed = req.samples - values.len();
    if failed as f64 > MAX_FAILURE_FRACTION * req.samples as f64 || values.is_empty() {
        return Err(Error::ObjectiveFailure { failed, total: req.samples });
    }
    let n = values.len();
    let mean = pairwise_sum(&values) / n as f64;
    let stderr = if n > 1 {
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        sqrt(pairwise_sum(&sq) / (n - 1) as f64 / n as f64)
    } else {
        0.0
    };
    let mut sorted = values;
    sorted.sort_by(f64::total_cmp);
    let quantiles = req
        .quantiles
        .iter()
        .map(|&p| {
            let rank = crate::math::ceil(p * n as f64) as usize;
            (p, sorted[rank.clamp(1, n) - 1])
        })
        .collect();
    Ok(StabilityResult {
        mean: mean.clamp(sorted[0], sorted[n - 1]),
        stderr,
        samples: n,
        failed,
        resampled,
        min: sorted[0],
        max: sorted[n - 1],
        quantiles,
    })
}
