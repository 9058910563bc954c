//! Derivative-free downhill simplex minimization.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimplexSettings {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop when `(f_worst − f_best) ≤ tol · (|f_worst| + |f_best|)/2`.
    pub function_tolerance: f64,
    /// Stop when every vertex lies within this distance of the best one.
    pub domain_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SimplexSettings {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.1,
            function_tolerance: 1e-12,
            domain_tolerance: 1e-10,
            max_iterations: 20_000,
        }
    }
}

impl SimplexSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.reflection > 0.0
            && self.expansion > 1.0
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.initial_step > 0.0
            && self.function_tolerance > 0.0
            && self.domain_tolerance > 0.0
            && self.max_iterations >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("simplex settings out of range"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Termination {
    FunctionSpread,
    DomainSpread,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub termination: Termination,
}

/// Minimizes `objective` from `start`. Non-finite values rank as `+∞`, so the
/// offending vertex is replaced on the next move; only a non-finite value at
/// `start` is an error.
pub fn nelder_mead<F>(mut objective: F, start: &[f64], settings: &SimplexSettings) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> f64,
{
    settings.validate()?;
    let n = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let f0 = eval(start);
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    if n == 0 {
        return Ok(SimplexResult {
            x: Vec::new(),
            value: f0,
            iterations: 0,
            evaluations: 1,
            termination: Termination::DomainSpread,
        });
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    values.push(f0);
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += settings.initial_step;
        values.push(eval(&v));
        simplex.push(v);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut iterations = 0;
    let termination = loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];
        let (fb, fw) = (values[best], values[worst]);

        if fw.is_finite() && fw - fb <= settings.function_tolerance * 0.5 * (fw.abs() + fb.abs()) {
            break Termination::FunctionSpread;
        }
        let spread = simplex
            .iter()
            .map(|v| {
                sqrt(v.iter().zip(&simplex[best]).map(|(a, b)| (a - b) * (a - b)).sum())
            })
            .fold(0.0, f64::max);
        if spread < settings.domain_tolerance {
            break Termination::DomainSpread;
        }
        if iterations >= settings.max_iterations {
            break Termination::IterationLimit;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &k in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let along = |t: f64, out: &mut [f64], worst_v: &[f64]| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(worst_v) {
                *o = c + t * (c - w);
            }
        };

        along(settings.reflection, &mut trial, &simplex[worst]);
        let fr = eval(&trial);
        if fr < fb {
            along(settings.reflection * settings.expansion, &mut trial2, &simplex[worst]);
            let fe = eval(&trial2);
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }
        if fr < fw {
            along(settings.reflection * settings.contraction, &mut trial2, &simplex[worst]);
            let fc = eval(&trial2);
            if fc <= fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fc;
                continue;
            }
        } else {
            along(-settings.contraction, &mut trial2, &simplex[worst]);
            let fc = eval(&trial2);
            if fc < fw {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fc;
                continue;
            }
        }
        let anchor = simplex[best].clone();
        for &k in &order[1..] {
            for (x, a) in simplex[k].iter_mut().zip(&anchor) {
                *x = a + settings.shrink * (*x - a);
            }
            values[k] = eval(&simplex[k]);
        }
    };

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Ok(SimplexResult {
        x: simplex.swap_remove(best),
        value: values[best],
        iterations,
        evaluations,
        termination,
    })
}
