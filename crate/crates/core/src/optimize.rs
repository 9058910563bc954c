//! Random-restart downhill simplex search for configurations that maximize the
//! resonant cross section or minimize the smallest decay rate.
//!
//! Collinear searches parametrize a chain by its gaps, `gap = g_min + |x|`, so
//! the lower bound (exclusion radius or coincidence threshold) holds for every
//! simplex vertex. Free 3D searches under an exclusion radius rank infeasible
//! vertices by a quadratic penalty without evaluating them; since
//! `γ_min ≤ γ` always (the eigenvalues of `G` sum to zero), every feasible point
//! beats every infeasible one.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use crate::error::{Error, Result};
use crate::nelder_mead::{nelder_mead, SimplexSettings, Termination};
use crate::par::map_indexed;
use crate::resonance::{decompose, min_decay_rate};
use crate::rng::{in_ball, restart_stream, stream, uniform};
use crate::scatter::{
    build_green_matrix, dot, total_cross_section, Configuration, IncidentWave, ScattererModel,
    Vec3, COINCIDENCE_THRESHOLD,
};

/// Consecutive rejected draws after which a radius is declared infeasible.
pub const MAX_REJECTIONS: usize = 1_000_000;

/// Weight of the squared exclusion violation in free 3D searches.
pub const PENALTY_WEIGHT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ObjectiveKind {
    /// Maximize `σ(δ=0)/σ_max^(1)` for a wave along `+z`.
    #[cfg_attr(feature = "serde", serde(rename = "sigma"))]
    MaxCrossSection,
    /// Minimize `γ_min/γ`.
    #[cfg_attr(feature = "serde", serde(rename = "gamma_min"))]
    MinDecayRate,
}

impl ObjectiveKind {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveKind::MaxCrossSection => "sigma",
            ObjectiveKind::MinDecayRate => "gamma_min",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sigma" => Some(ObjectiveKind::MaxCrossSection),
            "gamma_min" => Some(ObjectiveKind::MinDecayRate),
            _ => None,
        }
    }

    /// The physical objective of `config`.
    pub fn evaluate(&self, config: &Configuration) -> Result<f64> {
        match self {
            ObjectiveKind::MaxCrossSection => {
                total_cross_section(config, &IncidentWave::along_z(), &ScattererModel::resonant())
            }
            ObjectiveKind::MinDecayRate => min_decay_rate(config),
        }
    }

    /// Value in minimization form.
    pub fn cost(&self, value: f64) -> f64 {
        match self {
            ObjectiveKind::MaxCrossSection => -value,
            ObjectiveKind::MinDecayRate => value,
        }
    }

    pub fn is_better(&self, a: f64, b: f64) -> bool {
        self.cost(a) < self.cost(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    /// `k·r_excl`; only used by [`ObjectiveKind::MinDecayRate`].
    pub exclusion_radius: Option<f64>,
}

impl ObjectiveSpec {
    pub fn max_cross_section() -> Self {
        Self { kind: ObjectiveKind::MaxCrossSection, exclusion_radius: None }
    }

    pub fn min_decay_rate(exclusion_radius: f64) -> Result<Self> {
        let spec = Self { kind: ObjectiveKind::MinDecayRate, exclusion_radius: Some(exclusion_radius) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.exclusion_radius) {
            (ObjectiveKind::MaxCrossSection, None) => Ok(()),
            (ObjectiveKind::MaxCrossSection, Some(_)) => {
                Err(Error::InvalidArgument("the exclusion radius only applies to gamma_min"))
            }
            (ObjectiveKind::MinDecayRate, Some(r)) if r.is_finite() && r > 0.0 => Ok(()),
            (ObjectiveKind::MinDecayRate, _) => {
                Err(Error::InvalidArgument("gamma_min needs a positive exclusion radius"))
            }
        }
    }

    /// Smallest allowed pairwise distance.
    pub fn min_separation(&self) -> f64 {
        match self.kind {
            ObjectiveKind::MaxCrossSection => COINCIDENCE_THRESHOLD,
            ObjectiveKind::MinDecayRate => self.exclusion_radius.unwrap_or(COINCIDENCE_THRESHOLD),
        }
    }

    pub fn evaluate(&self, config: &Configuration) -> Result<f64> {
        self.kind.evaluate(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchMode {
    Free3D,
    Line,
    /// Mirror-symmetric chains about `z = 0`; even `N` only.
    SymmetricLine,
    /// Grow a collinear `N − 2` configuration by one scatterer at each end.
    ExtendFromSeed(Configuration),
}

impl SearchMode {
    pub fn name(&self) -> &'static str {
        match self {
            SearchMode::Free3D => "free",
            SearchMode::Line => "line",
            SearchMode::SymmetricLine => "symline",
            SearchMode::ExtendFromSeed(_) => "extend",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizerSettings {
    pub random_samples_per_radius: usize,
    pub restarts_per_radius: usize,
    /// Sampling-sphere radii `k·R`.
    pub radii: Vec<f64>,
    pub simplex: SimplexSettings,
    /// Extra simplex runs restarted from the previous result while they still
    /// improve it.
    pub polish_rounds: usize,
    pub seed: u64,
    pub keep_best: usize,
}

impl OptimizerSettings {
    /// Reduced budget: 500 samples × 50 restarts per radius, `kR = 1..12`.
    pub fn desk(seed: u64) -> Self {
        Self {
            random_samples_per_radius: 500,
            restarts_per_radius: 50,
            radii: (1..=12).map(|r| r as f64).collect(),
            simplex: SimplexSettings::default(),
            polish_rounds: 2,
            seed,
            keep_best: 10,
        }
    }

    /// 10 000 samples × 1000 restarts per radius, `kR = 1..12`.
    pub fn paper(seed: u64) -> Self {
        Self { random_samples_per_radius: 10_000, restarts_per_radius: 1000, ..Self::desk(seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.random_samples_per_radius == 0 || self.restarts_per_radius == 0 || self.keep_best == 0 {
            return Err(Error::InvalidArgument("optimizer counts must be at least 1"));
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidArgument("sampling radii must be positive"));
        }
        self.simplex.validate()
    }
}

/// One retained configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Candidate {
    pub configuration: Configuration,
    /// `σ/σ_max^(1)` or `γ_min/γ`.
    pub objective: f64,
    /// `minₙ |Σᵢ cᵢ²|` of the Green matrix.
    pub defect_score: f64,
    pub radius: f64,
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RestartTrace {
    pub radius_index: usize,
    pub radius: f64,
    pub restart: usize,
    /// Best random sample (objective units).
    pub sampled: f64,
    /// After the simplex.
    pub polished: f64,
    /// Best over this and all earlier restarts in index order.
    pub running_best: f64,
    pub iterations: usize,
    pub evaluations: u64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizationReport {
    pub n: usize,
    pub objective: ObjectiveSpec,
    pub mode: String,
    pub seed: u64,
    /// Best first, near-duplicates removed.
    pub best: Vec<Candidate>,
    pub restarts: Vec<RestartTrace>,
    pub evaluations: u64,
    /// Radii at which no feasible configuration could be drawn.
    pub skipped_radii: Vec<f64>,
}

impl OptimizationReport {
    pub fn best_objective(&self) -> Option<f64> {
        self.best.first().map(|c| c.objective)
    }

    pub fn best_configuration(&self) -> Option<&Configuration> {
        self.best.first().map(|c| &c.configuration)
    }
}

/// Map from simplex parameters to positions.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    Free { n: usize },
    /// `n − 1` gaps.
    Line { n: usize, min_gap: f64 },
    /// Central gap, then the `n/2 − 1` outer gaps of one half.
    Symmetric { n: usize, min_gap: f64 },
}

impl Layout {
    fn z_of(&self, params: &[f64]) -> Vec<f64> {
        match *self {
            Layout::Free { .. } => unreachable!("free layouts are not collinear"),
            Layout::Line { n, min_gap } => {
                let mut z = Vec::with_capacity(n);
                z.push(0.0);
                for x in params {
                    let last = z[z.len() - 1];
                    z.push(last + min_gap + x.abs());
                }
                z
            }
            Layout::Symmetric { n, min_gap } => {
                let m = n / 2;
                let mut half = Vec::with_capacity(m);
                half.push(0.5 * (min_gap + params[0].abs()));
                for x in &params[1..] {
                    let last = half[half.len() - 1];
                    half.push(last + min_gap + x.abs());
                }
                half.iter().rev().map(|p| -p).chain(half.iter().copied()).collect()
            }
        }
    }

    fn positions(&self, params: &[f64]) -> Vec<Vec3> {
        match *self {
            Layout::Free { .. } => params.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
            _ => self.z_of(params).into_iter().map(|z| [0.0, 0.0, z]).collect(),
        }
    }

    /// Parameters of a sorted chain `z`.
    fn params_of_chain(&self, z: &[f64]) -> Vec<f64> {
        match *self {
            Layout::Line { min_gap, .. } => z.windows(2).map(|w| w[1] - w[0] - min_gap).collect(),
            Layout::Symmetric { n, min_gap } => {
                let m = n / 2;
                let mut p = vec![z[m] - z[m - 1] - min_gap];
                p.extend(z[m..].windows(2).map(|w| w[1] - w[0] - min_gap));
                p
            }
            Layout::Free { .. } => z.iter().flat_map(|&z| [0.0, 0.0, z]).collect(),
        }
    }

    /// A random parameter vector drawn from the sphere (segment) of `radius`,
    /// or `None` when the separation bound cannot be met there.
    fn sample(&self, rng: &mut impl rand_core::RngCore, radius: f64, min_sep: f64) -> Option<Vec<f64>> {
        match *self {
            Layout::Free { n } => {
                // Balls of diameter `min_sep` around the points must fit in `radius + min_sep/2`.
                let half = 0.5 * min_sep;
                let outer = radius + half;
                if (n > 1 && min_sep > 2.0 * radius) || n as f64 * half * half * half > outer * outer * outer {
                    return None;
                }
                let mut pts: Vec<Vec3> = Vec::with_capacity(n);
                let mut rejected = 0;
                while pts.len() < n {
                    let p = in_ball(rng, radius);
                    if pts.iter().all(|q| distance(&p, q) >= min_sep) {
                        pts.push(p);
                        rejected = 0;
                    } else {
                        rejected += 1;
                        if rejected >= MAX_REJECTIONS {
                            return None;
                        }
                    }
                }
                Some(pts.into_iter().flatten().collect())
            }
            Layout::Line { n, min_gap } => {
                let free = 2.0 * radius - (n - 1) as f64 * min_gap;
                if free < 0.0 {
                    return None;
                }
                let u = sorted_uniform(rng, n, free);
                Some(u.windows(2).map(|w| w[1] - w[0]).collect())
            }
            Layout::Symmetric { n, min_gap } => {
                let m = n / 2;
                let free = radius - 0.5 * min_gap - (m - 1) as f64 * min_gap;
                if free < 0.0 {
                    return None;
                }
                let u = sorted_uniform(rng, m, free);
                let mut p = vec![2.0 * u[0]];
                p.extend(u.windows(2).map(|w| w[1] - w[0]));
                Some(p)
            }
        }
    }

    fn canonical(&self, params: &[f64]) -> Configuration {
        let positions = self.positions(params);
        match self {
            Layout::Free { .. } => centered(positions),
            _ => {
                let z: Vec<f64> = positions.iter().map(|p| p[2]).collect();
                Configuration::on_axis(&canonical_chain(&z))
                    .unwrap_or_else(|_| centered(positions))
            }
        }
    }
}

fn distance(a: &Vec3, b: &Vec3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    crate::math::sqrt(dot(&d, &d))
}

fn sorted_uniform(rng: &mut impl rand_core::RngCore, count: usize, length: f64) -> Vec<f64> {
    let mut u: Vec<f64> = (0..count).map(|_| length * uniform(rng)).collect();
    u.sort_by(f64::total_cmp);
    u
}

fn centered(positions: Vec<Vec3>) -> Configuration {
    let n = positions.len() as f64;
    let mut c = [0.0; 3];
    for p in &positions {
        for k in 0..3 {
            c[k] += p[k] / n;
        }
    }
    let shifted = positions.iter().map(|p| [p[0] - c[0], p[1] - c[1], p[2] - c[2]]).collect();
    Configuration::new(shifted).unwrap_or_else(|_| Configuration::new(positions).expect("valid"))
}

/// Fixes translation and mirror orientation of a chain.
///
/// The chain is sorted and shifted so that the middle pair (the two scatterers
/// closest to the centre by index) sits at `±z₀`. For odd `N` the orientation
/// whose remaining core is the more mirror-symmetric is kept, which puts the
/// extra scatterer at `+z`; for even `N` the larger outer gap goes to `+z`.
pub fn canonical_chain(z: &[f64]) -> Vec<f64> {
    let mut z = z.to_vec();
    z.sort_by(f64::total_cmp);
    let n = z.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let centre = |z: &[f64]| -> Vec<f64> {
        let (a, b) = if n % 2 == 0 { (n / 2 - 1, n / 2) } else { ((n - 3) / 2, (n - 1) / 2) };
        let mid = 0.5 * (z[a] + z[b]);
        z.iter().map(|x| x - mid).collect()
    };
    let forward = centre(&z);
    let mirrored: Vec<f64> = z.iter().rev().map(|x| -x).collect();
    let backward = centre(&mirrored);
    let keep_forward = if n % 2 == 1 {
        let m = (n - 1) / 2;
        let asym = |c: &[f64]| (0..m).map(|k| (c[m - 1 - k] + c[m + k]).abs()).sum::<f64>();
        let (fa, ba) = (asym(&forward), asym(&backward));
        if (fa - ba).abs() <= 1e-9 * (1.0 + fa.max(ba)) {
            forward[n - 1] >= backward[n - 1]
        } else {
            fa < ba
        }
    } else {
        let outer = |c: &[f64]| (c[n - 1] - c[n - 2]) - (c[1] - c[0]);
        outer(&forward) >= -1e-12
    };
    if keep_forward {
        forward
    } else {
        backward
    }
}

/// True when the sorted pairwise distances of `a` and `b` agree within `tol`.
fn same_shape(a: &Configuration, b: &Configuration, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let sig = |c: &Configuration| {
        let mut d = Vec::with_capacity(c.len() * c.len() / 2);
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                d.push(c.distance(i, j));
            }
        }
        d.sort_by(f64::total_cmp);
        d
    };
    sig(a).iter().zip(&sig(b)).all(|(x, y)| (x - y).abs() <= tol)
}

const DUPLICATE_TOLERANCE: f64 = 1e-4;

struct Problem {
    layout: Layout,
    objective: ObjectiveSpec,
}

impl Problem {
    fn new(n: usize, objective: ObjectiveSpec, mode: &SearchMode) -> Result<Self> {
        objective.validate()?;
        let min_gap = objective.min_separation();
        let layout = match mode {
            SearchMode::Free3D => Layout::Free { n },
            SearchMode::Line | SearchMode::ExtendFromSeed(_) => Layout::Line { n, min_gap },
            SearchMode::SymmetricLine => {
                if n % 2 != 0 {
                    return Err(Error::InvalidArgument("symmetric line mode needs an even N"));
                }
                Layout::Symmetric { n, min_gap }
            }
        };
        Ok(Self { layout, objective })
    }

    /// Minimization form; `+∞` where the objective cannot be evaluated.
    fn cost(&self, params: &[f64], evaluations: &Cell<u64>) -> f64 {
        let positions = self.layout.positions(params);
        if let (Layout::Free { .. }, Some(r)) = (self.layout, self.objective.exclusion_radius) {
            let mut violation = 0.0;
            for i in 0..positions.len() {
                for j in i + 1..positions.len() {
                    let short = r - distance(&positions[i], &positions[j]);
                    if short > 0.0 {
                        violation += short * short;
                    }
                }
            }
            if violation > 0.0 {
                return 1.0 + PENALTY_WEIGHT * violation;
            }
        }
        let Ok(config) = Configuration::new(positions) else {
            return f64::INFINITY;
        };
        evaluations.set(evaluations.get() + 1);
        match self.objective.evaluate(&config) {
            Ok(v) => self.objective.kind.cost(v),
            Err(_) => f64::INFINITY,
        }
    }

    /// Simplex from `start`, restarted while it keeps improving.
    fn polish(
        &self,
        start: &[f64],
        settings: &OptimizerSettings,
        evaluations: &Cell<u64>,
    ) -> Result<(Vec<f64>, f64, usize, Termination)> {
        let f = |x: &[f64]| self.cost(x, evaluations);
        let mut r = nelder_mead(f, start, &settings.simplex)?;
        let mut iterations = r.iterations;
        for _ in 0..settings.polish_rounds {
            let again = nelder_mead(f, &r.x, &settings.simplex)?;
            iterations += again.iterations;
            let gain = r.value - again.value;
            let improved = again.value < r.value;
            if improved {
                r = again;
            }
            if !(gain > settings.simplex.function_tolerance * r.value.abs()) {
                break;
            }
        }
        Ok((r.x, r.value, iterations, r.termination))
    }

    fn physical(&self, cost: f64) -> f64 {
        self.objective.kind.cost(cost)
    }
}

struct RestartOutcome {
    trace: RestartTrace,
    candidate: Option<Candidate>,
    infeasible: bool,
}

fn run_restart(
    problem: &Problem,
    settings: &OptimizerSettings,
    radius_index: usize,
    restart: usize,
) -> Result<RestartOutcome> {
    let radius = settings.radii[radius_index];
    let mut rng = stream(settings.seed, restart_stream(radius_index, restart));
    let evaluations = Cell::new(0u64);
    let min_sep = problem.objective.min_separation();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut infeasible = false;
    for _ in 0..settings.random_samples_per_radius {
        let Some(p) = problem.layout.sample(&mut rng, radius, min_sep) else {
            infeasible = true;
            break;
        };
        let c = problem.cost(&p, &evaluations);
        if c.is_finite() && best.as_ref().is_none_or(|b| c < b.1) {
            best = Some((p, c));
        }
    }
    let mut trace = RestartTrace {
        radius_index,
        radius,
        restart,
        sampled: f64::NAN,
        polished: f64::NAN,
        running_best: f64::NAN,
        iterations: 0,
        evaluations: 0,
        termination: Termination::IterationLimit,
    };
    let Some((start, start_cost)) = best else {
        trace.evaluations = evaluations.get();
        return Ok(RestartOutcome { trace, candidate: None, infeasible });
    };
    trace.sampled = problem.physical(start_cost);
    let (x, _, iterations, termination) = problem.polish(&start, settings, &evaluations)?;
    let configuration = problem.layout.canonical(&x);
    let objective = problem.objective.evaluate(&configuration);
    evaluations.set(evaluations.get() + 1);
    trace.iterations = iterations;
    trace.termination = termination;
    trace.evaluations = evaluations.get();
    let candidate = objective.ok().map(|objective| {
        trace.polished = objective;
        Candidate { configuration, objective, defect_score: f64::NAN, radius, restart }
    });
    Ok(RestartOutcome { trace, candidate, infeasible: false })
}

/// Sorts, removes near-duplicates, keeps `keep` and fills in defect scores.
fn select_best(kind: ObjectiveKind, mut all: Vec<Candidate>, keep: usize) -> Vec<Candidate> {
    // Stable: ties keep restart order.
    all.sort_by(|a, b| kind.cost(a.objective).total_cmp(&kind.cost(b.objective)));
    let mut kept: Vec<Candidate> = Vec::new();
    for c in all {
        if kept.len() >= keep {
            break;
        }
        if kept.iter().any(|k| same_shape(&k.configuration, &c.configuration, DUPLICATE_TOLERANCE)) {
            continue;
        }
        kept.push(c);
    }
    for c in &mut kept {
        c.defect_score = defect_score(&c.configuration);
    }
    kept
}

fn defect_score(config: &Configuration) -> f64 {
    build_green_matrix(config)
        .and_then(|g| decompose(&g))
        .map(|s| s.defect_score)
        .unwrap_or(f64::NAN)
}

fn fill_running_best(kind: ObjectiveKind, traces: &mut [RestartTrace]) {
    let mut best = f64::NAN;
    for t in traces {
        if t.polished.is_finite() && (best.is_nan() || kind.is_better(t.polished, best)) {
            best = t.polished;
        }
        t.running_best = best;
    }
}

fn trivial_report(objective: ObjectiveSpec, mode: &SearchMode, settings: &OptimizerSettings) -> Result<OptimizationReport> {
    let configuration = Configuration::on_axis(&[0.0])?;
    let value = objective.evaluate(&configuration)?;
    Ok(OptimizationReport {
        n: 1,
        objective,
        mode: mode.name().into(),
        seed: settings.seed,
        best: vec![Candidate { configuration, objective: value, defect_score: 1.0, radius: 0.0, restart: 0 }],
        restarts: Vec::new(),
        evaluations: 1,
        skipped_radii: Vec::new(),
    })
}

/// Random-restart search: for every radius, `restarts_per_radius` times, draw
/// `random_samples_per_radius` random configurations, run the simplex from the
/// best one, and keep the `keep_best` distinct best results overall.
pub fn random_restart_search(
    n: usize,
    objective: ObjectiveSpec,
    mode: SearchMode,
    settings: &OptimizerSettings,
) -> Result<OptimizationReport> {
    settings.validate()?;
    objective.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1"));
    }
    if let SearchMode::ExtendFromSeed(seed) = &mode {
        if seed.len() + 2 != n {
            return Err(Error::InvalidArgument("the seed must have N - 2 scatterers"));
        }
        return extend_and_polish(seed, objective, settings);
    }
    if n == 1 {
        return trivial_report(objective, &mode, settings);
    }
    let problem = Problem::new(n, objective, &mode)?;
    let restarts = settings.restarts_per_radius;
    let total = settings.radii.len() * restarts;
    let outcomes = map_indexed(total, |k| run_restart(&problem, settings, k / restarts, k % restarts));

    let mut traces = Vec::with_capacity(total);
    let mut candidates = Vec::new();
    let mut feasible = vec![false; settings.radii.len()];
    let mut evaluations = 0u64;
    for outcome in outcomes {
        let outcome = outcome?;
        if !outcome.infeasible {
            feasible[outcome.trace.radius_index] = true;
        }
        evaluations += outcome.trace.evaluations;
        candidates.extend(outcome.candidate);
        traces.push(outcome.trace);
    }
    if candidates.is_empty() {
        return Err(if feasible.iter().any(|f| *f) {
            Error::ObjectiveFailure { failed: total, total }
        } else {
            Error::InfeasibleExclusion
        });
    }
    fill_running_best(objective.kind, &mut traces);
    let skipped_radii = settings
        .radii
        .iter()
        .zip(&feasible)
        .filter(|(_, f)| !**f)
        .map(|(r, _)| *r)
        .collect();
    Ok(OptimizationReport {
        n,
        objective,
        mode: mode.name().into(),
        seed: settings.seed,
        best: select_best(objective.kind, candidates, settings.keep_best),
        restarts: traces,
        evaluations,
        skipped_radii,
    })
}

/// Random-restart search restricted to chains on the `z` axis.
pub fn optimize_line(
    n: usize,
    objective: ObjectiveSpec,
    symmetric: bool,
    settings: &OptimizerSettings,
) -> Result<OptimizationReport> {
    let mode = if symmetric { SearchMode::SymmetricLine } else { SearchMode::Line };
    random_restart_search(n, objective, mode, settings)
}

/// Sorted coordinates of a collinear configuration along its axis.
fn chain_coordinates(config: &Configuration) -> Result<Vec<f64>> {
    let axis = config.collinear_axis().ok_or(Error::NotCollinear)?;
    let origin = config.positions()[0];
    let mut z: Vec<f64> = config
        .positions()
        .iter()
        .map(|p| dot(&[p[0] - origin[0], p[1] - origin[1], p[2] - origin[2]], &axis))
        .collect();
    z.sort_by(f64::total_cmp);
    Ok(z)
}

/// Local simplex polish of a collinear configuration in its gaps, keeping it on
/// the `z` axis. Symmetric polishing keeps an even chain mirror-symmetric.
pub fn polish_chain(
    config: &Configuration,
    objective: ObjectiveSpec,
    symmetric: bool,
    settings: &OptimizerSettings,
) -> Result<OptimizationReport> {
    settings.validate()?;
    let z = chain_coordinates(config)?;
    let n = z.len();
    let mode = if symmetric { SearchMode::SymmetricLine } else { SearchMode::Line };
    if n == 1 {
        return trivial_report(objective, &mode, settings);
    }
    let problem = Problem::new(n, objective, &mode)?;
    let min_gap = objective.min_separation();
    if z.windows(2).any(|w| w[1] - w[0] < min_gap - 1e-12) {
        return Err(Error::InfeasibleExclusion);
    }
    let start = problem.layout.params_of_chain(&z);
    polish_from(&problem, &start, &mode, settings)
}

fn polish_from(
    problem: &Problem,
    start: &[f64],
    mode: &SearchMode,
    settings: &OptimizerSettings,
) -> Result<OptimizationReport> {
    let evaluations = Cell::new(0u64);
    let start_cost = problem.cost(start, &evaluations);
    let (x, _, iterations, termination) = problem.polish(start, settings, &evaluations)?;
    let configuration = problem.layout.canonical(&x);
    let objective = problem.objective.evaluate(&configuration)?;
    evaluations.set(evaluations.get() + 1);
    let trace = RestartTrace {
        radius_index: 0,
        radius: 0.0,
        restart: 0,
        sampled: problem.physical(start_cost),
        polished: objective,
        running_best: objective,
        iterations,
        evaluations: evaluations.get(),
        termination,
    };
    let candidate = Candidate { configuration, objective, defect_score: f64::NAN, radius: 0.0, restart: 0 };
    Ok(OptimizationReport {
        n: candidate.configuration.len(),
        objective: problem.objective,
        mode: mode.name().into(),
        seed: settings.seed,
        best: select_best(problem.objective.kind, vec![candidate], 1),
        restarts: vec![trace],
        evaluations: evaluations.get(),
        skipped_radii: Vec::new(),
    })
}

/// Gap used to grow a single scatterer, which has no gap of its own: the
/// resonant pair optimum for the cross section, the exclusion radius for the
/// decay rate.
pub fn default_seed_gap(objective: &ObjectiveSpec) -> f64 {
    match objective.kind {
        ObjectiveKind::MaxCrossSection => PAIR_OPTIMAL_GAP,
        ObjectiveKind::MinDecayRate => objective.min_separation(),
    }
}

/// `k·d` maximizing `σ(δ=0)` of two scatterers aligned with the wave.
pub const PAIR_OPTIMAL_GAP: f64 = 1.533_879_72;

/// Appends one scatterer beyond each end of a collinear `N − 2` seed, at the
/// seed's outermost gap on that side, then polishes all gaps.
pub fn extend_and_polish(
    seed: &Configuration,
    objective: ObjectiveSpec,
    settings: &OptimizerSettings,
) -> Result<OptimizationReport> {
    settings.validate()?;
    objective.validate()?;
    let z = chain_coordinates(seed)?;
    let n = z.len() + 2;
    let min_gap = objective.min_separation();
    if z.windows(2).any(|w| w[1] - w[0] < min_gap - 1e-12) {
        return Err(Error::InfeasibleExclusion);
    }
    let (left, right) = if z.len() >= 2 {
        (z[1] - z[0], z[z.len() - 1] - z[z.len() - 2])
    } else {
        let g = default_seed_gap(&objective);
        (g, g)
    };
    let mut grown = Vec::with_capacity(n);
    grown.push(z[0] - left.max(min_gap));
    grown.extend_from_slice(&z);
    grown.push(z[z.len() - 1] + right.max(min_gap));
    let mode = SearchMode::ExtendFromSeed(seed.clone());
    let problem = Problem::new(n, objective, &mode)?;
    let start = problem.layout.params_of_chain(&grown);
    polish_from(&problem, &start, &mode, settings)
}

/// Objective of `N` equally spaced scatterers on the `z` axis.
pub fn regular_chain_baseline(n: usize, spacing: f64, kind: ObjectiveKind) -> Result<f64> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidArgument("spacing must be positive"));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1"));
    }
    let half = 0.5 * (n - 1) as f64;
    let z: Vec<f64> = (0..n).map(|k| (k as f64 - half) * spacing).collect();
    kind.evaluate(&Configuration::on_axis(&z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::sin;

    fn tiny(seed: u64) -> OptimizerSettings {
        OptimizerSettings {
            random_samples_per_radius: 40,
            restarts_per_radius: 3,
            radii: vec![2.0, 4.0],
            ..OptimizerSettings::desk(seed)
        }
    }

    #[test]
    fn canonical_chain_odd_and_even() {
        let z = canonical_chain(&[3.0, 0.0, 1.0, 7.0, 4.0]);
        // Sorted [0,1,3,4,7]: middle pair (indices 1, 2) at ±1.
        assert_eq!(z, vec![-2.0, -1.0, 1.0, 2.0, 5.0]);
        let m = canonical_chain(&[-7.0, -4.0, -3.0, -1.0, 0.0]);
        assert_eq!(m, z);
        let e = canonical_chain(&[5.0, 1.0, 2.0, 0.0]);
        assert_eq!(e, vec![-1.5, -0.5, 0.5, 3.5]);
        assert_eq!(canonical_chain(&[-3.5, -0.5, 0.5, 1.5]), e);
    }

    #[test]
    fn canonical_chain_keeps_symmetric_core() {
        // Symmetric 4-core plus an extra scatterer far to the left.
        let z = canonical_chain(&[-9.0, -2.0, -1.0, 1.0, 2.0]);
        assert_eq!(z, vec![-2.0, -1.0, 1.0, 2.0, 9.0]);
    }

    #[test]
    fn layouts_round_trip() {
        let chain = [-2.0, -1.25, 0.5, 0.75];
        let l = Layout::Line { n: 4, min_gap: 0.1 };
        let p = l.params_of_chain(&chain);
        let back = l.z_of(&p);
        for (a, b) in back.iter().zip(&chain) {
            assert!((a - (b + 2.0)).abs() < 1e-14);
        }
        let s = Layout::Symmetric { n: 6, min_gap: 0.5 };
        let chain = [-3.0, -1.5, -0.25, 0.25, 1.5, 3.0];
        assert_eq!(s.z_of(&s.params_of_chain(&chain)), chain);
    }

    #[test]
    fn samples_respect_bounds() {
        let mut rng = stream(3, 0);
        let s = Layout::Symmetric { n: 6, min_gap: 0.5 };
        for _ in 0..100 {
            let z = s.z_of(&s.sample(&mut rng, 3.0, 0.5).unwrap());
            assert!(z.windows(2).all(|w| w[1] - w[0] >= 0.5 - 1e-12));
            assert!(z.iter().all(|x| x.abs() <= 3.0 + 1e-12));
        }
        assert!(s.sample(&mut rng, 1.0, 0.5).is_none());
        let l = Layout::Line { n: 5, min_gap: 0.5 };
        for _ in 0..100 {
            let z = l.z_of(&l.sample(&mut rng, 2.0, 0.5).unwrap());
            assert!(z.windows(2).all(|w| w[1] - w[0] >= 0.5 - 1e-12));
            assert!(z[4] - z[0] <= 4.0 + 1e-12);
        }
    }

    #[test]
    fn pair_optimal_gap_is_stationary() {
        let f = |d: f64| regular_chain_baseline(2, d, ObjectiveKind::MaxCrossSection).unwrap();
        let h = 1e-4;
        let s0 = f(PAIR_OPTIMAL_GAP);
        assert!(s0 > f(PAIR_OPTIMAL_GAP - h) && s0 > f(PAIR_OPTIMAL_GAP + h));
        for d in [0.5, 1.0, 2.0, 3.5, 6.0, 9.0, 11.0] {
            assert!(f(d) < s0);
        }
    }

    #[test]
    fn baseline_pair_closed_form() {
        for d in [0.5, 1.3, 4.0] {
            let g = regular_chain_baseline(2, d, ObjectiveKind::MinDecayRate).unwrap();
            assert!((g - (1.0 - (sin(d) / d).abs())).abs() < 1e-12);
        }
        assert!(regular_chain_baseline(3, 0.0, ObjectiveKind::MinDecayRate).is_err());
    }

    #[test]
    fn search_is_reproducible() {
        let a = optimize_line(3, ObjectiveSpec::max_cross_section(), false, &tiny(11)).unwrap();
        let b = optimize_line(3, ObjectiveSpec::max_cross_section(), false, &tiny(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.restarts.len(), 6);
        let best = a.best_objective().unwrap();
        assert!(best > 3.0);
        for w in a.best.windows(2) {
            assert!(w[0].objective >= w[1].objective);
        }
        for w in a.restarts.windows(2) {
            assert!(w[1].running_best >= w[0].running_best);
        }
    }

    #[test]
    fn decay_pair_sits_on_the_exclusion_radius() {
        let obj = ObjectiveSpec::min_decay_rate(0.5).unwrap();
        let r = optimize_line(2, obj, false, &tiny(5)).unwrap();
        let c = r.best_configuration().unwrap();
        assert!((c.distance(0, 1) - 0.5).abs() < 1e-8);
        assert!((r.best_objective().unwrap() - (1.0 - sin(0.5) / 0.5)).abs() < 1e-8);
    }

    #[test]
    fn free_search_stays_feasible() {
        let obj = ObjectiveSpec::min_decay_rate(0.8).unwrap();
        let s = OptimizerSettings { random_samples_per_radius: 20, restarts_per_radius: 2, radii: vec![1.5], ..tiny(2) };
        let r = random_restart_search(3, obj, SearchMode::Free3D, &s).unwrap();
        for c in &r.best {
            assert!(c.configuration.min_distance() >= 0.8 - 1e-12);
            assert!(c.objective < 1.0);
        }
    }

    #[test]
    fn infeasible_radii() {
        let obj = ObjectiveSpec::min_decay_rate(1.0).unwrap();
        let s = OptimizerSettings { radii: vec![1.0, 3.0], ..tiny(1) };
        let r = optimize_line(4, obj, true, &s).unwrap();
        assert_eq!(r.skipped_radii, vec![1.0]);
        let s = OptimizerSettings { radii: vec![1.0], ..tiny(1) };
        assert_eq!(optimize_line(4, obj, true, &s), Err(Error::InfeasibleExclusion));
        assert!(optimize_line(3, obj, true, &s).is_err());
    }

    #[test]
    fn single_scatterer_is_trivial() {
        let r = random_restart_search(1, ObjectiveSpec::max_cross_section(), SearchMode::Free3D, &tiny(0)).unwrap();
        assert_eq!(r.best_objective(), Some(1.0));
    }

    #[test]
    fn objective_spec_validation() {
        assert!(ObjectiveSpec::min_decay_rate(0.0).is_err());
        assert!(ObjectiveSpec::min_decay_rate(f64::NAN).is_err());
        let bad = ObjectiveSpec { kind: ObjectiveKind::MaxCrossSection, exclusion_radius: Some(1.0) };
        assert!(bad.validate().is_err());
    }
}
