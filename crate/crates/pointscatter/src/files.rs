//! JSON configuration, job and report files.

use std::fs;
use std::path::{Path, PathBuf};

use pointscatter_core::optimize::{ObjectiveKind, ObjectiveSpec, OptimizationReport, OptimizerSettings, SearchMode};
use pointscatter_core::refdata::ReferenceEntry;
use pointscatter_core::{Configuration, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `{"k_positions": [[x, y, z], ...], "label": "..."}`; positions are `k·r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub k_positions: Vec<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ConfigFile {
    pub fn new(config: &Configuration, label: Option<String>) -> Self {
        Self { k_positions: config.positions().to_vec(), label }
    }

    pub fn configuration(&self) -> Result<Configuration, CliError> {
        Configuration::new(self.k_positions.clone()).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))
    }

    pub fn from_reference(entry: &ReferenceEntry) -> Self {
        Self::new(&entry.configuration(), Some(entry.label()))
    }
}

pub fn read_config(path: &Path) -> Result<Configuration, CliError> {
    read_json::<ConfigFile>(path)?.configuration()
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobMode {
    Free,
    Line,
    Symline,
    Extend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Desk,
    Paper,
}

/// One optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub n: usize,
    pub objective: ObjectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_r_excl: Option<f64>,
    pub mode: JobMode,
    pub seed: u64,
    pub budget: Budget,
    /// Configuration file of the `N − 2` seed for `extend`, relative to the job file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_config: Option<PathBuf>,
}

/// A validated job ready to run.
#[derive(Debug, Clone)]
pub struct PreparedJob {
    pub n: usize,
    pub objective: ObjectiveSpec,
    pub mode: SearchMode,
    pub settings: OptimizerSettings,
}

impl Job {
    /// Checks the job and loads its seed configuration; `base` resolves
    /// relative `seed_config` paths.
    pub fn prepare(&self, base: &Path) -> Result<PreparedJob, CliError> {
        let usage = |m: &str| CliError::Usage(m.to_string());
        if self.n == 0 {
            return Err(usage("n must be at least 1"));
        }
        let objective = match (self.objective, self.k_r_excl) {
            (ObjectiveKind::MaxCrossSection, None) => ObjectiveSpec::max_cross_section(),
            (ObjectiveKind::MaxCrossSection, Some(_)) => return Err(usage("k_r_excl only applies to gamma_min")),
            (ObjectiveKind::MinDecayRate, Some(r)) => {
                ObjectiveSpec::min_decay_rate(r).map_err(|e| CliError::Usage(e.to_string()))?
            }
            (ObjectiveKind::MinDecayRate, None) => return Err(usage("gamma_min jobs need k_r_excl")),
        };
        let mode = match self.mode {
            JobMode::Free => SearchMode::Free3D,
            JobMode::Line => SearchMode::Line,
            JobMode::Symline => {
                if self.n % 2 != 0 {
                    return Err(usage("symline needs an even n"));
                }
                SearchMode::SymmetricLine
            }
            JobMode::Extend => {
                let path = self.seed_config.as_ref().ok_or_else(|| usage("extend jobs need seed_config"))?;
                let seed = read_config(&base.join(path))?;
                if seed.len() + 2 != self.n {
                    return Err(usage("seed_config must hold n - 2 scatterers"));
                }
                if seed.collinear_axis().is_none() {
                    return Err(usage("seed_config must be collinear"));
                }
                SearchMode::ExtendFromSeed(seed)
            }
        };
        if self.seed_config.is_some() && self.mode != JobMode::Extend {
            return Err(usage("seed_config only applies to extend jobs"));
        }
        let settings = match self.budget {
            Budget::Desk => OptimizerSettings::desk(self.seed),
            Budget::Paper => OptimizerSettings::paper(self.seed),
        };
        Ok(PreparedJob { n: self.n, objective, mode, settings })
    }
}

/// Report file: the job, the run's wall time and the optimizer report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile<'a> {
    pub job: &'a Job,
    pub wall_time_s: f64,
    pub threads: usize,
    pub report: &'a OptimizationReport,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn job_parses_and_validates() {
        let job: Job = serde_json::from_str(
            r#"{"n": 6, "objective": "gamma_min", "k_r_excl": 0.5, "mode": "symline", "seed": 3, "budget": "desk"}"#,
        )
        .unwrap();
        let p = job.prepare(Path::new(".")).unwrap();
        assert_eq!(p.objective.exclusion_radius, Some(0.5));
        assert_eq!(p.mode, SearchMode::SymmetricLine);
        assert_eq!(p.settings.seed, 3);

        let odd = Job { n: 5, ..job.clone() };
        assert!(matches!(odd.prepare(Path::new(".")), Err(CliError::Usage(_))));
        let missing = Job { k_r_excl: None, ..job.clone() };
        assert!(missing.prepare(Path::new(".")).is_err());
        assert!(serde_json::from_str::<Job>(r#"{"n": 2, "objective": "area"}"#).is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = Configuration::on_axis(&[-1.0, 2.5]).unwrap();
        let f = ConfigFile::new(&c, Some("pair".into()));
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"k_positions":[[0.0,0.0,-1.0],[0.0,0.0,2.5]],"label":"pair"}"#);
        let back: ConfigFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.configuration().unwrap(), c);
        let dup: ConfigFile = serde_json::from_str(r#"{"k_positions":[[0,0,0],[0,0,0]]}"#).unwrap();
        assert!(dup.configuration().is_err());
    }
}
