//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use pointscatter_core::optimize::{random_restart_search, regular_chain_baseline, ObjectiveKind};
use pointscatter_core::refdata::{entries, PUBLISHED_FIT};
use pointscatter_core::resonance::decompose;
use pointscatter_core::scatter::angular_profile;
use pointscatter_core::stability::{stability_scan, StabilityRequest};
use pointscatter_core::{build_green_matrix, total_cross_section, IncidentWave, ScattererModel};

use crate::error::CliError;
use crate::files::{read_config, read_json, write_json, ConfigFile, Job, ReportFile};
use crate::table::{fmt_num, Table};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "POINTSCATTER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "pointscatter", version, about = "Cooperative scattering by resonant point scatterers")]
pub struct Cli {
    /// Worker threads for optimizer restarts and stability samples
    /// [default: available parallelism].
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the total cross section σ/σ_max.
    Eval(EvalArgs),
    /// Write the angular profile σ(cos θ) of a chain along the wave.
    Profile(ProfileArgs),
    /// Write σ(δ) over a detuning grid.
    Spectrum(SpectrumArgs),
    /// Write the resonance table and the per-resonance σₙ(δ) scan.
    Resonances(ResonancesArgs),
    /// Run an optimization job.
    Optimize(OptimizeArgs),
    /// Average an objective over random displacements.
    Stability(StabilityArgs),
    /// Print the objective of an equally spaced chain.
    Baseline(BaselineArgs),
    /// Reference configurations.
    Refdata {
        #[command(subcommand)]
        action: RefdataAction,
    },
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Detuning δ/γ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    /// Incident direction `x,y,z` (normalized).
    #[arg(long, value_delimiter = ',', num_args = 3, allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DetuningGrid {
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 401)]
    pub steps: usize,
}

impl DetuningGrid {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        if !(self.delta_min.is_finite() && self.delta_max.is_finite() && self.delta_min < self.delta_max) {
            return Err(CliError::Usage("need finite --delta-min < --delta-max".into()));
        }
        if self.steps < 2 {
            return Err(CliError::Usage("--steps must be at least 2".into()));
        }
        let h = (self.delta_max - self.delta_min) / (self.steps - 1) as f64;
        Ok((0..self.steps).map(|i| self.delta_min + h * i as f64).collect())
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub grid: DetuningGrid,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ResonancesArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Resonance table.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-resonance scan [default: `<out>` with `_scan` appended to the stem].
    #[arg(long)]
    pub scan_out: Option<PathBuf>,
    #[command(flatten)]
    pub grid: DetuningGrid,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub job: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// One or more displacement radii `k·δr`, comma separated; one row each.
    #[arg(long, value_delimiter = ',', required = true)]
    pub delta_r: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, value_parser = parse_objective)]
    pub objective: ObjectiveKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra quantile columns, e.g. `0.1,0.5,0.9`.
    #[arg(long, value_delimiter = ',')]
    pub quantiles: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub spacing: f64,
    #[arg(long, value_parser = parse_objective)]
    pub objective: ObjectiveKind,
}

#[derive(Debug, Subcommand)]
pub enum RefdataAction {
    /// Write every entry as a configuration file plus an `index.json`.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_objective(s: &str) -> Result<ObjectiveKind, String> {
    ObjectiveKind::parse(s).ok_or_else(|| format!("unknown objective `{s}` (expected sigma or gamma_min)"))
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Errors go to stderr, the last line being a JSON object.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            let err = CliError::Usage(e.kind().to_string());
            eprintln!("{}", err.json_line());
            return err.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            eprintln!("{}", err.json_line());
            err.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Io(e.to_string()))?;
    let threads = pool.current_num_threads();
    pool.install(|| dispatch(cli.command, threads))
}

fn dispatch(command: Command, threads: usize) -> Result<(), CliError> {
    match command {
        Command::Eval(a) => eval(a),
        Command::Profile(a) => profile(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Resonances(a) => resonances(a),
        Command::Optimize(a) => optimize(a, threads),
        Command::Stability(a) => stability(a),
        Command::Baseline(a) => baseline(a),
        Command::Refdata { action: RefdataAction::Export { out } } => export(&out),
    }
}

fn model(delta: f64) -> Result<ScattererModel, CliError> {
    ScattererModel::new(delta).map_err(|e| CliError::Usage(e.to_string()))
}

fn print_value(x: f64) -> Result<(), CliError> {
    writeln!(std::io::stdout(), "{}", fmt_num(x))?;
    Ok(())
}

fn eval(a: EvalArgs) -> Result<(), CliError> {
    let config = read_config(&a.config)?;
    let m = model(a.delta)?;
    let wave = match a.direction {
        Some(d) => IncidentWave::towards([d[0], d[1], d[2]]).map_err(|e| CliError::Usage(e.to_string()))?,
        None => IncidentWave::along_z(),
    };
    print_value(total_cross_section(&config, &wave, &m)?)
}

fn profile(a: ProfileArgs) -> Result<(), CliError> {
    let config = read_config(&a.config)?;
    let m = model(a.delta)?;
    if a.grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let p = angular_profile(&config, &IncidentWave::along_z(), &m, a.grid)?;
    let mut t = Table::create(&a.out, &["cos_theta", "sigma"])?;
    for (c, s) in p.cos_theta.iter().zip(&p.sigma) {
        t.numbers(&[*c, *s])?;
    }
    t.finish()
}

fn spectrum(a: SpectrumArgs) -> Result<(), CliError> {
    let config = read_config(&a.config)?;
    let deltas = a.grid.values()?;
    let wave = IncidentWave::along_z();
    let mut t = Table::create(&a.out, &["delta_over_gamma", "sigma_total"])?;
    for d in deltas {
        t.numbers(&[d, total_cross_section(&config, &wave, &model(d)?)?])?;
    }
    t.finish()
}

fn default_scan_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}_scan.{ext}"))
}

fn resonances(a: ResonancesArgs) -> Result<(), CliError> {
    let config = read_config(&a.config)?;
    let deltas = a.grid.values()?;
    let scan_path = a.scan_out.clone().unwrap_or_else(|| default_scan_path(&a.out));
    let set = decompose(&build_green_matrix(&config)?)?;
    let wave = IncidentWave::along_z();
    // Fails for defective Green matrices before anything is written.
    set.resonance_sum(&wave, &ScattererModel::resonant())?;

    let mut t = Table::create(
        &a.out,
        &["n", "re_lambda", "im_lambda", "delta_n", "gamma_n", "re_overlap", "im_overlap", "sigma_n_at_delta0"],
    )?;
    for row in set.table(&wave) {
        let mut fields = vec![(row.index + 1).to_string()];
        fields.extend(
            [
                row.eigenvalue.re,
                row.eigenvalue.im,
                row.position,
                row.width,
                row.overlap.re,
                row.overlap.im,
                row.sigma_at_resonance_zero,
            ]
            .map(fmt_num),
        );
        t.row(&fields)?;
    }
    t.finish()?;

    let mut header = vec!["delta_over_gamma".to_string()];
    header.extend((1..=set.len()).map(|k| format!("sigma_{k}")));
    header.push("sigma_total".into());
    let mut s = Table::create(&scan_path, &header)?;
    for d in deltas {
        let m = model(d)?;
        let mut row = vec![d];
        for k in 0..set.len() {
            row.push(set.resonance_cross_section(k, &wave, &m)?);
        }
        row.push(total_cross_section(&config, &wave, &m)?);
        s.numbers(&row)?;
    }
    s.finish()
}

fn optimize(a: OptimizeArgs, threads: usize) -> Result<(), CliError> {
    let job: Job = read_json(&a.job)?;
    let base = a.job.parent().unwrap_or(Path::new("."));
    let prepared = job.prepare(base)?;
    let start = Instant::now();
    let report = random_restart_search(prepared.n, prepared.objective, prepared.mode, &prepared.settings)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    write_json(&a.out, &ReportFile { job: &job, wall_time_s, threads, report: &report })?;
    if let Some(best) = report.best_objective() {
        print_value(best)?;
    }
    Ok(())
}

fn stability(a: StabilityArgs) -> Result<(), CliError> {
    let base = read_config(&a.config)?;
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if a.delta_r.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(CliError::Usage("--delta-r values must be finite and non-negative".into()));
    }
    if a.quantiles.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(CliError::Usage("--quantiles must lie in [0, 1]".into()));
    }
    let mut header: Vec<String> = ["n", "delta_r", "objective", "mean", "stderr", "min", "max", "samples", "resampled"]
        .map(String::from)
        .to_vec();
    header.extend(a.quantiles.iter().map(|q| format!("q{}", fmt_num(*q))));
    let mut t = Table::create(&a.out, &header)?;
    for &delta_r in &a.delta_r {
        let req = StabilityRequest {
            base: base.clone(),
            delta_r,
            samples: a.samples,
            objective: a.objective,
            seed: a.seed,
            quantiles: a.quantiles.clone(),
        };
        let r = stability_scan(&req)?;
        let mut row = vec![
            base.len().to_string(),
            fmt_num(delta_r),
            a.objective.name().to_string(),
            fmt_num(r.mean),
            fmt_num(r.stderr),
            fmt_num(r.min),
            fmt_num(r.max),
            r.samples.to_string(),
            r.resampled.to_string(),
        ];
        row.extend(r.quantiles.iter().map(|(_, v)| fmt_num(*v)));
        t.row(&row)?;
    }
    t.finish()
}

fn baseline(a: BaselineArgs) -> Result<(), CliError> {
    if a.n == 0 || !(a.spacing.is_finite() && a.spacing > 0.0) {
        return Err(CliError::Usage("need --n >= 1 and a positive --spacing".into()));
    }
    print_value(regular_chain_baseline(a.n, a.spacing, a.objective)?)
}

#[derive(serde::Serialize)]
struct IndexEntry {
    file: String,
    n: usize,
    family: &'static str,
    sigma: f64,
    gamma_min: f64,
    note: &'static str,
}

fn export(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut index = Vec::new();
    for e in entries() {
        let file = format!("N{}_{}.json", e.n, e.family.name());
        write_json(&dir.join(&file), &ConfigFile::from_reference(e))?;
        index.push(IndexEntry {
            file,
            n: e.n,
            family: e.family.name(),
            sigma: e.sigma,
            gamma_min: e.gamma_min,
            note: e.note,
        });
    }
    let fit = serde_json::json!({
        "a": PUBLISHED_FIT.a, "a_err": PUBLISHED_FIT.a_err,
        "b": PUBLISHED_FIT.b, "b_err": PUBLISHED_FIT.b_err,
    });
    write_json(&dir.join("index.json"), &serde_json::json!({ "entries": index, "fit": fit }))
}
