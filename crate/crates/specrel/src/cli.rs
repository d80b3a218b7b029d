//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use specrel_core::fts::reconstruct;
use specrel_core::seed::{derive, rng, Stream};
use specrel_core::simlab::{ScenarioId, ScenarioSpec};

use crate::commands::{execute, Locations};
use crate::config::{BasisConfig, Common, DeltaSource, HypothesisConfig, PivotConfig, RunConfig, Task};
use crate::error::{CliError, CliResult, Stage};
use crate::io::{write_curves, write_field, RawCurves};
use crate::synth::{self, SynthSpec};

#[derive(Debug, Parser)]
#[command(name = "specrel", version, about = "Relevant-difference tests for spectral density operators of functional time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral density estimate of one sample: HS norms and eigenvalues per frequency.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Number of eigenvalues reported per frequency.
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        /// Also write every operator entry.
        #[arg(long)]
        dump_operators: bool,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Relevant-difference test between two samples.
    Test {
        #[arg(long)]
        input_x: PathBuf,
        #[arg(long)]
        input_y: PathBuf,
        #[command(flatten)]
        hyp: HypArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Simulates (or loads from the cache) the pivot law and prints quantiles.
    Pivot {
        /// Comma-separated significance levels.
        #[arg(long, default_value = "0.1,0.05,0.025,0.01", value_delimiter = ',')]
        alphas: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Rejection-rate experiment over a scenario grid.
    Experiment {
        /// bb-shift, bb-amplitude, ar-shift, ar-dependence (or 1-4).
        #[arg(long)]
        scenario: String,
        #[arg(long, value_delimiter = ',', required = true)]
        params: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "128")]
        t_len: Vec<usize>,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[arg(long, default_value = "operator")]
        hypothesis: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Fixed threshold.
        #[arg(long, conflicts_with = "delta_at")]
        delta: Option<f64>,
        /// Threshold = population distance of the scenario at this parameter.
        #[arg(long)]
        delta_at: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Pairwise tests between 3-D subjects under a separable model.
    Separable {
        /// Field files (each with a `<stem>.json` axis sidecar).
        #[arg(long, num_args = 2.., required = true)]
        inputs: Vec<PathBuf>,
        /// Threshold for every hypothesis unless overridden.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long)]
        delta_operator: Option<f64>,
        #[arg(long)]
        delta_projector: Option<f64>,
        #[arg(long)]
        delta_eigenvalue: Option<f64>,
        /// Component compared by the projector and eigenvalue tests.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Directional components per axis (default ⌊T^{1/3}⌋).
        #[arg(long)]
        per_direction: Option<usize>,
        /// Remove a cubic trend per voxel instead of the mean.
        #[arg(long)]
        detrend: bool,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Writes a pair of scenario samples (x = baseline, y = parameter) as curve CSVs.
    Simulate {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = 256)]
        t_len: usize,
        /// Number of midpoint grid samples per curve.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Writes a separable synthetic 3-D field with its axis sidecar.
    Simulate3d {
        #[arg(long, value_delimiter = ',', default_value = "4,4,4")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 128)]
        t_len: usize,
        /// AR(1) coefficient of the scores.
        #[arg(long, default_value_t = 0.3)]
        c: f64,
        /// Swap the first two direction-1 eigenvectors.
        #[arg(long)]
        permute_dir1: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Replays the configuration embedded in a result file.
    Rerun {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// daniell, bartlett or parzen.
    #[arg(long, default_value = "daniell")]
    pub window: String,
    /// b = T^(-exp).
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub bandwidth_exp: f64,
    /// Frequency band a:b in radians; `pi` and `pi/N` accepted.
    #[arg(long, default_value = "0:pi")]
    pub band: String,
    #[arg(long, default_value_t = 64)]
    pub nfreq: usize,
    #[arg(long, default_value_t = 20)]
    pub nu_n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Samples are jointly observed (equal lengths required).
    #[arg(long)]
    pub dependent: bool,
    /// Skip mean removal.
    #[arg(long)]
    pub no_center: bool,
    /// auto, fourier, fourier-harmonics, bspline or raw.
    #[arg(long, default_value = "auto")]
    pub basis: String,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 50_000)]
    pub pivot_paths: usize,
    #[arg(long, default_value_t = 10_000)]
    pub pivot_steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct HypArgs {
    /// operator, projector or eigenvalue.
    #[arg(long, default_value = "operator")]
    pub hypothesis: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Worker cap (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value = ".specrel-cache")]
    pub cache_dir: PathBuf,
    /// Suppress tables on stdout.
    #[arg(long)]
    pub quiet: bool,
}

impl RunArgs {
    fn locations(&self) -> Locations {
        Locations { out: self.out.clone(), cache_dir: self.cache_dir.clone(), threads: self.threads, quiet: self.quiet }
    }
}

/// Parses `pi`, `pi/N`, `N*pi` or a plain number.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim();
    let pi = std::f64::consts::PI;
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    if s == "pi" {
        return Some(pi);
    }
    if let Some(d) = s.strip_prefix("pi/") {
        return d.trim().parse::<f64>().ok().map(|d| pi / d);
    }
    if let Some(m) = s.strip_suffix("*pi") {
        return m.trim().parse::<f64>().ok().map(|m| m * pi);
    }
    None
}

pub fn parse_band(s: &str) -> CliResult<[f64; 2]> {
    let bad = || CliError::config("config", format!("band: expected a:b, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok([parse_angle(a).ok_or_else(bad)?, parse_angle(b).ok_or_else(bad)?])
}

impl CommonArgs {
    pub fn to_common(&self) -> CliResult<Common> {
        Ok(Common {
            window: self.window.clone(),
            bandwidth_exp: self.bandwidth_exp,
            band: parse_band(&self.band)?,
            n_freq: self.nfreq,
            nu_n: self.nu_n,
            alpha: self.alpha,
            dependent: self.dependent,
            center: !self.no_center,
            basis: BasisConfig { kind: self.basis.clone(), dim: self.dim },
            pivot: PivotConfig { n_paths: self.pivot_paths, n_steps: self.pivot_steps },
            seed: self.seed,
        })
    }
}

fn run_config(common: &CommonArgs, task: Task) -> CliResult<RunConfig> {
    let cfg = RunConfig { common: common.to_common()?, task };
    cfg.validate()?;
    Ok(cfg)
}

/// Dispatches a parsed command line.
pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Estimate { input, top_k, dump_operators, common, run } => {
            let cfg = run_config(&common, Task::Estimate { input, top_k, dump_operators })?;
            execute(&cfg, &run.locations()).map(drop)
        }
        Command::Test { input_x, input_y, hyp, common, run } => {
            let hypothesis = HypothesisConfig { kind: hyp.hypothesis, k: hyp.k, delta: hyp.delta };
            let cfg = run_config(&common, Task::Test { input_x, input_y, hypothesis })?;
            execute(&cfg, &run.locations()).map(drop)
        }
        Command::Pivot { alphas, common, run } => {
            let cfg = run_config(&common, Task::Pivot { alphas })?;
            execute(&cfg, &run.locations()).map(drop)
        }
        Command::Experiment { scenario, params, t_len, reps, hypothesis, k, delta, delta_at, common, run } => {
            let delta = match (delta, delta_at) {
                (Some(d), None) => DeltaSource::Fixed(d),
                (None, Some(p)) => DeltaSource::Oracle(p),
                _ => return Err(CliError::config("config", "delta: give exactly one of --delta or --delta-at")),
            };
            let task = Task::Experiment { scenario, params, t_lens: t_len, reps, hypothesis, k, delta };
            let cfg = run_config(&common, task)?;
            execute(&cfg, &run.locations()).map(drop)
        }
        Command::Separable {
            inputs,
            delta,
            delta_operator,
            delta_projector,
            delta_eigenvalue,
            k,
            per_direction,
            detrend,
            common,
            run,
        } => {
            let hypotheses = vec![
                HypothesisConfig { kind: "operator".into(), k: 1, delta: delta_operator.unwrap_or(delta) },
                HypothesisConfig { kind: "projector".into(), k, delta: delta_projector.unwrap_or(delta) },
                HypothesisConfig { kind: "eigenvalue".into(), k, delta: delta_eigenvalue.unwrap_or(delta) },
            ];
            let cfg = run_config(&common, Task::Separable { inputs, hypotheses, per_direction, detrend })?;
            execute(&cfg, &run.locations()).map(drop)
        }
        Command::Simulate { scenario, param, t_len, grid, seed, out } => simulate(&scenario, param, t_len, grid, seed, &out),
        Command::Simulate3d { dims, t_len, c, permute_dir1, seed, output } => {
            if dims.len() != 3 || dims.iter().any(|&g| g < 2) {
                return Err(CliError::config("config", "dims: need three axis sizes >= 2"));
            }
            if !(c.is_finite() && c.abs() < 1.0) {
                return Err(CliError::config("config", "c: need |c| < 1"));
            }
            if t_len < 2 {
                return Err(CliError::config("config", "t_len: need T >= 2"));
            }
            let spec = SynthSpec { dims: [dims[0], dims[1], dims[2]], t_len, c, permute_dir1 };
            write_field(&output, &synth::generate(&spec, seed))
        }
        Command::Rerun { config, run } => {
            let text = std::fs::read_to_string(&config).map_err(|e| CliError::io("read config", format!("{}: {e}", config.display())))?;
            let cfg = RunConfig::from_json(&text)?;
            execute(&cfg, &run.locations()).map(drop)
        }
    }
}

fn simulate(scenario: &str, param: f64, t_len: usize, grid: usize, seed: u64, out: &std::path::Path) -> CliResult<()> {
    let id = ScenarioId::parse(scenario).stage("scenario")?;
    let point = ScenarioSpec::new(id, t_len, param).stage("scenario")?;
    if grid < 2 {
        return Err(CliError::config("config", "grid: need at least 2 points"));
    }
    let (mx, my) = point.models().stage("scenario")?;
    let coords: Vec<f64> = (0..grid).map(|i| (i as f64 + 0.5) / grid as f64).collect();
    for (name, model, idx) in [("x.csv", &mx, 0), ("y.csv", &my, 1)] {
        let series = model.generate(t_len, &mut rng(derive(seed, Stream::Generation, idx))).stage("generate")?;
        let values = reconstruct(&series, &coords);
        write_curves(&out.join(name), &RawCurves { grid: coords.clone(), values })?;
    }
    Ok(())
}

/// Runs the CLI on `args` and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_parsing() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_band("0:pi").unwrap(), [0.0, pi]);
        assert_eq!(parse_band("0:1.5708").unwrap(), [0.0, 1.5708]);
        assert_eq!(parse_band("pi/4:pi/2").unwrap(), [pi / 4.0, pi / 2.0]);
        assert!(parse_band("0-1").is_err());
        assert!(parse_band("a:b").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["specrel", "test"]), 2);
        assert_eq!(run(["specrel", "pivot", "--alpha", "2", "--cache-dir", "/nonexistent"]), 2);
    }
}
