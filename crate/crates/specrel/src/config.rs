//! Resolved run configuration. Every result file embeds the configuration it
//! was produced from; `specrel rerun --config <file>` replays it.
//!
//! Location-only settings (output directory, cache directory, worker count)
//! are kept out of the embedded copy: they cannot change any reported number,
//! and leaving them out keeps reports byte-identical across them.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use specrel_core::fts::BasisSpec;
use specrel_core::pivot;
use specrel_core::relevance::{Dependence, EstimationConfig, HypothesisKind, HypothesisSpec};
use specrel_core::simlab::{ScenarioId, ScenarioSpec, MIN_REPS};
use specrel_core::spectral::{Band, BandwidthRule, WindowSpec};

use crate::error::{CliError, CliResult};

/// Basis used to turn sampled curves into coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    /// `auto`, `fourier`, `fourier-harmonics`, `bspline` or `raw`.
    pub kind: String,
    /// Number of basis functions; `raw` and `auto` on short grids use the grid size.
    pub dim: Option<usize>,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig { kind: "auto".into(), dim: None }
    }
}

/// Grids at or below this size are used as-is under `auto`.
pub const AUTO_RAW_MAX: usize = 32;
/// Fourier dimension used by `auto` on fine grids.
pub const AUTO_FOURIER_DIM: usize = 21;

impl BasisConfig {
    pub fn validate(&self) -> CliResult<()> {
        match self.kind.as_str() {
            "auto" | "fourier" | "fourier-harmonics" | "bspline" | "raw" => {}
            other => return Err(CliError::config("config", format!("basis: unknown kind '{other}'"))),
        }
        if self.dim == Some(0) {
            return Err(CliError::config("config", "basis.dim: must be >= 1"));
        }
        Ok(())
    }

    /// Builds the basis for curves with `grid_len` columns.
    pub fn resolve(&self, grid_len: usize) -> CliResult<BasisSpec> {
        let stage = "build basis";
        let core = |r: specrel_core::Result<BasisSpec>| r.map_err(|e| CliError::config(stage, e.to_string()));
        let dim = self.dim;
        match self.kind.as_str() {
            "auto" if grid_len <= AUTO_RAW_MAX && dim.is_none() => core(BasisSpec::raw_grid(grid_len)),
            "auto" | "fourier" => core(BasisSpec::fourier(dim.unwrap_or(AUTO_FOURIER_DIM).min(grid_len))),
            "fourier-harmonics" => core(BasisSpec::fourier_harmonics(dim.unwrap_or(AUTO_FOURIER_DIM - 1).min(grid_len))),
            "bspline" => core(BasisSpec::bspline(dim.unwrap_or(AUTO_FOURIER_DIM).min(grid_len))),
            "raw" => {
                if dim.is_some_and(|d| d != grid_len) {
                    return Err(CliError::config(stage, format!("basis.dim: raw basis needs dim = grid size {grid_len}")));
                }
                core(BasisSpec::raw_grid(grid_len))
            }
            other => Err(CliError::config(stage, format!("basis: unknown kind '{other}'"))),
        }
    }
}

/// Monte Carlo settings of the pivot law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PivotConfig {
    pub n_paths: usize,
    pub n_steps: usize,
}

impl Default for PivotConfig {
    fn default() -> Self {
        PivotConfig { n_paths: 50_000, n_steps: 10_000 }
    }
}

/// Estimation and testing settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Common {
    pub window: String,
    /// `b = T^{-bandwidth_exp}`.
    pub bandwidth_exp: f64,
    /// Frequency band `[a, b]` in radians.
    pub band: [f64; 2],
    pub n_freq: usize,
    pub nu_n: usize,
    pub alpha: f64,
    pub dependent: bool,
    pub center: bool,
    pub basis: BasisConfig,
    pub pivot: PivotConfig,
    pub seed: u64,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            window: "daniell".into(),
            bandwidth_exp: 1.0 / 3.0,
            band: [0.0, std::f64::consts::PI],
            n_freq: 64,
            nu_n: 20,
            alpha: 0.05,
            dependent: false,
            center: true,
            basis: BasisConfig::default(),
            pivot: PivotConfig::default(),
            seed: 0,
        }
    }
}

fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::config("config", format!("{name}: {msg}"))
}

impl Common {
    pub fn validate(&self) -> CliResult<()> {
        WindowSpec::parse(&self.window).map_err(|e| field("window", e))?;
        if !(self.bandwidth_exp > 0.0 && self.bandwidth_exp < 1.0) {
            return Err(field("bandwidth_exp", format!("{} outside (0, 1)", self.bandwidth_exp)));
        }
        Band::new(self.band[0], self.band[1]).map_err(|e| field("band", e))?;
        let min_freq = if self.band[0] == self.band[1] { 1 } else { 2 };
        if self.n_freq < min_freq {
            return Err(field("n_freq", format!("{} below {min_freq}", self.n_freq)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(field("alpha", format!("{} outside (0, 1)", self.alpha)));
        }
        if self.nu_n < 3 {
            return Err(field("nu_n", format!("{} below 3", self.nu_n)));
        }
        pivot::validate(self.nu_n, self.pivot.n_paths, self.pivot.n_steps).map_err(|e| field("pivot", e))?;
        self.basis.validate()
    }

    pub fn window_spec(&self) -> WindowSpec {
        WindowSpec::parse(&self.window).expect("validated window")
    }

    pub fn band(&self) -> Band {
        Band::new(self.band[0], self.band[1]).expect("validated band")
    }

    pub fn estimation(&self) -> EstimationConfig {
        EstimationConfig {
            window: self.window_spec(),
            bandwidth: BandwidthRule::PowerLaw { exponent: self.bandwidth_exp },
            n_freq: self.n_freq,
            center: self.center,
            ..EstimationConfig::default()
        }
    }

    pub fn dependence(&self) -> Dependence {
        if self.dependent {
            Dependence::Dependent
        } else {
            Dependence::Independent
        }
    }
}

/// One hypothesis: kind, component and threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisConfig {
    /// `operator`, `projector` or `eigenvalue`.
    pub kind: String,
    pub k: usize,
    pub delta: f64,
}

impl HypothesisConfig {
    pub fn validate(&self) -> CliResult<()> {
        HypothesisKind::parse(&self.kind).map_err(|e| field("hypothesis", e))?;
        if self.k == 0 {
            return Err(field("k", "must be >= 1"));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(field("delta", format!("{} must be finite and >= 0", self.delta)));
        }
        Ok(())
    }

    pub fn spec(&self, common: &Common) -> HypothesisSpec {
        HypothesisSpec {
            kind: HypothesisKind::parse(&self.kind).expect("validated hypothesis"),
            k: self.k,
            delta: self.delta,
            band: common.band(),
            alpha: common.alpha,
            nu_n: common.nu_n,
            dependence: common.dependence(),
        }
    }
}

/// Where an experiment's threshold comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaSource {
    /// A fixed value.
    Fixed(f64),
    /// The population distance between the baseline and the scenario model
    /// at this parameter.
    Oracle(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "command", deny_unknown_fields)]
pub enum Task {
    Estimate {
        input: PathBuf,
        top_k: usize,
        dump_operators: bool,
    },
    Test {
        input_x: PathBuf,
        input_y: PathBuf,
        hypothesis: HypothesisConfig,
    },
    Pivot {
        alphas: Vec<f64>,
    },
    Experiment {
        scenario: String,
        params: Vec<f64>,
        t_lens: Vec<usize>,
        reps: usize,
        hypothesis: String,
        k: usize,
        delta: DeltaSource,
    },
    Separable {
        inputs: Vec<PathBuf>,
        hypotheses: Vec<HypothesisConfig>,
        /// Directional components per axis; `None` uses `⌊T^{1/3}⌋`.
        per_direction: Option<usize>,
        detrend: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub common: Common,
    pub task: Task,
}

impl RunConfig {
    /// Checks every field before any computation starts.
    pub fn validate(&self) -> CliResult<()> {
        self.common.validate()?;
        match &self.task {
            Task::Estimate { top_k, .. } => {
                if *top_k == 0 {
                    return Err(field("top_k", "must be >= 1"));
                }
            }
            Task::Test { hypothesis, .. } => hypothesis.validate()?,
            Task::Pivot { alphas } => {
                if alphas.is_empty() {
                    return Err(field("alphas", "empty list"));
                }
                if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
                    return Err(field("alphas", format!("{a} outside (0, 1)")));
                }
            }
            Task::Experiment { scenario, params, t_lens, reps, hypothesis, k, delta } => {
                let id = ScenarioId::parse(scenario).map_err(|e| field("scenario", e))?;
                if params.is_empty() {
                    return Err(field("params", "empty grid"));
                }
                if t_lens.is_empty() {
                    return Err(field("t_lens", "empty grid"));
                }
                if *reps < MIN_REPS {
                    return Err(field("reps", format!("{reps} below {MIN_REPS}")));
                }
                for &t in t_lens {
                    BandwidthRule::PowerLaw { exponent: self.common.bandwidth_exp }
                        .resolve(t)
                        .map_err(|e| field("t_lens", format!("T = {t}: {e}")))?;
                    for &p in params {
                        ScenarioSpec::new(id, t, p).map_err(|e| field("params", e))?;
                    }
                }
                let d = match delta {
                    DeltaSource::Fixed(d) => *d,
                    DeltaSource::Oracle(p) => {
                        ScenarioSpec::new(id, t_lens[0], *p).map_err(|e| field("delta", e))?;
                        0.0
                    }
                };
                HypothesisConfig { kind: hypothesis.clone(), k: *k, delta: d }.validate()?;
            }
            Task::Separable { inputs, hypotheses, per_direction, .. } => {
                if inputs.len() < 2 {
                    return Err(field("inputs", "need at least two subjects"));
                }
                if hypotheses.is_empty() {
                    return Err(field("hypotheses", "empty list"));
                }
                for h in hypotheses {
                    h.validate()?;
                }
                if *per_direction == Some(0) {
                    return Err(field("per_direction", "must be >= 1"));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        #[derive(Deserialize)]
        struct Embedded {
            config: RunConfig,
        }
        let cfg = serde_json::from_str::<RunConfig>(text)
            .or_else(|_| serde_json::from_str::<Embedded>(text).map(|e| e.config))
            .map_err(|e| CliError::config("read config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
