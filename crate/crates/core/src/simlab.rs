//! Simulation scenarios with closed-form population spectra, population
//! thresholds, and rejection-rate experiments.
//!
//! * `bb-shift` / `bb-amplitude`: i.i.d. Brownian bridges scaled by `√(2π)`,
//!   synthesized from a `d`-term Karhunen–Loève expansion with eigenfunctions
//!   `√2 sin(πk(τ+ι))` projected onto a Fourier basis.
//! * `ar-shift` / `ar-dependence`: a four-dimensional VAR(1) loading the
//!   functions `√2 sin(2πjτ)`, `√2 cos(2π(jτ+ι_j))`, `j = 1, 2`.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eigen::{eigensystem, projector_distance_sq};
use crate::error::{Error, Result};
use crate::fts::{project_to_basis, BasisSpec, FunctionalSeries, OperatorMatrix};
use crate::pivot::PivotSample;
use crate::relevance::{band_integrate, estimate_pair, test_surfaces, EstimationConfig, HypothesisKind, HypothesisSpec, TestResult};
use crate::seed::{derive, rng, Stream};
use crate::spectral::Band;

/// Grid used to project Karhunen–Loève functions onto the basis.
pub const KL_GRID: usize = 1000;
/// Discarded VAR(1) start-up steps.
pub const BURN_IN: usize = 200;
/// Innovation variances of the VAR(1) coefficients.
pub const AR_NOISE: [f64; 4] = [4.0, 8.0, 0.5, 1.5];
/// VAR(1) coefficient shared by both samples in `ar-shift`.
pub const AR_SHIFT_C: f64 = 0.3;
/// Per-step standard-deviation multiplier in `bb-amplitude`.
pub const AMPLITUDE_BASE: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    BbShift,
    BbAmplitude,
    ArShift,
    ArDependence,
}

impl ScenarioId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bb-shift" | "1" => Ok(Self::BbShift),
            "bb-amplitude" | "2" => Ok(Self::BbAmplitude),
            "ar-shift" | "3" => Ok(Self::ArShift),
            "ar-dependence" | "4" => Ok(Self::ArDependence),
            other => Err(Error::Scenario(alloc::format!("unknown scenario '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::BbShift => "bb-shift",
            Self::BbAmplitude => "bb-amplitude",
            Self::ArShift => "ar-shift",
            Self::ArDependence => "ar-dependence",
        }
    }

    pub fn default_dim(&self) -> usize {
        match self {
            Self::BbShift | Self::BbAmplitude => 21,
            _ => 4,
        }
    }

    /// Admissible range of the scenario parameter.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Self::BbShift => (0.0, 0.15),
            Self::BbAmplitude => (0.0, 8.0),
            Self::ArShift => (0.0, 0.25),
            Self::ArDependence => (0.0, 0.6),
        }
    }
}

/// One grid point of an experiment: scenario, sample length, dimension and
/// parameter of the second sample (the first uses the baseline).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub t_len: usize,
    pub d: usize,
    pub param: f64,
}

impl ScenarioSpec {
    pub fn new(id: ScenarioId, t_len: usize, param: f64) -> Result<Self> {
        let s = ScenarioSpec { id, t_len, d: id.default_dim(), param };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.id.range();
        if !(self.param >= lo - 1e-12 && self.param <= hi + 1e-12) {
            return Err(Error::Scenario(alloc::format!(
                "{} parameter {} outside [{lo}, {hi}]",
                self.id.name(),
                self.param
            )));
        }
        if self.t_len < 8 {
            return Err(Error::Scenario("sample length must be at least 8".into()));
        }
        match self.id {
            ScenarioId::BbShift | ScenarioId::BbAmplitude if self.d < 2 => {
                Err(Error::Scenario("Brownian-bridge scenarios need d >= 2".into()))
            }
            ScenarioId::ArShift | ScenarioId::ArDependence if self.d != 4 => {
                Err(Error::Scenario("autoregressive scenarios have d = 4".into()))
            }
            _ => Ok(()),
        }
    }

    /// Generating models of the baseline sample and the parametrized sample.
    pub fn models(&self) -> Result<(Model, Model)> {
        self.validate()?;
        let d = self.d;
        Ok(match self.id {
            ScenarioId::BbShift => (Model::Bb(BbModel::new(d, 0.0, 1.0)?), Model::Bb(BbModel::new(d, self.param, 1.0)?)),
            ScenarioId::BbAmplitude => (
                Model::Bb(BbModel::new(d, 0.0, 1.0)?),
                Model::Bb(BbModel::new(d, 0.0, libm::pow(AMPLITUDE_BASE, self.param))?),
            ),
            ScenarioId::ArShift => (
                Model::Far(FarModel::new(AR_SHIFT_C, 0.0)?),
                Model::Far(FarModel::new(AR_SHIFT_C, self.param)?),
            ),
            ScenarioId::ArDependence => (Model::Far(FarModel::new(0.0, 0.0)?), Model::Far(FarModel::new(self.param, 0.0)?)),
        })
    }
}

/// Karhunen–Loève Brownian-bridge model in a Fourier basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BbModel {
    pub shift: f64,
    pub amplitude: f64,
    basis: BasisSpec,
    // d × d: column k is √(2π) · amplitude · √λ_k · (coefficients of φ_k)
    loadings: DMatrix<f64>,
    population: DMatrix<f64>,
}

impl BbModel {
    pub fn new(d: usize, shift: f64, amplitude: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Scenario("Brownian-bridge model needs d >= 2".into()));
        }
        if !(amplitude.is_finite() && amplitude > 0.0 && shift.is_finite()) {
            return Err(Error::Scenario("invalid Brownian-bridge parameters".into()));
        }
        let basis = BasisSpec::fourier(d)?;
        let grid = basis.midpoint_grid(KL_GRID);
        let raw = DMatrix::from_fn(d, KL_GRID, |k, g| {
            libm::sqrt(2.0) * libm::sin(PI * (k + 1) as f64 * (grid[g] + shift))
        });
        let (proj, _) = project_to_basis(&raw, &grid, &basis)?;
        // proj.coeffs(): row k = coefficients of φ_k
        let mut cols = proj.coeffs().transpose();
        for k in 0..d {
            let sd = 1.0 / (PI * (k + 1) as f64);
            let scale = libm::sqrt(2.0 * PI) * amplitude * sd;
            for r in 0..d {
                cols[(r, k)] *= scale;
            }
        }
        let population = &cols * cols.transpose() / (2.0 * PI);
        Ok(BbModel { shift, amplitude, basis, loadings: cols, population })
    }

    pub fn dim(&self) -> usize {
        self.loadings.nrows()
    }

    pub fn generate(&self, t_len: usize, rng: &mut ChaCha8Rng) -> Result<FunctionalSeries> {
        let d = self.dim();
        let xi = DMatrix::from_fn(t_len, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        FunctionalSeries::new(xi * self.loadings.transpose(), self.basis.clone())
    }

    /// The spectral density operator (constant in ω).
    pub fn population(&self) -> &DMatrix<f64> {
        &self.population
    }
}

/// Functional VAR(1) model of the autoregressive scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct FarModel {
    pub c: f64,
    pub iota1: f64,
    basis: BasisSpec,
    // coefficient map χ ↦ basis coordinates in (s1, c1, s2, c2)
    loadings: DMatrix<f64>,
}

impl FarModel {
    pub fn new(c: f64, iota1: f64) -> Result<Self> {
        if !(c.is_finite() && c.abs() < 1.0) {
            return Err(Error::Scenario(alloc::format!("|c| = {} must be < 1", c.abs())));
        }
        let th = 2.0 * PI * iota1;
        let mut l = DMatrix::identity(4, 4);
        l[(0, 1)] = -libm::sin(th);
        l[(1, 1)] = libm::cos(th);
        Ok(FarModel { c, iota1, basis: BasisSpec::fourier_harmonics(4)?, loadings: l })
    }

    pub fn generate(&self, t_len: usize, rng: &mut ChaCha8Rng) -> Result<FunctionalSeries> {
        let sd: [f64; 4] = AR_NOISE.map(libm::sqrt);
        let innov = libm::sqrt(1.0 - self.c * self.c);
        // start from the stationary law so burn-in only has to mix
        let mut chi = [0.0; 4];
        for j in 0..4 {
            chi[j] = sd[j] * rng.sample::<f64, _>(StandardNormal);
        }
        let step = |chi: &mut [f64; 4], rng: &mut ChaCha8Rng| {
            for j in 0..4 {
                let e: f64 = rng.sample(StandardNormal);
                chi[j] = self.c * chi[j] + innov * sd[j] * e;
            }
        };
        for _ in 0..BURN_IN {
            step(&mut chi, rng);
        }
        let mut coeffs = DMatrix::zeros(t_len, 4);
        for t in 0..t_len {
            step(&mut chi, rng);
            for r in 0..4 {
                let mut v = 0.0;
                for j in 0..4 {
                    v += self.loadings[(r, j)] * chi[j];
                }
                coeffs[(t, r)] = v;
            }
        }
        FunctionalSeries::new(coeffs, self.basis.clone())
    }

    /// `f_c(ω) = (1 − c²) / (2π |1 − c e^{−iω}|²)`.
    pub fn scalar_spectrum(&self, omega: f64) -> f64 {
        let c = self.c;
        let re = 1.0 - c * libm::cos(omega);
        let im = c * libm::sin(omega);
        (1.0 - c * c) / (2.0 * PI * (re * re + im * im))
    }

    /// `L Σ Lᵀ f_c(ω)`.
    pub fn population(&self, omega: f64) -> DMatrix<f64> {
        let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&AR_NOISE));
        &self.loadings * sigma * self.loadings.transpose() * self.scalar_spectrum(omega)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Bb(BbModel),
    Far(FarModel),
}

impl Model {
    pub fn generate(&self, t_len: usize, rng: &mut ChaCha8Rng) -> Result<FunctionalSeries> {
        match self {
            Model::Bb(m) => m.generate(t_len, rng),
            Model::Far(m) => m.generate(t_len, rng),
        }
    }

    pub fn population(&self, omega: f64) -> Result<OperatorMatrix> {
        match self {
            Model::Bb(m) => OperatorMatrix::from_real(m.population(), omega),
            Model::Far(m) => OperatorMatrix::from_real(&m.population(omega), omega),
        }
    }
}

/// I.i.d. Brownian-bridge series scaled by `√(2π)` with eigenfunctions
/// `√2 sin(πk(τ+shift))` and standard deviation multiplied by
/// `amplitude_factor`.
pub fn gen_bb_series(t_len: usize, d: usize, shift: f64, amplitude_factor: f64, seed: u64) -> Result<FunctionalSeries> {
    if t_len < 8 {
        return Err(Error::Scenario("sample length must be at least 8".into()));
    }
    BbModel::new(d, shift, amplitude_factor)?.generate(t_len, &mut rng(seed))
}

/// Functional VAR(1) series with dependence `c` and first-harmonic shift `ι₁`.
pub fn gen_far_series(t_len: usize, c: f64, iota1: f64, seed: u64) -> Result<FunctionalSeries> {
    FarModel::new(c, iota1)?.generate(t_len, &mut rng(seed))
}

/// A Brownian bridge sampled at `n` midpoints of `[0, 1]`, built by pinning a
/// fine random walk.
pub fn sample_bridge_on_grid(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sd = libm::sqrt(1.0 / n as f64);
    let mut w = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    w.push(0.0);
    for _ in 0..n {
        acc += sd * rng.sample::<f64, _>(StandardNormal);
        w.push(acc);
    }
    let end = w[n];
    (0..n)
        .map(|i| {
            // average of the two walk nodes around the midpoint
            let tau = (i as f64 + 0.5) / n as f64;
            0.5 * (w[i] + w[i + 1]) - tau * end
        })
        .collect()
}

/// `∫_band` of the population distance for `kind`, using the trapezoid rule
/// on `n_freq` nodes (the quadrature of the tests).
pub fn population_threshold(
    x: &Model,
    y: &Model,
    kind: HypothesisKind,
    k: usize,
    band: &Band,
    n_freq: usize,
) -> Result<f64> {
    let freqs = band.grid(n_freq)?;
    let mut vals = Vec::with_capacity(freqs.len());
    for &w in &freqs {
        let fx = x.population(w)?;
        let fy = y.population(w)?;
        if fx.dim() != fy.dim() {
            return Err(Error::DimensionMismatch { expected: fx.dim(), found: fy.dim() });
        }
        let v = match kind {
            HypothesisKind::Operator => {
                fx.entries.iter().zip(fy.entries.iter()).map(|(a, b)| (a - b).norm_sqr()).sum()
            }
            HypothesisKind::Eigenprojector => {
                projector_distance_sq(&eigensystem(&fx, k)?, &eigensystem(&fy, k)?, k)?
            }
            HypothesisKind::Eigenvalue => {
                let a = eigensystem(&fx, k)?.eigenvalues[k - 1];
                let b = eigensystem(&fy, k)?.eigenvalues[k - 1];
                (a - b) * (a - b)
            }
        };
        vals.push(v);
    }
    band_integrate(&vals, &freqs, band)
}

/// Population threshold of a scenario point under `spec`'s kind and band.
pub fn scenario_threshold(point: &ScenarioSpec, spec: &HypothesisSpec, n_freq: usize) -> Result<f64> {
    let (x, y) = point.models()?;
    population_threshold(&x, &y, spec.kind, spec.k, &spec.band, n_freq)
}

/// Seeds of the two samples of replication `rep` at grid point `point`.
pub fn replication_seeds(master: u64, point: u64, rep: u64) -> (u64, u64) {
    let base = derive(master, Stream::Experiment, point);
    (derive(base, Stream::Generation, 2 * rep), derive(base, Stream::Generation, 2 * rep + 1))
}

/// Generates one pair of samples and runs every hypothesis on it. All
/// hypotheses must share the band, `nu_n` and dependence mode.
pub fn run_replication(
    models: &(Model, Model),
    t_len: usize,
    hypotheses: &[HypothesisSpec],
    pivot: &PivotSample,
    config: &EstimationConfig,
    seeds: (u64, u64),
) -> Result<Vec<TestResult>> {
    let first = hypotheses.first().ok_or_else(|| Error::InvalidInput("no hypotheses".into()))?;
    for h in hypotheses {
        if h.band != first.band || h.nu_n != first.nu_n || h.dependence != first.dependence {
            return Err(Error::InvalidInput("hypotheses of one experiment must share band, nu_n and dependence".into()));
        }
    }
    let x = models.0.generate(t_len, &mut rng(seeds.0))?;
    let y = models.1.generate(t_len, &mut rng(seeds.1))?;
    let pair = estimate_pair(&x, &y, first, config)?;
    hypotheses.iter().map(|h| test_surfaces(&pair, h, pivot, config.gap_tol)).collect()
}

/// Tally of one (grid point, hypothesis) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub point: ScenarioSpec,
    pub hypothesis: HypothesisSpec,
    pub reps: usize,
    pub rejections: usize,
    pub failures: usize,
    pub mean_distance: f64,
    pub error: Option<String>,
}

impl ExperimentRow {
    pub fn completed(&self) -> usize {
        self.reps - self.failures
    }

    pub fn rate(&self) -> f64 {
        let n = self.completed();
        if n == 0 {
            f64::NAN
        } else {
            self.rejections as f64 / n as f64
        }
    }

    /// Binomial standard error `√(p̂(1−p̂)/reps)`.
    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        libm::sqrt(p * (1.0 - p) / self.completed() as f64)
    }

    /// Builds a row from replication outcomes, in replication order.
    pub fn tally(point: ScenarioSpec, hypothesis: HypothesisSpec, outcomes: &[Result<TestResult>]) -> Self {
        let mut rejections = 0;
        let mut failures = 0;
        let mut dist = 0.0;
        let mut error = None;
        for o in outcomes {
            match o {
                Ok(r) => {
                    rejections += r.rejects() as usize;
                    dist += r.distance;
                }
                Err(e) => {
                    failures += 1;
                    if error.is_none() {
                        error = Some(alloc::format!("{e}"));
                    }
                }
            }
        }
        let ok = outcomes.len() - failures;
        ExperimentRow {
            point,
            hypothesis,
            reps: outcomes.len(),
            rejections,
            failures,
            mean_distance: if ok > 0 { dist / ok as f64 } else { f64::NAN },
            error,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub seed: u64,
    pub rows: Vec<ExperimentRow>,
}

pub const MIN_REPS: usize = 50;

/// Serial experiment over `points × hypotheses`; rows ordered by point, then
/// hypothesis.
pub fn rejection_experiment(
    points: &[ScenarioSpec],
    hypotheses: &[HypothesisSpec],
    reps: usize,
    pivot: &PivotSample,
    config: &EstimationConfig,
    seed: u64,
) -> Result<ExperimentReport> {
    if reps < MIN_REPS {
        return Err(Error::InvalidInput(alloc::format!("reps = {reps} below {MIN_REPS}")));
    }
    let mut rows = Vec::new();
    for (pi, point) in points.iter().enumerate() {
        let models = point.models()?;
        let mut per_h: Vec<Vec<Result<TestResult>>> = hypotheses.iter().map(|_| Vec::with_capacity(reps)).collect();
        for r in 0..reps {
            let seeds = replication_seeds(seed, pi as u64, r as u64);
            match run_replication(&models, point.t_len, hypotheses, pivot, config, seeds) {
                Ok(results) => {
                    for (slot, res) in per_h.iter_mut().zip(results) {
                        slot.push(Ok(res));
                    }
                }
                Err(e) => {
                    for slot in per_h.iter_mut() {
                        slot.push(Err(e.clone()));
                    }
                }
            }
        }
        for (h, outcomes) in hypotheses.iter().zip(per_h) {
            rows.push(ExperimentRow::tally(*point, *h, &outcomes));
        }
    }
    Ok(ExperimentReport { seed, rows })
}
