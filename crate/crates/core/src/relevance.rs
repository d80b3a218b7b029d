//! Relevant-difference tests: integrated distances, the self-normalizer and
//! the pivotal statistic `D̂ = (∫ ‖M̂(1, ω)‖² dω − Δ) / V̂`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::eigen::{
    eigengap_diagnostic, eigensystem, inner_sq, kronecker_distance_sq, kronecker_eigensystem,
    projector_distance_sq, rank_one_distance, EigenSystem, GapReport, DEFAULT_GAP_TOL,
};
use crate::error::{Error, Result};
use crate::fts::{center, FunctionalSeries};
use crate::pivot::PivotSample;
use crate::spectral::{spectral_surface, Band, BandwidthRule, SpectralEstimate, WindowSpec};

/// Which second-order feature is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisKind {
    Operator,
    Eigenprojector,
    Eigenvalue,
}

impl HypothesisKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "operator" => Ok(Self::Operator),
            "projector" | "eigenprojector" => Ok(Self::Eigenprojector),
            "eigenvalue" => Ok(Self::Eigenvalue),
            other => Err(Error::InvalidInput(alloc::format!("unknown hypothesis '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Operator => "operator",
            Self::Eigenprojector => "projector",
            Self::Eigenvalue => "eigenvalue",
        }
    }
}

/// Relationship between the two samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dependence {
    Independent,
    /// Jointly observed samples: equal lengths and bandwidths required.
    Dependent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisSpec {
    pub kind: HypothesisKind,
    /// 1-based component for the eigen kinds.
    pub k: usize,
    pub delta: f64,
    pub band: Band,
    pub alpha: f64,
    pub nu_n: usize,
    pub dependence: Dependence,
}

impl HypothesisSpec {
    pub fn operator(delta: f64) -> Self {
        HypothesisSpec {
            kind: HypothesisKind::Operator,
            k: 1,
            delta,
            band: Band::FULL,
            alpha: 0.05,
            nu_n: 20,
            dependence: Dependence::Independent,
        }
    }

    pub fn projector(k: usize, delta: f64) -> Self {
        HypothesisSpec { kind: HypothesisKind::Eigenprojector, k, ..Self::operator(delta) }
    }

    pub fn eigenvalue(k: usize, delta: f64) -> Self {
        HypothesisSpec { kind: HypothesisKind::Eigenvalue, k, ..Self::operator(delta) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidInput(alloc::format!("delta = {} must be finite and >= 0", self.delta)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(alloc::format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        if self.nu_n < 3 {
            return Err(Error::InvalidInput(alloc::format!("nu_n = {} must be at least 3", self.nu_n)));
        }
        if self.kind != HypothesisKind::Operator && self.k == 0 {
            return Err(Error::InvalidInput("component k must be >= 1".into()));
        }
        Ok(())
    }
}

/// How the spectral surfaces are estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationConfig {
    pub window: WindowSpec,
    pub bandwidth: BandwidthRule,
    pub n_freq: usize,
    pub center: bool,
    pub gap_tol: f64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            window: WindowSpec::DANIELL,
            bandwidth: BandwidthRule::default(),
            n_freq: 64,
            center: true,
            gap_tol: DEFAULT_GAP_TOL,
        }
    }
}

/// `{i/n : i = 1..n−1} ∪ {1}`.
pub fn eta_grid(nu_n: usize) -> Vec<f64> {
    (1..=nu_n).map(|i| if i == nu_n { 1.0 } else { i as f64 / nu_n as f64 }).collect()
}

/// Which sample an eigengap warning refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sample {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWarning {
    pub sample: Sample,
    pub report: GapReport,
}

/// Squared pointwise distances `values[i][j]` at `(etas[i], freqs[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCurve {
    pub kind: HypothesisKind,
    pub etas: Vec<f64>,
    pub freqs: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub gap_warnings: Vec<GapWarning>,
}

fn check_grids(sx: &SpectralEstimate, sy: &SpectralEstimate) -> Result<()> {
    if sx.etas != sy.etas {
        return Err(Error::GridMismatch("eta grids differ".into()));
    }
    if sx.freqs != sy.freqs {
        return Err(Error::GridMismatch("frequency grids differ".into()));
    }
    if sx.dim() != sy.dim() {
        return Err(Error::DimensionMismatch { expected: sx.dim(), found: sy.dim() });
    }
    Ok(())
}

fn gap_checks(systems: &[EigenSystem], k: usize, tol: f64, sample: Sample, out: &mut Vec<GapWarning>) {
    for e in systems {
        if k < e.spectrum.len() || k > 1 {
            let report = eigengap_diagnostic(e, k, tol);
            if !report.ok {
                out.push(GapWarning { sample, report });
            }
        }
    }
}

/// Pointwise squared distances between two surfaces.
pub fn distance_curve(
    sx: &SpectralEstimate,
    sy: &SpectralEstimate,
    spec: &HypothesisSpec,
) -> Result<DistanceCurve> {
    distance_curve_with_tol(sx, sy, spec, DEFAULT_GAP_TOL)
}

pub fn distance_curve_with_tol(
    sx: &SpectralEstimate,
    sy: &SpectralEstimate,
    spec: &HypothesisSpec,
    gap_tol: f64,
) -> Result<DistanceCurve> {
    check_grids(sx, sy)?;
    let d = sx.dim();
    let k = spec.k;
    if spec.kind != HypothesisKind::Operator && k > d {
        return Err(Error::ComponentOutOfRange { k, available: d });
    }
    let mut values = Vec::with_capacity(sx.etas.len());
    let mut gap_warnings = Vec::new();
    let last = sx.etas.len() - 1;
    for (i, &eta) in sx.etas.iter().enumerate() {
        let e2 = eta * eta;
        let row: Vec<f64> = match spec.kind {
            HypothesisKind::Operator => sx.ops[i]
                .iter()
                .zip(&sy.ops[i])
                .map(|(a, b)| {
                    let s: f64 = a.entries.iter().zip(b.entries.iter()).map(|(x, y)| (x - y).norm_sqr()).sum();
                    e2 * s
                })
                .collect(),
            _ => {
                let ex = sx.ops[i].iter().map(|op| eigensystem(op, k)).collect::<Result<Vec<_>>>()?;
                let ey = sy.ops[i].iter().map(|op| eigensystem(op, k)).collect::<Result<Vec<_>>>()?;
                if i == last {
                    gap_checks(&ex, k, gap_tol, Sample::X, &mut gap_warnings);
                    gap_checks(&ey, k, gap_tol, Sample::Y, &mut gap_warnings);
                }
                ex.iter()
                    .zip(&ey)
                    .map(|(a, b)| {
                        if spec.kind == HypothesisKind::Eigenprojector {
                            projector_distance_sq(a, b, k).map(|v| e2 * v)
                        } else {
                            let diff = a.eigenvalues[k - 1] - b.eigenvalues[k - 1];
                            Ok(e2 * diff * diff)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        values.push(row);
    }
    Ok(DistanceCurve { kind: spec.kind, etas: sx.etas.clone(), freqs: sx.freqs.clone(), values, gap_warnings })
}

/// Trapezoidal `∫_a^b`; a point band returns the single value.
pub fn band_integrate(values: &[f64], freqs: &[f64], band: &Band) -> Result<f64> {
    if values.len() != freqs.len() || values.is_empty() {
        return Err(Error::GridMismatch("values and frequencies differ in length".into()));
    }
    let tol = 1e-9;
    if band.is_point() {
        if freqs.len() == 1 && (freqs[0] - band.lo).abs() <= tol {
            return Ok(values[0]);
        }
        return freqs
            .iter()
            .position(|&f| (f - band.lo).abs() <= tol)
            .map(|j| values[j])
            .ok_or_else(|| Error::GridMismatch("band point not on the frequency grid".into()));
    }
    let n = freqs.len();
    if n < 2 || (freqs[0] - band.lo).abs() > tol || (freqs[n - 1] - band.hi).abs() > tol {
        return Err(Error::GridMismatch("frequency grid does not span the band".into()));
    }
    let mut s = 0.0;
    for j in 1..n {
        s += 0.5 * (freqs[j] - freqs[j - 1]) * (values[j] + values[j - 1]);
    }
    Ok(s)
}

/// `B(η_i)` for every η of the curve.
pub fn integrated_curve(curve: &DistanceCurve, band: &Band) -> Result<Vec<f64>> {
    curve.values.iter().map(|row| band_integrate(row, &curve.freqs, band)).collect()
}

/// `V̂ = ( (n−1)⁻¹ Σ_{i<n} [B(η_i) − η_i² B(1)]² )^{1/2}`.
pub fn self_normalizer(curve: &DistanceCurve, band: &Band) -> Result<f64> {
    let b = integrated_curve(curve, band)?;
    normalizer_from_integrals(&curve.etas, &b)
}

fn normalizer_from_integrals(etas: &[f64], b: &[f64]) -> Result<f64> {
    let n = etas.len();
    if n < 2 || (etas[n - 1] - 1.0).abs() > 1e-12 {
        return Err(Error::GridMismatch("eta grid must end at 1 and hold at least two points".into()));
    }
    let b1 = b[n - 1];
    let s: f64 = (0..n - 1)
        .map(|i| {
            let r = b[i] - etas[i] * etas[i] * b1;
            r * r
        })
        .sum();
    Ok(libm::sqrt(s / (n - 1) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Reject,
    Accept,
}

/// Outcome of a relevant-difference test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub kind: HypothesisKind,
    pub k: usize,
    /// `D̂`, or `±∞` when `V̂ = 0`.
    pub statistic: f64,
    /// `∫_a^b ‖M̂(1, ω)‖² dω`.
    pub distance: f64,
    pub v_hat: f64,
    pub delta: f64,
    pub alpha: f64,
    /// `q_{1−α}(𝔻)`.
    pub quantile: f64,
    pub p_value: f64,
    pub decision: Decision,
    pub degenerate: bool,
    /// `B(η_i)` along the η grid.
    pub integrals: Vec<f64>,
    pub gap_warnings: Vec<GapWarning>,
    pub notes: Vec<String>,
}

impl TestResult {
    pub fn rejects(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// Decision from a distance curve and a pivot sample.
pub fn test_from_curve(curve: &DistanceCurve, spec: &HypothesisSpec, pivot: &PivotSample) -> Result<TestResult> {
    spec.validate()?;
    if pivot.nu_n != spec.nu_n || curve.etas.len() != spec.nu_n {
        return Err(Error::GridMismatch(alloc::format!(
            "pivot sample built for nu_n = {}, hypothesis uses nu_n = {} with {} eta points",
            pivot.nu_n,
            spec.nu_n,
            curve.etas.len()
        )));
    }
    let integrals = integrated_curve(curve, &spec.band)?;
    let v_hat = normalizer_from_integrals(&curve.etas, &integrals)?;
    let distance = integrals[integrals.len() - 1];
    let quantile = pivot.quantile(1.0 - spec.alpha)?;
    let scale = integrals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let degenerate = v_hat == 0.0 || v_hat <= 1e-13 * scale;
    let statistic = if degenerate {
        if distance <= spec.delta {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        (distance - spec.delta) / v_hat
    };
    let decision = if statistic > quantile { Decision::Reject } else { Decision::Accept };
    let mut notes = Vec::new();
    if degenerate {
        notes.push(String::from("self-normalizer vanished; decision taken from the raw distance"));
    }
    Ok(TestResult {
        kind: spec.kind,
        k: spec.k,
        statistic,
        distance,
        v_hat,
        delta: spec.delta,
        alpha: spec.alpha,
        quantile,
        p_value: pivot.p_value(statistic),
        decision,
        degenerate,
        integrals,
        gap_warnings: curve.gap_warnings.clone(),
        notes,
    })
}

/// The two spectral surfaces a test is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePair {
    pub x: SpectralEstimate,
    pub y: SpectralEstimate,
}

/// Estimates both surfaces on the common η grid, enforcing the dependence
/// constraint.
pub fn estimate_pair(
    x: &FunctionalSeries,
    y: &FunctionalSeries,
    spec: &HypothesisSpec,
    config: &EstimationConfig,
) -> Result<SurfacePair> {
    spec.validate()?;
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    let bx = config.bandwidth.resolve(x.len())?;
    let by = config.bandwidth.resolve(y.len())?;
    if spec.dependence == Dependence::Dependent && (x.len() != y.len() || bx != by) {
        return Err(Error::DependenceViolation { t1: x.len(), t2: y.len(), b1: bx, b2: by });
    }
    let etas = eta_grid(spec.nu_n);
    let prep = |s: &FunctionalSeries| if config.center { center(s) } else { s.clone() };
    let sx = spectral_surface(&prep(x), spec.band, config.n_freq, &etas, &config.window, &config.bandwidth)?;
    let sy = spectral_surface(&prep(y), spec.band, config.n_freq, &etas, &config.window, &config.bandwidth)?;
    Ok(SurfacePair { x: sx, y: sy })
}

/// Full test of `spec` on two functional series.
pub fn relevant_test(
    x: &FunctionalSeries,
    y: &FunctionalSeries,
    spec: &HypothesisSpec,
    pivot: &PivotSample,
    config: &EstimationConfig,
) -> Result<TestResult> {
    let pair = estimate_pair(x, y, spec, config)?;
    test_surfaces(&pair, spec, pivot, config.gap_tol)
}

/// Test on precomputed surfaces.
pub fn test_surfaces(pair: &SurfacePair, spec: &HypothesisSpec, pivot: &PivotSample, gap_tol: f64) -> Result<TestResult> {
    let curve = distance_curve_with_tol(&pair.x, &pair.y, spec, gap_tol)?;
    let mut r = test_from_curve(&curve, spec, pivot)?;
    if !pair.x.window.is_checked() {
        r.notes.push(String::from("custom window: regularity conditions unchecked"));
    }
    Ok(r)
}

/// Directional surfaces of a separable field.
pub type SeparableSurfaces = [SpectralEstimate; 3];

/// Pointwise distances between two separable models.
///
/// Operators compare through `‖⊗A_i − ⊗B_i‖²`; the eigen kinds use the
/// `k`-th largest triple product among the first `per_direction` directional
/// eigenpairs of each axis.
pub fn separable_distance_curve(
    sx: &SeparableSurfaces,
    sy: &SeparableSurfaces,
    spec: &HypothesisSpec,
    per_direction: usize,
) -> Result<DistanceCurve> {
    for i in 0..3 {
        check_grids(&sx[i], &sy[i])?;
        if sx[i].etas != sx[0].etas || sx[i].freqs != sx[0].freqs {
            return Err(Error::GridMismatch("directional surfaces use different grids".into()));
        }
    }
    let etas = sx[0].etas.clone();
    let freqs = sx[0].freqs.clone();
    let full = per_direction * per_direction * per_direction;
    if spec.kind != HypothesisKind::Operator && (spec.k == 0 || spec.k > full) {
        return Err(Error::ComponentOutOfRange { k: spec.k, available: full });
    }
    let mut values = Vec::with_capacity(etas.len());
    for (i, &eta) in etas.iter().enumerate() {
        let e2 = eta * eta;
        let mut row = Vec::with_capacity(freqs.len());
        for j in 0..freqs.len() {
            let ax = [&sx[0].ops[i][j], &sx[1].ops[i][j], &sx[2].ops[i][j]];
            let ay = [&sy[0].ops[i][j], &sy[1].ops[i][j], &sy[2].ops[i][j]];
            let v = match spec.kind {
                HypothesisKind::Operator => kronecker_distance_sq(ax, ay)?,
                _ => {
                    let ex = [eigensystem(ax[0], per_direction)?, eigensystem(ax[1], per_direction)?, eigensystem(ax[2], per_direction)?];
                    let ey = [eigensystem(ay[0], per_direction)?, eigensystem(ay[1], per_direction)?, eigensystem(ay[2], per_direction)?];
                    let kx = kronecker_eigensystem([&ex[0], &ex[1], &ex[2]], per_direction, spec.k)?;
                    let ky = kronecker_eigensystem([&ey[0], &ey[1], &ey[2]], per_direction, spec.k)?;
                    let last = spec.k - 1;
                    if spec.kind == HypothesisKind::Eigenvalue {
                        let d = kx.values[last] - ky.values[last];
                        d * d
                    } else {
                        let (tx, ty) = (kx.triples[last], ky.triples[last]);
                        let overlaps = [
                            inner_sq(ex[0].vector(tx[0])?, ey[0].vector(ty[0])?),
                            inner_sq(ex[1].vector(tx[1])?, ey[1].vector(ty[1])?),
                            inner_sq(ex[2].vector(tx[2])?, ey[2].vector(ty[2])?),
                        ];
                        rank_one_distance(&overlaps)
                    }
                }
            };
            row.push(e2 * v);
        }
        values.push(row);
    }
    Ok(DistanceCurve { kind: spec.kind, etas, freqs, values, gap_warnings: Vec::new() })
}
