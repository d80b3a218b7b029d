//! Subcommand implementations. Each takes a validated [`RunConfig`] plus the
//! run locations and writes its result files into the output directory.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use specrel_core::eigen::{default_components, directional_surface, eigensystem, kronecker_eigensystem, SeparableSeries3D};
use specrel_core::fts::{project_to_basis, FunctionalSeries};
use specrel_core::pivot::PivotSample;
use specrel_core::relevance::{
    estimate_pair, eta_grid, separable_distance_curve, test_from_curve, test_surfaces, HypothesisKind, SeparableSurfaces,
};
use specrel_core::seed::{derive, Stream};
use specrel_core::simlab::{scenario_threshold, ExperimentRow, ScenarioId, ScenarioSpec};
use specrel_core::spectral::{spectral_surface, BandwidthRule};

use crate::cache::{self, Lookup};
use crate::config::{Common, DeltaSource, HypothesisConfig, RunConfig, Task};
use crate::error::{CliError, CliResult, Stage};
use crate::io::{read_curves, read_field, write_table, write_text, RawCurves};
use crate::parallel;
use crate::report::{fmt_num, num, nums, test_result_definitions, test_result_json, test_table, to_pretty};

/// Where a run reads caches and writes results. None of these affect the
/// reported numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Locations {
    pub out: PathBuf,
    pub cache_dir: PathBuf,
    /// Worker cap; `0` lets the pool pick.
    pub threads: usize,
    /// Suppress the human-readable stdout tables.
    pub quiet: bool,
}

impl Default for Locations {
    fn default() -> Self {
        Locations { out: PathBuf::from("."), cache_dir: PathBuf::from(".specrel-cache"), threads: 0, quiet: false }
    }
}

/// How the pivot sample was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    Regenerated,
}

/// What a run produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub pivot_cache: Option<CacheStatus>,
}

pub fn execute(cfg: &RunConfig, loc: &Locations) -> CliResult<Outcome> {
    cfg.validate()?;
    let pool = parallel::pool(loc.threads)?;
    fs::create_dir_all(&loc.out).map_err(|e| CliError::io("create output directory", format!("{}: {e}", loc.out.display())))?;
    match &cfg.task {
        Task::Estimate { .. } => estimate(cfg, loc),
        Task::Test { .. } => test(cfg, loc, &pool),
        Task::Pivot { .. } => pivot(cfg, loc, &pool),
        Task::Experiment { .. } => experiment(cfg, loc, &pool),
        Task::Separable { .. } => separable(cfg, loc, &pool),
    }
}

fn say(loc: &Locations, text: &str) {
    if !loc.quiet {
        print!("{text}");
        let _ = std::io::stdout().flush();
    }
}

fn config_json(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// Seed of the pivot sub-stream.
pub fn pivot_seed(common: &Common) -> u64 {
    derive(common.seed, Stream::Pivot, 0)
}

/// Loads the pivot sample from the cache or simulates and stores it.
pub fn obtain_pivot(common: &Common, loc: &Locations, pool: &rayon::ThreadPool) -> CliResult<(PivotSample, CacheStatus)> {
    let (nu, np, ns) = (common.nu_n, common.pivot.n_paths, common.pivot.n_steps);
    let seed = pivot_seed(common);
    let path = cache::cache_file(&loc.cache_dir, nu, np, ns, seed);
    let status = match cache::load(&path, nu, np, ns, seed) {
        Lookup::Hit(s) => {
            eprintln!("pivot: cache hit {}", path.display());
            return Ok((s, CacheStatus::Hit));
        }
        Lookup::Miss => CacheStatus::Miss,
        Lookup::Corrupt(why) => {
            eprintln!("warning: pivot cache {} is unusable ({why}); regenerating", path.display());
            CacheStatus::Regenerated
        }
    };
    let start = Instant::now();
    let sample = parallel::simulate_pivot(pool, nu, np, ns, seed)?;
    eprintln!("pivot: simulated {np} paths x {ns} steps in {:.1} s", start.elapsed().as_secs_f64());
    cache::store(&path, &sample)?;
    Ok((sample, status))
}

/// Reads curves and maps them to orthonormal basis coordinates.
pub fn load_series(path: &Path, common: &Common) -> CliResult<(FunctionalSeries, RawCurves, f64)> {
    let raw = read_curves(path)?;
    let basis = common.basis.resolve(raw.grid.len())?;
    let (series, report) =
        project_to_basis(&raw.values, &raw.grid, &basis).map_err(|e| CliError::from_core_input("project onto basis", e))?;
    Ok((series, raw, report.relative_residual))
}

fn estimate(cfg: &RunConfig, loc: &Locations) -> CliResult<Outcome> {
    let Task::Estimate { input, top_k, dump_operators } = &cfg.task else { unreachable!() };
    let c = &cfg.common;
    let (series, raw, residual) = load_series(input, c)?;
    let series = if c.center { specrel_core::fts::center(&series) } else { series };
    let est = c.estimation();
    let surf = spectral_surface(&series, c.band(), c.n_freq, &[1.0], &est.window, &est.bandwidth).stage("estimate spectral density")?;
    let k = (*top_k).min(series.dim());
    let mut hs_rows = Vec::new();
    let mut eig_rows = Vec::new();
    let mut op_rows = Vec::new();
    let mut mean_eig = vec![0.0; k];
    for op in surf.full() {
        hs_rows.push(vec![fmt_num(op.freq), fmt_num(op.hs_norm_sq().sqrt())]);
        let e = eigensystem(op, k).stage("eigendecomposition")?;
        let mut row = vec![fmt_num(op.freq)];
        for (m, &v) in mean_eig.iter_mut().zip(&e.eigenvalues) {
            *m += v / surf.freqs.len() as f64;
            row.push(fmt_num(v));
        }
        eig_rows.push(row);
        if *dump_operators {
            for i in 0..op.dim() {
                for j in 0..op.dim() {
                    let z = op.entries[(i, j)];
                    op_rows.push(vec![fmt_num(op.freq), i.to_string(), j.to_string(), fmt_num(z.re), fmt_num(z.im)]);
                }
            }
        }
    }
    let mut files = Vec::new();
    let hs = loc.out.join("hs_norms.csv");
    write_table(&hs, &["frequency", "hs_norm"], &hs_rows)?;
    files.push(hs);
    let eig = loc.out.join("eigenvalues.csv");
    let names: Vec<String> = (1..=k).map(|j| format!("lambda_{j}")).collect();
    let mut header = vec!["frequency"];
    header.extend(names.iter().map(String::as_str));
    write_table(&eig, &header, &eig_rows)?;
    files.push(eig);
    if *dump_operators {
        let p = loc.out.join("operators.csv");
        write_table(&p, &["frequency", "row", "col", "re", "im"], &op_rows)?;
        files.push(p);
    }
    let summary = json!({
        "config": config_json(cfg),
        "summary": {
            "t_len": series.len(),
            "grid_points": raw.grid.len(),
            "basis_dim": series.dim(),
            "projection_relative_residual": num(residual),
            "bandwidth": num(surf.bandwidth),
            "mean_eigenvalues": nums(&mean_eig),
        },
        "definitions": {
            "hs_norm": "Hilbert-Schmidt norm of the full-sample spectral density estimate at each frequency (radians)",
            "lambda_j": "j-th largest eigenvalue of the estimate",
            "mean_eigenvalues": "eigenvalues averaged over the frequency grid",
            "projection_relative_residual": "Frobenius norm of the part of the curves outside the basis, relative to the curves",
        },
    });
    let p = loc.out.join("estimate.json");
    write_text(&p, &to_pretty(&summary))?;
    files.push(p);
    say(loc, &format!("T = {}, d = {}, mean leading eigenvalues: {}\n", series.len(), series.dim(),
        mean_eig.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ")));
    Ok(Outcome { files, pivot_cache: None })
}

fn test(cfg: &RunConfig, loc: &Locations, pool: &rayon::ThreadPool) -> CliResult<Outcome> {
    let Task::Test { input_x, input_y, hypothesis } = &cfg.task else { unreachable!() };
    let c = &cfg.common;
    let (x, _, _) = load_series(input_x, c)?;
    let (y, _, _) = load_series(input_y, c)?;
    if x.dim() != y.dim() {
        return Err(CliError::io("read input", format!("samples have different dimensions after projection ({} vs {})", x.dim(), y.dim())));
    }
    let spec = hypothesis.spec(c);
    let est = c.estimation();
    let pair = estimate_pair(&x, &y, &spec, &est).stage("estimate spectral densities")?;
    let (pivot, status) = obtain_pivot(c, loc, pool)?;
    let result = test_surfaces(&pair, &spec, &pivot, est.gap_tol).stage("test")?;
    let doc = json!({
        "config": config_json(cfg),
        "samples": { "x": { "t_len": x.len() }, "y": { "t_len": y.len() }, "dim": x.dim(),
                     "bandwidth_x": num(pair.x.bandwidth), "bandwidth_y": num(pair.y.bandwidth) },
        "pivot": { "n_paths": pivot.n_paths(), "n_steps": pivot.n_steps, "seed": pivot.seed },
        "result": test_result_json(&result),
        "definitions": test_result_definitions(),
    });
    let p = loc.out.join("test_result.json");
    write_text(&p, &to_pretty(&doc))?;
    say(loc, &test_table(std::slice::from_ref(&result)));
    Ok(Outcome { files: vec![p], pivot_cache: Some(status) })
}

fn pivot(cfg: &RunConfig, loc: &Locations, pool: &rayon::ThreadPool) -> CliResult<Outcome> {
    let Task::Pivot { alphas } = &cfg.task else { unreachable!() };
    let (sample, status) = obtain_pivot(&cfg.common, loc, pool)?;
    let mut rows = Vec::new();
    let mut table = String::from("alpha      level      quantile\n");
    for &a in alphas {
        let q = sample.quantile(1.0 - a).stage("pivot quantile")?;
        table.push_str(&format!("{:<10} {:<10} {:.6}\n", fmt_num(a), fmt_num(1.0 - a), q));
        rows.push(json!({ "alpha": num(a), "level": num(1.0 - a), "quantile": num(q) }));
    }
    let doc = json!({
        "config": config_json(cfg),
        "pivot": {
            "nu_n": sample.nu_n, "n_paths": sample.n_paths(), "n_steps": sample.n_steps, "seed": sample.seed,
            "median": num(sample.median()),
            "quantiles": rows,
        },
        "definitions": {
            "quantile": "upper quantile of B(1) / sqrt(mean over eta_i < 1 of eta_i^2 (B(eta_i) - eta_i B(1))^2), eta_i = i/nu_n, B standard Brownian motion; order statistic ceil(level * n_paths)",
        },
    });
    let p = loc.out.join("pivot.json");
    write_text(&p, &to_pretty(&doc))?;
    say(loc, &table);
    Ok(Outcome { files: vec![p], pivot_cache: Some(status) })
}

/// Grid points of an experiment: sample lengths outer, parameters inner.
pub fn experiment_points(scenario: &str, t_lens: &[usize], params: &[f64]) -> CliResult<Vec<ScenarioSpec>> {
    let id = ScenarioId::parse(scenario).stage("scenario")?;
    let mut out = Vec::new();
    for &t in t_lens {
        for &p in params {
            out.push(ScenarioSpec::new(id, t, p).stage("scenario")?);
        }
    }
    Ok(out)
}

/// One finished grid point as stored in the progress file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ProgressRow {
    index: usize,
    delta: f64,
    reps: usize,
    rejections: usize,
    failures: usize,
    mean_distance: Option<f64>,
    error: Option<String>,
}

fn fingerprint(cfg: &RunConfig) -> String {
    let text = serde_json::to_string(cfg).expect("config serializes");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn load_progress(path: &Path, fp: &str) -> Vec<ProgressRow> {
    let Ok(text) = fs::read_to_string(path) else { return Vec::new() };
    let mut lines = text.lines();
    if lines.next() != Some(&format!("fingerprint {fp}")[..]) {
        eprintln!("experiment: progress file {} belongs to another configuration; starting over", path.display());
        return Vec::new();
    }
    // a torn last line (interrupted write) is dropped
    lines.map_while(|l| serde_json::from_str::<ProgressRow>(l).ok()).collect()
}

fn experiment(cfg: &RunConfig, loc: &Locations, pool: &rayon::ThreadPool) -> CliResult<Outcome> {
    let Task::Experiment { scenario, params, t_lens, reps, hypothesis, k, delta } = &cfg.task else { unreachable!() };
    let c = &cfg.common;
    let points = experiment_points(scenario, t_lens, params)?;
    let est = c.estimation();
    let (pivot, status) = obtain_pivot(c, loc, pool)?;
    let fp = fingerprint(cfg);
    let progress_path = loc.out.join("experiment.progress");
    let mut done = load_progress(&progress_path, &fp);
    if done.iter().enumerate().any(|(i, r)| r.index != i) {
        done.clear();
    }
    if done.is_empty() {
        write_text(&progress_path, &format!("fingerprint {fp}\n"))?;
    } else {
        eprintln!("experiment: resuming after {} completed grid points", done.len());
    }
    let start = Instant::now();
    for (pi, point) in points.iter().enumerate().skip(done.len()) {
        let mut h = HypothesisConfig { kind: hypothesis.clone(), k: *k, delta: 0.0 }.spec(c);
        h.delta = match delta {
            DeltaSource::Fixed(d) => *d,
            DeltaSource::Oracle(p) => {
                let reference = ScenarioSpec { param: *p, ..*point };
                scenario_threshold(&reference, &h, c.n_freq).stage("population threshold")?
            }
        };
        let t0 = Instant::now();
        let row = match point.models() {
            Ok(models) => {
                let outcomes = parallel::replications(pool, &models, point.t_len, &[h], &pivot, &est, c.seed, pi as u64, *reps);
                let outcomes: Vec<_> = outcomes.into_iter().map(|o| o.map(|mut v| v.remove(0))).collect();
                ExperimentRow::tally(*point, h, &outcomes)
            }
            Err(e) => ExperimentRow {
                point: *point,
                hypothesis: h,
                reps: *reps,
                rejections: 0,
                failures: *reps,
                mean_distance: f64::NAN,
                error: Some(e.to_string()),
            },
        };
        eprintln!(
            "experiment: point {}/{} (T = {}, param = {}) rate {:.3} in {:.1} s",
            pi + 1,
            points.len(),
            point.t_len,
            point.param,
            row.rate(),
            t0.elapsed().as_secs_f64()
        );
        let pr = ProgressRow {
            index: pi,
            delta: h.delta,
            reps: row.reps,
            rejections: row.rejections,
            failures: row.failures,
            mean_distance: row.mean_distance.is_finite().then_some(row.mean_distance),
            error: row.error.clone(),
        };
        let mut f = fs::OpenOptions::new().append(true).open(&progress_path).stage("write progress")?;
        writeln!(f, "{}", serde_json::to_string(&pr).expect("row serializes")).stage("write progress")?;
        f.sync_all().stage("write progress")?;
        done.push(pr);
    }
    eprintln!("experiment: finished in {:.1} s", start.elapsed().as_secs_f64());

    let mut csv_rows = Vec::new();
    let mut json_rows = Vec::new();
    let mut succeeded = 0;
    for (point, r) in points.iter().zip(&done) {
        let row = ExperimentRow {
            point: *point,
            hypothesis: HypothesisConfig { kind: hypothesis.clone(), k: *k, delta: r.delta }.spec(c),
            reps: r.reps,
            rejections: r.rejections,
            failures: r.failures,
            mean_distance: r.mean_distance.unwrap_or(f64::NAN),
            error: r.error.clone(),
        };
        if row.completed() > 0 {
            succeeded += 1;
        }
        csv_rows.push(vec![
            point.id.name().to_string(),
            point.t_len.to_string(),
            point.d.to_string(),
            fmt_num(point.param),
            hypothesis.clone(),
            k.to_string(),
            fmt_num(r.delta),
            row.reps.to_string(),
            row.completed().to_string(),
            row.rejections.to_string(),
            fmt_num(row.rate()),
            fmt_num(row.std_error()),
            fmt_num(row.mean_distance),
            row.error.clone().unwrap_or_default(),
        ]);
        json_rows.push(json!({
            "scenario": point.id.name(), "t_len": point.t_len, "d": point.d, "param": num(point.param),
            "hypothesis": hypothesis, "k": k, "delta": num(r.delta),
            "reps": row.reps, "completed": row.completed(), "rejections": row.rejections,
            "rate": num(row.rate()), "std_error": num(row.std_error()), "mean_distance": num(row.mean_distance),
            "error": row.error,
        }));
    }
    let csv_path = loc.out.join("experiment.csv");
    write_table(
        &csv_path,
        &["scenario", "t_len", "d", "param", "hypothesis", "k", "delta", "reps", "completed", "rejections", "rate", "std_error", "mean_distance", "error"],
        &csv_rows,
    )?;
    let doc = json!({
        "config": config_json(cfg),
        "pivot": { "n_paths": pivot.n_paths(), "n_steps": pivot.n_steps, "seed": pivot.seed },
        "rows": json_rows,
        "definitions": {
            "rate": "fraction of completed replications rejecting the relevant hypothesis at level alpha",
            "std_error": "binomial standard error sqrt(rate (1 - rate) / completed)",
            "delta": "threshold used; with an oracle source, the integrated population distance at the reference parameter",
            "mean_distance": "mean over replications of the estimated integrated distance",
        },
    });
    let json_path = loc.out.join("experiment.json");
    write_text(&json_path, &to_pretty(&doc))?;
    let mut table = String::from("T      param      delta          rate     se\n");
    for r in &csv_rows {
        table.push_str(&format!("{:<6} {:<10} {:<14} {:<8} {}\n", r[1], r[3], r[6], r[10], r[11]));
    }
    say(loc, &table);
    if succeeded == 0 {
        return Err(CliError::numerical("experiment", "every grid point failed"));
    }
    Ok(Outcome { files: vec![csv_path, json_path], pivot_cache: Some(status) })
}

struct Subject {
    surfaces: SeparableSurfaces,
    t_len: usize,
    dims: [usize; 3],
}

fn separable(cfg: &RunConfig, loc: &Locations, pool: &rayon::ThreadPool) -> CliResult<Outcome> {
    let Task::Separable { inputs, hypotheses, per_direction, detrend } = &cfg.task else { unreachable!() };
    let c = &cfg.common;
    let est = c.estimation();
    let etas = eta_grid(c.nu_n);
    let band = c.band();
    let fields = inputs.iter().map(|p| read_field(p)).collect::<CliResult<Vec<_>>>()?;
    let subjects: Vec<Subject> = pool.install(|| {
        fields
            .into_par_iter()
            .map(|f| {
                let s = SeparableSeries3D::on_raw_grid(f.data, f.t_len, f.dims).map_err(|e| CliError::from_core_input("read field", e))?;
                let s = if *detrend { s.detrended_cubic().stage("detrend")? } else { s.centered() };
                let mut surf = Vec::with_capacity(3);
                for dir in 1..=3 {
                    surf.push(directional_surface(&s, dir, band, c.n_freq, &etas, &est.window, &est.bandwidth).stage("directional estimate")?);
                }
                let surfaces: SeparableSurfaces = surf.try_into().expect("three directions");
                Ok(Subject { surfaces, t_len: s.len(), dims: s.dims() })
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let t_min = subjects.iter().map(|s| s.t_len).min().expect("at least two subjects");
    let dim_min = subjects.iter().flat_map(|s| s.dims).min().expect("three axes");
    let n_dir = per_direction.unwrap_or_else(|| default_components(t_min)).min(dim_min);
    if c.dependent && subjects.iter().any(|s| s.t_len != subjects[0].t_len) {
        let b = |t| BandwidthRule::PowerLaw { exponent: c.bandwidth_exp }.resolve(t).unwrap_or(f64::NAN);
        let t2 = subjects.iter().map(|s| s.t_len).find(|&t| t != subjects[0].t_len).unwrap_or(0);
        return Err(CliError::from_core(
            "separable",
            specrel_core::Error::DependenceViolation { t1: subjects[0].t_len, t2, b1: b(subjects[0].t_len), b2: b(t2) },
        ));
    }
    let (pivot, status) = obtain_pivot(c, loc, pool)?;

    let mut files = Vec::new();
    // Kronecker eigenvalue table at η = 1, averaged over the frequency grid
    let top = n_dir * n_dir * n_dir;
    let mut kron_rows = Vec::new();
    let mut kron_json = Vec::new();
    for (si, s) in subjects.iter().enumerate() {
        let n_freq = s.surfaces[0].freqs.len();
        let mut mean = vec![0.0; top];
        let mut triples = Vec::new();
        for j in 0..n_freq {
            let e = [
                eigensystem(&s.surfaces[0].full()[j], n_dir).stage("directional eigensystem")?,
                eigensystem(&s.surfaces[1].full()[j], n_dir).stage("directional eigensystem")?,
                eigensystem(&s.surfaces[2].full()[j], n_dir).stage("directional eigensystem")?,
            ];
            let k = kronecker_eigensystem([&e[0], &e[1], &e[2]], n_dir, top).stage("Kronecker eigenvalues")?;
            for (m, v) in mean.iter_mut().zip(&k.values) {
                *m += v / n_freq as f64;
            }
            if j == 0 {
                triples = k.triples.clone();
            }
        }
        let mut order: Vec<usize> = (0..top).collect();
        order.sort_by(|&a, &b| mean[b].total_cmp(&mean[a]).then(a.cmp(&b)));
        for (rank, &i) in order.iter().enumerate() {
            kron_rows.push(vec![(si + 1).to_string(), (rank + 1).to_string(), fmt_num(mean[i])]);
        }
        kron_json.push(json!({
            "subject": si + 1,
            "mean_values": nums(&order.iter().map(|&i| mean[i]).collect::<Vec<_>>()),
            "triples_at_first_frequency": triples,
        }));
    }
    let kp = loc.out.join("kronecker_eigenvalues.csv");
    write_table(&kp, &["subject", "rank", "mean_value"], &kron_rows)?;
    files.push(kp);

    let n = subjects.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut tests_json = Vec::new();
    let mut table = String::new();
    for h in hypotheses {
        let spec = h.spec(c);
        let results = pool.install(|| {
            pairs
                .par_iter()
                .map(|&(a, b)| {
                    let curve = separable_distance_curve(&subjects[a].surfaces, &subjects[b].surfaces, &spec, n_dir)
                        .stage("separable distance")?;
                    test_from_curve(&curve, &spec, &pivot).stage("separable test")
                })
                .collect::<CliResult<Vec<_>>>()
        })?;
        let mut matrix = vec![vec![Value::Null; n]; n];
        let mut rows = Vec::new();
        for (&(a, b), r) in pairs.iter().zip(&results) {
            matrix[a][b] = num(r.p_value);
        }
        for a in 0..n {
            let mut row = vec![(a + 1).to_string()];
            for b in 0..n {
                row.push(if b > a { fmt_num(results[pair_index(n, a, b)].p_value) } else { String::new() });
            }
            rows.push(row);
        }
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let mut header = vec!["subject"];
        header.extend(names.iter().map(String::as_str));
        let kind = HypothesisKind::parse(&h.kind).expect("validated hypothesis");
        let stem = match kind {
            HypothesisKind::Operator => "pvalues_operator".to_string(),
            _ => format!("pvalues_{}_k{}", kind.name(), h.k),
        };
        let p = loc.out.join(format!("{stem}.csv"));
        write_table(&p, &header, &rows)?;
        files.push(p);
        table.push_str(&format!("{} (k = {}, delta = {}): p-values\n", kind.name(), h.k, fmt_num(h.delta)));
        for r in &rows {
            table.push_str(&r.iter().map(|s| format!("{s:>10}")).collect::<String>());
            table.push('\n');
        }
        tests_json.push(json!({
            "hypothesis": kind.name(), "k": h.k, "delta": num(h.delta),
            "p_values": matrix,
            "results": pairs.iter().zip(&results).map(|(&(a, b), r)| json!({
                "pair": [a + 1, b + 1], "result": test_result_json(r),
            })).collect::<Vec<_>>(),
        }));
    }
    let doc = json!({
        "config": config_json(cfg),
        "subjects": subjects.iter().zip(inputs).map(|(s, p)| json!({
            "input": p, "t_len": s.t_len, "dims": s.dims,
        })).collect::<Vec<_>>(),
        "components_per_direction": n_dir,
        "pivot": { "n_paths": pivot.n_paths(), "n_steps": pivot.n_steps, "seed": pivot.seed },
        "kronecker": kron_json,
        "tests": tests_json,
        "definitions": {
            "p_values": "upper-triangular matrix; entry (a, b) is the p-value of the test comparing subjects a and b",
            "kronecker.mean_values": "products of directional eigenvalues at eta = 1, largest first, averaged over the frequency grid",
            "operator distance": "squared Hilbert-Schmidt distance between the Kronecker products of the directional estimates",
            "projector/eigenvalue distance": "k-th largest triple of directional eigenpairs in each subject",
        },
        "result_definitions": test_result_definitions(),
    });
    let p = loc.out.join("separable.json");
    write_text(&p, &to_pretty(&doc))?;
    files.push(p);
    say(loc, &table);
    Ok(Outcome { files, pivot_cache: Some(status) })
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    // pairs enumerated row by row over the upper triangle
    a * n - a * (a + 1) / 2 + (b - a - 1)
}
