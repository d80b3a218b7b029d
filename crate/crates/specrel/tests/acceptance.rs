//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//!
//! Run with `cargo test --release -p specrel --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use specrel::parallel;
use specrel_core::eigen::{
    directional_sequential_estimate, eigensystem, kronecker_eigensystem, projector_distance_sq, EigenSystem,
    SeparableSeries3D,
};
use specrel_core::fts::{center, BasisSpec, FunctionalSeries, OperatorMatrix};
use specrel_core::pivot::PivotSample;
use specrel_core::relevance::{EstimationConfig, HypothesisSpec};
use specrel_core::seed::{derive, rng, Stream};
use specrel_core::simlab::{scenario_threshold, ExperimentRow, ScenarioId, ScenarioSpec};
use specrel_core::spectral::{naive_sequential_estimate, sequential_estimate, spectral_surface, Band, WindowSpec};

const MASTER: u64 = 20_240_601;
const ALPHA: f64 = 0.05;

// criterion 1
const C1_T: usize = 256;
const C1_REPS: usize = 500;
const C1_RATE: (f64, f64) = (0.02, 0.10);
// criterion 2
const C2_T: [usize; 2] = [128, 256];
const C2_REPS: usize = 500;
// criterion 3
const C3_T: usize = 256;
const C3_REPS: usize = 500;
const C3_POWER: f64 = 0.8;
const C3_REFERENCE_DELTA: f64 = 0.89;
const C3_BELOW: (f64, f64) = (0.10, 0.10);
const C3_ABOVE: (f64, f64) = (0.20, 0.90);
// criterion 4
const C4_T: usize = 512;
const C4_REPS: usize = 100;
const C4_HS_REL: f64 = 0.20;
const C4_LAMBDA_REL: f64 = 0.15;
// criterion 5
const C5_INSTANCES: usize = 200;
const C5_TOL: f64 = 1e-10;
// criterion 6
const C6_PATHS: usize = 100_000;
const C6_STEPS: usize = 10_000;
const C6_GOLDEN_Q95: f64 = 9.881;
const C6_REL: f64 = 0.02;
// criterion 7
const C7_PAIRS: usize = 1000;
const C7_TOL: f64 = 1e-10;
// criterion 8
const C8_TOL: f64 = 1e-8;

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

fn pool() -> rayon::ThreadPool {
    parallel::pool(8).unwrap()
}

fn pivot(pool: &rayon::ThreadPool) -> PivotSample {
    parallel::simulate_pivot(pool, 20, 50_000, 10_000, derive(MASTER, Stream::Pivot, 0)).unwrap()
}

/// Rejection counts of `hypotheses` over `reps` replications of `point`.
fn rates(
    pool: &rayon::ThreadPool,
    pivot: &PivotSample,
    point: ScenarioSpec,
    hypotheses: &[HypothesisSpec],
    reps: usize,
    tag: u64,
) -> Vec<ExperimentRow> {
    let models = point.models().unwrap();
    let out = parallel::replications(pool, &models, point.t_len, hypotheses, pivot, &EstimationConfig::default(), MASTER, tag, reps);
    hypotheses
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let outcomes: Vec<_> = out.iter().map(|o| o.clone().map(|v| v[i].clone())).collect();
            ExperimentRow::tally(point, *h, &outcomes)
        })
        .collect()
}

fn criterion_1(pool: &rayon::ThreadPool, pv: &PivotSample) -> Line {
    let point = ScenarioSpec::new(ScenarioId::BbAmplitude, C1_T, 3.0).unwrap();
    let mut h = HypothesisSpec::operator(0.0);
    h.delta = scenario_threshold(&point, &h, 64).unwrap();
    let row = &rates(pool, pv, point, &[h], C1_REPS, 1)[0];
    let r = row.rate();
    Line {
        id: 1,
        pass: row.failures == 0 && r >= C1_RATE.0 && r <= C1_RATE.1,
        detail: format!(
            "scenario 2 boundary (factor 1.2^3), delta = {:.5} (band average {:.5}), T = {C1_T}, {C1_REPS} reps: rate {r:.3} in [{}, {}]",
            h.delta,
            h.delta / PI,
            C1_RATE.0,
            C1_RATE.1
        ),
    }
}

fn criterion_2(pool: &rayon::ThreadPool, pv: &PivotSample) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, &t) in C2_T.iter().enumerate() {
        let reference = ScenarioSpec::new(ScenarioId::BbShift, t, 0.05).unwrap();
        let point = ScenarioSpec::new(ScenarioId::BbShift, t, 0.02).unwrap();
        let mut hs = [HypothesisSpec::operator(0.0), HypothesisSpec::projector(1, 0.0)];
        for h in hs.iter_mut() {
            h.delta = scenario_threshold(&reference, h, 64).unwrap();
        }
        for row in rates(pool, pv, point, &hs, C2_REPS, 10 + i as u64) {
            let bound = ALPHA + 2.0 * row.std_error();
            pass &= row.failures == 0 && row.rate() <= bound;
            parts.push(format!("T = {t} {}: {:.3} <= {:.3}", row.hypothesis.kind.name(), row.rate(), bound));
        }
    }
    Line { id: 2, pass, detail: format!("scenario 1 interior (0.02 vs delta at 0.05): {}", parts.join("; ")) }
}

fn criterion_3(pool: &rayon::ThreadPool, pv: &PivotSample) -> Line {
    let point = ScenarioSpec::new(ScenarioId::ArShift, C3_T, 0.25).unwrap();
    let reference = ScenarioSpec::new(ScenarioId::ArShift, C3_T, 0.075).unwrap();
    let mut h1 = HypothesisSpec::projector(1, 0.0);
    h1.delta = scenario_threshold(&reference, &h1, 64).unwrap();
    let power = rates(pool, pv, point, &[h1], C3_REPS, 20)[0].rate();
    let h3 = HypothesisSpec::projector(3, 0.0);
    let below = rates(pool, pv, ScenarioSpec::new(ScenarioId::ArShift, C3_T, C3_BELOW.0).unwrap(), &[h3], C3_REPS, 21)[0].rate();
    let above = rates(pool, pv, ScenarioSpec::new(ScenarioId::ArShift, C3_T, C3_ABOVE.0).unwrap(), &[h3], C3_REPS, 22)[0].rate();
    let delta_avg = h1.delta / PI;
    let pass = power >= C3_POWER && below <= C3_BELOW.1 && above >= C3_ABOVE.1 && (delta_avg - C3_REFERENCE_DELTA).abs() < 0.01;
    Line {
        id: 3,
        pass,
        detail: format!(
            "scenario 3 projector 1 at 0.25, delta band average {delta_avg:.4} (~{C3_REFERENCE_DELTA}): power {power:.3} >= {C3_POWER}; \
             projector 3 (delta 0): {below:.3} <= {} at {}, {above:.3} >= {} at {}",
            C3_BELOW.1, C3_BELOW.0, C3_ABOVE.1, C3_ABOVE.0
        ),
    }
}

fn criterion_4(pool: &rayon::ThreadPool) -> Line {
    let point = ScenarioSpec::new(ScenarioId::BbShift, C4_T, 0.0).unwrap();
    let (model, _) = point.models().unwrap();
    let population = model.population(0.0).unwrap();
    let pop_norm = population.hs_norm_sq().sqrt();
    let cfg = EstimationConfig::default();
    let per_rep: Vec<(Vec<f64>, f64)> = pool.install(|| {
        use rayon::prelude::*;
        (0..C4_REPS as u64)
            .into_par_iter()
            .map(|r| {
                let s = model.generate(C4_T, &mut rng(derive(MASTER, Stream::Generation, 4000 + r))).unwrap();
                let surf = spectral_surface(&center(&s), Band::FULL, cfg.n_freq, &[1.0], &cfg.window, &cfg.bandwidth).unwrap();
                let errs: Vec<f64> = surf
                    .full()
                    .iter()
                    .map(|op| {
                        let d: f64 = op.entries.iter().zip(population.entries.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
                        d.sqrt() / pop_norm
                    })
                    .collect();
                let lam: f64 = surf.full().iter().map(|op| eigensystem(op, 1).unwrap().eigenvalues[0]).sum::<f64>()
                    / surf.freqs.len() as f64;
                (errs, lam)
            })
            .collect()
    });
    let n_freq = per_rep[0].0.len();
    let mean_err: Vec<f64> = (0..n_freq).map(|j| per_rep.iter().map(|r| r.0[j]).sum::<f64>() / C4_REPS as f64).collect();
    let (worst_j, worst) = mean_err.iter().copied().enumerate().fold((0, 0.0), |a, (j, v)| if v > a.1 { (j, v) } else { a });
    let interior_worst = mean_err[1..n_freq - 1].iter().copied().fold(0.0, f64::max);
    let lam = per_rep.iter().map(|r| r.1).sum::<f64>() / C4_REPS as f64;
    let target = 1.0 / (PI * PI);
    let lam_rel = (lam - target).abs() / target;
    let freqs = Band::FULL.grid(n_freq).unwrap();
    Line {
        id: 4,
        pass: worst <= C4_HS_REL && lam_rel <= C4_LAMBDA_REL,
        detail: format!(
            "T = {C4_T}, {C4_REPS} reps: max mean relative HS error {worst:.4} at omega = {:.3} (interior max {interior_worst:.4}) <= {C4_HS_REL}; \
             leading eigenvalue {lam:.5} vs 1/pi^2 = {target:.5} (rel {lam_rel:.4} <= {C4_LAMBDA_REL})",
            freqs[worst_j]
        ),
    }
}

fn criterion_5() -> Line {
    let mut r = rng(derive(MASTER, Stream::Other(5), 0));
    let windows = [WindowSpec::DANIELL, WindowSpec::BARTLETT, WindowSpec::PARZEN];
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..C5_INSTANCES {
        let t = r.random_range(8..=64usize);
        let d = r.random_range(1..=5usize);
        let m = DMatrix::from_fn(t, d, |_, _| r.sample::<f64, _>(StandardNormal));
        let s = FunctionalSeries::new(m, BasisSpec::raw_grid(d).unwrap()).unwrap();
        let eta = r.random_range(0.3..=1.0);
        let omega = r.random_range(0.0..=PI);
        let b = r.random_range((4.0 / t as f64).max(0.05)..=1.0);
        let w = windows[i % 3];
        let fast = sequential_estimate(&s, eta, omega, &w, b).unwrap();
        let slow = naive_sequential_estimate(&s, eta, omega, &w, b).unwrap();
        let dev = fast.entries.iter().zip(slow.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    let secs = start.elapsed().as_secs_f64();
    Line {
        id: 5,
        pass: worst <= C5_TOL && secs <= 60.0,
        detail: format!("{C5_INSTANCES} instances, T <= 64: max deviation {worst:.2e} <= {C5_TOL:e} in {secs:.2} s"),
    }
}

fn criterion_6(pool: &rayon::ThreadPool) -> Line {
    let a = parallel::simulate_pivot(pool, 20, C6_PATHS, C6_STEPS, derive(MASTER, Stream::Pivot, 60)).unwrap();
    let b = parallel::simulate_pivot(pool, 20, C6_PATHS, C6_STEPS, derive(MASTER, Stream::Pivot, 61)).unwrap();
    let qa = a.quantile(0.95).unwrap();
    let qb = b.quantile(0.95).unwrap();
    let med = a.median();
    let seeds_rel = (qa - qb).abs() / qa;
    let golden_rel = (qa - C6_GOLDEN_Q95).abs() / C6_GOLDEN_Q95;
    Line {
        id: 6,
        pass: med.abs() <= 0.02 * qa && seeds_rel <= C6_REL && golden_rel <= C6_REL,
        detail: format!(
            "1e5 paths: |median| {:.4} <= {:.4}; q95 {qa:.4} vs {qb:.4} across seeds (rel {seeds_rel:.4}); golden {C6_GOLDEN_Q95} (rel {golden_rel:.4}) <= {C6_REL}",
            med.abs(),
            0.02 * qa
        ),
    }
}

fn random_hermitian(r: &mut impl Rng, d: usize) -> OperatorMatrix {
    let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)));
    OperatorMatrix::new(&a + a.adjoint(), 0.0).unwrap()
}

fn rotated(e: &EigenSystem, r: &mut impl Rng) -> EigenSystem {
    let mut out = e.clone();
    for v in out.vectors.iter_mut() {
        let phase = Complex64::from_polar(1.0, r.random_range(0.0..2.0 * PI));
        *v *= phase;
    }
    out
}

fn criterion_7() -> Line {
    let mut r = rng(derive(MASTER, Stream::Other(7), 0));
    let mut worst = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..C7_PAIRS {
        let d = r.random_range(2..=8usize);
        let k = r.random_range(1..=d);
        let x = eigensystem(&random_hermitian(&mut r, d), d).unwrap();
        let y = eigensystem(&random_hermitian(&mut r, d), d).unwrap();
        let base = projector_distance_sq(&x, &y, k).unwrap();
        let moved = projector_distance_sq(&rotated(&x, &mut r), &rotated(&y, &mut r), k).unwrap();
        worst = worst.max((base - moved).abs());
        lo = lo.min(base);
        hi = hi.max(base);
    }
    Line {
        id: 7,
        pass: worst <= C7_TOL && lo >= 0.0 && hi <= 2.0,
        detail: format!("{C7_PAIRS} Hermitian pairs: phase deviation {worst:.2e} <= {C7_TOL:e}; distances in [{lo:.4}, {hi:.4}] within [0, 2]"),
    }
}

fn criterion_8() -> Line {
    let dims = [4usize, 4, 4];
    let t = 64;
    let mut r = rng(derive(MASTER, Stream::Other(8), 0));
    let spec = specrel::synth::SynthSpec { dims, t_len: t, c: 0.4, permute_dir1: false };
    let mut field = specrel::synth::generate(&spec, 8);
    // break exact separability so the oracle is not trivially satisfied
    for v in field.data.iter_mut() {
        *v += 0.3 * r.sample::<f64, _>(StandardNormal);
    }
    let s = SeparableSeries3D::on_raw_grid(field.data.clone(), t, dims).unwrap();
    let full = FunctionalSeries::new(DMatrix::from_row_slice(t, 64, &field.data), BasisSpec::raw_grid(64).unwrap()).unwrap();
    let (w, b) = (WindowSpec::BARTLETT, 0.3);
    let mut worst = 0.0f64;
    let mut dirs = Vec::new();
    for &(eta, omega) in &[(1.0, 0.0), (1.0, 1.1), (0.5, 2.7), (0.75, PI)] {
        let big = sequential_estimate(&full, eta, omega, &w, b).unwrap();
        let mut ops = Vec::new();
        for dir in 1..=3 {
            let est = directional_sequential_estimate(&s, dir, eta, omega, &w, b).unwrap();
            // tensor marginalization of the 64 × 64 estimate
            let p = dims[dir - 1];
            let q = 64 / p;
            let mut brute = DMatrix::<Complex64>::zeros(p, p);
            for idx in 0..64 {
                for jdx in 0..64 {
                    let u = [idx / 16, (idx / 4) % 4, idx % 4];
                    let v = [jdx / 16, (jdx / 4) % 4, jdx % 4];
                    let same_rest = (0..3).filter(|&a| a != dir - 1).all(|a| u[a] == v[a]);
                    if same_rest {
                        brute[(u[dir - 1], v[dir - 1])] += big.entries[(idx, jdx)];
                    }
                }
            }
            // raw-grid coordinates carry the cell width 1/p
            brute *= Complex64::new(1.0 / (q as f64 * p as f64), 0.0);
            let dev = (brute - &est.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(dev);
            ops.push(est);
        }
        if eta == 1.0 {
            dirs.push(ops);
        }
    }
    // Kronecker top-N against explicit enumeration of all products
    let mut exact = true;
    let mut dense_dev = 0.0f64;
    for ops in &dirs {
        let e: Vec<_> = ops.iter().map(|o| eigensystem(&o.hermitianized(), 4).unwrap()).collect();
        let n = 4;
        let top = 20;
        let k = kronecker_eigensystem([&e[0], &e[1], &e[2]], n, top).unwrap();
        let mut all = Vec::new();
        for a in 0..n {
            for bb in 0..n {
                for c in 0..n {
                    all.push(e[0].eigenvalues[a] * e[1].eigenvalues[bb] * e[2].eigenvalues[c]);
                }
            }
        }
        all.sort_by(|x, y| y.total_cmp(x));
        exact &= k.values == all[..top];
        let dense = ops[0].entries.kronecker(&ops[1].entries).kronecker(&ops[2].entries);
        let de = eigensystem(&OperatorMatrix::new(dense, 0.0).unwrap().hermitianized(), top).unwrap();
        let scale = all[0].abs().max(1e-300);
        for (x, y) in de.eigenvalues.iter().zip(&k.values) {
            dense_dev = dense_dev.max((x - y).abs() / scale);
        }
    }
    Line {
        id: 8,
        pass: worst <= C8_TOL && exact && dense_dev <= 1e-10,
        detail: format!(
            "4x4x4, T = {t}: directional vs marginalized 64x64 estimate {worst:.2e} <= {C8_TOL:e}; \
             Kronecker top-20 equals enumeration: {exact} (dense eigen check {dense_dev:.1e})"
        ),
    }
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_specrel")
}

fn run(args: &[&str]) -> (i32, String) {
    let o = Command::new(bin()).args(args).output().unwrap();
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stderr).into_owned())
}

const SMALL_PIVOT: [&str; 4] = ["--pivot-paths", "2000", "--pivot-steps", "2000"];

fn criterion_9(dir: &Path) -> Line {
    let data = dir.join("c9");
    let p = |s: &str| data.join(s).to_string_lossy().into_owned();
    assert_eq!(run(&["simulate", "--scenario", "1", "--param", "0", "--t-len", "128", "--grid", "50", "--out", &p("")]).0, 0);
    let mut pass = true;
    let mut seen = Vec::new();
    for delta in ["1e-9", "0.001", "0.1", "5"] {
        let out = p(&format!("out-{delta}"));
        let (xs, cache) = (p("x.csv"), p("cache"));
        let mut args = vec!["test", "--input-x", &xs, "--input-y", &xs, "--delta", delta, "--out", &out, "--cache-dir", &cache, "--quiet"];
        args.extend(SMALL_PIVOT);
        let (code, err) = run(&args);
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(Path::new(&out).join("test_result.json")).unwrap()).unwrap();
        let res = &v["result"];
        let ok = code == 0 && res["decision"] == "accept" && res["p_value"] == 1.0 && res["degenerate"] == true;
        if !ok {
            eprintln!("criterion 9, delta {delta}: exit {code}, {err}\n{res}");
        }
        pass &= ok;
        seen.push(format!("delta {delta}: exit {code}, {} p = {}", res["decision"], res["p_value"]));
    }
    Line { id: 9, pass, detail: format!("X = Y through the test command: {}", seen.join("; ")) }
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    // commands that need no pivot never create the cache directory
    let Ok(entries) = fs::read_dir(dir) else { return Vec::new() };
    let mut v: Vec<_> = entries
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn criterion_10(dir: &Path) -> Line {
    let base = dir.join("c10");
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let data = base.join("data");
    assert_eq!(run(&["simulate", "--scenario", "3", "--param", "0.2", "--t-len", "96", "--grid", "40", "--seed", "3", "--out", &s(&data)]).0, 0);
    for (name, permute) in [("a.csv", false), ("b.csv", true), ("c.csv", false)] {
        let mut args = vec!["simulate3d".to_string(), "--dims".into(), "4,3,3".into(), "--t-len".into(), "64".into(), "--output".into(), s(&data.join(name))];
        args.push("--seed".into());
        args.push(name.len().to_string() + if permute { "1" } else { "2" });
        if permute {
            args.push("--permute-dir1".into());
        }
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&a).0, 0);
    }
    let x = s(&data.join("x.csv"));
    let y = s(&data.join("y.csv"));
    let fields = [s(&data.join("a.csv")), s(&data.join("b.csv")), s(&data.join("c.csv"))];
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("estimate", vec!["estimate".into(), "--input".into(), x.clone(), "--dump-operators".into()]),
        ("test", vec!["test".into(), "--input-x".into(), x.clone(), "--input-y".into(), y.clone(), "--delta".into(), "0.5".into(),
            "--hypothesis".into(), "projector".into(), "--basis".into(), "fourier-harmonics".into(), "--dim".into(), "4".into()]),
        ("pivot", vec!["pivot".into()]),
        ("experiment", vec!["experiment".into(), "--scenario".into(), "ar-shift".into(), "--params".into(), "0,0.1".into(),
            "--t-len".into(), "64".into(), "--reps".into(), "50".into(), "--delta-at".into(), "0.05".into()]),
        ("separable", vec!["separable".into(), "--inputs".into(), fields[0].clone(), fields[1].clone(), fields[2].clone(), "--delta".into(), "0.01".into()]),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, args) in &commands {
        let mut outputs = Vec::new();
        for threads in [1, 4, 8] {
            let out = base.join(format!("{name}-{threads}"));
            // fresh cache per run so the pivot is simulated under each worker count
            let cache = base.join(format!("cache-{name}-{threads}"));
            let mut a: Vec<String> = args.clone();
            a.extend(["--threads".into(), threads.to_string(), "--out".into(), s(&out), "--cache-dir".into(), s(&cache), "--quiet".into()]);
            a.extend(SMALL_PIVOT.iter().map(|v| v.to_string()));
            let av: Vec<&str> = a.iter().map(String::as_str).collect();
            let (code, err) = run(&av);
            if code != 0 {
                eprintln!("criterion 10, {name} with {threads} threads: exit {code}\n{err}");
                pass = false;
            }
            let mut files = dir_bytes(&out);
            files.extend(dir_bytes(&cache).into_iter().map(|(n, b)| (format!("cache/{n}"), b)));
            outputs.push(files);
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
        pass &= same;
        notes.push(format!("{name} {} ({} files)", if same { "identical" } else { "DIFFERS" }, outputs[0].len()));
    }
    Line { id: 10, pass, detail: format!("1/4/8 workers: {}", notes.join(", ")) }
}

#[test]
fn acceptance() {
    let tmp = tempfile::tempdir().unwrap();
    let pool = pool();
    let start = Instant::now();
    let pv = pivot(&pool);
    let mut lines = Vec::new();
    let mut timed = |f: &mut dyn FnMut() -> Line| {
        let t0 = Instant::now();
        let l = f();
        eprintln!("[{}] criterion {:>2} ({:.1} s): {}", if l.pass { "PASS" } else { "FAIL" }, l.id, t0.elapsed().as_secs_f64(), l.detail);
        lines.push(l);
    };
    timed(&mut || criterion_1(&pool, &pv));
    timed(&mut || criterion_2(&pool, &pv));
    timed(&mut || criterion_3(&pool, &pv));
    timed(&mut || criterion_4(&pool));
    timed(&mut criterion_5);
    timed(&mut || criterion_6(&pool));
    timed(&mut criterion_7);
    timed(&mut criterion_8);
    timed(&mut || criterion_9(tmp.path()));
    timed(&mut || criterion_10(tmp.path()));
    println!("acceptance criteria ({:.0} s):", start.elapsed().as_secs_f64());
    for l in &lines {
        println!("[{}] criterion {:>2}: {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail);
    }
    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
