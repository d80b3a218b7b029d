//! Serialization of results. Numbers are rounded to 12 significant digits
//! before they are written so reports compare byte-for-byte.

use serde_json::{json, Value};
use specrel_core::relevance::{Decision, GapWarning, Sample, TestResult};

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Text form of a rounded number; `inf`, `-inf` and `nan` spelled out.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        let r = round12(v);
        if r == 0.0 {
            "0".into()
        } else {
            format!("{r}")
        }
    }
}

/// JSON number, rounded; infinities become the strings `"inf"`/`"-inf"` and
/// NaN becomes `null`.
pub fn num(v: f64) -> Value {
    if v.is_nan() {
        Value::Null
    } else if v.is_infinite() {
        Value::String(fmt_num(v))
    } else {
        json!(round12(v) + 0.0)
    }
}

pub fn nums(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}

fn gap_json(w: &GapWarning) -> Value {
    json!({
        "sample": match w.sample { Sample::X => "x", Sample::Y => "y" },
        "frequency": num(w.report.freq),
        "component": w.report.k,
        "min_gap": num(w.report.min_gap),
        "threshold": num(w.report.threshold),
    })
}

/// Full test outcome with descriptive field definitions.
pub fn test_result_json(r: &TestResult) -> Value {
    json!({
        "hypothesis": r.kind.name(),
        "component": r.k,
        "decision": match r.decision { Decision::Reject => "reject", Decision::Accept => "accept" },
        "statistic": num(r.statistic),
        "distance": num(r.distance),
        "v_hat": num(r.v_hat),
        "delta": num(r.delta),
        "alpha": num(r.alpha),
        "quantile": num(r.quantile),
        "p_value": num(r.p_value),
        "degenerate": r.degenerate,
        "integrals": nums(&r.integrals),
        "gap_warnings": r.gap_warnings.iter().map(gap_json).collect::<Vec<_>>(),
        "notes": r.notes,
    })
}

/// Definitions of the reported quantities.
pub fn test_result_definitions() -> Value {
    json!({
        "distance": "integral over the frequency band of the squared Hilbert-Schmidt distance between the full-sample estimates (units: squared operator norm x radians)",
        "integrals": "the same integral for the sequential estimates on the first floor(eta*T) observations, one per eta grid point",
        "v_hat": "self-normalizer: root mean square over eta < 1 of integrals[eta] - eta^2 * distance",
        "statistic": "(distance - delta) / v_hat; +/-inf when the self-normalizer vanishes",
        "quantile": "upper (1 - alpha) quantile of the simulated pivot law",
        "p_value": "fraction of pivot draws at least as large as the statistic",
        "decision": "reject the relevant hypothesis (distance <= delta) when statistic > quantile",
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Human-readable table of test results.
pub fn test_table(results: &[TestResult]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<11} {:>3} {:>14} {:>14} {:>14} {:>12} {:>10} {:>8}\n",
        "hypothesis", "k", "distance", "delta", "statistic", "quantile", "p-value", "decision"
    ));
    for r in results {
        out.push_str(&format!(
            "{:<11} {:>3} {:>14} {:>14} {:>14} {:>12} {:>10} {:>8}{}\n",
            r.kind.name(),
            r.k,
            fmt_short(r.distance),
            fmt_short(r.delta),
            fmt_short(r.statistic),
            fmt_short(r.quantile),
            fmt_short(r.p_value),
            match r.decision {
                Decision::Reject => "reject",
                Decision::Accept => "accept",
            },
            if r.degenerate { " (degenerate)" } else { "" }
        ));
    }
    out
}

fn fmt_short(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        fmt_num(v)
    }
}
