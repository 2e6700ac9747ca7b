//! File emission. Everything written here is a function of the run
//! configuration only; wall-clock time goes to stderr.

use std::fs;
use std::path::Path;

use serde::Serialize;

use lfp_core::lfp::AggregateTrace;
use lfp_core::Trace;

use crate::error::CliError;

/// Shortest decimal that parses back to the same `f64`. Plain notation in
/// `[1e-5, 1e16)`, scientific otherwise.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub const TRACE_HEADER: &str = "iteration,step_size,gap,theory_bound";

pub const AGGREGATE_HEADER: &str =
    "iteration,step_size,gap,theory_bound,mean_gap,std_gap,ci95,event_fraction,conditional_mean_gap";

/// One row per record; `extra` appends named columns.
pub fn trace_csv(trace: &Trace, extra: &[(&str, &dyn Fn(usize) -> Option<f64>)]) -> String {
    let mut out = String::from(TRACE_HEADER);
    for (name, _) in extra {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (k, r) in trace.records.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}",
            r.t,
            fmt_num(r.alpha),
            fmt_num(r.gap),
            fmt_opt(r.bound)
        ));
        for (_, f) in extra {
            out.push(',');
            out.push_str(&fmt_opt(f(k)));
        }
        out.push('\n');
    }
    out
}

/// `gap` repeats the unconditional mean; `theory_bound` comes from `bound`.
pub fn aggregate_csv(agg: &AggregateTrace, bound: impl Fn(u64) -> Option<f64>) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for r in &agg.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.t,
            fmt_num(r.step_size),
            fmt_num(r.mean_gap),
            fmt_opt(bound(r.t)),
            fmt_num(r.mean_gap),
            fmt_num(r.std_gap),
            fmt_num(r.ci95_halfwidth),
            fmt_num(r.event_fraction),
            fmt_opt(r.conditional_mean_gap),
        ));
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    write_text(path, &text)
}
