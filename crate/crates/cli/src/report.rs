//! Report persistence: `samples.csv` with one row per (path, lag) and
//! `summary.json` with the per-lag aggregates.
//!
//! Both files are byte-reproducible: numeric CSV columns use a fixed
//! 17-significant-digit decimal rendering (enough to round-trip f64), JSON
//! is written from a `serde_json::Value` so that keys are emitted in
//! sorted order, and nothing time- or machine-dependent is persisted.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use loctime_core::montecarlo::ExperimentReport;
use serde_json::{json, Value};

use crate::args::RunManifest;

pub const CSV_HEADER: &str = "path_id,h,q,r,s_q,r_qh,t_q,limit_scale,limit_sample";

/// Render a float in decimal notation with 17 significant digits.
///
/// 17 significant decimal digits always round-trip an f64; decimal (not
/// scientific) notation keeps the files greppable and stream-friendly.
pub fn format_sig17(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Render the per-(path, lag) sample rows.
pub fn render_samples_csv(report: &ExperimentReport) -> String {
    let mut out = String::with_capacity(64 * report.paths.len() * report.config.h_list.len() + 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    let (q, r) = (report.config.q, report.config.r);
    for path in &report.paths {
        for stat in &path.per_h {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                path.path_id,
                format_sig17(stat.h),
                q,
                r,
                format_sig17(stat.s_q),
                format_sig17(stat.r_qh),
                format_sig17(stat.t_q),
                format_sig17(stat.limit_scale),
                format_sig17(stat.limit_sample),
            ));
        }
    }
    out
}

/// Build the summary document: config echo, per-lag aggregates, versions
/// and the master seed. `extra` lets scan commands attach their table.
pub fn build_summary(report: &ExperimentReport, extra: Option<(&str, Value)>) -> Value {
    let mut summary = json!({
        "config": serde_json::to_value(&report.config).expect("config serializes"),
        "master_seed": report.config.master_seed,
        "per_h": serde_json::to_value(&report.per_h).expect("summaries serialize"),
        "versions": {
            "loctime-core": loctime_core::VERSION,
            "loctime-cli": env!("CARGO_PKG_VERSION"),
        },
    });
    if let Some((key, value)) = extra {
        summary
            .as_object_mut()
            .expect("summary is an object")
            .insert(key.to_string(), value);
    }
    summary
}

/// Render the summary document; stable key order, trailing newline.
pub fn render_summary_json(report: &ExperimentReport, extra: Option<(&str, Value)>) -> String {
    let mut text =
        serde_json::to_string_pretty(&build_summary(report, extra)).expect("summary serializes");
    text.push('\n');
    text
}

fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    fs::write(path, contents.as_bytes())
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Write the report files selected by the manifest format into the
/// manifest output directory; returns the paths written.
pub fn emit_report(
    report: &ExperimentReport,
    manifest: &RunManifest,
    extra: Option<(&str, Value)>,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(&manifest.output_dir)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", manifest.output_dir.display())))?;
    let mut written = Vec::new();
    if manifest.format.wants_csv() {
        let path = manifest.output_dir.join("samples.csv");
        write_file(&path, &render_samples_csv(report))?;
        written.push(path);
    }
    if manifest.format.wants_json() {
        let path = manifest.output_dir.join("summary.json");
        write_file(&path, &render_summary_json(report, extra))?;
        written.push(path);
    }
    Ok(written)
}

/// Print a human-readable per-lag summary to stdout.
pub fn print_summary(report: &ExperimentReport) {
    println!(
        "mode={:?} q={} r={} paths={} seed={}",
        report.config.mode,
        report.config.q,
        report.config.r,
        report.config.n_paths,
        report.config.master_seed
    );
    for s in &report.per_h {
        println!(
            "  h={:<6} ks={:.4} var_ratio={:.4} mean_T={:+.5} mean_S={:.6} (se {:.2e})",
            s.h, s.ks_stat, s.var_ratio, s.mean_t, s.mean_s, s.stderr
        );
    }
}
