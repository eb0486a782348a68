//! Output artifacts: the JSON robustness report and the CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use qfirob_core::expansion::RobustnessReport;
use qfirob_core::kitaev::PlanePoint;
use qfirob_core::monte_carlo::McSweepResult;
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = concat!("qfirob ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub f0: f64,
    pub c2_per_term: Vec<f64>,
    pub c2_total: f64,
    pub c3_per_term: Option<Vec<f64>>,
    pub c3_total: Option<f64>,
    pub c32: Option<f64>,
    pub sigma_max: Option<f64>,
    pub classification: String,
    pub term_labels: Vec<String>,
    pub probe_echo: BTreeMap<String, String>,
    pub tool_version: String,
    pub seed: u64,
}

impl ReportJson {
    pub fn new(r: &RobustnessReport, term_labels: Vec<String>, probe_echo: BTreeMap<String, String>, seed: u64) -> Self {
        Self {
            f0: r.f0,
            c2_per_term: r.c2_per_term.clone(),
            c2_total: r.c2_total,
            c3_per_term: r.c3_per_term.clone(),
            c3_total: r.c3_total,
            c32: r.c32,
            sigma_max: r.sigma_max,
            classification: r.classification.as_str().to_string(),
            term_labels,
            probe_echo,
            tool_version: TOOL_VERSION.to_string(),
            seed,
        }
    }

    /// Pretty JSON with a trailing newline; floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// 12 significant digits in scientific notation.
pub fn fmt12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "nan".into()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "na".into(), fmt12)
}

pub fn sweep_csv(r: &McSweepResult) -> String {
    let mut s = String::from("sigma,g_mean,g_stderr,f_mean,n_realizations\n");
    for k in 0..r.sigma.len() {
        writeln!(
            s,
            "{},{},{},{},{}",
            fmt12(r.sigma[k]),
            fmt12(r.g_mean[k]),
            fmt12(r.g_stderr[k]),
            fmt12(r.f_mean[k]),
            r.n_realizations
        )
        .unwrap();
    }
    writeln!(
        s,
        "# fit: slope={} intercept={} sigma_max={}",
        fmt12(r.fit.slope),
        fmt12(r.fit.intercept),
        fmt_opt(r.fit.sigma_max_fit)
    )
    .unwrap();
    s
}

pub fn plane_csv(points: &[PlanePoint]) -> String {
    let mut s = String::from("tau0,eta0,c2_total,classification\n");
    for p in points {
        writeln!(s, "{},{},{},{}", fmt12(p.tau0), fmt12(p.eta0), fmt12(p.c2_total), p.classification).unwrap();
    }
    s
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_artifact(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)
}
