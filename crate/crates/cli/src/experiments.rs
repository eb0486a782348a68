//! One function per subcommand. Each returns the files it wrote and a
//! one-line summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qfirob_core::expansion::{predicted_marker, robustness_report, Classification, RobustnessReport};
use qfirob_core::kitaev::{kitaev_robustness, plane_scan, KitaevProbe};
use qfirob_core::monte_carlo::{crossover_scan, marker_sweep, McConfig, McSweepResult, QuenchedProbe};
use qfirob_core::probe::{DisorderKind, DisorderedProbeSpec};
use qfirob_core::qfi::{qfi, qfig_exact};
use qfirob_core::single_qubit::{
    beta_optima, c2_closed_form, crossover_time, equator_state, qubit_spec, unit_phase_marker, Axis, SingleQubitParams,
};

use crate::config::{parse_config, ConfigError, CrossoverMarker, Experiment, Probe, QubitProbe, RunConfig};
use crate::output::{fmt12, plane_csv, sweep_csv, write_artifact, ReportJson};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{name}: {source}", name = .source.name())]
    Numerical {
        #[from]
        source: qfirob_core::Error,
    },
    #[error("IoError: {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } | CliError::Io { .. } => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Loads `config_path`, applies the command-line overrides and runs `experiment`.
pub fn run(experiment: Experiment, config_path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<Outcome> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| ConfigError { line: 0, message: format!("cannot read {}: {e}", config_path.display()) })?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let mut cfg = parse_config(&text, base)?;
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(ConfigError {
                line: cfg.keys.line("run.experiment"),
                message: format!("`experiment` is `{e}` but the subcommand is `{experiment}`"),
            }
            .into());
        }
    }
    if let Some(s) = seed {
        cfg.seed = s;
        if let Some(mc) = cfg.mc.as_mut() {
            mc.master_seed = s;
        }
    }
    let out_line = if out.is_some() { 0 } else { cfg.keys.line("run.output") };
    let dir = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("qfirob-out"));
    std::fs::create_dir_all(&dir).map_err(|e| ConfigError {
        line: out_line,
        message: format!("`output`: cannot create {}: {e}", dir.display()),
    })?;
    let ctx = Context { cfg, dir, files: Vec::new() };
    match experiment {
        Experiment::Report => report(ctx),
        Experiment::SweepSigma => sweep_sigma(ctx),
        Experiment::SingleQubit => single_qubit(ctx),
        Experiment::KitaevPlane => kitaev_plane(ctx),
        Experiment::Crossover => crossover(ctx),
        Experiment::McValidate => mc_validate(ctx),
    }
}

struct Context {
    cfg: RunConfig,
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Context {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        write_artifact(&self.dir, name, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.files.push(path);
        Ok(())
    }

    fn finish(self, summary: String) -> Result<Outcome> {
        Ok(Outcome { files: self.files, summary })
    }

    fn missing(&self, section: &str, key: &str) -> CliError {
        ConfigError {
            line: self.cfg.keys.line(section),
            message: format!("[{section}] is missing required key `{key}` for this experiment"),
        }
        .into()
    }

    fn wrong_probe(&self, wanted: &str) -> CliError {
        ConfigError {
            line: self.cfg.keys.line(self.cfg.probe.section()),
            message: format!("this experiment needs a [{wanted}] probe, found [{}]", self.cfg.probe.section()),
        }
        .into()
    }

    fn mc(&self) -> Result<McConfig> {
        self.cfg.mc.clone().ok_or_else(|| {
            ConfigError { line: self.cfg.keys.last_line, message: "this experiment needs an [mc] section".into() }.into()
        })
    }

    fn save_report(&mut self, r: &RobustnessReport, labels: Vec<String>) -> Result<()> {
        let json = ReportJson::new(r, labels, self.cfg.probe_echo.clone(), self.cfg.seed).to_json();
        self.write("report.json", &json)
    }
}

fn qubit_probe_spec(q: &QubitProbe) -> Result<DisorderedProbeSpec> {
    Ok(qubit_spec(&q.params, q.sigmas, q.template)?)
}

fn kitaev_labels(n: usize) -> Vec<String> {
    (1..n).map(|i| format!("tau_{i}")).chain((1..n).map(|i| format!("eta_{i}"))).collect()
}

fn labels(spec: &DisorderedProbeSpec) -> Vec<String> {
    spec.disorder_terms.iter().map(|t| t.label.clone()).collect()
}

/// Direct report, term labels, and the probe as seen by the Monte Carlo engine.
fn direct(cfg: &RunConfig) -> Result<(RobustnessReport, Vec<String>, Box<dyn QuenchedProbe>)> {
    Ok(match &cfg.probe {
        Probe::SingleQubit(q) => {
            let spec = qubit_probe_spec(q)?;
            (robustness_report(&spec, q.order)?, labels(&spec), Box::new(spec))
        }
        Probe::Kitaev(k) => {
            let probe = KitaevProbe::new(k.params.clone())?;
            (kitaev_robustness(&k.params)?, kitaev_labels(k.params.n), Box::new(probe))
        }
        Probe::Matrix(m) => (robustness_report(&m.spec, m.order)?, labels(&m.spec), Box::new(m.spec.clone())),
    })
}

fn sigma_max_str(r: &RobustnessReport) -> String {
    r.sigma_max.map_or_else(|| "na".into(), fmt12)
}

/// Per-term widths follow the configured σ's unless ratios are given.
fn with_default_ratios(mut mc: McConfig, probe: &dyn QuenchedProbe) -> McConfig {
    if mc.sigma_ratios.is_empty() {
        let sigmas: Vec<f64> = probe.distributions().iter().map(|d| d.sigma).collect();
        if sigmas.iter().any(|&s| s != 1.0) {
            mc.sigma_ratios = sigmas;
        }
    }
    mc
}

fn report(mut ctx: Context) -> Result<Outcome> {
    let (r, labels, _) = direct(&ctx.cfg)?;
    ctx.save_report(&r, labels)?;
    let summary = format!(
        "report: classification={} sigma_max={} c2_total={}",
        r.classification,
        sigma_max_str(&r),
        fmt12(r.c2_total)
    );
    ctx.finish(summary)
}

fn sweep(ctx: &Context) -> Result<(RobustnessReport, Vec<String>, McSweepResult, McConfig, Box<dyn QuenchedProbe>)> {
    let (r, labels, probe) = direct(&ctx.cfg)?;
    let mc = with_default_ratios(ctx.mc()?, probe.as_ref());
    let result = marker_sweep(probe.as_ref(), &mc)?;
    Ok((r, labels, result, mc, probe))
}

fn sweep_sigma(mut ctx: Context) -> Result<Outcome> {
    let (r, labels, result, _, _) = sweep(&ctx)?;
    ctx.save_report(&r, labels)?;
    ctx.write("sweep.csv", &sweep_csv(&result))?;
    let summary = format!(
        "sweep-sigma: classification={} sigma_max={} sigma_max_fit={} slope={}",
        r.classification,
        sigma_max_str(&r),
        result.fit.sigma_max_fit.map_or_else(|| "na".into(), fmt12),
        fmt12(result.fit.slope)
    );
    ctx.finish(summary)
}

fn mc_validate(mut ctx: Context) -> Result<Outcome> {
    let (r, labels, result, mc, probe) = sweep(&ctx)?;
    let dists = probe.distributions();
    let skewed = dists.iter().any(|d| d.kind == DisorderKind::SkewNormal && d.skewness != 0.0);
    let gammas: Vec<f64> = dists.iter().map(|d| d.skewness).collect();
    let mut csv = String::from("sigma,g_mean,g_stderr,g_predicted,z_score\n");
    let (mut within, mut max_z) = (0usize, 0.0f64);
    for k in 0..result.sigma.len() {
        let sigmas = mc.term_sigmas(result.sigma[k], dists.len())?;
        let gammas = (skewed && r.c3_per_term.is_some()).then_some(gammas.as_slice());
        let predicted = predicted_marker(&r, &sigmas, gammas)?;
        let diff = result.g_mean[k] - predicted;
        let z = match result.g_stderr[k] {
            se if se > 0.0 => diff / se,
            _ if diff == 0.0 => 0.0,
            _ => f64::INFINITY,
        };
        if z.abs() < 3.0 {
            within += 1;
        }
        max_z = max_z.max(z.abs());
        writeln!(
            csv,
            "{},{},{},{},{}",
            fmt12(result.sigma[k]),
            fmt12(result.g_mean[k]),
            fmt12(result.g_stderr[k]),
            fmt12(predicted),
            fmt12(z)
        )
        .unwrap();
    }
    ctx.save_report(&r, labels)?;
    ctx.write("sweep.csv", &sweep_csv(&result))?;
    ctx.write("validate.csv", &csv)?;
    let summary = format!(
        "mc-validate: classification={} sigma_max={} within_3_stderr={}/{} max_abs_z={}",
        r.classification,
        sigma_max_str(&r),
        within,
        result.sigma.len(),
        fmt12(max_z)
    );
    ctx.finish(summary)
}

fn single_qubit(mut ctx: Context) -> Result<Outcome> {
    let Probe::SingleQubit(q) = ctx.cfg.probe.clone() else {
        return Err(ctx.wrong_probe("single_qubit"));
    };
    let p = q.params;
    let axes: Vec<(Axis, f64)> =
        [Axis::X, Axis::Y, Axis::Z].into_iter().zip(q.sigmas).filter(|(_, s)| *s > 0.0).collect();
    let c2 = axes.iter().map(|(a, _)| c2_closed_form(&p, *a)).collect::<qfirob_core::Result<Vec<f64>>>()?;
    let g = qfig_exact(&qfirob_core::operator::HermitianMatrix::pauli_z().scaled(p.h0z), &Axis::Z.operator(), p.t)?;
    let f0 = qfi(&equator_state(p.beta), &g)?;
    let r = RobustnessReport::from_coefficients(f0, c2, None);
    ctx.save_report(&r, axes.iter().map(|(a, _)| a.label().to_string()).collect())?;

    let grid = ctx
        .cfg
        .scan
        .beta_grid
        .clone()
        .unwrap_or_else(|| (0..=360).map(|k| -std::f64::consts::PI + k as f64 * std::f64::consts::PI / 180.0).collect());
    let mut csv = String::from("beta,c2_x,c2_y,g_per_sigma2\n");
    for beta in grid {
        let pb = SingleQubitParams { beta, ..p };
        let (cx, cy) = (c2_closed_form(&pb, Axis::X)?, c2_closed_form(&pb, Axis::Y)?);
        let s = q.sigmas;
        writeln!(csv, "{},{},{},{}", fmt12(beta), fmt12(cx), fmt12(cy), fmt12(s[0] * s[0] * cx + s[1] * s[1] * cy)).unwrap();
    }
    ctx.write("beta_scan.csv", &csv)?;
    let optima = match beta_optima(&p) {
        Ok((bx, by)) => format!("beta_x_m={} beta_y_m={}", fmt12(bx), fmt12(by)),
        Err(_) => "beta_x_m=na beta_y_m=na".into(),
    };
    let summary = format!("single-qubit: classification={} sigma_max={} {optima}", r.classification, sigma_max_str(&r));
    ctx.finish(summary)
}

fn kitaev_plane(mut ctx: Context) -> Result<Outcome> {
    let Probe::Kitaev(k) = ctx.cfg.probe.clone() else {
        return Err(ctx.wrong_probe("kitaev"));
    };
    let tau = ctx.cfg.scan.tau_grid.clone().ok_or_else(|| ctx.missing("scan", "tau_grid"))?;
    let eta = ctx.cfg.scan.eta_grid.clone().ok_or_else(|| ctx.missing("scan", "eta_grid"))?;
    let p = &k.params;
    let points = plane_scan(p.n, p.mu, p.t, &tau, &eta)?;
    ctx.write("plane.csv", &plane_csv(&points))?;
    let count = |c: Classification| points.iter().filter(|x| x.classification == c).count();
    let summary = format!(
        "kitaev-plane: cells={} DEP={} DSP={} DIP={}",
        points.len(),
        count(Classification::DEP),
        count(Classification::DSP),
        count(Classification::DIP)
    );
    ctx.finish(summary)
}

/// Slope and slope-2 coefficient of `ln(1 − τ)` against `ln h`.
fn quadratic_law(rows: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|(h, tau)| *h > 0.0 && *tau < 1.0).map(|(h, tau)| (h.ln(), (1.0 - tau).ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    Some((slope, (my - 2.0 * mx).exp()))
}

fn crossover(mut ctx: Context) -> Result<Outcome> {
    let Probe::SingleQubit(q) = ctx.cfg.probe.clone() else {
        return Err(ctx.wrong_probe("single_qubit"));
    };
    let t_grid = ctx.cfg.scan.t_grid.clone().ok_or_else(|| ctx.missing("scan", "t_grid"))?;
    let hs = ctx.cfg.scan.h0z_grid.clone().unwrap_or_else(|| vec![q.params.h0z]);
    let rel_tol = ctx.cfg.scan.rel_tol;
    let mut rows = Vec::with_capacity(hs.len());
    let mut csv = String::from("h0z,tau,t_plus,tau_approx\n");
    for &h in &hs {
        let tau = match ctx.cfg.scan.marker {
            CrossoverMarker::UnitPhase => crossover_scan(|t| unit_phase_marker(h, t), &t_grid, rel_tol)?,
            CrossoverMarker::Engine => crossover_scan(
                |t| {
                    let p = SingleQubitParams { h0z: h, t, ..q.params };
                    let spec = qubit_spec(&p, q.sigmas, q.template)?;
                    let r = robustness_report(&spec, 2)?;
                    let sigmas: Vec<f64> = spec.distributions().iter().map(|d| d.sigma).collect();
                    predicted_marker(&r, &sigmas, None)
                },
                &t_grid,
                rel_tol,
            )?,
        };
        let (t_plus, _, approx) = crossover_time(h)?;
        writeln!(csv, "{},{},{},{}", fmt12(h), fmt12(tau), fmt12(t_plus), fmt12(approx)).unwrap();
        rows.push((h, tau));
    }
    let law = quadratic_law(&rows);
    if let Some((slope, coef)) = law {
        writeln!(csv, "# fit: slope={} coefficient={}", fmt12(slope), fmt12(coef)).unwrap();
    }
    ctx.write("crossover.csv", &csv)?;
    let mut summary = format!("crossover: h0z={} tau={}", fmt12(rows[0].0), fmt12(rows[0].1));
    if let Some((slope, coef)) = law {
        write!(summary, " slope={} coefficient={}", fmt12(slope), fmt12(coef)).unwrap();
    }
    ctx.finish(summary)
}
