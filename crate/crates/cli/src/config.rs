//! INI-style run configuration: `[section]` headers and `key = value` lines.
//!
//! Comments start with `#` or `;` at the beginning of a line. Every value is
//! tied to the line it came from so that errors can point at it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qfirob_core::kitaev::KitaevParams;
use qfirob_core::monte_carlo::{McConfig, DEFAULT_FIT_CAP};
use qfirob_core::probe::{DisorderDistribution, DisorderKind, DisorderTerm, DisorderedProbeSpec};
use qfirob_core::qfi::{optimal_state, qfig_exact};
use qfirob_core::single_qubit::{select_beta, SingleQubitParams};

use crate::matrix_io::{read_matrix, read_vector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Report,
    SweepSigma,
    SingleQubit,
    KitaevPlane,
    Crossover,
    McValidate,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Report,
        Experiment::SweepSigma,
        Experiment::SingleQubit,
        Experiment::KitaevPlane,
        Experiment::Crossover,
        Experiment::McValidate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Report => "report",
            Experiment::SweepSigma => "sweep-sigma",
            Experiment::SingleQubit => "single-qubit",
            Experiment::KitaevPlane => "kitaev-plane",
            Experiment::Crossover => "crossover",
            Experiment::McValidate => "mc-validate",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Clone)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

const SECTIONS: [&str; 6] = ["run", "single_qubit", "kitaev", "matrix", "mc", "scan"];
const PROBE_SECTIONS: [&str; 3] = ["single_qubit", "kitaev", "matrix"];

fn parse_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') || s.starts_with(';') {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(line, "unterminated section header"))?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::new(line, format!("unknown section [{name}]")));
            }
            if sections.iter().any(|x| x.name == name) {
                return Err(ConfigError::new(line, format!("duplicate section [{name}]")));
            }
            sections.push(Section { name, line, entries: Vec::new() });
            continue;
        }
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::new(line, format!("expected `key = value`, found `{s}`")))?;
        let key = key.trim().to_string();
        let section = sections
            .last_mut()
            .ok_or_else(|| ConfigError::new(line, format!("key `{key}` outside of any section")))?;
        if key.is_empty() {
            return Err(ConfigError::new(line, "empty key"));
        }
        if section.entries.iter().any(|e| e.key == key) {
            return Err(ConfigError::new(line, format!("duplicate key `{key}` in [{}]", section.name)));
        }
        section.entries.push(Entry { key, value: value.trim().to_string(), line });
    }
    Ok(sections)
}

/// Typed access to one section; remembers which keys were read so that
/// leftovers can be reported as unknown.
struct Reader<'a> {
    section: &'a Section,
    used: Vec<&'a str>,
}

impl<'a> Reader<'a> {
    fn new(section: &'a Section) -> Self {
        Self { section, used: Vec::new() }
    }

    fn entry(&mut self, key: &'a str) -> Option<&'a Entry> {
        self.used.push(key);
        self.section.entries.iter().find(|e| e.key == key)
    }

    fn missing(&self, key: &str) -> ConfigError {
        ConfigError::new(self.section.line, format!("[{}] is missing required key `{key}`", self.section.name))
    }

    fn parse<T: FromStr>(&mut self, key: &'a str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|err| ConfigError::new(e.line, format!("`{key}`: cannot parse `{}`: {err}", e.value))),
        }
    }

    fn require<T: FromStr>(&mut self, key: &'a str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.parse(key)?.ok_or_else(|| self.missing(key))
    }

    fn string(&mut self, key: &'a str) -> Option<(String, usize)> {
        self.entry(key).map(|e| (e.value.clone(), e.line))
    }

    fn list(&mut self, key: &'a str) -> Result<Option<(Vec<f64>, usize)>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => parse_list(&e.value)
                .map(|v| Some((v, e.line)))
                .map_err(|m| ConfigError::new(e.line, format!("`{key}`: {m}"))),
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.section.entries.iter().find(|e| e.key == key).map_or(self.section.line, |e| e.line)
    }

    fn finish(self) -> Result<()> {
        match self.section.entries.iter().find(|e| !self.used.contains(&e.key.as_str())) {
            Some(e) => Err(ConfigError::new(e.line, format!("unknown key `{}` in [{}]", e.key, self.section.name))),
            None => Ok(()),
        }
    }

    fn echo(&self) -> BTreeMap<String, String> {
        self.section.entries.iter().map(|e| (e.key.clone(), e.value.clone())).collect()
    }
}

/// Comma-separated numbers, or `linspace(a, b, n)` / `geomspace(a, b, n)`.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", x.trim()));
    for (name, geometric) in [("linspace", false), ("geomspace", true)] {
        if let Some(args) = s.strip_prefix(name) {
            let args = args
                .trim()
                .strip_prefix('(')
                .and_then(|a| a.strip_suffix(')'))
                .ok_or_else(|| format!("expected {name}(start, stop, count)"))?;
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 3 {
                return Err(format!("expected {name}(start, stop, count)"));
            }
            let (a, b) = (num(parts[0])?, num(parts[1])?);
            let n: usize = parts[2].trim().parse().map_err(|_| format!("`{}` is not a count", parts[2].trim()))?;
            if n < 2 {
                return Err("count must be at least 2".into());
            }
            if geometric && !(a > 0.0 && b > 0.0) {
                return Err("geomspace needs positive end points".into());
            }
            let at = |k: usize| {
                let f = k as f64 / (n - 1) as f64;
                if geometric {
                    (a.ln() + f * (b.ln() - a.ln())).exp()
                } else {
                    a + f * (b - a)
                }
            };
            return Ok((0..n).map(|k| if k == n - 1 { b } else { at(k) }).collect());
        }
    }
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(num).collect()
}

fn parse_kind(s: &str, line: usize) -> Result<DisorderKind> {
    match s {
        "gaussian" => Ok(DisorderKind::Gaussian),
        "uniform" => Ok(DisorderKind::Uniform),
        "skew_normal" => Ok(DisorderKind::SkewNormal),
        _ => Err(ConfigError::new(line, format!("`distribution`: unknown kind `{s}` (gaussian, uniform, skew_normal)"))),
    }
}

fn distribution_template(r: &mut Reader<'_>) -> Result<DisorderDistribution> {
    let kind = match r.string("distribution") {
        Some((s, line)) => parse_kind(&s, line)?,
        None => DisorderKind::Gaussian,
    };
    let skewness: f64 = r.parse("skewness")?.unwrap_or(0.0);
    DisorderDistribution::new(kind, 0.0, 1.0, skewness)
        .map_err(|e| ConfigError::new(r.line_of("skewness"), format!("`skewness`: {e}")))
}

fn order(r: &mut Reader<'_>) -> Result<usize> {
    let order: usize = r.parse("order")?.unwrap_or(2);
    if !(2..=3).contains(&order) {
        return Err(ConfigError::new(r.line_of("order"), format!("`order` must be 2 or 3, got {order}")));
    }
    Ok(order)
}

#[derive(Debug, Clone)]
pub struct QubitProbe {
    pub params: SingleQubitParams,
    pub sigmas: [f64; 3],
    pub template: DisorderDistribution,
    pub order: usize,
}

#[derive(Debug, Clone)]
pub struct KitaevProbeConfig {
    pub params: KitaevParams,
}

#[derive(Debug, Clone)]
pub struct MatrixProbe {
    pub spec: DisorderedProbeSpec,
    pub order: usize,
}

#[derive(Debug, Clone)]
pub enum Probe {
    SingleQubit(QubitProbe),
    Kitaev(KitaevProbeConfig),
    Matrix(MatrixProbe),
}

impl Probe {
    pub fn section(&self) -> &'static str {
        match self {
            Probe::SingleQubit(_) => "single_qubit",
            Probe::Kitaev(_) => "kitaev",
            Probe::Matrix(_) => "matrix",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScanConfig {
    pub tau_grid: Option<Vec<f64>>,
    pub eta_grid: Option<Vec<f64>>,
    pub t_grid: Option<Vec<f64>>,
    pub h0z_grid: Option<Vec<f64>>,
    pub beta_grid: Option<Vec<f64>>,
    pub rel_tol: f64,
    pub marker: CrossoverMarker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossoverMarker {
    #[default]
    UnitPhase,
    Engine,
}

/// Where a required key lives, for error messages raised after parsing.
#[derive(Debug, Clone, Default)]
pub struct KeyLines {
    pub lines: BTreeMap<String, usize>,
    pub last_line: usize,
}

impl KeyLines {
    pub fn line(&self, key: &str) -> usize {
        self.lines.get(key).copied().unwrap_or(self.last_line)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub probe: Probe,
    pub mc: Option<McConfig>,
    pub scan: ScanConfig,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub probe_echo: BTreeMap<String, String>,
    pub keys: KeyLines,
}

/// Parses the configuration text; relative paths resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig> {
    let sections = parse_sections(text)?;
    let last_line = text.lines().count().max(1);
    let mut keys = KeyLines { lines: BTreeMap::new(), last_line };
    let find = |name: &str| sections.iter().find(|s| s.name == name);
    for s in &sections {
        for e in &s.entries {
            keys.lines.insert(format!("{}.{}", s.name, e.key), e.line);
        }
        keys.lines.insert(s.name.clone(), s.line);
    }

    let (mut experiment, mut output, mut seed) = (None, None, 0u64);
    if let Some(run) = find("run") {
        let mut r = Reader::new(run);
        if let Some((s, line)) = r.string("experiment") {
            experiment = Some(s.parse::<Experiment>().map_err(|m| ConfigError::new(line, format!("`experiment`: {m}")))?);
        }
        output = r.string("output").map(|(s, _)| base.join(s));
        seed = r.parse("seed")?.unwrap_or(0);
        r.finish()?;
    }

    let probes: Vec<&Section> = sections.iter().filter(|s| PROBE_SECTIONS.contains(&s.name.as_str())).collect();
    let section = match probes.as_slice() {
        [one] => *one,
        [] => {
            return Err(ConfigError::new(
                last_line,
                "no probe section: add exactly one of [single_qubit], [kitaev], [matrix]",
            ))
        }
        [_, second, ..] => {
            return Err(ConfigError::new(second.line, "more than one probe section; keep exactly one"));
        }
    };
    let mut r = Reader::new(section);
    let probe = match section.name.as_str() {
        "single_qubit" => Probe::SingleQubit(qubit_probe(&mut r)?),
        "kitaev" => Probe::Kitaev(kitaev_probe(&mut r)?),
        _ => Probe::Matrix(matrix_probe(&mut r, base)?),
    };
    let probe_echo = r.echo();
    r.finish()?;

    let mc = match find("mc") {
        Some(s) => Some(mc_config(s, seed)?),
        None => None,
    };
    let scan = match find("scan") {
        Some(s) => scan_config(s)?,
        None => ScanConfig { rel_tol: 1e-4, ..Default::default() },
    };
    Ok(RunConfig { experiment, probe, mc, scan, output, seed, probe_echo, keys })
}

fn qubit_probe(r: &mut Reader<'_>) -> Result<QubitProbe> {
    let h0z: f64 = r.require("h0z")?;
    let t: f64 = r.require("t")?;
    if !(t > 0.0) {
        return Err(ConfigError::new(r.line_of("t"), "`t` must be positive"));
    }
    let sigmas: [f64; 3] = [
        r.parse("sigma_x")?.unwrap_or(0.0),
        r.parse("sigma_y")?.unwrap_or(0.0),
        r.parse("sigma_z")?.unwrap_or(0.0),
    ];
    for (key, s) in ["sigma_x", "sigma_y", "sigma_z"].iter().zip(sigmas) {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(ConfigError::new(r.line_of(key), format!("`{key}` must be non-negative")));
        }
    }
    if sigmas.iter().all(|&s| s == 0.0) {
        return Err(ConfigError::new(r.section.line, "[single_qubit] needs at least one positive sigma_x/y/z"));
    }
    let beta = match r.string("beta") {
        None => 0.0,
        Some((s, _)) if s == "auto" => {
            let p = SingleQubitParams { h0z, t, beta: 0.0 };
            if sigmas[0] == sigmas[1] {
                0.0
            } else {
                select_beta(sigmas[0], sigmas[1], &p)
                    .map_err(|e| ConfigError::new(r.line_of("beta"), format!("`beta`: {e}")))?
            }
        }
        Some((s, line)) => s
            .parse()
            .map_err(|_| ConfigError::new(line, format!("`beta`: expected a number or `auto`, found `{s}`")))?,
    };
    let template = distribution_template(r)?;
    let order = order(r)?;
    Ok(QubitProbe { params: SingleQubitParams { h0z, t, beta }, sigmas, template, order })
}

fn kitaev_probe(r: &mut Reader<'_>) -> Result<KitaevProbeConfig> {
    let n: usize = r.require("n")?;
    let mu: f64 = r.require("mu")?;
    let tau0: f64 = r.require("tau0")?;
    let eta0: f64 = r.require("eta0")?;
    let t: f64 = r.require("t")?;
    let sigma_tau: f64 = r.parse("sigma_tau")?.unwrap_or(1.0);
    let sigma_eta: f64 = r.parse("sigma_eta")?.unwrap_or(sigma_tau);
    let mut params = KitaevParams::uniform(n, mu, tau0, eta0, sigma_tau, t)
        .map_err(|e| ConfigError::new(r.section.line, format!("[kitaev]: {e}")))?;
    params.sigma_eta = sigma_eta;
    params.validate().map_err(|e| ConfigError::new(r.section.line, format!("[kitaev]: {e}")))?;
    if n < 5 {
        return Err(ConfigError::new(r.line_of("n"), format!("`n`: the GHZ probe needs at least 5 sites, got {n}")));
    }
    Ok(KitaevProbeConfig { params })
}

fn matrix_probe(r: &mut Reader<'_>, base: &Path) -> Result<MatrixProbe> {
    let matrix = |r: &mut Reader<'_>, key: &'static str, required: bool| -> Result<Option<_>> {
        match r.string(key) {
            Some((path, line)) => read_matrix(&base.join(&path))
                .map(Some)
                .map_err(|e| ConfigError::new(line, format!("`{key}`: {e}"))),
            None if required => Err(r.missing(key)),
            None => Ok(None),
        }
    };
    let h_theta = matrix(r, "h_theta", true)?.expect("required");
    let dtheta_h = matrix(r, "dtheta_h", true)?.expect("required");
    let clean_rest = matrix(r, "clean_rest", false)?
        .unwrap_or_else(|| qfirob_core::operator::HermitianMatrix::zeros(h_theta.dim()));
    let (paths, terms_line) = r.string("terms").ok_or_else(|| r.missing("terms"))?;
    let paths: Vec<&str> = paths.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    let (sigmas, sigmas_line) = r.list("sigmas")?.ok_or_else(|| r.missing("sigmas"))?;
    if sigmas.len() != paths.len() {
        return Err(ConfigError::new(
            sigmas_line,
            format!("`sigmas` has {} entries but `terms` lists {}", sigmas.len(), paths.len()),
        ));
    }
    let labels: Vec<String> = match r.string("labels") {
        Some((s, line)) => {
            let l: Vec<String> = s.split(',').map(|x| x.trim().to_string()).collect();
            if l.len() != paths.len() {
                return Err(ConfigError::new(line, "`labels` must match `terms` in length"));
            }
            l
        }
        None => (0..paths.len()).map(|k| format!("v{k}")).collect(),
    };
    let template = distribution_template(r)?;
    let mut terms = Vec::new();
    for ((path, s), label) in paths.iter().zip(&sigmas).zip(labels) {
        let operator = read_matrix(&base.join(path)).map_err(|e| ConfigError::new(terms_line, format!("`terms`: {e}")))?;
        let distribution =
            template.with_sigma(*s).map_err(|e| ConfigError::new(sigmas_line, format!("`sigmas`: {e}")))?;
        terms.push(DisorderTerm { operator, distribution, label });
    }
    let t: f64 = r.require("t")?;
    let state = match r.string("state") {
        Some((s, line)) if s != "optimal" => {
            read_vector(&base.join(&s)).map_err(|e| ConfigError::new(line, format!("`state`: {e}")))?
        }
        _ => {
            let beta: f64 = r.parse("beta")?.unwrap_or(0.0);
            let h0 = h_theta.add(&clean_rest).map_err(|e| ConfigError::new(r.section.line, e.to_string()))?;
            let g = qfig_exact(&h0, &dtheta_h, t).map_err(|e| ConfigError::new(r.line_of("t"), e.to_string()))?;
            optimal_state(&g, beta)
        }
    };
    let order = order(r)?;
    let spec = DisorderedProbeSpec::new(h_theta, dtheta_h, clean_rest, terms, t, state)
        .map_err(|e| ConfigError::new(r.section.line, format!("[matrix]: {e}")))?;
    Ok(MatrixProbe { spec, order })
}

fn mc_config(section: &Section, seed: u64) -> Result<McConfig> {
    let mut r = Reader::new(section);
    let n_realizations: u64 = r.require("n_realizations")?;
    let (sigma_grid, grid_line) = r.list("sigma_grid")?.ok_or_else(|| r.missing("sigma_grid"))?;
    let sigma_ratios = r.list("sigma_ratios")?.map(|(v, _)| v).unwrap_or_default();
    let fit_cap: f64 = r.parse("fit_cap")?.unwrap_or(DEFAULT_FIT_CAP);
    let cfg = McConfig { n_realizations, master_seed: seed, sigma_grid, sigma_ratios, fit_cap };
    if let Err(e) = cfg.validate() {
        let msg = e.to_string();
        let key = ["n_realizations", "sigma_grid", "sigma_ratios", "fit_cap"]
            .into_iter()
            .find(|k| msg.contains(k))
            .unwrap_or("sigma_grid");
        let line = if key == "sigma_grid" { grid_line } else { r.line_of(key) };
        return Err(ConfigError::new(line, format!("`{key}`: {msg}")));
    }
    r.finish()?;
    Ok(cfg)
}

fn scan_config(section: &Section) -> Result<ScanConfig> {
    let mut r = Reader::new(section);
    let grid = |r: &mut Reader<'_>, key: &'static str| -> Result<Option<Vec<f64>>> {
        match r.list(key)? {
            Some((v, line)) if v.is_empty() => Err(ConfigError::new(line, format!("`{key}` is empty"))),
            Some((v, _)) => Ok(Some(v)),
            None => Ok(None),
        }
    };
    let scan = ScanConfig {
        tau_grid: grid(&mut r, "tau_grid")?,
        eta_grid: grid(&mut r, "eta_grid")?,
        t_grid: grid(&mut r, "t_grid")?,
        h0z_grid: grid(&mut r, "h0z_grid")?,
        beta_grid: grid(&mut r, "beta_grid")?,
        rel_tol: r.parse("rel_tol")?.unwrap_or(1e-4),
        marker: match r.string("marker") {
            None => CrossoverMarker::UnitPhase,
            Some((s, _)) if s == "unit-phase" => CrossoverMarker::UnitPhase,
            Some((s, _)) if s == "engine" => CrossoverMarker::Engine,
            Some((s, line)) => {
                return Err(ConfigError::new(line, format!("`marker`: expected `unit-phase` or `engine`, found `{s}`")))
            }
        },
    };
    if !(scan.rel_tol > 0.0) {
        return Err(ConfigError::new(r.line_of("rel_tol"), "`rel_tol` must be positive"));
    }
    if let Some(t) = &scan.t_grid {
        if t.windows(2).any(|w| w[1] <= w[0]) || t[0] <= 0.0 {
            return Err(ConfigError::new(r.line_of("t_grid"), "`t_grid` must be positive and strictly ascending"));
        }
    }
    r.finish()?;
    Ok(scan)
}
