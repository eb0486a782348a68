//! Quenched averages of the QFI over disorder realizations and log-log fits
//! of the resulting disorder marker.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::report::MIN_CLEAN_QFI;
use crate::probe::{check_len, perturbed_hamiltonian, sample_deltas, DisorderDistribution, DisorderedProbeSpec};
use crate::qfi::{qfi, qfig_exact};

/// Fit only where `|g| < DEFAULT_FIT_CAP`, inside the quadratic regime.
pub const DEFAULT_FIT_CAP: f64 = 0.1;
pub const MIN_REALIZATIONS: u64 = 100;

/// A probe whose QFI can be evaluated exactly for any fluctuation vector.
pub trait QuenchedProbe: Sync {
    /// Per-term distributions; their σ's are overridden by the sweep.
    fn distributions(&self) -> Vec<DisorderDistribution>;
    /// Exact QFI for fluctuations `deltas` (one per term).
    fn qfi_for(&self, deltas: &[f64]) -> Result<f64>;

    fn n_terms(&self) -> usize {
        self.distributions().len()
    }

    fn clean_qfi(&self) -> Result<f64> {
        self.qfi_for(&vec![0.0; self.n_terms()])
    }
}

impl QuenchedProbe for DisorderedProbeSpec {
    fn distributions(&self) -> Vec<DisorderDistribution> {
        DisorderedProbeSpec::distributions(self)
    }

    fn qfi_for(&self, deltas: &[f64]) -> Result<f64> {
        let h = perturbed_hamiltonian(self, deltas)?;
        let g = qfig_exact(&h, &self.dtheta_h, self.encoding_time)?;
        qfi(&self.initial_state, &g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_realizations: u64,
    pub master_seed: u64,
    pub sigma_grid: Vec<f64>,
    /// Per-term multipliers of the grid σ; empty means all ones.
    pub sigma_ratios: Vec<f64>,
    pub fit_cap: f64,
}

impl McConfig {
    pub fn new(n_realizations: u64, master_seed: u64, sigma_grid: Vec<f64>) -> Result<Self> {
        let cfg = Self { n_realizations, master_seed, sigma_grid, sigma_ratios: Vec::new(), fit_cap: DEFAULT_FIT_CAP };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_realizations < MIN_REALIZATIONS {
            return Err(Error::InvalidParameter(format!(
                "n_realizations must be at least {MIN_REALIZATIONS}, got {}",
                self.n_realizations
            )));
        }
        if self.sigma_grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if self.sigma_grid.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter("sigma_grid entries must be positive".into()));
        }
        if self.sigma_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sigma_grid must be strictly ascending".into()));
        }
        if self.sigma_ratios.iter().any(|r| *r < 0.0 || !r.is_finite()) {
            return Err(Error::InvalidParameter("sigma_ratios must be non-negative".into()));
        }
        if !(self.fit_cap > 0.0) {
            return Err(Error::InvalidParameter("fit_cap must be positive".into()));
        }
        Ok(())
    }

    /// Per-term σ's for grid value `sigma`.
    pub fn term_sigmas(&self, sigma: f64, n_terms: usize) -> Result<Vec<f64>> {
        if self.sigma_ratios.is_empty() {
            return Ok(vec![sigma; n_terms]);
        }
        check_len(n_terms, self.sigma_ratios.len())?;
        Ok(self.sigma_ratios.iter().map(|r| r * sigma).collect())
    }
}

/// Sample mean and standard error of the QFI over `n_realizations` draws at
/// per-term widths `sigmas`. Realization `k` always uses stream `k` of the
/// master seed and results are reduced in index order, so the output does not
/// depend on the thread count.
pub fn quenched_qfi<P: QuenchedProbe + ?Sized>(probe: &P, sigmas: &[f64], cfg: &McConfig) -> Result<(f64, f64)> {
    let base = probe.distributions();
    check_len(base.len(), sigmas.len())?;
    let dists = base.iter().zip(sigmas).map(|(d, &s)| d.with_sigma(s)).collect::<Result<Vec<_>>>()?;
    let values = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|k| probe.qfi_for(&sample_deltas(&dists, cfg.master_seed, k).deltas))
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_and_stderr(&values))
}

/// Shifted two-pass mean and standard error; identical samples give their
/// common value exactly and zero error.
pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let x0 = values[0];
    let mean_shift = values.iter().map(|x| x - x0).sum::<f64>() / n as f64;
    let mean = x0 + mean_shift;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|x| (x - x0 - mean_shift).powi(2)).sum();
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    /// Least-squares slope of `ln|g|` against `ln σ`.
    pub slope: f64,
    /// `ln|C^(2)|` from the fit with the slope held at 2.
    pub intercept: f64,
    pub c2_fit: f64,
    pub sigma_max_fit: Option<f64>,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Fits `ln|g| ≈ slope·ln σ + b` over points with `0 < |g| < fit_cap`.
///
/// The slope is fitted freely; the intercept is the slope-2 estimate
/// `mean(ln|g| − 2 ln σ)`, from which `C = sign(g)·e^b` and, for `C < 0`,
/// `σ_max = e^{−b/2}`.
pub fn fit_marker(sigmas: &[f64], g: &[f64], fit_cap: f64) -> Result<LogLogFit> {
    check_len(sigmas.len(), g.len())?;
    let pts: Vec<(f64, f64, f64)> = sigmas
        .iter()
        .zip(g)
        .filter(|(_, g)| g.abs() < fit_cap && **g != 0.0)
        .map(|(s, g)| (s.ln(), g.abs().ln(), g.signum()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientWindow { found: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - 2.0 * mx;
    let sign = if pts.iter().map(|p| p.2).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let c2_fit = sign * intercept.exp();
    let in_window: Vec<f64> = sigmas.iter().zip(g).filter(|(_, g)| g.abs() < fit_cap && **g != 0.0).map(|(s, _)| *s).collect();
    Ok(LogLogFit {
        slope,
        intercept,
        c2_fit,
        sigma_max_fit: (sign < 0.0).then(|| (-intercept / 2.0).exp()),
        window: (in_window[0], in_window[in_window.len() - 1]),
        n_points: pts.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSweepResult {
    pub sigma: Vec<f64>,
    pub f_mean: Vec<f64>,
    pub f_stderr: Vec<f64>,
    pub g_mean: Vec<f64>,
    pub g_stderr: Vec<f64>,
    pub f0: f64,
    pub n_realizations: u64,
    pub fit: LogLogFit,
}

/// Numerical disorder marker `g = F̄/F_0 − 1` on the σ grid, plus its fit.
pub fn marker_sweep<P: QuenchedProbe + ?Sized>(probe: &P, cfg: &McConfig) -> Result<McSweepResult> {
    cfg.validate()?;
    let f0 = probe.clean_qfi()?;
    if f0 <= MIN_CLEAN_QFI {
        return Err(Error::ZeroCleanQfi(f0));
    }
    let n_terms = probe.n_terms();
    let mut out = McSweepResult {
        sigma: cfg.sigma_grid.clone(),
        f_mean: Vec::new(),
        f_stderr: Vec::new(),
        g_mean: Vec::new(),
        g_stderr: Vec::new(),
        f0,
        n_realizations: cfg.n_realizations,
        fit: LogLogFit { slope: 0.0, intercept: 0.0, c2_fit: 0.0, sigma_max_fit: None, window: (0.0, 0.0), n_points: 0 },
    };
    for &s in &cfg.sigma_grid {
        let (m, se) = quenched_qfi(probe, &cfg.term_sigmas(s, n_terms)?, cfg)?;
        out.f_mean.push(m);
        out.f_stderr.push(se);
        out.g_mean.push(m / f0 - 1.0);
        out.g_stderr.push(se / f0);
    }
    out.fit = fit_marker(&out.sigma, &out.g_mean, cfg.fit_cap)?;
    Ok(out)
}

/// Root of `marker` bracketed by the first sign change on `grid` and refined
/// by bisection until the bracket is below `rel_tol` relative to the root.
pub fn crossover_scan<F>(marker: F, grid: &[f64], rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut prev = (grid[0], marker(grid[0])?);
    if prev.1 == 0.0 {
        return Ok(prev.0);
    }
    for &x in &grid[1..] {
        let fx = marker(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() != prev.1.signum() {
            let (mut lo, mut flo, mut hi) = (prev.0, prev.1, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (hi - lo).abs() <= rel_tol * mid.abs() {
                    break;
                }
                let fm = marker(mid)?;
                if fm == 0.0 {
                    return Ok(mid);
                }
                if fm.signum() == flo.signum() {
                    (lo, flo) = (mid, fm);
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = (x, fx);
    }
    Err(Error::NoSignChange)
}
