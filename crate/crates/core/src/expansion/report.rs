//! Disorder marker coefficients, σ_max and probe classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::terms::{build_expansion, ExpansionTerms};
use crate::error::{Error, Result};
use crate::operator::{check_dim, CMatrix, PureState};
use crate::probe::{check_len, DisorderedProbeSpec};

/// Threshold below which `|C^(2)|` counts as zero.
pub const EPS_CLASS: f64 = 1e-10;
/// Clean QFI below this makes the marker undefined.
pub const MIN_CLEAN_QFI: f64 = 1e-14;

/// Expectation values of (products of) generator-level matrices in a probe state.
///
/// For a pure state these are plain quadratic forms; for fermionic Gaussian
/// probes the matrices are single-particle objects and the provider applies
/// the corresponding many-body contraction rules.
pub trait Expectation {
    fn dim(&self) -> usize;
    /// `⟨A⟩`
    fn mean(&self, a: &CMatrix) -> Complex64;
    /// `⟨AB⟩`
    fn product(&self, a: &CMatrix, b: &CMatrix) -> Complex64;
}

impl Expectation for PureState {
    fn dim(&self) -> usize {
        PureState::dim(self)
    }

    fn mean(&self, a: &CMatrix) -> Complex64 {
        let v = self.amplitudes();
        v.dotc(&(a * v))
    }

    fn product(&self, a: &CMatrix, b: &CMatrix) -> Complex64 {
        let v = self.amplitudes();
        (a.adjoint() * v).dotc(&(b * v))
    }
}

/// Covariance-like combination `⟨AB⟩ + ⟨BA⟩ − 2⟨A⟩⟨B⟩`.
fn sym_cov<E: Expectation + ?Sized>(e: &E, a: &CMatrix, b: &CMatrix) -> Complex64 {
    e.product(a, b) + e.product(b, a) - 2.0 * e.mean(a) * e.mean(b)
}

fn real_part(z: Complex64, scale: f64) -> f64 {
    debug_assert!(
        z.im.abs() <= 1e-9 * (1.0 + scale),
        "imaginary residue {} on a real expectation",
        z.im
    );
    z.re
}

fn term_checked<E: Expectation + ?Sized>(terms: &ExpansionTerms, state: &E, n: usize) -> Result<()> {
    check_dim(terms.dim(), state.dim())?;
    if n >= terms.n_terms() {
        return Err(Error::InvalidParameter(format!(
            "term index {n} out of range for {} terms",
            terms.n_terms()
        )));
    }
    Ok(())
}

/// Clean QFI `4(⟨G0²⟩ − ⟨G0⟩²)`.
pub fn clean_qfi<E: Expectation + ?Sized>(terms: &ExpansionTerms, state: &E) -> Result<f64> {
    check_dim(terms.dim(), state.dim())?;
    let g0 = terms.g0.matrix();
    let m = state.mean(g0);
    let v = state.product(g0, g0) - m * m;
    Ok(4.0 * real_part(v, g0.norm_squared()).max(0.0))
}

/// First-order variance coefficient `⟨G0 G1⟩ + ⟨G1 G0⟩ − 2⟨G0⟩⟨G1⟩`.
pub fn tilde_g1<E: Expectation + ?Sized>(terms: &ExpansionTerms, state: &E, n: usize) -> Result<f64> {
    term_checked(terms, state, n)?;
    let (g0, g1) = (terms.g0.matrix(), terms.g1[n].matrix());
    Ok(real_part(sym_cov(state, g0, g1), g0.norm() * g1.norm()))
}

/// Second-order coefficient
/// `⟨G1G1⟩ + ⟨G0G2⟩ + ⟨G2G0⟩ − 2⟨G0⟩⟨G2⟩ − ⟨G1⟩²`.
pub fn tilde_g2<E: Expectation + ?Sized>(terms: &ExpansionTerms, state: &E, n: usize) -> Result<f64> {
    term_checked(terms, state, n)?;
    let (g0, g1, g2) = (terms.g0.matrix(), terms.g1[n].matrix(), terms.g2[n].matrix());
    let m1 = state.mean(g1);
    let z = state.product(g1, g1) - m1 * m1 + sym_cov(state, g0, g2);
    Ok(real_part(z, g1.norm_squared() + g0.norm() * g2.norm()))
}

/// Third-order coefficient
/// `⟨G0G3⟩ + ⟨G3G0⟩ + ⟨G1G2⟩ + ⟨G2G1⟩ − 2⟨G0⟩⟨G3⟩ − 2⟨G1⟩⟨G2⟩`.
pub fn tilde_g3<E: Expectation + ?Sized>(terms: &ExpansionTerms, state: &E, n: usize) -> Result<f64> {
    term_checked(terms, state, n)?;
    let g3 = terms.g3.as_ref().ok_or(Error::MissingThirdOrder)?;
    let (g0, g1, g2, g3) = (terms.g0.matrix(), terms.g1[n].matrix(), terms.g2[n].matrix(), g3[n].matrix());
    let z = sym_cov(state, g0, g3) + sym_cov(state, g1, g2);
    Ok(real_part(z, g0.norm() * g3.norm() + g1.norm() * g2.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Disorder-insensitive probe, `C^(2) = 0`.
    DIP,
    /// Disorder-suppressed probe, `C^(2) < 0`.
    DSP,
    /// Disorder-enhanced probe, `C^(2) > 0`.
    DEP,
}

impl Classification {
    pub fn from_c2(c2: f64) -> Self {
        if c2.abs() < EPS_CLASS {
            Classification::DIP
        } else if c2 > 0.0 {
            Classification::DEP
        } else {
            Classification::DSP
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::DIP => "DIP",
            Classification::DSP => "DSP",
            Classification::DEP => "DEP",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub f0: f64,
    pub c2_per_term: Vec<f64>,
    pub c2_total: f64,
    pub c3_per_term: Option<Vec<f64>>,
    pub c3_total: Option<f64>,
    pub c32: Option<f64>,
    pub sigma_max: Option<f64>,
    pub classification: Classification,
}

impl RobustnessReport {
    /// Assembles a report from per-term coefficients.
    pub fn from_coefficients(f0: f64, c2_per_term: Vec<f64>, c3_per_term: Option<Vec<f64>>) -> Self {
        let c2_total: f64 = c2_per_term.iter().sum();
        let classification = Classification::from_c2(c2_total);
        let sigma_max = (classification == Classification::DSP).then(|| c2_total.abs().powf(-0.5));
        let c3_total = c3_per_term.as_ref().map(|v| v.iter().sum::<f64>());
        let c32 = c3_total.filter(|_| classification != Classification::DIP).map(|c3| c3 / c2_total);
        Self { f0, c2_per_term, c2_total, c3_per_term, c3_total, c32, sigma_max, classification }
    }
}

/// Report for the expansion `terms` evaluated in `state`.
pub fn report_from_terms<E: Expectation + ?Sized>(terms: &ExpansionTerms, state: &E) -> Result<RobustnessReport> {
    let f0 = clean_qfi(terms, state)?;
    if f0 <= MIN_CLEAN_QFI {
        return Err(Error::ZeroCleanQfi(f0));
    }
    let c2 = (0..terms.n_terms())
        .map(|n| Ok(4.0 * tilde_g2(terms, state, n)? / f0))
        .collect::<Result<Vec<_>>>()?;
    let c3 = match terms.g3 {
        Some(_) => Some(
            (0..terms.n_terms())
                .map(|n| Ok(4.0 * tilde_g3(terms, state, n)? / f0))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(RobustnessReport::from_coefficients(f0, c2, c3))
}

/// Disorder-marker coefficients of `spec` in its initial state.
pub fn robustness_report(spec: &DisorderedProbeSpec, order: usize) -> Result<RobustnessReport> {
    let terms = build_expansion(spec, order)?;
    report_from_terms(&terms, &spec.initial_state)
}

/// `g ≈ Σ_n σ_n² C_n^(2)`, plus `Σ_n γ_n σ_n³ C_n^(3)` when skewnesses are given.
pub fn predicted_marker(report: &RobustnessReport, sigmas: &[f64], gammas: Option<&[f64]>) -> Result<f64> {
    check_len(report.c2_per_term.len(), sigmas.len())?;
    let mut g: f64 = sigmas.iter().zip(&report.c2_per_term).map(|(s, c)| s * s * c).sum();
    if let Some(gammas) = gammas {
        check_len(sigmas.len(), gammas.len())?;
        let c3 = report.c3_per_term.as_ref().ok_or(Error::MissingThirdOrder)?;
        g += sigmas.iter().zip(gammas).zip(c3).map(|((s, gm), c)| gm * s.powi(3) * c).sum::<f64>();
    }
    Ok(g)
}

/// Grid search for the member of a state family with the smallest `|g|`
/// at the σ's of `spec`. Ties keep the first grid point.
pub fn optimize_resilience<F>(spec: &DisorderedProbeSpec, family: F, grid: &[Vec<f64>]) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<PureState>,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let terms = build_expansion(spec, 2)?;
    let sigmas: Vec<f64> = spec.distributions().iter().map(|d| d.sigma).collect();
    let mut best: Option<(usize, f64)> = None;
    for (k, params) in grid.iter().enumerate() {
        let psi = family(params)?;
        let report = report_from_terms(&terms, &psi)?;
        let g = predicted_marker(&report, &sigmas, None)?.abs();
        if best.map_or(true, |(_, b)| g < b) {
            best = Some((k, g));
        }
    }
    let (k, g) = best.expect("grid is not empty");
    Ok((grid[k].clone(), g))
}
