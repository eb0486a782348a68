//! Disordered open Kitaev chain in Bogoliubov-de Gennes form, with `μ` as the
//! estimated parameter and independent disorder on every hopping `τ_i` and
//! pairing `η_i`.

pub mod ghz;
pub mod jw;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ghz::{ghz_mean_var, GhzFermionState, MIN_GHZ_SITES};
pub use jw::{free_fermion_spectrum, jw_dense_hamiltonian, jw_dmu, jw_ghz_state, MAX_JW_SITES};

use crate::error::{Error, Result};
use crate::expansion::{expand_generator, report_from_terms, Classification, RobustnessReport};
use crate::monte_carlo::QuenchedProbe;
use crate::operator::HermitianMatrix;
use crate::probe::{check_len, DisorderDistribution};
use crate::qfi::{qfig_exact, QfigResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KitaevParams {
    pub n: usize,
    pub mu: f64,
    pub tau0: Vec<f64>,
    pub eta0: Vec<f64>,
    pub sigma_tau: f64,
    pub sigma_eta: f64,
    pub t: f64,
}

impl KitaevParams {
    /// Uniform couplings on every bond with a common disorder strength.
    pub fn uniform(n: usize, mu: f64, tau0: f64, eta0: f64, sigma: f64, t: f64) -> Result<Self> {
        let p = Self {
            n,
            mu,
            tau0: vec![tau0; n.saturating_sub(1)],
            eta0: vec![eta0; n.saturating_sub(1)],
            sigma_tau: sigma,
            sigma_eta: sigma,
            t,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSize(self.n));
        }
        check_len(self.n - 1, self.tau0.len())?;
        check_len(self.n - 1, self.eta0.len())?;
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::InvalidParameter(format!("t must be positive, got {}", self.t)));
        }
        if self.sigma_tau < 0.0 || self.sigma_eta < 0.0 {
            return Err(Error::InvalidParameter("disorder strengths must be non-negative".into()));
        }
        Ok(())
    }

    pub fn bonds(&self) -> usize {
        self.n - 1
    }

    /// Hopping bonds first, then pairing bonds.
    pub fn distributions(&self) -> Result<Vec<DisorderDistribution>> {
        let dt = DisorderDistribution::gaussian(0.0, self.sigma_tau)?;
        let de = DisorderDistribution::gaussian(0.0, self.sigma_eta)?;
        Ok((0..self.bonds()).map(|_| dt).chain((0..self.bonds()).map(|_| de)).collect())
    }
}

/// `A` (symmetric), `B` (antisymmetric), `M = [[A, B], [−B, −A]]` and
/// `M_μ = ∂M/∂μ = diag(−I, I)`, so that `H = ½ Ψ† M Ψ`.
#[derive(Debug, Clone)]
pub struct BdGModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub m: HermitianMatrix,
    pub m_mu: HermitianMatrix,
}

impl BdGModel {
    pub fn sites(&self) -> usize {
        self.a.nrows()
    }
}

fn nambu(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(&(-b));
    m.view_mut((n, n), (n, n)).copy_from(&(-a));
    m
}

/// BdG matrices at couplings `τ_0 + δτ`, `η_0 + δη`.
pub fn build_bdg(p: &KitaevParams, delta_tau: &[f64], delta_eta: &[f64]) -> Result<BdGModel> {
    p.validate()?;
    check_len(p.bonds(), delta_tau.len())?;
    check_len(p.bonds(), delta_eta.len())?;
    let n = p.n;
    let mut a = DMatrix::from_diagonal_element(n, n, -p.mu);
    let mut b = DMatrix::zeros(n, n);
    for i in 0..p.bonds() {
        let tau = p.tau0[i] + delta_tau[i];
        let eta = p.eta0[i] + delta_eta[i];
        a[(i, i + 1)] = -tau;
        a[(i + 1, i)] = -tau;
        b[(i, i + 1)] = -eta;
        b[(i + 1, i)] = eta;
    }
    let m = HermitianMatrix::from_real(&nambu(&a, &b))?;
    Ok(BdGModel { a, b, m, m_mu: number_derivative(n) })
}

fn number_derivative(n: usize) -> HermitianMatrix {
    let d = DMatrix::from_fn(2 * n, 2 * n, |i, j| match (i == j, i < n) {
        (false, _) => 0.0,
        (true, true) => -1.0,
        (true, false) => 1.0,
    });
    HermitianMatrix::from_real(&d).expect("diagonal matrices are Hermitian")
}

/// `∂M/∂τ_i` for each bond, then `∂M/∂η_i`.
pub fn bond_operators(n: usize) -> Vec<HermitianMatrix> {
    let bonds = n.saturating_sub(1);
    let mut ops = Vec::with_capacity(2 * bonds);
    for i in 0..bonds {
        let mut a = DMatrix::zeros(n, n);
        a[(i, i + 1)] = -1.0;
        a[(i + 1, i)] = -1.0;
        ops.push(HermitianMatrix::from_real(&nambu(&a, &DMatrix::zeros(n, n))).expect("symmetric"));
    }
    for i in 0..bonds {
        let mut b = DMatrix::zeros(n, n);
        b[(i, i + 1)] = -1.0;
        b[(i + 1, i)] = 1.0;
        ops.push(HermitianMatrix::from_real(&nambu(&DMatrix::zeros(n, n), &b)).expect("symmetric"));
    }
    ops
}

/// `J = ∫_0^t e^{iMs} M_μ e^{−iMs} ds`; the many-body generator is `½ Ψ† J Ψ`.
pub type NambuJ = QfigResult;

pub fn qfig_j(model: &BdGModel, t: f64) -> Result<NambuJ> {
    qfig_exact(&model.m, &model.m_mu, t)
}

/// QFI of the GHZ probe for one realization of the couplings.
pub fn kitaev_qfi(p: &KitaevParams, delta_tau: &[f64], delta_eta: &[f64]) -> Result<f64> {
    let model = build_bdg(p, delta_tau, delta_eta)?;
    let j = qfig_j(&model, p.t)?;
    let (_, v) = ghz_mean_var(j.generator.matrix(), p.n)?;
    Ok(4.0 * v)
}

/// Second-order disorder marker coefficients for bond disorder in the GHZ probe.
pub fn kitaev_robustness(p: &KitaevParams) -> Result<RobustnessReport> {
    p.validate()?;
    let state = GhzFermionState::new(p.n)?;
    let zeros = vec![0.0; p.bonds()];
    let model = build_bdg(p, &zeros, &zeros)?;
    let terms = expand_generator(&model.m, &model.m_mu, &bond_operators(p.n), p.t, 2)?;
    report_from_terms(&terms, &state)
}

/// Kitaev chain as a Monte Carlo probe; fluctuations are ordered as in
/// [`KitaevParams::distributions`].
#[derive(Debug, Clone)]
pub struct KitaevProbe {
    pub params: KitaevParams,
    distributions: Vec<DisorderDistribution>,
}

impl KitaevProbe {
    pub fn new(params: KitaevParams) -> Result<Self> {
        GhzFermionState::new(params.n)?;
        let distributions = params.distributions()?;
        Ok(Self { params, distributions })
    }
}

impl QuenchedProbe for KitaevProbe {
    fn distributions(&self) -> Vec<DisorderDistribution> {
        self.distributions.clone()
    }

    fn qfi_for(&self, deltas: &[f64]) -> Result<f64> {
        let b = self.params.bonds();
        check_len(2 * b, deltas.len())?;
        kitaev_qfi(&self.params, &deltas[..b], &deltas[b..])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub tau0: f64,
    pub eta0: f64,
    pub c2_total: f64,
    pub classification: Classification,
}

/// `C^(2)` over a `(τ_0, η_0)` grid of uniform chains, row-major in `τ_0`.
pub fn plane_scan(n: usize, mu: f64, t: f64, tau_grid: &[f64], eta_grid: &[f64]) -> Result<Vec<PlanePoint>> {
    if tau_grid.is_empty() || eta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let cells: Vec<(f64, f64)> = tau_grid.iter().flat_map(|&a| eta_grid.iter().map(move |&b| (a, b))).collect();
    cells
        .par_iter()
        .map(|&(tau0, eta0)| {
            let p = KitaevParams::uniform(n, mu, tau0, eta0, 0.0, t)?;
            let r = kitaev_robustness(&p)?;
            Ok(PlanePoint { tau0, eta0, c2_total: r.c2_total, classification: r.classification })
        })
        .collect()
}
