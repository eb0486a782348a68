//! Dense Jordan-Wigner representation of the chain, used as an exact oracle.
//!
//! Basis states are occupation bit strings with site 0 as the most significant
//! bit; `c_i = (∏_{k<i} Z_k) σ_i⁻` so `c_i` picks up `(−1)` per occupied site
//! to its left.

use num_complex::Complex64;

use super::{BdGModel, KitaevParams};
use crate::error::{Error, Result};
use crate::operator::{eigh, CMatrix, CVector, HermitianMatrix, PureState};
use crate::probe::check_len;

pub const MAX_JW_SITES: usize = 12;

fn check_sites(n: usize) -> Result<()> {
    if n > MAX_JW_SITES {
        Err(Error::TooLarge(n))
    } else if n == 0 {
        Err(Error::InvalidSize(n))
    } else {
        Ok(())
    }
}

#[inline]
fn bit(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

/// `(−1)^{occupied sites left of `site`}`
#[inline]
fn string_sign(n: usize, state: usize, site: usize) -> f64 {
    let left = state >> (n - site);
    if left.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn annihilate(n: usize, state: usize, site: usize) -> Option<(f64, usize)> {
    (state & bit(n, site) != 0).then(|| (string_sign(n, state, site), state ^ bit(n, site)))
}

fn create(n: usize, state: usize, site: usize) -> Option<(f64, usize)> {
    (state & bit(n, site) == 0).then(|| (string_sign(n, state, site), state | bit(n, site)))
}

#[derive(Clone, Copy)]
enum Ladder {
    Create,
    Annihilate,
}

/// Adds `coef · L1_i L2_j` (rightmost acts first) to `h`.
fn add_pair(h: &mut CMatrix, n: usize, coef: f64, (l1, i): (Ladder, usize), (l2, j): (Ladder, usize)) {
    let apply = |l: Ladder, s: usize, site: usize| match l {
        Ladder::Create => create(n, s, site),
        Ladder::Annihilate => annihilate(n, s, site),
    };
    for s in 0..1usize << n {
        if let Some((s1, a)) = apply(l2, s, j) {
            if let Some((s2, b)) = apply(l1, a, i) {
                h[(b, s)] += Complex64::new(coef * s1 * s2, 0.0);
            }
        }
    }
}

/// `−Σ τ_i(c_i†c_{i+1} + h.c.) + Σ η_i(c_i c_{i+1} + c_{i+1}†c_i†) − μ Σ(n_i − ½)`
pub fn jw_dense_hamiltonian(p: &KitaevParams, delta_tau: &[f64], delta_eta: &[f64]) -> Result<HermitianMatrix> {
    check_sites(p.n)?;
    p.validate()?;
    check_len(p.bonds(), delta_tau.len())?;
    check_len(p.bonds(), delta_eta.len())?;
    let n = p.n;
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    use Ladder::{Annihilate as C, Create as Cd};
    for i in 0..p.bonds() {
        let tau = p.tau0[i] + delta_tau[i];
        let eta = p.eta0[i] + delta_eta[i];
        add_pair(&mut h, n, -tau, (Cd, i), (C, i + 1));
        add_pair(&mut h, n, -tau, (Cd, i + 1), (C, i));
        add_pair(&mut h, n, eta, (C, i), (C, i + 1));
        add_pair(&mut h, n, eta, (Cd, i + 1), (Cd, i));
    }
    let dmu = jw_dmu(n)?;
    h += dmu.matrix() * Complex64::new(p.mu, 0.0);
    HermitianMatrix::new(h)
}

/// `∂H/∂μ = −Σ_i (n_i − ½)`, diagonal in the occupation basis.
pub fn jw_dmu(n: usize) -> Result<HermitianMatrix> {
    check_sites(n)?;
    let dim = 1usize << n;
    let diag = CVector::from_fn(dim, |s, _| Complex64::new(-(s.count_ones() as f64 - 0.5 * n as f64), 0.0));
    Ok(HermitianMatrix::hermitize(CMatrix::from_diagonal(&diag)))
}

/// `(|0…0⟩ + |1…1⟩)/√2`
pub fn jw_ghz_state(n: usize) -> Result<PureState> {
    check_sites(n)?;
    let dim = 1usize << n;
    let mut v = CVector::zeros(dim);
    v[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[dim - 1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::new(v)
}

/// Sorted many-body energies `Σ_k ε_k (n_k − ½)` over the positive half of
/// the BdG spectrum.
pub fn free_fermion_spectrum(model: &BdGModel) -> Result<Vec<f64>> {
    let n = model.sites();
    check_sites(n)?;
    let e = eigh(&model.m).eigenvalues;
    let eps = &e[n..];
    let mut out: Vec<f64> = (0..1usize << n)
        .map(|occ| (0..n).map(|k| eps[k] * (((occ >> k) & 1) as f64 - 0.5)).sum())
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}
