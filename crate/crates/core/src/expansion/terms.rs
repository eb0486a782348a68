//! Order-by-order expansion of the QFI generator in a single disorder term.

use num_complex::Complex64;
use rayon::prelude::*;

use super::chain::chain_integral;
use super::kernels::{KernelTensors, Kernels};
use crate::error::{Error, Result};
use crate::operator::{check_dim, eigh, CMatrix, HermitianMatrix};
use crate::probe::{clean_hamiltonian, DisorderedProbeSpec};

/// `G^(0)`, and for each disorder term `G_n^(1)`, `G_n^(2)` (and `G_n^(3)`),
/// all in the working basis of the probe.
#[derive(Debug, Clone)]
pub struct ExpansionTerms {
    pub g0: HermitianMatrix,
    pub g1: Vec<HermitianMatrix>,
    pub g2: Vec<HermitianMatrix>,
    pub g3: Option<Vec<HermitianMatrix>>,
    pub time: f64,
}

impl ExpansionTerms {
    pub fn n_terms(&self) -> usize {
        self.g1.len()
    }

    pub fn dim(&self) -> usize {
        self.g0.dim()
    }

    pub fn order(&self) -> usize {
        if self.g3.is_some() {
            3
        } else {
            2
        }
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    match order {
        2 | 3 => Ok(()),
        _ => Err(Error::UnsupportedOrder(order)),
    }
}

/// Expansion for the clean Hamiltonian and disorder terms of `spec`.
pub fn build_expansion(spec: &DisorderedProbeSpec, order: usize) -> Result<ExpansionTerms> {
    spec.validate()?;
    let h0 = clean_hamiltonian(spec)?;
    expand_generator(&h0, &spec.dtheta_h, &spec.term_operators(), spec.encoding_time, order)
}

/// Expansion of `∫_0^t U_s† D U_s ds` for `H = H_0 + Σ_n δ_n V_n` around `δ = 0`.
pub fn expand_generator(
    h0: &HermitianMatrix,
    dtheta_h: &HermitianMatrix,
    ops: &[HermitianMatrix],
    t: f64,
    order: usize,
) -> Result<ExpansionTerms> {
    check_order(order)?;
    check_dim(h0.dim(), dtheta_h.dim())?;
    for op in ops {
        check_dim(h0.dim(), op.dim())?;
    }
    let spec = eigh(h0);
    let k = Kernels::new(&spec.eigenvalues, t)?;
    let d = spec.to_eigenbasis(dtheta_h.matrix());
    let back = |m: CMatrix| HermitianMatrix::hermitize(spec.from_eigenbasis(&m));

    let g0 = back(CMatrix::from_fn(k.dim(), k.dim(), |i, j| d[(i, j)] * k.t(i, j)));
    let per_term: Vec<(CMatrix, CMatrix, Option<CMatrix>)> = ops
        .par_iter()
        .map(|op| {
            let h = spec.to_eigenbasis(op.matrix());
            let g1 = first_order(&k, &h, &d);
            let g2 = second_order(&k, &h, &d);
            let g3 = (order == 3).then(|| dyson_order(&k, 3, &h, &d));
            (g1, g2, g3)
        })
        .collect();
    let mut g1 = Vec::with_capacity(ops.len());
    let mut g2 = Vec::with_capacity(ops.len());
    let mut g3 = Vec::with_capacity(ops.len());
    for (a, b, c) in per_term {
        g1.push(back(a));
        g2.push(back(b));
        if let Some(c) = c {
            g3.push(back(c));
        }
    }
    Ok(ExpansionTerms { g0, g1, g2, g3: (order == 3).then_some(g3), time: t })
}

/// `[G^(1)]_ij = Σ_k h_ik d_kj S_ijk + d_ik h_kj S*_jik` (eigenbasis).
pub(crate) fn first_order(k: &Kernels, h: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = k.dim();
    CMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|m| h[(i, m)] * d[(m, j)] * k.s(i, j, m) + d[(i, m)] * h[(m, j)] * k.s(j, i, m).conj())
            .sum()
    })
}

/// `[G^(2)]_ij = Σ_kl h_ik h_kl d_lj R_ijkl + h_ik d_kl h_lj R̄*_ijkl + d_ik h_kl h_lj R*_lijk`.
///
/// Pairs with well separated energies are contracted through the divided
/// differences `R_ijkl = (S_ijl − S_kjl)/Δ_ik`, `R̄_ijkl = (S_lij − S_lkj)/Δ_ik`
/// and `R_lijk = (S_lik − S_jik)/Δ_lj`, which brings the cost down to
/// `O(dim³)`. Remaining pairs are summed explicitly.
pub(crate) fn second_order(k: &Kernels, h: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = k.dim();
    // L_ab = h_ab / Δ_ab on separated pairs.
    let l = CMatrix::from_fn(n, n, |a, b| if k.separated(a, b) { h[(a, b)] / k.gap(a, b) } else { Complex64::default() });
    let s = |a, b, c| k.s(a, b, c);
    let lh = &l * h;
    let ld = &l * d;
    let hl = h * &l;
    // P_kj = Σ_l h_kl d_lj S_kjl, Q_kj = Σ_l d_kl h_lj S*_lkj, W_il = Σ_k d_ik h_kl S*_lik
    let p = CMatrix::from_fn(n, n, |a, j| (0..n).map(|m| h[(a, m)] * d[(m, j)] * s(a, j, m)).sum());
    let q = CMatrix::from_fn(n, n, |a, j| (0..n).map(|m| d[(a, m)] * h[(m, j)] * s(m, a, j).conj()).sum());
    let w = CMatrix::from_fn(n, n, |i, m| (0..n).map(|a| d[(i, a)] * h[(a, m)] * s(m, i, a).conj()).sum());
    let lp = &l * &p;
    let lq = &l * &q;
    let wl = &w * &l;

    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        let close_i: Vec<usize> = (0..n).filter(|&a| !k.separated(i, a)).collect();
        for j in 0..n {
            let mut acc = -lp[(i, j)] - lq[(i, j)] + wl[(i, j)];
            for m in 0..n {
                acc += lh[(i, m)] * d[(m, j)] * s(i, j, m);
                acc += ld[(i, m)] * h[(m, j)] * s(m, i, j).conj();
                acc -= d[(i, m)] * hl[(m, j)] * s(j, i, m).conj();
            }
            for &a in &close_i {
                for m in 0..n {
                    acc += h[(i, a)] * h[(a, m)] * d[(m, j)] * k.r_close(i, j, a, m);
                    acc += h[(i, a)] * d[(a, m)] * h[(m, j)] * k.rbar_close(i, j, a, m).conj();
                }
            }
            for m in (0..n).filter(|&m| !k.separated(m, j)) {
                for a in 0..n {
                    acc += d[(i, a)] * h[(a, m)] * h[(m, j)] * k.r_close(m, i, j, a).conj();
                }
            }
            g[(i, j)] = acc;
        }
    }
    g
}

/// Direct contraction of [`second_order`] against materialized tensors.
pub fn second_order_from_tensors(kt: &KernelTensors, h: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = kt.dim();
    CMatrix::from_fn(n, n, |i, j| {
        let mut acc = Complex64::default();
        for a in 0..n {
            for m in 0..n {
                acc += h[(i, a)] * h[(a, m)] * d[(m, j)] * kt.r_at(i, j, a, m)
                    + h[(i, a)] * d[(a, m)] * h[(m, j)] * kt.rbar_at(i, j, a, m).conj()
                    + d[(i, a)] * h[(a, m)] * h[(m, j)] * kt.r_at(m, i, j, a).conj();
            }
        }
        acc
    })
}

/// Order-`m` coefficient of `∫_0^t U_s† D U_s ds` in the eigenbasis, straight
/// from the Dyson series: every placement of `D` among the `m` insertions of
/// `V`, with the time-ordered integrals evaluated as chain integrals.
/// Cost is `O(dim^{m+2})` chain evaluations.
pub fn dyson_order(k: &Kernels, m: usize, h: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = k.dim();
    let t = k.time();
    let mut g = CMatrix::zeros(n, n);
    let mut idx = vec![0usize; m + 2];
    for q in 0..=m {
        let p = m - q;
        // (−i)^p from U, (+i)^q from U†.
        let pref = Complex64::new(0.0, 1.0).powi(q as i32) * Complex64::new(0.0, -1.0).powi(p as i32);
        let shuffles: Vec<u32> = (0u32..1 << m).filter(|s| s.count_ones() as usize == q).collect();
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::default();
                let total = n.pow(m as u32);
                for mut code in 0..total {
                    idx[0] = i;
                    idx[m + 1] = j;
                    for slot in idx.iter_mut().take(m + 1).skip(1) {
                        *slot = code % n;
                        code /= n;
                    }
                    let mut coef = Complex64::new(1.0, 0.0);
                    for r in 1..=m + 1 {
                        let op = if r == q + 1 { d } else { h };
                        coef *= op[(idx[r - 1], idx[r])];
                        if coef == Complex64::default() {
                            break;
                        }
                    }
                    if coef == Complex64::default() {
                        continue;
                    }
                    let freq = |r: usize| k.gap(idx[r - 1], idx[r]);
                    let mut omegas = [0.0; 8];
                    omegas[0] = freq(q + 1);
                    let mut integral = Complex64::default();
                    for &sh in &shuffles {
                        // Left insertions run from latest (position q) to earliest
                        // (position 1); right ones from position q+2 onward.
                        let (mut left, mut right) = (q, q + 2);
                        for b in 0..m {
                            omegas[b + 1] = if sh >> b & 1 == 1 {
                                left -= 1;
                                freq(left + 1)
                            } else {
                                right += 1;
                                freq(right - 1)
                            };
                        }
                        integral += chain_integral(&omegas[..=m], t);
                    }
                    acc += coef * integral;
                }
                g[(i, j)] += pref * acc;
            }
        }
    }
    g
}
