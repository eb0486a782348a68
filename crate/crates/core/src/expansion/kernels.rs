//! Time-integral kernels `T`, `S`, `R`, `R̄` in the energy eigenbasis of `H_0`.

use num_complex::Complex64;

use super::chain::chain_integral;
use crate::error::Result;
use crate::operator::{degeneracy_threshold, CMatrix, SpectralDecomposition};
use crate::qfi::{check_time, expm1i, phase_integral};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gaps with `ε_deg ≤ |ΔE| < NEAR_GAP / t` go through the chain integral,
/// where the closed forms lose digits to cancellation.
const NEAR_GAP: f64 = 0.05;

/// Spectra up to this size keep a table of `S`, which every contraction hits
/// `O(dim³)` times per disorder term.
const S_TABLE_MAX_DIM: usize = 128;

/// Entry cap for the tables of `R`, `R̄` restricted to close index pairs.
const CLOSE_TABLE_MAX_LEN: usize = 1 << 21;

/// `R_xbyc` and `R̄_xbyc` for every pair `(x, y)` that is not separated.
#[derive(Debug, Clone)]
struct CloseTables {
    slot: Vec<usize>,
    r: Vec<Complex64>,
    rbar: Vec<Complex64>,
}

/// Kernel evaluator for one spectrum and time. `S` is tabulated for moderate
/// sizes, everything else is computed on demand.
#[derive(Debug, Clone)]
pub struct Kernels {
    energies: Vec<f64>,
    time: f64,
    eps: f64,
    near: f64,
    s_table: Option<Vec<Complex64>>,
    close: Option<CloseTables>,
}

impl Kernels {
    pub fn new(energies: &[f64], t: f64) -> Result<Self> {
        check_time(t)?;
        let eps = degeneracy_threshold(energies);
        let mut k = Self { energies: energies.to_vec(), time: t, eps, near: (NEAR_GAP / t).max(eps), s_table: None, close: None };
        let n = k.dim();
        if n <= S_TABLE_MAX_DIM {
            let mut table = Vec::with_capacity(n * n * n);
            for i in 0..n {
                for j in 0..n {
                    table.extend((0..n).map(|m| k.s_direct(i, j, m)));
                }
            }
            k.s_table = Some(table);
            k.close = k.close_tables();
        }
        Ok(k)
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    #[inline]
    pub(crate) fn gap(&self, a: usize, b: usize) -> f64 {
        self.energies[a] - self.energies[b]
    }

    #[inline]
    pub(crate) fn coincident(&self, a: usize, b: usize) -> bool {
        self.gap(a, b).abs() < self.eps
    }

    /// Far enough apart for divided differences to be well conditioned.
    #[inline]
    pub(crate) fn separated(&self, a: usize, b: usize) -> bool {
        self.gap(a, b).abs() >= self.near
    }

    #[inline]
    fn near(&self, a: usize, b: usize) -> bool {
        !self.coincident(a, b) && !self.separated(a, b)
    }

    fn needs_chain(&self, idx: &[usize]) -> bool {
        (0..idx.len()).any(|p| (p + 1..idx.len()).any(|q| self.near(idx[p], idx[q])))
    }

    /// `T_ij = ∫_0^t e^{iΔ_ij s} ds`
    #[inline]
    pub fn t(&self, i: usize, j: usize) -> Complex64 {
        phase_integral(self.gap(i, j), self.time, self.eps)
    }

    /// `S_ijk = i ∫_0^t ds e^{iΔ_kj s} ∫_0^s e^{iΔ_ik u} du`
    fn close_tables(&self) -> Option<CloseTables> {
        let n = self.dim();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| !self.separated(x, y)).collect();
        if pairs.len() * n * n > CLOSE_TABLE_MAX_LEN {
            return None;
        }
        let mut slot = vec![usize::MAX; n * n];
        let mut r = Vec::with_capacity(pairs.len() * n * n);
        let mut rbar = Vec::with_capacity(pairs.len() * n * n);
        for (p, &(x, y)) in pairs.iter().enumerate() {
            slot[x * n + y] = p;
            for b in 0..n {
                for c in 0..n {
                    r.push(self.r(x, b, y, c));
                    rbar.push(self.rbar(x, b, y, c));
                }
            }
        }
        Some(CloseTables { slot, r, rbar })
    }

    /// [`Self::r`] for a pair `(i, k)` that is not separated.
    #[inline]
    pub(crate) fn r_close(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let n = self.dim();
        match &self.close {
            Some(c) => c.r[(c.slot[i * n + k] * n + j) * n + l],
            None => self.r(i, j, k, l),
        }
    }

    /// [`Self::rbar`] for a pair `(i, k)` that is not separated.
    #[inline]
    pub(crate) fn rbar_close(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let n = self.dim();
        match &self.close {
            Some(c) => c.rbar[(c.slot[i * n + k] * n + j) * n + l],
            None => self.rbar(i, j, k, l),
        }
    }

    #[inline]
    pub fn s(&self, i: usize, j: usize, k: usize) -> Complex64 {
        match &self.s_table {
            Some(table) => table[(i * self.dim() + j) * self.dim() + k],
            None => self.s_direct(i, j, k),
        }
    }

    fn s_direct(&self, i: usize, j: usize, k: usize) -> Complex64 {
        if self.needs_chain(&[i, j, k]) {
            return I * chain_integral(&[self.gap(k, j), self.gap(i, k)], self.time);
        }
        self.s_closed(i, j, k)
    }

    fn s_closed(&self, i: usize, j: usize, k: usize) -> Complex64 {
        let t = self.time;
        if !self.coincident(i, k) {
            return (self.t(i, j) - self.t(k, j)) / self.gap(i, k);
        }
        if !self.coincident(i, j) {
            let d = self.gap(i, j);
            let e = Complex64::from_polar(1.0, d * t);
            return (t * d * e + I * expm1i(d * t)) / (d * d);
        }
        I * (0.5 * t * t)
    }

    /// `R_ijkl = −∫_0^t ds e^{iΔ_lj s} ∫_0^s du e^{iΔ_kl u} ∫_0^u e^{iΔ_ik v} dv`
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        if self.needs_chain(&[i, j, k, l]) {
            return -chain_integral(&[self.gap(l, j), self.gap(k, l), self.gap(i, k)], self.time);
        }
        if !self.coincident(i, k) {
            return (self.s_closed(i, j, l) - self.s_closed(k, j, l)) / self.gap(i, k);
        }
        let t = self.time;
        let e = |x: f64| Complex64::from_polar(1.0, x * t);
        let (ij, il, jl) = (self.coincident(i, j), self.coincident(i, l), self.coincident(j, l));
        match (ij, il, jl) {
            (false, false, false) => {
                let (dij, dil, djl) = (self.gap(i, j), self.gap(i, l), self.gap(j, l));
                let num = I * e(self.gap(l, j)) * dij * dij - I * dil * dil
                    + e(dij) * djl * (I * (dij + dil) + dij * dil * t);
                num / (dij * dij * dil * dil * djl)
            }
            (false, false, true) => {
                let d = self.gap(l, i);
                (2.0 * I + d * t + e(self.gap(i, l)) * (d * t - 2.0 * I)) / (d * d * d)
            }
            (false, true, _) => {
                let d = self.gap(i, j);
                0.5 * I * (2.0 + e(d) * (-2.0 + 2.0 * I * t * d + d * d * t * t)) / (d * d * d)
            }
            (true, false, _) => {
                let d = self.gap(i, l);
                0.5 * I * t * t / d - (I * (1.0 - e(-d)) + d * t) / (d * d * d)
            }
            (true, true, _) => Complex64::new(-t * t * t / 6.0, 0.0),
        }
    }

    /// `R̄_ijkl = ∫_0^t ds e^{iΔ_lk s} A_ki(s) A_jl(s)`, `A_ab(s) = ∫_0^s e^{iΔ_ab u} du`
    pub fn rbar(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        if self.needs_chain(&[i, j, k, l]) {
            let (lk, ki, jl) = (self.gap(l, k), self.gap(k, i), self.gap(j, l));
            return chain_integral(&[lk, ki, jl], self.time) + chain_integral(&[lk, jl, ki], self.time);
        }
        if !self.coincident(i, k) {
            return (self.s_closed(l, i, j) - self.s_closed(l, k, j)) / self.gap(i, k);
        }
        let t = self.time;
        let e = |x: f64| Complex64::from_polar(1.0, x * t);
        let (ij, il, jl) = (self.coincident(i, j), self.coincident(i, l), self.coincident(j, l));
        match (ij, il, jl) {
            (false, false, false) => {
                let (dij, dil, djl) = (self.gap(i, j), self.gap(i, l), self.gap(j, l));
                let num = I * (dij + dil) * djl
                    + e(self.gap(j, i)) * dil * dil * (-I + dij * t)
                    + e(self.gap(l, i)) * dij * dij * (I - dil * t);
                num / (dij * dij * dil * dil * djl)
            }
            (false, false, true) => {
                let d = self.gap(l, i);
                I * (2.0 + e(d) * (-2.0 + 2.0 * I * t * d + d * d * t * t)) / (-d * d * d)
            }
            (false, true, _) => {
                let d = self.gap(i, j);
                0.5 * (2.0 * e(-d) * (I - d * t) - I * (2.0 + d * d * t * t)) / (d * d * d)
            }
            (true, false, _) => {
                let d = self.gap(i, l);
                0.5 * (2.0 * e(-d) * (I - d * t) - I * (2.0 + d * d * t * t)) / (d * d * d)
            }
            (true, true, _) => Complex64::new(t * t * t / 3.0, 0.0),
        }
    }
}

/// Materialized kernel tensors. Memory is `O(dim⁴)`; the expansion itself
/// contracts on demand and never needs this for large spectra.
#[derive(Debug, Clone)]
pub struct KernelTensors {
    pub t: CMatrix,
    pub s: Vec<Complex64>,
    pub r: Vec<Complex64>,
    pub rbar: Vec<Complex64>,
    pub time: f64,
    dim: usize,
}

impl KernelTensors {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s_at(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.s[(i * self.dim + j) * self.dim + k]
    }

    pub fn r_at(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.r[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }

    pub fn rbar_at(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.rbar[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }
}

/// All kernel tensors for the spectrum of `H_0` at time `t`.
pub fn build_kernels(spec_h0: &SpectralDecomposition, t: f64) -> Result<KernelTensors> {
    let k = Kernels::new(&spec_h0.eigenvalues, t)?;
    let n = k.dim();
    let tm = CMatrix::from_fn(n, n, |i, j| k.t(i, j));
    let mut s = Vec::with_capacity(n * n * n);
    let mut r = Vec::with_capacity(n.pow(4));
    let mut rbar = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                s.push(k.s(i, j, a));
                for b in 0..n {
                    r.push(k.r(i, j, a, b));
                    rbar.push(k.rbar(i, j, a, b));
                }
            }
        }
    }
    Ok(KernelTensors { t: tm, s, r, rbar, time: t, dim: n })
}
