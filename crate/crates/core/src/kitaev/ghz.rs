//! GHZ-state expectations of quadratic fermion operators `Q_A = ½ Ψ† A Ψ`,
//! `Ψ = (c_1, …, c_N, c_1†, …, c_N†)ᵀ`, via Wick contractions in the empty and
//! filled sectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expansion::Expectation;
use crate::operator::CMatrix;

/// Smallest chain for which both `⟨v|Q|f⟩` and `⟨v|Q Q'|f⟩` vanish.
pub const MIN_GHZ_SITES: usize = 5;

/// `(|0…0⟩ + |1…1⟩)/√2` in the fermion occupation basis. Single-particle
/// correlation matrices are `R_v = diag(I, 0)` and `R_f = diag(0, I)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhzFermionState {
    n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sector {
    Empty,
    Filled,
}

impl GhzFermionState {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_GHZ_SITES {
            return Err(Error::InvalidSize(n));
        }
        Ok(Self { n })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    /// Nambu indices `a` with `⟨Ψ_a† Ψ_a⟩ = 1`, i.e. the diagonal of `I − R`.
    fn occupied(&self, s: Sector) -> std::ops::Range<usize> {
        match s {
            Sector::Empty => self.n..2 * self.n,
            Sector::Filled => 0..self.n,
        }
    }

    /// `⟨Q_A⟩ = ½ Tr[A(I − R)]`
    fn sector_mean(&self, a: &CMatrix, s: Sector) -> Complex64 {
        0.5 * self.occupied(s).map(|k| a[(k, k)]).sum::<Complex64>()
    }

    /// `⟨Q_A Q_B⟩ = ¼{Tr[A(I−R)]Tr[B(I−R)] + Tr[A R B (I−R)] − anomalous}`
    fn sector_product(&self, a: &CMatrix, b: &CMatrix, s: Sector) -> Complex64 {
        let n = self.n;
        let occ = self.occupied(s);
        let free = match s {
            Sector::Empty => 0..n,
            Sector::Filled => n..2 * n,
        };
        let ta: Complex64 = occ.clone().map(|k| a[(k, k)]).sum();
        let tb: Complex64 = occ.clone().map(|k| b[(k, k)]).sum();
        let mut normal = Complex64::default();
        for p in free.clone() {
            for q in occ.clone() {
                normal += a[(q, p)] * b[(p, q)];
            }
        }
        // ⟨Ψ_a†Ψ_c†⟩⟨Ψ_bΨ_d⟩ pairs a particle index with its hole partner.
        let mut anomalous = Complex64::default();
        for p in occ.clone() {
            for q in free.clone() {
                let (pp, qq) = match s {
                    Sector::Empty => (p - n, q + n),
                    Sector::Filled => (p + n, q - n),
                };
                anomalous += a[(p, q)] * b[(pp, qq)];
            }
        }
        0.25 * (ta * tb + normal - anomalous)
    }
}

impl Expectation for GhzFermionState {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn mean(&self, a: &CMatrix) -> Complex64 {
        0.5 * (self.sector_mean(a, Sector::Empty) + self.sector_mean(a, Sector::Filled))
    }

    fn product(&self, a: &CMatrix, b: &CMatrix) -> Complex64 {
        0.5 * (self.sector_product(a, b, Sector::Empty) + self.sector_product(a, b, Sector::Filled))
    }
}

/// Mean and variance of `Q_J` in the GHZ state; the variance combines the
/// sector variances with the spread of the sector means.
pub fn ghz_mean_var(j: &CMatrix, n: usize) -> Result<(f64, f64)> {
    let state = GhzFermionState::new(n)?;
    crate::operator::check_dim(2 * n, j.nrows())?;
    let m = state.mean(j);
    let v = state.product(j, j) - m * m;
    Ok((m.re, v.re.max(0.0)))
}
