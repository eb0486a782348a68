//! Dense complex-Hermitian linear algebra: matrices, spectral decompositions,
//! pure states and expectation values.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const HERMITIAN_RTOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity to `1e-12 × max|entry|` and stores the matrix.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let scale = m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
        let deviation = hermitian_deviation(&m);
        if deviation > HERMITIAN_RTOL * scale.max(f64::MIN_POSITIVE) && deviation > 0.0 {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(Self(m))
    }

    /// Projects onto the Hermitian part `(m + m†)/2` without validation.
    ///
    /// Meant for matrices that are Hermitian analytically and only carry
    /// round-off asymmetry.
    pub fn hermitize(m: CMatrix) -> Self {
        let adj = m.adjoint();
        Self((m + adj).unscale(2.0))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| c(x, 0.0)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn pauli_x() -> Self {
        Self(CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]))
    }

    pub fn pauli_y() -> Self {
        Self(CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]))
    }

    pub fn pauli_z() -> Self {
        Self(CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self(self.0.scale(a))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    /// `self + a·other`
    pub fn add_scaled(&self, a: f64, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + other.0.scale(a)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// Frobenius norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok((&self.0 * &other.0 - &other.0 * &self.0).norm())
    }
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Eigenvalues (ascending) and the unitary whose columns are eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Gap below which two eigenvalues are treated as coincident:
    /// `1e-9 × (E_max − E_min + 1)`.
    pub fn degeneracy_threshold(&self) -> f64 {
        degeneracy_threshold(&self.eigenvalues)
    }

    /// `S† A S`
    pub fn to_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        self.basis.adjoint() * a * &self.basis
    }

    /// `S A S†`
    pub fn from_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        &self.basis * a * self.basis.adjoint()
    }

    /// `S · diag(E) · S†`
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&e| c(e, 0.0)),
        ));
        self.from_eigenbasis(&d)
    }
}

pub fn degeneracy_threshold(eigenvalues: &[f64]) -> f64 {
    let (lo, hi) = eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let span = if eigenvalues.is_empty() { 0.0 } else { hi - lo };
    1e-9 * (span + 1.0)
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn eigh(h: &HermitianMatrix) -> SpectralDecomposition {
    let n = h.dim();
    let eig = SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut basis = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &eig.eigenvectors.column(src));
    }
    SpectralDecomposition { eigenvalues, basis }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(CVector);

impl PureState {
    /// Requires `Σ|ψ_i|² = 1` within `1e-12`.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self(amplitudes))
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Ok(Self(amplitudes.unscale(norm)))
    }

    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.0.dotc(&other.0))
    }
}

/// `⟨ψ|A|ψ⟩` as a complex number, with no realness check.
pub fn expectation_complex(a: &CMatrix, psi: &PureState) -> Result<Complex64> {
    check_dim(a.nrows(), psi.dim())?;
    Ok(psi.0.dotc(&(a * &psi.0)))
}

/// Real part of `⟨ψ|A|ψ⟩`.
pub fn expectation(a: &HermitianMatrix, psi: &PureState) -> Result<f64> {
    let z = expectation_complex(a.matrix(), psi)?;
    debug_assert!(
        z.im.abs() <= 1e-10 * (1.0 + a.max_abs()),
        "imaginary residue {} in Hermitian expectation",
        z.im
    );
    Ok(z.re)
}

/// `⟨A²⟩ − ⟨A⟩²`, clamped at zero for round-off negatives.
pub fn variance(a: &HermitianMatrix, psi: &PureState) -> Result<f64> {
    check_dim(a.dim(), psi.dim())?;
    let a_psi = a.matrix() * &psi.0;
    let mean = psi.0.dotc(&a_psi).re;
    let second = a_psi.norm_squared();
    let var = second - mean * mean;
    debug_assert!(var >= -1e-10 * (1.0 + second), "negative variance {var}");
    Ok(var.max(0.0))
}

/// `e^{−iHt} ψ` through the spectral decomposition of `H`.
pub fn evolve(psi: &PureState, h: &HermitianMatrix, t: f64) -> Result<PureState> {
    check_dim(h.dim(), psi.dim())?;
    let spec = eigh(h);
    Ok(evolve_with(psi, &spec, t))
}

pub fn evolve_with(psi: &PureState, spec: &SpectralDecomposition, t: f64) -> PureState {
    let mut coeffs = spec.basis.adjoint() * &psi.0;
    for (k, e) in spec.eigenvalues.iter().enumerate() {
        coeffs[k] *= Complex64::from_polar(1.0, -e * t);
    }
    PureState(&spec.basis * coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![c(s, 0.), c(s, 0.)])).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let spec = eigh(&HermitianMatrix::identity(2));
        assert_eq!(spec.eigenvalues, vec![1.0, 1.0]);
        let u = &spec.basis;
        assert!((u.adjoint() * u - CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn pauli_z_spectrum() {
        let spec = eigh(&HermitianMatrix::pauli_z());
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(2., 0.), c(0., 0.)]);
        assert_eq!(HermitianMatrix::new(m).unwrap_err().name(), "NonHermitianInput");
    }

    #[test]
    fn pauli_expectations() {
        let z = HermitianMatrix::pauli_z();
        let zero = PureState::basis_state(2, 0);
        assert_eq!(expectation(&z, &zero).unwrap(), 1.0);
        assert!(expectation(&z, &plus()).unwrap().abs() < 1e-15);
        assert_eq!(variance(&z, &zero).unwrap(), 0.0);
        assert!((variance(&z, &plus()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dimension_checks() {
        let z = HermitianMatrix::pauli_z();
        let psi = PureState::basis_state(3, 0);
        assert_eq!(expectation(&z, &psi).unwrap_err().name(), "DimensionMismatch");
        assert_eq!(variance(&z, &psi).unwrap_err().name(), "DimensionMismatch");
        assert_eq!(evolve(&psi, &z, 1.0).unwrap_err().name(), "DimensionMismatch");
    }

    #[test]
    fn eigenstate_picks_up_phase() {
        let h = 0.8;
        let zero = PureState::basis_state(2, 0);
        let out = evolve(&zero, &HermitianMatrix::pauli_z().scaled(h), 1.3).unwrap();
        let expected = Complex64::from_polar(1.0, -h * 1.3);
        assert!((out.amplitudes()[0] - expected).norm() < 1e-14);
        assert!(out.amplitudes()[1].norm() < 1e-14);
    }

    #[test]
    fn zero_time_is_identity() {
        let out = evolve(&plus(), &HermitianMatrix::pauli_x(), 0.0).unwrap();
        assert!((out.amplitudes() - plus().amplitudes()).norm() < 1e-14);
    }

    #[test]
    fn normalization_required() {
        let v = CVector::from_vec(vec![c(1., 0.), c(1., 0.)]);
        assert_eq!(PureState::new(v.clone()).unwrap_err().name(), "NotNormalized");
        assert!((PureState::normalized(v).unwrap().amplitudes().norm() - 1.0).abs() < 1e-15);
    }
}
