//! Exact quantum Fisher information generator (QFIG) and QFI for pure states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    check_dim, eigh, variance, CMatrix, CVector, HermitianMatrix, PureState, SpectralDecomposition,
};

/// `e^{ix} − 1` without cancellation at small `x`.
pub(crate) fn expm1i(x: f64) -> Complex64 {
    let h = (0.5 * x).sin();
    Complex64::new(-2.0 * h * h, x.sin())
}

/// `∫_0^t e^{iΔs} ds`, exact at Δ = 0.
pub(crate) fn phase_integral(delta: f64, t: f64, threshold: f64) -> Complex64 {
    if delta.abs() < threshold {
        Complex64::new(t, 0.0)
    } else {
        Complex64::new(0.0, -1.0) * expm1i(delta * t) / delta
    }
}

/// `G = ∫_0^t U_s† ∂_θH U_s ds` together with the time it was built for.
#[derive(Debug, Clone)]
pub struct QfigResult {
    pub generator: HermitianMatrix,
    pub time: f64,
}

/// Generator for Hamiltonian `h` and derivative `dtheta_h` at time `t`.
pub fn qfig_exact(h: &HermitianMatrix, dtheta_h: &HermitianMatrix, t: f64) -> Result<QfigResult> {
    check_dim(h.dim(), dtheta_h.dim())?;
    check_time(t)?;
    let spec = eigh(h);
    Ok(qfig_with_spectrum(&spec, dtheta_h, t))
}

/// Same as [`qfig_exact`] with a precomputed spectral decomposition of `H`.
pub fn qfig_with_spectrum(spec: &SpectralDecomposition, dtheta_h: &HermitianMatrix, t: f64) -> QfigResult {
    let g = generator_in_eigenbasis(spec, dtheta_h.matrix(), t);
    QfigResult {
        generator: HermitianMatrix::hermitize(spec.from_eigenbasis(&g)),
        time: t,
    }
}

/// `[∂̃H]_ij T_ij` in the eigenbasis of `H`.
pub(crate) fn generator_in_eigenbasis(spec: &SpectralDecomposition, dtheta_h: &CMatrix, t: f64) -> CMatrix {
    let thr = spec.degeneracy_threshold();
    let e = &spec.eigenvalues;
    let d = spec.to_eigenbasis(dtheta_h);
    CMatrix::from_fn(e.len(), e.len(), |i, j| d[(i, j)] * phase_integral(e[i] - e[j], t, thr))
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("encoding time must be positive, got {t}")))
    }
}

/// `F_ψ = 4 (Δ_ψ G)²`
pub fn qfi(psi: &PureState, g: &QfigResult) -> Result<f64> {
    Ok(4.0 * variance(&g.generator, psi)?)
}

/// `(|λ_min⟩ + e^{iβ}|λ_max⟩)/√2` for the extremal eigenvectors of `G`.
///
/// Within a degenerate extremal eigenspace the vector is the projection of the
/// first computational basis state with a nonzero overlap, normalized and with
/// its largest component made real positive.
pub fn optimal_state(g: &QfigResult, beta: f64) -> PureState {
    let spec = eigh(&g.generator);
    let n = spec.dim();
    let thr = spec.degeneracy_threshold();
    let lo = spec.eigenvalues[0];
    let hi = spec.eigenvalues[n - 1];
    let lower: Vec<usize> = (0..n).filter(|&k| spec.eigenvalues[k] - lo < thr).collect();
    let upper: Vec<usize> = (0..n).filter(|&k| hi - spec.eigenvalues[k] < thr).collect();
    let v_min = canonical_vector(&spec, &lower);
    let v_max = canonical_vector(&spec, &upper);
    let amp = v_min + v_max * Complex64::from_polar(1.0, beta);
    PureState::normalized(amp).expect("extremal eigenvectors are orthonormal")
}

fn canonical_vector(spec: &SpectralDecomposition, subspace: &[usize]) -> CVector {
    let n = spec.dim();
    let cols: Vec<CVector> = subspace.iter().map(|&k| spec.basis.column(k).into_owned()).collect();
    let mut best = cols[0].clone();
    for e in 0..n {
        // Projector onto the subspace applied to basis vector e.
        let mut proj = CVector::zeros(n);
        for col in &cols {
            proj += col * col[e].conj();
        }
        if proj.norm() > 1e-6 {
            best = proj;
            break;
        }
    }
    let norm = best.norm();
    best.unscale_mut(norm);
    let (_, pivot) = best
        .iter()
        .enumerate()
        .fold((0.0, 0), |(m, k), (i, z)| if z.norm() > m + 1e-12 { (z.norm(), i) } else { (m, k) });
    let phase = best[pivot].conj() / best[pivot].norm();
    best * phase
}
