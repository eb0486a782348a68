//! Closed-form results for a qubit in a longitudinal field `h Z` with
//! transverse field disorder, probed by equator states `(|0⟩ + e^{iβ}|1⟩)/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{CVector, HermitianMatrix, PureState};
use crate::probe::{DisorderDistribution, DisorderTerm, DisorderedProbeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitParams {
    pub h0z: f64,
    pub t: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn operator(&self) -> HermitianMatrix {
        match self {
            Axis::X => HermitianMatrix::pauli_x(),
            Axis::Y => HermitianMatrix::pauli_y(),
            Axis::Z => HermitianMatrix::pauli_z(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

const MIN_FIELD: f64 = 1e-12;
const MIN_SIN: f64 = 1e-9;

fn check_field(h: f64) -> Result<()> {
    if h.abs() < MIN_FIELD {
        Err(Error::SingularField(h))
    } else {
        Ok(())
    }
}

fn check_params(p: &SingleQubitParams) -> Result<()> {
    check_field(p.h0z)?;
    if !(p.t > 0.0) || !p.t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be positive, got {}", p.t)));
    }
    Ok(())
}

/// `C_n^(2)` with trigonometric argument `phase`:
/// `−h⁻⁴t⁻²[(ht·c(β) − c(φ+β) sin φ)² + ½(cos 2φ + 2h²t² − 1)]`,
/// where `c = cos` for `x` and `sin` for `y`.
fn c2_with_phase(h: f64, t: f64, beta: f64, phase: f64, axis: Axis, y_uses_cos: bool) -> f64 {
    let (lead, shifted) = match axis {
        Axis::X => (beta.cos(), (phase + beta).cos()),
        Axis::Y if y_uses_cos => (beta.sin(), (phase + beta).cos()),
        Axis::Y => (beta.sin(), (phase + beta).sin()),
        Axis::Z => return 0.0,
    };
    let a = h * t * lead - shifted * phase.sin();
    // cos 2φ − 1 = −2 sin²φ
    let b = 0.5 * (2.0 * h * h * t * t - 2.0 * phase.sin().powi(2));
    -(a * a + b) / (h.powi(4) * t * t)
}

/// `C_n^(2)` for disorder along `axis`; exactly 0 for `z`.
pub fn c2_closed_form(p: &SingleQubitParams, axis: Axis) -> Result<f64> {
    check_params(p)?;
    Ok(c2_with_phase(p.h0z, p.t, p.beta, p.h0z * p.t, axis, false))
}

/// The same expression with every trigonometric argument `h` instead of `h·t`
/// and `cos(h+β)` in both branches. Agrees with [`c2_closed_form`] for the
/// `x` axis at `t = 1` only.
pub fn c2_as_printed(p: &SingleQubitParams, axis: Axis) -> Result<f64> {
    check_params(p)?;
    Ok(c2_with_phase(p.h0z, p.t, p.beta, p.h0z, axis, true))
}

/// `C_x + C_y` with the trigonometric argument held at `h` (the `t = 1` phase)
/// while the explicit `t` dependence is kept. Its zero in `t` is the
/// crossover time [`crossover_time`]; it is β-independent.
pub fn unit_phase_marker(h0z: f64, t: f64) -> Result<f64> {
    check_params(&SingleQubitParams { h0z, t, beta: 0.0 })?;
    Ok(c2_with_phase(h0z, t, 0.0, h0z, Axis::X, false) + c2_with_phase(h0z, t, 0.0, h0z, Axis::Y, false))
}

/// `(β_x^m, β_y^m)`: `β_x^m = atan[(½ sin 2ht − ht)/sin² ht]` maximizes `C_x`
/// and `β_y^m = β_x^m − π/2` maximizes `C_y`.
pub fn beta_optima(p: &SingleQubitParams) -> Result<(f64, f64)> {
    check_params(p)?;
    let x = p.h0z * p.t;
    let s = x.sin();
    if s.abs() < MIN_SIN {
        return Err(Error::SingularPoint(s));
    }
    let bx = ((0.5 * (2.0 * x).sin() - x) / (s * s)).atan();
    Ok((bx, bx - FRAC_PI_2))
}

/// Phase that minimizes `|g|` for unequal transverse disorder: `β_y^m` when
/// `σ_x < σ_y`, `β_x^m` when `σ_x > σ_y`.
pub fn select_beta(sigma_x: f64, sigma_y: f64, p: &SingleQubitParams) -> Result<f64> {
    if sigma_x == sigma_y {
        return Err(Error::DegenerateSigmas);
    }
    let (bx, by) = beta_optima(p)?;
    Ok(if sigma_x < sigma_y { by } else { bx })
}

/// Crossover roots `t_± = (sin h / 3h)(cos h ± √(cos² h + 3))` and the
/// small-field estimate `τ ≈ 1 − 5h²/12`.
pub fn crossover_time(h0z: f64) -> Result<(f64, f64, f64)> {
    check_field(h0z)?;
    let (s, c) = h0z.sin_cos();
    let root = (c * c + 3.0).sqrt();
    let pref = s / (3.0 * h0z);
    Ok((pref * (c + root), pref * (c - root), 1.0 - 5.0 / 12.0 * h0z * h0z))
}

/// `(|0⟩ + e^{iβ}|1⟩)/√2`
pub fn equator_state(beta: f64) -> PureState {
    PureState::new(CVector::from_vec(vec![
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::from_polar(FRAC_1_SQRT_2, beta),
    ]))
    .expect("equator states are normalized")
}

/// Probe `H = h Z + Σ_n δφ_n σ_n` with θ = h, equator initial state and one
/// zero-mean disorder term per axis with positive σ.
pub fn qubit_spec(p: &SingleQubitParams, sigmas: [f64; 3], template: DisorderDistribution) -> Result<DisorderedProbeSpec> {
    check_params(p)?;
    let mut terms = Vec::new();
    for (axis, s) in [Axis::X, Axis::Y, Axis::Z].into_iter().zip(sigmas) {
        if s > 0.0 {
            terms.push(DisorderTerm {
                operator: axis.operator(),
                distribution: template.with_sigma(s)?,
                label: axis.label().to_string(),
            });
        }
    }
    DisorderedProbeSpec::new(
        HermitianMatrix::pauli_z().scaled(p.h0z),
        HermitianMatrix::pauli_z(),
        HermitianMatrix::zeros(2),
        terms,
        p.t,
        equator_state(p.beta),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(h0z: f64, t: f64, beta: f64) -> SingleQubitParams {
        SingleQubitParams { h0z, t, beta }
    }

    #[test]
    fn z_axis_is_zero() {
        assert_eq!(c2_closed_form(&params(2.0, 1.3, 0.4), Axis::Z).unwrap(), 0.0);
    }

    #[test]
    fn equal_sigma_sum_gives_reference_sigma_max() {
        for (h, s) in [(4.0, 2.426), (10.0, 5.866)] {
            let p = params(h, 1.0, 0.0);
            let c = c2_closed_form(&p, Axis::X).unwrap() + c2_closed_form(&p, Axis::Y).unwrap();
            assert!((c.abs().powf(-0.5) / s - 1.0).abs() < 5e-3);
        }
    }

    #[test]
    fn x_and_y_are_quarter_period_shifts() {
        for k in 0..40 {
            let p = params(1.7, 0.8, k as f64 * 0.157);
            let q = params(1.7, 0.8, p.beta + FRAC_PI_2);
            let r = params(1.7, 0.8, p.beta + std::f64::consts::PI);
            let cx = c2_closed_form(&p, Axis::X).unwrap();
            assert!((cx - c2_closed_form(&q, Axis::Y).unwrap()).abs() < 1e-10);
            assert!((cx - c2_closed_form(&r, Axis::X).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn beta_optima_plug_in() {
        let p = params(FRAC_PI_2, 1.0, 0.0);
        let (bx, by) = beta_optima(&p).unwrap();
        assert!((bx - (-FRAC_PI_2).atan()).abs() < 1e-14);
        assert_eq!(by, bx - FRAC_PI_2);
        assert!(matches!(beta_optima(&params(std::f64::consts::PI, 1.0, 0.0)), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn beta_x_maximizes_cx_on_grid() {
        let base = params(2.3, 0.7, 0.0);
        let (bx, _) = beta_optima(&base).unwrap();
        let n = 10_000;
        let step = std::f64::consts::PI / n as f64;
        let best = (0..n)
            .map(|k| -FRAC_PI_2 + k as f64 * step)
            .max_by(|a, b| {
                let ca = c2_closed_form(&params(2.3, 0.7, *a), Axis::X).unwrap();
                let cb = c2_closed_form(&params(2.3, 0.7, *b), Axis::X).unwrap();
                ca.total_cmp(&cb)
            })
            .unwrap();
        assert!((best - bx).abs() <= step, "{best} vs {bx}");
    }

    #[test]
    fn select_beta_branches() {
        let p = params(1.2, 1.0, 0.0);
        let (bx, by) = beta_optima(&p).unwrap();
        assert_eq!(select_beta(0.1, 0.2, &p).unwrap(), by);
        assert_eq!(select_beta(0.2, 0.1, &p).unwrap(), bx);
        assert_eq!(select_beta(0.2, 0.2, &p).unwrap_err(), Error::DegenerateSigmas);
    }

    #[test]
    fn crossover_small_field() {
        let (tp, tm, tau) = crossover_time(0.1).unwrap();
        assert!((tp - (1.0 - 5.0 / 12.0 * 0.01)).abs() < 1e-4);
        assert!(tm < 0.0);
        assert!((tau - (1.0 - 5.0 / 12.0 * 0.01)).abs() < 1e-15);
        assert!((crossover_time(1e-6).unwrap().0 - 1.0).abs() < 1e-11);
        assert!(matches!(crossover_time(0.0), Err(Error::SingularField(_))));
    }

    #[test]
    fn unit_phase_marker_vanishes_at_t_plus() {
        for h in [0.05, 0.3, 1.0] {
            let (tp, _, _) = crossover_time(h).unwrap();
            let slope = (unit_phase_marker(h, tp * 1.001).unwrap() - unit_phase_marker(h, tp * 0.999).unwrap()).abs();
            assert!(unit_phase_marker(h, tp).unwrap().abs() < 1e-9 * slope.max(1.0));
            assert!(unit_phase_marker(h, 0.5 * tp).unwrap() > 0.0);
            assert!(unit_phase_marker(h, 1.5 * tp).unwrap() < 0.0);
        }
    }

    #[test]
    fn printed_form_matches_only_at_unit_time() {
        let p = params(1.3, 1.0, 0.4);
        let a = c2_as_printed(&p, Axis::X).unwrap();
        assert!((a - c2_closed_form(&p, Axis::X).unwrap()).abs() < 1e-14);
        let q = params(1.3, 0.7, 0.4);
        assert!((c2_as_printed(&q, Axis::X).unwrap() - c2_closed_form(&q, Axis::X).unwrap()).abs() > 1e-3);
        assert!((c2_as_printed(&p, Axis::Y).unwrap() - c2_closed_form(&p, Axis::Y).unwrap()).abs() > 1e-3);
    }

    #[test]
    fn spec_builder_skips_zero_sigma_axes() {
        let g = DisorderDistribution::gaussian(0.0, 1.0).unwrap();
        let spec = qubit_spec(&params(4.0, 1.0, 0.0), [0.1, 0.1, 0.0], g).unwrap();
        assert_eq!(spec.n_terms(), 2);
        assert_eq!(spec.disorder_terms[1].label, "y");
    }
}
