use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qfirob_core::operator::{eigh, evolve, CMatrix, CVector, HermitianMatrix, PureState};
use qfirob_core::qfi::{optimal_state, qfi, qfig_exact};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    HermitianMatrix::hermitize(&a + a.adjoint())
}

fn random_state(rng: &mut impl Rng, n: usize) -> PureState {
    PureState::normalized(CVector::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }))
    .unwrap()
}

fn propagator(h: &HermitianMatrix, s: f64) -> CMatrix {
    (h.matrix() * Complex64::new(0.0, -s)).exp()
}

#[test]
fn generator_matches_simpson_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_hermitian(&mut rng, 4);
    let d = random_hermitian(&mut rng, 4);
    let t = 1.3;
    let steps = 400;
    let dt = t / steps as f64;
    let mut acc = CMatrix::zeros(4, 4);
    for k in 0..=steps {
        let w = if k == 0 || k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        let u = propagator(&h, k as f64 * dt);
        acc += (u.adjoint() * d.matrix() * u) * Complex64::new(w * dt / 3.0, 0.0);
    }
    let g = qfig_exact(&h, &d, t).unwrap();
    assert!((g.generator.matrix() - acc).norm() < 1e-9);
}

#[test]
fn qfi_matches_fidelity_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let h = random_hermitian(&mut rng, 3);
        let d = random_hermitian(&mut rng, 3);
        let psi = random_state(&mut rng, 3);
        let t = 0.9;
        let eps = 1e-4;
        let at = |theta: f64| evolve(&psi, &h.add_scaled(theta, &d).unwrap(), t).unwrap();
        let overlap = at(-eps).inner(&at(eps)).unwrap().norm_sqr();
        let fd = 4.0 * (1.0 - overlap) / (2.0 * eps).powi(2);
        let exact = qfi(&psi, &qfig_exact(&h, &d, t).unwrap()).unwrap();
        assert!((fd / exact - 1.0).abs() < 1e-5, "{fd} vs {exact}");
    }
}

#[test]
fn optimal_state_saturates_spectral_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = random_hermitian(&mut rng, 4);
    let d = random_hermitian(&mut rng, 4);
    let g = qfig_exact(&h, &d, 0.7).unwrap();
    let e = eigh(&g.generator).eigenvalues;
    let bound = (e[3] - e[0]).powi(2);
    let best = qfi(&optimal_state(&g, 0.3), &g).unwrap();
    assert!((best / bound - 1.0).abs() < 1e-12);
    for _ in 0..2000 {
        assert!(qfi(&random_state(&mut rng, 4), &g).unwrap() <= best + 1e-12);
    }
}

#[test]
fn optimal_state_in_degenerate_spectrum_is_deterministic() {
    let g = qfig_exact(
        &HermitianMatrix::zeros(3),
        &HermitianMatrix::from_real(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0]))).unwrap(),
        1.0,
    )
    .unwrap();
    let a = optimal_state(&g, 0.0);
    let b = optimal_state(&g, 0.0);
    assert_eq!(a.amplitudes(), b.amplitudes());
    assert!((qfi(&a, &g).unwrap() - 4.0).abs() < 1e-12);
}

fn arb_case() -> impl Strategy<Value = (u64, f64)> {
    (any::<u64>(), 0.05f64..4.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qfi_is_bounded_by_generator_spread((seed, t) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, 3);
        let d = random_hermitian(&mut rng, 3);
        let psi = random_state(&mut rng, 3);
        let g = qfig_exact(&h, &d, t).unwrap();
        let e = eigh(&g.generator).eigenvalues;
        let f = qfi(&psi, &g).unwrap();
        prop_assert!(f >= -1e-12);
        prop_assert!(f <= (e[2] - e[0]).powi(2) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn qfi_ignores_global_phase((seed, t) in arb_case(), phase in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, 3);
        let d = random_hermitian(&mut rng, 3);
        let psi = random_state(&mut rng, 3);
        let rotated = PureState::new(psi.amplitudes() * Complex64::from_polar(1.0, phase)).unwrap();
        let g = qfig_exact(&h, &d, t).unwrap();
        prop_assert!((qfi(&psi, &g).unwrap() - qfi(&rotated, &g).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn commuting_derivative_gives_linear_generator((seed, t) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, 3);
        let g = qfig_exact(&h, &h, t).unwrap();
        prop_assert!((g.generator.matrix() - h.matrix() * Complex64::new(t, 0.0)).norm() < 1e-10 * (1.0 + t));
    }
}
