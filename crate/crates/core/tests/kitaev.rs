use num_complex::Complex64;
use qfirob_core::expansion::{expand_generator, tilde_g2, Expectation};
use qfirob_core::kitaev::*;
use qfirob_core::operator::{expectation_complex, variance, CMatrix};
use qfirob_core::qfi::{qfi, qfig_exact};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(rng: &mut ChaCha8Rng, n: usize) -> KitaevParams {
    KitaevParams {
        n,
        mu: rng.random_range(-3.0..3.0),
        tau0: (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect(),
        eta0: (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect(),
        sigma_tau: 0.0,
        sigma_eta: 0.0,
        t: rng.random_range(0.3..2.0),
    }
}

fn jw_qfi(p: &KitaevParams, dt: &[f64], de: &[f64]) -> f64 {
    let h = jw_dense_hamiltonian(p, dt, de).unwrap();
    let g = qfig_exact(&h, &jw_dmu(p.n).unwrap(), p.t).unwrap();
    qfi(&jw_ghz_state(p.n).unwrap(), &g).unwrap()
}

#[test]
fn bdg_qfi_matches_jordan_wigner() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [5, 6] {
        for draw in 0..20 {
            let p = random_params(&mut rng, n);
            let (dt, de): (Vec<f64>, Vec<f64>) = if draw % 2 == 0 {
                (vec![0.0; n - 1], vec![0.0; n - 1])
            } else {
                ((0..n - 1).map(|_| rng.random_range(-0.5..0.5)).collect(), (0..n - 1).map(|_| rng.random_range(-0.5..0.5)).collect())
            };
            let bdg = kitaev_qfi(&p, &dt, &de).unwrap();
            let jw = jw_qfi(&p, &dt, &de);
            assert!(((bdg - jw) / jw).abs() < 1e-7, "n={n} draw={draw}: {bdg} vs {jw}");
        }
    }
}

#[test]
fn reference_fixture_clean_qfi_matches_jordan_wigner() {
    let p = KitaevParams::uniform(5, 2.0, -1.0, -1.0, 0.0, 1.0).unwrap();
    let bdg = kitaev_qfi(&p, &[0.0; 4], &[0.0; 4]).unwrap();
    let jw = jw_qfi(&p, &[0.0; 4], &[0.0; 4]);
    assert!(((bdg - jw) / jw).abs() < 1e-8);
}

/// Lifts a Nambu matrix A to the many-body operator ½ Ψ† A Ψ.
fn lift(a: &CMatrix, n: usize) -> CMatrix {
    let dim = 1usize << n;
    // Build c_i explicitly from the dense Hamiltonian machinery: c_i = (∏_{k<i} Z) σ⁻.
    let c: Vec<CMatrix> = (0..n)
        .map(|i| {
            CMatrix::from_fn(dim, dim, |r, s| {
                let b = 1usize << (n - 1 - i);
                if s & b != 0 && r == s ^ b {
                    let sign = if (s >> (n - i)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    Complex64::new(sign, 0.0)
                } else {
                    Complex64::default()
                }
            })
        })
        .collect();
    let psi: Vec<CMatrix> = (0..2 * n).map(|k| if k < n { c[k].clone() } else { c[k - n].adjoint() }).collect();
    let mut out = CMatrix::zeros(dim, dim);
    for a_i in 0..2 * n {
        for b_i in 0..2 * n {
            if a[(a_i, b_i)] != Complex64::default() {
                out += psi[a_i].adjoint() * &psi[b_i] * (a[(a_i, b_i)] * 0.5);
            }
        }
    }
    out
}

#[test]
fn ghz_contractions_match_full_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 5;
    let ghz = GhzFermionState::new(n).unwrap();
    let psi = jw_ghz_state(n).unwrap();
    for _ in 0..3 {
        let rand_nambu = |rng: &mut ChaCha8Rng| {
            let m = CMatrix::from_fn(2 * n, 2 * n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            &m + m.adjoint()
        };
        let a = rand_nambu(&mut rng);
        let b = rand_nambu(&mut rng);
        let (qa, qb) = (lift(&a, n), lift(&b, n));
        let full_mean = expectation_complex(&qa, &psi).unwrap();
        let full_prod = expectation_complex(&(&qa * &qb), &psi).unwrap();
        assert!((ghz.mean(&a) - full_mean).norm() < 1e-10, "{} vs {}", ghz.mean(&a), full_mean);
        assert!((ghz.product(&a, &b) - full_prod).norm() < 1e-10, "{} vs {}", ghz.product(&a, &b), full_prod);
    }
}

#[test]
fn sigma_max_reference_values() {
    for (mu, expected) in [(0.01, 1.792), (2.0, 2.544)] {
        let p = KitaevParams::uniform(6, mu, -1.0, -1.0, 0.0, 1.0).unwrap();
        let r = kitaev_robustness(&p).unwrap();
        let s = r.sigma_max.expect("DSP");
        assert!((s / expected - 1.0).abs() < 0.01, "mu={mu}: {s}");
    }
}

#[test]
fn second_order_matches_jordan_wigner_variance_curvature() {
    let p = KitaevParams::uniform(5, 2.0, -1.0, -1.0, 0.0, 1.0).unwrap();
    let zeros = vec![0.0; 4];
    let model = build_bdg(&p, &zeros, &zeros).unwrap();
    let ops = bond_operators(5);
    let terms = expand_generator(&model.m, &model.m_mu, &ops, p.t, 2).unwrap();
    let ghz = GhzFermionState::new(5).unwrap();
    let psi = jw_ghz_state(5).unwrap();
    let dmu = jw_dmu(5).unwrap();
    for term in [0usize, 5] {
        let var_at = |a: f64| {
            let mut dt = zeros.clone();
            let mut de = zeros.clone();
            if term < 4 { dt[term] = a } else { de[term - 4] = a }
            let h = jw_dense_hamiltonian(&p, &dt, &de).unwrap();
            variance(&qfig_exact(&h, &dmu, p.t).unwrap().generator, &psi).unwrap()
        };
        // Richardson-extrapolated second difference.
        let d2 = |h: f64| (var_at(h) - 2.0 * var_at(0.0) + var_at(-h)) / (h * h);
        let curvature = (4.0 * d2(5e-3) - d2(1e-2)) / 3.0;
        let g2 = tilde_g2(&terms, &ghz, term).unwrap();
        assert!((0.5 * curvature - g2).abs() < 1e-6 * (1.0 + g2.abs()), "term {term}: {} vs {g2}", 0.5 * curvature);
    }
}

#[test]
fn taylor_remainder_is_cubic_in_nambu_space() {
    let p = KitaevParams::uniform(5, 2.0, -1.0, -1.0, 0.0, 1.0).unwrap();
    let zeros = vec![0.0; 4];
    let model = build_bdg(&p, &zeros, &zeros).unwrap();
    let ops = bond_operators(5);
    let terms = expand_generator(&model.m, &model.m_mu, &ops, p.t, 2).unwrap();
    let ghz = GhzFermionState::new(5).unwrap();
    let g1 = qfirob_core::expansion::tilde_g1(&terms, &ghz, 2).unwrap();
    let g2 = tilde_g2(&terms, &ghz, 2).unwrap();
    let f0 = kitaev_qfi(&p, &zeros, &zeros).unwrap();
    let err = |a: f64| {
        let mut dt = zeros.clone();
        dt[2] = a;
        (kitaev_qfi(&p, &dt, &zeros).unwrap() - (f0 + 4.0 * a * g1 + 4.0 * a * a * g2)).abs()
    };
    let slope = (err(1e-2) / err(1e-3)).log10();
    assert!((slope - 3.0).abs() < 0.1, "slope {slope}");
}
