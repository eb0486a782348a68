use std::f64::consts::PI;

use qfirob_core::expansion::robustness_report;
use qfirob_core::monte_carlo::crossover_scan;
use qfirob_core::probe::DisorderDistribution;
use qfirob_core::single_qubit::*;
use qfirob_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian() -> DisorderDistribution {
    DisorderDistribution::gaussian(0.0, 1.0).unwrap()
}

fn engine_c2(p: &SingleQubitParams, sigmas: [f64; 3]) -> Vec<f64> {
    let spec = qubit_spec(p, sigmas, gaussian()).unwrap();
    robustness_report(&spec, 2).unwrap().c2_per_term
}

#[test]
fn closed_forms_agree_with_generic_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let h = rng.random_range(0.2..6.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = SingleQubitParams { h0z: h, t: rng.random_range(0.2..3.0), beta: rng.random_range(-PI..PI) };
        let c = engine_c2(&p, [1.0, 1.0, 1.0]);
        for (axis, engine) in [Axis::X, Axis::Y, Axis::Z].into_iter().zip(c) {
            let closed = c2_closed_form(&p, axis).unwrap();
            assert!((closed - engine).abs() <= 1e-8 * closed.abs().max(1e-3), "{p:?} {axis:?}: {closed} vs {engine}");
        }
    }
}

#[test]
fn select_beta_minimizes_marker_on_grid() {
    let p = SingleQubitParams { h0z: 2.3, t: 0.9, beta: 0.0 };
    for (sx, sy) in [(0.1, 0.2), (0.2, 0.1), (0.05, 0.3)] {
        let g = |beta: f64| {
            let q = SingleQubitParams { beta, ..p };
            (sx * sx * c2_closed_form(&q, Axis::X).unwrap() + sy * sy * c2_closed_form(&q, Axis::Y).unwrap()).abs()
        };
        let grid_min = (0..1000).map(|k| g(-PI + 2.0 * PI * k as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
        let chosen = g(select_beta(sx, sy, &p).unwrap());
        assert!(chosen <= grid_min + 1e-9, "{chosen} > {grid_min}");
    }
}

#[test]
fn unit_phase_marker_crosses_at_t_plus() {
    for h in [0.1, 0.3, 0.7] {
        let grid: Vec<f64> = (0..=40).map(|k| 0.5 + k as f64 * 0.025).collect();
        let tau = crossover_scan(|t| unit_phase_marker(h, t), &grid, 1e-4).unwrap();
        let (t_plus, _, _) = crossover_time(h).unwrap();
        assert!((tau / t_plus - 1.0).abs() < 1e-3, "h={h}: {tau} vs {t_plus}");
    }
}

#[test]
fn exact_engine_stays_sensitive_across_t_plus() {
    // With the physical phase h·t the equal-σ marker is a negative sum of
    // squares, so the generic engine never changes sign.
    let h = 0.3;
    let grid: Vec<f64> = (0..=40).map(|k| 0.5 + k as f64 * 0.025).collect();
    let marker = |t: f64| -> qfirob_core::Result<f64> {
        let c = engine_c2(&SingleQubitParams { h0z: h, t, beta: 0.4 }, [1.0, 1.0, 0.0]);
        Ok(c.iter().sum())
    };
    for &t in &grid {
        assert!(marker(t).unwrap() < 0.0);
    }
    assert_eq!(crossover_scan(marker, &grid, 1e-4).unwrap_err(), Error::NoSignChange);
}

#[test]
fn crossover_is_quadratic_in_small_fields() {
    let hs: Vec<f64> = (0..10).map(|k| 0.02 * 10f64.powf(k as f64 / 9.0)).collect();
    let grid: Vec<f64> = (0..=20).map(|k| 0.5 + k as f64 * 0.05).collect();
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .map(|&h| {
            let tau = crossover_scan(|t| unit_phase_marker(h, t), &grid, 1e-12).unwrap();
            (h.ln(), (1.0 - tau).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let coefficient = (my - 2.0 * mx).exp();
    assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    assert!((coefficient / (5.0 / 12.0) - 1.0).abs() < 0.05, "coefficient {coefficient}");
}
