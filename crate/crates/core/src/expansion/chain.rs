//! Time-ordered phase integrals over a simplex.

use num_complex::Complex64;

/// Nodes closer than this (in units of `t·ω`) are handled by a Taylor series.
const CLUSTER_RADIUS: f64 = 0.5;
const TAYLOR_TERMS: usize = 30;

/// `∫_{t ≥ s_0 ≥ s_1 ≥ … ≥ s_{m-1} ≥ 0} exp(i Σ_k ω_k s_k) ds_0 … ds_{m-1}`.
///
/// Equals `t^m · exp[x_0, …, x_m]`, the divided difference of the exponential
/// at nodes `x_0 = 0`, `x_{k+1} = x_k + i t ω_k`. The divided difference is
/// evaluated without cancellation for clustered nodes.
pub fn chain_integral(omegas: &[f64], t: f64) -> Complex64 {
    let m = omegas.len();
    let mut nodes = [Complex64::new(0.0, 0.0); 8];
    assert!(m < nodes.len(), "chain integrals are limited to 7 frequencies");
    let mut acc = 0.0;
    for (k, w) in omegas.iter().enumerate() {
        acc += w * t;
        nodes[k + 1] = Complex64::new(0.0, acc);
    }
    divided_difference_exp(&nodes[..=m]) * t.powi(m as i32)
}

/// `exp[x_0, …, x_m]`, symmetric in the nodes.
pub fn divided_difference_exp(x: &[Complex64]) -> Complex64 {
    let m = x.len();
    if m == 1 {
        return x[0].exp();
    }
    let (mut a, mut b, mut diam) = (0, 1, 0.0);
    for p in 0..m {
        for q in p + 1..m {
            let d = (x[p] - x[q]).norm();
            if d > diam {
                (a, b, diam) = (p, q, d);
            }
        }
    }
    if diam <= CLUSTER_RADIUS {
        return taylor_divided_difference(x);
    }
    let mut without_a = [Complex64::new(0.0, 0.0); 8];
    let mut without_b = [Complex64::new(0.0, 0.0); 8];
    let (mut na, mut nb) = (0, 0);
    for (k, &v) in x.iter().enumerate() {
        if k != a {
            without_a[na] = v;
            na += 1;
        }
        if k != b {
            without_b[nb] = v;
            nb += 1;
        }
    }
    (divided_difference_exp(&without_b[..nb]) - divided_difference_exp(&without_a[..na])) / (x[a] - x[b])
}

/// Divided difference of `exp` at nodes clustered around their mean `c`:
/// `e^c Σ_k h_k(y) / (k+m)!` with `y = x − c` and `h_k` the complete
/// homogeneous symmetric polynomials.
fn taylor_divided_difference(x: &[Complex64]) -> Complex64 {
    let m = x.len() - 1;
    let c = x.iter().sum::<Complex64>() / x.len() as f64;
    let mut h = [Complex64::new(0.0, 0.0); TAYLOR_TERMS];
    h[0] = Complex64::new(1.0, 0.0);
    for &xv in x {
        let y = xv - c;
        for k in 1..TAYLOR_TERMS {
            let prev = h[k - 1];
            h[k] += y * prev;
        }
    }
    let mut inv_fact = 1.0 / (1..=m).map(|k| k as f64).product::<f64>();
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, hk) in h.iter().enumerate() {
        sum += hk * inv_fact;
        inv_fact /= (k + m + 1) as f64;
    }
    c.exp() * sum
}
