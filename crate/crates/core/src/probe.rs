//! Disordered probe Hamiltonians `H = H_0 + Σ_n δφ_n H_n` and seeded sampling
//! of disorder realizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, SkewNormal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{check_dim, HermitianMatrix, PureState};

/// Largest |skewness| a skew-normal distribution can reach.
pub const MAX_SKEW_NORMAL_SKEWNESS: f64 = 0.995_271_746_431_156;

/// ChaCha words reserved for each disorder term inside one realization
/// stream, so a term's draw never depends on the kinds of the other terms.
const WORDS_PER_TERM: u128 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderKind {
    Gaussian,
    Uniform,
    SkewNormal,
}

/// Distribution of one Hamiltonian parameter around its mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderDistribution {
    pub kind: DisorderKind,
    pub mean: f64,
    pub sigma: f64,
    pub skewness: f64,
}

impl DisorderDistribution {
    pub fn gaussian(mean: f64, sigma: f64) -> Result<Self> {
        Self::new(DisorderKind::Gaussian, mean, sigma, 0.0)
    }

    /// Uniform on `[mean − √3σ, mean + √3σ]`.
    pub fn uniform(mean: f64, sigma: f64) -> Result<Self> {
        Self::new(DisorderKind::Uniform, mean, sigma, 0.0)
    }

    pub fn skew_normal(mean: f64, sigma: f64, skewness: f64) -> Result<Self> {
        Self::new(DisorderKind::SkewNormal, mean, sigma, skewness)
    }

    pub fn new(kind: DisorderKind, mean: f64, sigma: f64, skewness: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be ≥ 0, got {sigma}")));
        }
        match kind {
            DisorderKind::Gaussian | DisorderKind::Uniform if skewness != 0.0 => {
                return Err(Error::InvalidParameter(format!(
                    "{kind:?} disorder is symmetric; skewness must be 0, got {skewness}"
                )))
            }
            DisorderKind::SkewNormal if !(skewness.abs() < MAX_SKEW_NORMAL_SKEWNESS) => {
                return Err(Error::InvalidParameter(format!(
                    "skew-normal skewness must satisfy |γ| < {MAX_SKEW_NORMAL_SKEWNESS}, got {skewness}"
                )))
            }
            _ => {}
        }
        Ok(Self { kind, mean, sigma, skewness })
    }

    /// Same kind, mean and skewness with a different standard deviation.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.kind, self.mean, sigma, self.skewness)
    }

    /// Draws a zero-mean fluctuation `φ − φ_0` with standard deviation `sigma`.
    pub fn sample_fluctuation<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        match self.kind {
            DisorderKind::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                self.sigma * z
            }
            DisorderKind::Uniform => {
                let half_width = 3f64.sqrt() * self.sigma;
                rng.random_range(-half_width..half_width)
            }
            DisorderKind::SkewNormal => {
                let (location, scale, shape) = skew_normal_parameters(self.sigma, self.skewness);
                // Parameters are valid by construction.
                let dist = SkewNormal::new(location, scale, shape).expect("skew-normal parameters");
                dist.sample(rng)
            }
        }
    }
}

/// Location, scale and shape of the zero-mean skew-normal with standard
/// deviation `sigma` and skewness `gamma`.
pub fn skew_normal_parameters(sigma: f64, gamma: f64) -> (f64, f64, f64) {
    let b = (2.0 / std::f64::consts::PI).sqrt();
    // γ = (4 − π)/2 · u³ / (1 − u²)^{3/2} with u = bδ, inverted in closed form.
    let r = (2.0 * gamma.abs() / (4.0 - std::f64::consts::PI)).cbrt();
    let u = (r / (1.0 + r * r).sqrt()).copysign(gamma);
    let delta = u / b;
    let shape = delta / (1.0 - delta * delta).sqrt();
    let scale = sigma / (1.0 - u * u).sqrt();
    let location = -scale * u;
    (location, scale, shape)
}

/// `r`-th central moment: 0, σ², γσ³ for `r` = 1, 2, 3.
pub fn central_moment(d: &DisorderDistribution, r: usize) -> Result<f64> {
    match r {
        1 => Ok(0.0),
        2 => Ok(d.sigma * d.sigma),
        3 => Ok(d.skewness * d.sigma.powi(3)),
        _ => Err(Error::UnsupportedOrder(r)),
    }
}

/// One disordered operator `H_n` with its parameter distribution.
#[derive(Debug, Clone)]
pub struct DisorderTerm {
    pub operator: HermitianMatrix,
    pub distribution: DisorderDistribution,
    pub label: String,
}

/// Clean Hamiltonian pieces, disorder terms, encoding time and initial state.
#[derive(Debug, Clone)]
pub struct DisorderedProbeSpec {
    /// θ-carrying term, already multiplied by θ_0.
    pub h_theta: HermitianMatrix,
    /// `∂_θ H`
    pub dtheta_h: HermitianMatrix,
    /// `Σ_{n≥2} φ_{0,n} H_n`
    pub clean_rest: HermitianMatrix,
    pub disorder_terms: Vec<DisorderTerm>,
    pub encoding_time: f64,
    pub initial_state: PureState,
}

impl DisorderedProbeSpec {
    pub fn new(
        h_theta: HermitianMatrix,
        dtheta_h: HermitianMatrix,
        clean_rest: HermitianMatrix,
        disorder_terms: Vec<DisorderTerm>,
        encoding_time: f64,
        initial_state: PureState,
    ) -> Result<Self> {
        let spec = Self {
            h_theta,
            dtheta_h,
            clean_rest,
            disorder_terms,
            encoding_time,
            initial_state,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.h_theta.dim();
        check_dim(dim, self.dtheta_h.dim())?;
        check_dim(dim, self.clean_rest.dim())?;
        check_dim(dim, self.initial_state.dim())?;
        for term in &self.disorder_terms {
            check_dim(dim, term.operator.dim())?;
        }
        if !(self.encoding_time > 0.0) || !self.encoding_time.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "encoding time must be positive, got {}",
                self.encoding_time
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.h_theta.dim()
    }

    pub fn n_terms(&self) -> usize {
        self.disorder_terms.len()
    }

    pub fn distributions(&self) -> Vec<DisorderDistribution> {
        self.disorder_terms.iter().map(|t| t.distribution).collect()
    }

    pub fn term_operators(&self) -> Vec<HermitianMatrix> {
        self.disorder_terms.iter().map(|t| t.operator.clone()).collect()
    }

    pub fn with_state(&self, state: PureState) -> Result<Self> {
        check_dim(self.dim(), state.dim())?;
        Ok(Self { initial_state: state, ..self.clone() })
    }

    /// Replaces every term's σ; `sigmas` must align with the terms.
    pub fn with_sigmas(&self, sigmas: &[f64]) -> Result<Self> {
        check_len(self.n_terms(), sigmas.len())?;
        let mut out = self.clone();
        for (term, &s) in out.disorder_terms.iter_mut().zip(sigmas) {
            term.distribution = term.distribution.with_sigma(s)?;
        }
        Ok(out)
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

/// Fluctuations `δφ_n` of one disorder realization.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderRealization {
    pub deltas: Vec<f64>,
    pub seed_index: u64,
}

/// `H_0 = H_θ + Σ_{n≥2} φ_{0,n} H_n`
pub fn clean_hamiltonian(spec: &DisorderedProbeSpec) -> Result<HermitianMatrix> {
    spec.h_theta.add(&spec.clean_rest)
}

/// Draws one realization. Term `n` of realization `index` reads its own slice
/// of the ChaCha stream selected by `(master_seed, index)`, so the result is
/// independent of evaluation order and thread count.
pub fn sample_deltas(
    distributions: &[DisorderDistribution],
    master_seed: u64,
    index: u64,
) -> DisorderRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    let deltas = distributions
        .iter()
        .enumerate()
        .map(|(n, d)| {
            rng.set_word_pos(n as u128 * WORDS_PER_TERM);
            d.sample_fluctuation(&mut rng)
        })
        .collect();
    DisorderRealization { deltas, seed_index: index }
}

pub fn sample_realization(
    spec: &DisorderedProbeSpec,
    master_seed: u64,
    index: u64,
) -> DisorderRealization {
    sample_deltas(&spec.distributions(), master_seed, index)
}

/// `H_0 + Σ_n δφ_n H_n`
pub fn realized_hamiltonian(
    spec: &DisorderedProbeSpec,
    r: &DisorderRealization,
) -> Result<HermitianMatrix> {
    perturbed_hamiltonian(spec, &r.deltas)
}

pub fn perturbed_hamiltonian(spec: &DisorderedProbeSpec, deltas: &[f64]) -> Result<HermitianMatrix> {
    check_len(spec.n_terms(), deltas.len())?;
    let mut h = clean_hamiltonian(spec)?;
    for (term, &d) in spec.disorder_terms.iter().zip(deltas) {
        if d != 0.0 {
            h = h.add_scaled(d, &term.operator)?;
        }
    }
    Ok(h)
}
