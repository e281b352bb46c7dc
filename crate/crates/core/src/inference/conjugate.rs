use super::model::{sample_mean, LikelihoodModel, NormalLocation};
use super::compensated;
use crate::error::{Error, Result};
use crate::possibility::PossibilityFn;
use serde::{Deserialize, Serialize};

/// Hyperparameters of the normal-gamma description of `(mu, tau)`:
/// `G(tau; alpha, beta) N(mu; mean, 1 / (k tau))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalGammaState {
    pub k: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl NormalGammaState {
    pub fn new(k: f64, mu: f64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("k", k), ("alpha", alpha), ("beta", beta)] {
            if v.is_nan() {
                return Err(Error::NaN("normal-gamma hyperparameter"));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be finite, got {mu}")));
        }
        Ok(Self { k, mu, alpha, beta })
    }

    /// No prior information: all hyperparameters zero.
    pub fn flat() -> Self {
        Self {
            k: 0.0,
            mu: 0.0,
            alpha: 0.0,
            beta: 0.0,
        }
    }

    /// Posterior hyperparameters after a batch of observations.
    pub fn update(&self, ys: &[f64]) -> Result<Self> {
        let mean = sample_mean(ys)?;
        let n = ys.len() as f64;
        let spread = compensated(ys.iter().map(|y| (y - mean) * (y - mean))) / n;
        let k = self.k + n;
        let mu = if self.k == 0.0 {
            mean
        } else {
            (self.k * self.mu + n * mean) / k
        };
        let shift = self.mu - mean;
        let beta = self.beta + n * spread / 2.0 + n * self.k * shift * shift / (2.0 * k);
        Self::new(k, mu, self.alpha + n / 2.0, beta)
    }

    /// `G(tau; alpha, beta)`.
    pub fn precision_posterior(&self) -> Result<PossibilityFn> {
        PossibilityFn::gamma(self.alpha, self.beta)
    }

    /// The mean with the precision maximised out:
    /// `St(nu = 2 alpha, mu, beta / (alpha k))`. Data with no spread
    /// (`beta = 0`) give the point mass at `mu`, the limit of that family.
    pub fn student_marginal(&self) -> Result<PossibilityFn> {
        if !(self.alpha > 0.0 && self.k > 0.0) {
            return Err(Error::DegeneratePosterior);
        }
        if self.beta == 0.0 {
            return PossibilityFn::point_mass(self.mu);
        }
        PossibilityFn::student_t(2.0 * self.alpha, self.mu, self.beta / (self.alpha * self.k))
    }
}

/// Posterior of a normal mean with known observation variance under a
/// normal (or flat) prior.
pub fn normal_known_variance_update(
    prior: &PossibilityFn,
    variance: f64,
    ys: &[f64],
) -> Result<PossibilityFn> {
    NormalLocation::new(variance)?
        .conjugate_posterior(prior, ys)
        .ok_or_else(|| Error::Unsupported(format!("prior {} is not conjugate", prior.kind())))?
}
