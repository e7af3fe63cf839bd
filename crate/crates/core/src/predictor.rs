//! Project success-rate estimation.
//!
//! Each risk materializes independently with probability equal to its impact
//! score. The project succeeds when none materializes, so the analytic rate
//! is `Π (1 − e_i)`. The Monte Carlo estimate samples the same model and
//! serves as a cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::assessment::{impact, residual_impact, AssessError};
use crate::register::{Risk, RiskRegister};

/// Identifier of the generator behind [`monte_carlo_success`]: ChaCha with
/// 8 rounds, seeded through `seed_from_u64`, one `f64` draw per risk per
/// trial until the first materialization.
pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64";

/// Dependence model recorded in every estimate.
pub const DEPENDENCE_MODEL: &str = "independent risks";

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error(transparent)]
    Assess(#[from] AssessError),
    #[error("trials must be at least 1")]
    ZeroTrials,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledEstimate {
    pub mean: f64,
    pub successes: u64,
    pub trials: u64,
    pub seed: u64,
    pub rng: &'static str,
}

impl SampledEstimate {
    /// Binomial standard error of the mean around success probability `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessEstimate {
    pub analytic: f64,
    pub sampled: Option<SampledEstimate>,
    pub use_residual: bool,
    pub model: &'static str,
}

/// The materialization probability of every risk, in register order.
pub fn failure_probabilities(register: &RiskRegister, use_residual: bool) -> Result<Vec<f64>, AssessError> {
    register
        .risks
        .iter()
        .map(|r| effective_impact(r, use_residual))
        .collect()
}

fn effective_impact(risk: &Risk, use_residual: bool) -> Result<f64, AssessError> {
    if use_residual && risk.mitigation.is_some() {
        Ok(residual_impact(risk)?.value)
    } else {
        Ok(impact(risk)?.value)
    }
}

pub fn project_success_rate(register: &RiskRegister, use_residual: bool) -> Result<SuccessEstimate, PredictError> {
    let analytic = failure_probabilities(register, use_residual)?
        .iter()
        .map(|e| 1.0 - e)
        .product();
    Ok(SuccessEstimate {
        analytic,
        sampled: None,
        use_residual,
        model: DEPENDENCE_MODEL,
    })
}

/// Analytic estimate plus a seeded simulation. Equal inputs give
/// bit-identical output.
pub fn monte_carlo_success(
    register: &RiskRegister,
    trials: u64,
    seed: u64,
    use_residual: bool,
) -> Result<SuccessEstimate, PredictError> {
    if trials == 0 {
        return Err(PredictError::ZeroTrials);
    }
    let mut estimate = project_success_rate(register, use_residual)?;
    let failure = failure_probabilities(register, use_residual)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0u64;
    for _ in 0..trials {
        if !failure.iter().any(|&e| rng.random::<f64>() < e) {
            successes += 1;
        }
    }
    estimate.sampled = Some(SampledEstimate {
        mean: successes as f64 / trials as f64,
        successes,
        trials,
        seed,
        rng: RNG_ALGORITHM,
    });
    Ok(estimate)
}
