use super::model::{LikelihoodKind, LikelihoodModel};
use super::{check_observations, compensated, posterior, SharedModel};
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interval::Interval;
use crate::numerics::{global_sup_on, OptimizerConfig};
use crate::possibility::{ExtendedVariance, ModeSet, PossibilityFn};
use crate::transform::variance_pushforward;
use serde::Serialize;

/// `sum_i ln L(y_i | theta)`.
pub fn log_likelihood(model: &dyn LikelihoodModel, theta: f64, ys: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(ys.len());
    for &y in ys {
        let v = model.ln_likelihood(theta, y);
        if v == f64::NEG_INFINITY {
            return v;
        }
        terms.push(v);
    }
    compensated(terms)
}

/// Maximum-likelihood estimate, in closed form when the model has one.
pub fn mle(model: &dyn LikelihoodModel, ys: &[f64]) -> Result<f64> {
    check_observations(ys)?;
    if let Some(t) = model.closed_form_mle(ys) {
        return Ok(t);
    }
    let domain = model.search_domain(ys)?;
    let r = global_sup_on(|t| log_likelihood(model, t, ys), domain, &OptimizerConfig::default())?;
    if r.value == f64::NEG_INFINITY {
        return Err(Error::DegeneratePosterior);
    }
    Ok(r.arg)
}

/// `-sum_i d2/dtheta2 ln L(y_i | theta_hat)`; must be positive.
pub fn observed_information(model: &dyn LikelihoodModel, ys: &[f64], theta_hat: f64) -> Result<f64> {
    check_observations(ys)?;
    let d2 = ys
        .iter()
        .map(|&y| model.d2_theta(theta_hat, y))
        .collect::<Result<Vec<_>>>()?;
    let j = -compensated(d2);
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::DegenerateInformation(format!(
            "observed information {j} at {theta_hat}"
        )));
    }
    Ok(j)
}

/// `I*(theta) = -d2/dtheta2 ln L(y | theta)` at `y = E*(y | theta)`.
pub fn fisher_information(model: &dyn LikelihoodModel, theta: f64) -> Result<f64> {
    if model.kind() != LikelihoodKind::Possibilistic {
        return Err(Error::Unsupported(
            "Fisher information needs a possibilistic likelihood".into(),
        ));
    }
    let mode = model.conditional_mode(theta)?.unique()?;
    let i = -model.d2_theta(theta, mode)?;
    if i < 0.0 {
        return Err(Error::DegenerateInformation(format!(
            "negative curvature {i} at the conditional mode"
        )));
    }
    Ok(i.max(0.0))
}

/// Normal approximation centred at `theta0 + score / J` with precision `J`,
/// `J` the observed information at the MLE.
pub fn bvm_approximation(model: &dyn LikelihoodModel, ys: &[f64], theta0: f64) -> Result<PossibilityFn> {
    let theta_hat = mle(model, ys)?;
    let j = observed_information(model, ys, theta_hat)?;
    let score = compensated(
        ys.iter()
            .map(|&y| model.score(theta0, y))
            .collect::<Result<Vec<_>>>()?,
    );
    PossibilityFn::normal_precision(theta0 + score / j, j)
}

/// Ingredients of the limiting law of `sqrt(n) (MAP - theta0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapLaw {
    pub fisher: f64,
    /// `V*(y | theta0)`.
    pub observation_variance: ExtendedVariance,
    /// `V*(s(y))` for the score at `theta0`.
    pub score_variance: ExtendedVariance,
    /// `V*(s(y)) / I*^2`.
    pub variance: ExtendedVariance,
}

pub fn map_asymptotic_terms(model: &dyn LikelihoodModel, theta0: f64) -> Result<MapLaw> {
    let fisher = fisher_information(model, theta0)?;
    if fisher == 0.0 {
        return Err(Error::DegenerateInformation(format!(
            "zero Fisher information at {theta0}"
        )));
    }
    let conditional = model.conditional(theta0)?;
    let mode = conditional.expected_value()?.unique()?;
    let observation_variance = conditional.variance()?;
    let slope = model.d_y_score(theta0, mode)?;
    let score_variance = variance_pushforward(observation_variance, slope)?.variance;
    let variance = match score_variance {
        ExtendedVariance::Finite(v) => ExtendedVariance::from_value(v / (fisher * fisher))?,
        other => other,
    };
    Ok(MapLaw {
        fisher,
        observation_variance,
        score_variance,
        variance,
    })
}

/// `N(0, V*(s) / I*^2)`.
pub fn map_asymptotic_law(model: &dyn LikelihoodModel, theta0: f64) -> Result<PossibilityFn> {
    PossibilityFn::normal(0.0, map_asymptotic_terms(model, theta0)?.variance.value())
}

/// Outcome of testing `theta = theta0` by its posterior credibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestReport {
    pub lambda: f64,
    pub threshold: f64,
    pub reject: bool,
    pub beta_limit: f64,
    pub alpha: f64,
}

/// `lambda = f(theta0 | y)`; rejects when `lambda <= alpha^(beta/2)` with
/// `beta = V*(s) / I*` the scale of the limiting law of `-2 ln lambda`.
pub fn credibility_test(
    prior: &PossibilityFn,
    model: &SharedModel,
    ys: &[f64],
    theta0: f64,
    alpha: f64,
) -> Result<TestReport> {
    if alpha.is_nan() || theta0.is_nan() {
        return Err(Error::NaN("test input"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !model.parameter_domain().contains(theta0) {
        return Err(Error::InvalidParameter(format!(
            "theta0 = {theta0} outside the parameter domain {}",
            model.parameter_domain()
        )));
    }
    let post = posterior(prior, model, ys)?;
    let lambda = post.eval(theta0)?;
    let terms = map_asymptotic_terms(model.as_ref(), theta0)?;
    let beta_limit = terms.score_variance.value() / terms.fisher;
    let threshold = threshold_for(alpha, beta_limit);
    Ok(TestReport {
        lambda,
        threshold,
        reject: lambda <= threshold,
        beta_limit,
        alpha,
    })
}

fn threshold_for(alpha: f64, beta: f64) -> f64 {
    if beta.is_infinite() {
        0.0
    } else {
        alpha.powf(beta / 2.0)
    }
}

/// `E*(estimator - theta0)` for an estimator described by `law`.
pub fn bias(law: &PossibilityFn, theta0: f64) -> Result<ModeSet> {
    Ok(law.expected_value()?.map_monotone(|x| x - theta0))
}

/// True if `E*(y | theta)` is single-valued and strictly monotone on `n`
/// points of `domain`.
pub fn identifiability_probe(model: &dyn LikelihoodModel, domain: Interval, n: usize) -> Result<bool> {
    let grid = UniformGrid::over(&domain, n)?;
    let mut modes = Vec::with_capacity(n);
    for t in grid.points() {
        match model.conditional_mode(t)?.singleton() {
            Some(m) => modes.push(m),
            None => return Ok(false),
        }
    }
    let up = modes.windows(2).all(|w| w[1] > w[0]);
    let down = modes.windows(2).all(|w| w[1] < w[0]);
    Ok(up || down)
}
