use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::numerics::{
    central_first_difference, central_second_difference, global_sup_on, neumaier_sum,
    OptimizerConfig, SECOND_ORDER_SCALE,
};
use crate::possibility::{ModeSet, PossibilityFn, Repr};
use std::fmt;
use std::sync::Arc;

/// Whether `theta -> L(y | theta)` is a possibility function in `y` or a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LikelihoodKind {
    Possibilistic,
    Probabilistic,
}

/// A parametric family of likelihoods `theta -> L(. | theta)`.
///
/// Derivatives default to central differences on `ln_likelihood`; models
/// with closed forms override them.
pub trait LikelihoodModel: Send + Sync {
    fn kind(&self) -> LikelihoodKind;

    /// `ln L(y | theta)`; `-inf` where the likelihood vanishes.
    fn ln_likelihood(&self, theta: f64, y: f64) -> f64;

    fn parameter_domain(&self) -> Interval {
        Interval::REAL
    }

    /// Bounded parameter region that contains the MLE for `ys`.
    fn search_domain(&self, ys: &[f64]) -> Result<Interval>;

    /// `d/dtheta ln L`.
    fn score(&self, theta: f64, y: f64) -> Result<f64> {
        central_first_difference(|t| self.ln_likelihood(t, y), theta, 1.0)
    }

    /// `d2/dtheta2 ln L`.
    fn d2_theta(&self, theta: f64, y: f64) -> Result<f64> {
        central_second_difference(|t| self.ln_likelihood(t, y), theta, SECOND_ORDER_SCALE)
    }

    /// `d3/dtheta3 ln L`.
    fn d3_theta(&self, theta: f64, y: f64) -> Result<f64> {
        let h = f64::EPSILON.powf(0.2) * theta.abs().max(1.0);
        let f = |t: f64| self.ln_likelihood(t, y);
        let v = (f(theta + 2.0 * h) - 2.0 * f(theta + h) + 2.0 * f(theta - h)
            - f(theta - 2.0 * h))
            / (2.0 * h * h * h);
        finite_or(v, "third derivative")
    }

    /// `d2/dy2 ln L`.
    fn d2_y(&self, theta: f64, y: f64) -> Result<f64> {
        central_second_difference(|u| self.ln_likelihood(theta, u), y, SECOND_ORDER_SCALE)
    }

    /// `d/dy` of the score.
    fn d_y_score(&self, theta: f64, y: f64) -> Result<f64> {
        let h = f64::EPSILON.sqrt().sqrt() * theta.abs().max(1.0);
        let k = f64::EPSILON.sqrt().sqrt() * y.abs().max(1.0);
        let f = |t: f64, u: f64| self.ln_likelihood(t, u);
        let v = (f(theta + h, y + k) - f(theta + h, y - k) - f(theta - h, y + k)
            + f(theta - h, y - k))
            / (4.0 * h * k);
        finite_or(v, "mixed derivative")
    }

    /// The possibility function of `y` given `theta`.
    fn conditional(&self, _theta: f64) -> Result<PossibilityFn> {
        Err(Error::Unsupported(
            "conditional possibility function of a probabilistic model".into(),
        ))
    }

    /// `E*(y | theta)`.
    fn conditional_mode(&self, theta: f64) -> Result<ModeSet> {
        self.conditional(theta)?.expected_value()
    }

    fn closed_form_mle(&self, _ys: &[f64]) -> Option<f64> {
        None
    }

    /// Exact posterior when the prior is conjugate to the model.
    fn conjugate_posterior(&self, _prior: &PossibilityFn, _ys: &[f64]) -> Option<Result<PossibilityFn>> {
        None
    }

    fn describe(&self) -> String;
}

fn finite_or(v: f64, what: &'static str) -> Result<f64> {
    if v.is_nan() {
        Err(Error::NaN(what))
    } else if v.is_infinite() {
        Err(Error::InvalidParameter(format!("{what} is not finite")))
    } else {
        Ok(v)
    }
}

pub(crate) fn sample_mean(ys: &[f64]) -> Result<f64> {
    if ys.is_empty() {
        return Err(Error::Empty("observations"));
    }
    if ys.iter().any(|y| y.is_nan()) {
        return Err(Error::NaN("observations"));
    }
    Ok(neumaier_sum(ys.iter().copied()) / ys.len() as f64)
}

/// Flat prior over the whole line, in either representation.
fn flat_on_real(prior: &PossibilityFn) -> bool {
    match &prior.repr {
        Repr::Normal { precision, .. } => *precision == 0.0,
        Repr::Indicator(s) => s.len() == 1 && s.components()[0] == Interval::REAL,
        _ => false,
    }
}

/// `y ~ N(theta, variance)`, either as a possibility function or a density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalLocation {
    variance: f64,
    kind: LikelihoodKind,
}

impl NormalLocation {
    pub fn new(variance: f64) -> Result<Self> {
        if variance.is_nan() {
            return Err(Error::NaN("variance"));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "variance must be positive and finite, got {variance}"
            )));
        }
        Ok(Self {
            variance,
            kind: LikelihoodKind::Possibilistic,
        })
    }

    pub fn probabilistic(variance: f64) -> Result<Self> {
        Ok(Self {
            kind: LikelihoodKind::Probabilistic,
            ..Self::new(variance)?
        })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

impl LikelihoodModel for NormalLocation {
    fn kind(&self) -> LikelihoodKind {
        self.kind
    }

    fn ln_likelihood(&self, theta: f64, y: f64) -> f64 {
        let d = y - theta;
        let q = -d * d / (2.0 * self.variance);
        match self.kind {
            LikelihoodKind::Possibilistic => q,
            LikelihoodKind::Probabilistic => {
                q - 0.5 * (2.0 * std::f64::consts::PI * self.variance).ln()
            }
        }
    }

    fn search_domain(&self, ys: &[f64]) -> Result<Interval> {
        let (lo, hi) = min_max(ys)?;
        let h = 8.0 * self.variance.sqrt();
        Interval::new(lo - h, hi + h)
    }

    fn score(&self, theta: f64, y: f64) -> Result<f64> {
        Ok((y - theta) / self.variance)
    }

    fn d2_theta(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(-1.0 / self.variance)
    }

    fn d3_theta(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn d2_y(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(-1.0 / self.variance)
    }

    fn d_y_score(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(1.0 / self.variance)
    }

    fn conditional(&self, theta: f64) -> Result<PossibilityFn> {
        match self.kind {
            LikelihoodKind::Possibilistic => PossibilityFn::normal(theta, self.variance),
            LikelihoodKind::Probabilistic => Err(Error::Unsupported(
                "conditional possibility function of a probabilistic model".into(),
            )),
        }
    }

    fn closed_form_mle(&self, ys: &[f64]) -> Option<f64> {
        sample_mean(ys).ok()
    }

    fn conjugate_posterior(&self, prior: &PossibilityFn, ys: &[f64]) -> Option<Result<PossibilityFn>> {
        let mean = match sample_mean(ys) {
            Ok(m) => m,
            Err(e) => return Some(Err(e)),
        };
        if let Some(x) = prior.as_point_mass() {
            return Some(PossibilityFn::point_mass(x));
        }
        let data_precision = ys.len() as f64 / self.variance;
        if flat_on_real(prior) {
            return Some(PossibilityFn::normal_precision(mean, data_precision));
        }
        match &prior.repr {
            Repr::Normal {
                mean: m0,
                precision: t0,
            } => {
                let t = t0 + data_precision;
                Some(PossibilityFn::normal_precision(
                    (t0 * m0 + data_precision * mean) / t,
                    t,
                ))
            }
            _ => None,
        }
    }

    fn describe(&self) -> String {
        format!("normal-location(variance={})", self.variance)
    }
}

fn min_max(ys: &[f64]) -> Result<(f64, f64)> {
    if ys.is_empty() {
        return Err(Error::Empty("observations"));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidParameter("observations must be finite".into()));
    }
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// `y` described by `N(theta^3, variance)`; Fisher information vanishes at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicNormal {
    variance: f64,
}

impl CubicNormal {
    pub fn new(variance: f64) -> Result<Self> {
        NormalLocation::new(variance)?;
        Ok(Self { variance })
    }
}

impl LikelihoodModel for CubicNormal {
    fn kind(&self) -> LikelihoodKind {
        LikelihoodKind::Possibilistic
    }

    fn ln_likelihood(&self, theta: f64, y: f64) -> f64 {
        let d = y - theta.powi(3);
        -d * d / (2.0 * self.variance)
    }

    fn search_domain(&self, ys: &[f64]) -> Result<Interval> {
        let (lo, hi) = min_max(ys)?;
        let h = 8.0 * self.variance.sqrt();
        Interval::new((lo - h).cbrt() - 1.0, (hi + h).cbrt() + 1.0)
    }

    fn score(&self, theta: f64, y: f64) -> Result<f64> {
        Ok(3.0 * theta * theta * (y - theta.powi(3)) / self.variance)
    }

    fn d2_theta(&self, theta: f64, y: f64) -> Result<f64> {
        Ok((6.0 * theta * (y - theta.powi(3)) - 9.0 * theta.powi(4)) / self.variance)
    }

    fn d2_y(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(-1.0 / self.variance)
    }

    fn d_y_score(&self, theta: f64, _y: f64) -> Result<f64> {
        Ok(3.0 * theta * theta / self.variance)
    }

    fn conditional(&self, theta: f64) -> Result<PossibilityFn> {
        PossibilityFn::normal(theta.powi(3), self.variance)
    }

    fn closed_form_mle(&self, ys: &[f64]) -> Option<f64> {
        sample_mean(ys).ok().map(f64::cbrt)
    }

    fn describe(&self) -> String {
        format!("cubic-normal(variance={})", self.variance)
    }
}

/// Exponential density `theta exp(-theta y)` with rate `theta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExponentialRate;

impl LikelihoodModel for ExponentialRate {
    fn kind(&self) -> LikelihoodKind {
        LikelihoodKind::Probabilistic
    }

    fn ln_likelihood(&self, theta: f64, y: f64) -> f64 {
        if theta <= 0.0 || y < 0.0 {
            f64::NEG_INFINITY
        } else {
            theta.ln() - theta * y
        }
    }

    fn parameter_domain(&self) -> Interval {
        Interval::nonnegative()
    }

    fn search_domain(&self, ys: &[f64]) -> Result<Interval> {
        let m = sample_mean(ys)?;
        if !(m > 0.0) {
            return Err(Error::InvalidParameter(
                "exponential observations need a positive mean".into(),
            ));
        }
        Interval::new(0.0, 20.0 / m)
    }

    fn score(&self, theta: f64, y: f64) -> Result<f64> {
        Ok(1.0 / theta - y)
    }

    fn d2_theta(&self, theta: f64, _y: f64) -> Result<f64> {
        Ok(-1.0 / (theta * theta))
    }

    fn d3_theta(&self, theta: f64, _y: f64) -> Result<f64> {
        Ok(2.0 / theta.powi(3))
    }

    fn d2_y(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn d_y_score(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(-1.0)
    }

    fn closed_form_mle(&self, ys: &[f64]) -> Option<f64> {
        sample_mean(ys).ok().filter(|m| *m > 0.0).map(|m| 1.0 / m)
    }

    /// Gamma priors (including the flat one) stay gamma.
    fn conjugate_posterior(&self, prior: &PossibilityFn, ys: &[f64]) -> Option<Result<PossibilityFn>> {
        if ys.iter().any(|y| *y < 0.0) {
            return None;
        }
        let total = neumaier_sum(ys.iter().copied());
        let n = ys.len() as f64;
        let (a, b) = match &prior.repr {
            Repr::Gamma { shape, rate } => (*shape, *rate),
            Repr::Indicator(s)
                if s.len() == 1 && s.components()[0].contains_interval(&Interval::nonnegative()) =>
            {
                (0.0, 0.0)
            }
            _ => return None,
        };
        Some(PossibilityFn::gamma(a + n, b + total))
    }

    fn describe(&self) -> String {
        "exponential-rate".into()
    }
}

type Loss2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Likelihood `exp(-(L(theta, y) - min_y L(theta, y)))` from a loss.
#[derive(Clone)]
pub struct LossModel {
    loss: Loss2,
    y_domain: Interval,
    theta_domain: Interval,
    normalized: bool,
    config: OptimizerConfig,
}

impl LossModel {
    /// The minimum over `y` is found numerically on the bounded `y_domain`
    /// for every `theta`.
    pub fn new(
        loss: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        y_domain: Interval,
        theta_domain: Interval,
    ) -> Result<Self> {
        if !y_domain.is_bounded() {
            return Err(Error::UnboundedDomain(y_domain.to_string()));
        }
        if !theta_domain.is_bounded() {
            return Err(Error::UnboundedDomain(theta_domain.to_string()));
        }
        Ok(Self {
            loss: Arc::new(loss),
            y_domain,
            theta_domain,
            normalized: false,
            config: OptimizerConfig::default(),
        })
    }

    /// Declares `min_y L(theta, y) = 0` for every `theta`, skipping the
    /// numeric minimisation.
    pub fn prenormalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    fn min_loss(&self, theta: f64) -> f64 {
        if self.normalized {
            return 0.0;
        }
        match global_sup_on(|y| -(self.loss)(theta, y), self.y_domain, &self.config) {
            Ok(r) => -r.value,
            Err(_) => f64::NAN,
        }
    }
}

impl fmt::Debug for LossModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LossModel")
            .field("y_domain", &self.y_domain)
            .field("theta_domain", &self.theta_domain)
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl LikelihoodModel for LossModel {
    fn kind(&self) -> LikelihoodKind {
        LikelihoodKind::Possibilistic
    }

    fn ln_likelihood(&self, theta: f64, y: f64) -> f64 {
        -((self.loss)(theta, y) - self.min_loss(theta))
    }

    fn parameter_domain(&self) -> Interval {
        self.theta_domain
    }

    fn search_domain(&self, _ys: &[f64]) -> Result<Interval> {
        Ok(self.theta_domain)
    }

    fn d2_y(&self, theta: f64, y: f64) -> Result<f64> {
        central_second_difference(|u| -(self.loss)(theta, u), y, SECOND_ORDER_SCALE)
    }

    fn d_y_score(&self, theta: f64, y: f64) -> Result<f64> {
        let h = f64::EPSILON.sqrt().sqrt() * theta.abs().max(1.0);
        let k = f64::EPSILON.sqrt().sqrt() * y.abs().max(1.0);
        let f = |t: f64, u: f64| -(self.loss)(t, u);
        let v = (f(theta + h, y + k) - f(theta + h, y - k) - f(theta - h, y + k)
            + f(theta - h, y - k))
            / (4.0 * h * k);
        finite_or(v, "mixed derivative")
    }

    fn conditional(&self, theta: f64) -> Result<PossibilityFn> {
        let loss = self.loss.clone();
        PossibilityFn::from_loss(move |y| loss(theta, y), self.y_domain, &self.config)
    }

    fn describe(&self) -> String {
        format!("loss(y in {}, theta in {})", self.y_domain, self.theta_domain)
    }
}

/// The base likelihood raised to a positive power.
#[derive(Clone)]
pub struct Tempered {
    base: Arc<dyn LikelihoodModel>,
    power: f64,
}

impl Tempered {
    pub fn new(base: Arc<dyn LikelihoodModel>, power: f64) -> Result<Self> {
        if power.is_nan() {
            return Err(Error::NaN("tempering power"));
        }
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tempering power must be positive and finite, got {power}"
            )));
        }
        Ok(Self { base, power })
    }
}

impl LikelihoodModel for Tempered {
    fn kind(&self) -> LikelihoodKind {
        self.base.kind()
    }

    fn ln_likelihood(&self, theta: f64, y: f64) -> f64 {
        self.power * self.base.ln_likelihood(theta, y)
    }

    fn parameter_domain(&self) -> Interval {
        self.base.parameter_domain()
    }

    fn search_domain(&self, ys: &[f64]) -> Result<Interval> {
        self.base.search_domain(ys)
    }

    fn score(&self, theta: f64, y: f64) -> Result<f64> {
        Ok(self.power * self.base.score(theta, y)?)
    }

    fn d2_theta(&self, theta: f64, y: f64) -> Result<f64> {
        Ok(self.power * self.base.d2_theta(theta, y)?)
    }

    fn d3_theta(&self, theta: f64, y: f64) -> Result<f64> {
        Ok(self.power * self.base.d3_theta(theta, y)?)
    }

    fn d2_y(&self, theta: f64, y: f64) -> Result<f64> {
        Ok(self.power * self.base.d2_y(theta, y)?)
    }

    fn d_y_score(&self, theta: f64, y: f64) -> Result<f64> {
        Ok(self.power * self.base.d_y_score(theta, y)?)
    }

    fn conditional(&self, theta: f64) -> Result<PossibilityFn> {
        self.base.conditional(theta)?.temper(self.power)
    }

    fn conditional_mode(&self, theta: f64) -> Result<ModeSet> {
        self.base.conditional_mode(theta)
    }

    fn closed_form_mle(&self, ys: &[f64]) -> Option<f64> {
        self.base.closed_form_mle(ys)
    }

    /// Only flat priors commute with tempering.
    fn conjugate_posterior(&self, prior: &PossibilityFn, ys: &[f64]) -> Option<Result<PossibilityFn>> {
        if !prior.is_flat() {
            return None;
        }
        self.base
            .conjugate_posterior(prior, ys)
            .map(|r| r.and_then(|p| p.temper(self.power)))
    }

    fn describe(&self) -> String {
        format!("tempered({}, power={})", self.base.describe(), self.power)
    }
}

/// `L(y | theta) = 1` on a set of observations, for every `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuousModel {
    observable: IntervalSet,
}

impl VacuousModel {
    pub fn new(observable: IntervalSet) -> Result<Self> {
        if observable.is_empty() {
            return Err(Error::Empty("observable set"));
        }
        Ok(Self { observable })
    }
}

impl LikelihoodModel for VacuousModel {
    fn kind(&self) -> LikelihoodKind {
        LikelihoodKind::Possibilistic
    }

    fn ln_likelihood(&self, _theta: f64, y: f64) -> f64 {
        if self.observable.contains(y) {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }

    fn search_domain(&self, _ys: &[f64]) -> Result<Interval> {
        Err(Error::UnboundedDomain(
            "a vacuous model carries no information on the parameter".into(),
        ))
    }

    fn score(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn d2_theta(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn d3_theta(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn d_y_score(&self, _theta: f64, _y: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn conditional(&self, _theta: f64) -> Result<PossibilityFn> {
        PossibilityFn::indicator(self.observable.clone())
    }

    fn conjugate_posterior(&self, prior: &PossibilityFn, ys: &[f64]) -> Option<Result<PossibilityFn>> {
        if ys.iter().all(|y| self.observable.contains(*y)) {
            Some(Ok(prior.clone()))
        } else {
            Some(Err(Error::DegeneratePosterior))
        }
    }

    fn describe(&self) -> String {
        format!("vacuous({})", self.observable)
    }
}
