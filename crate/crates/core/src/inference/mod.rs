//! Possibilistic Bayesian updating, point and interval estimates, and
//! tests built on posterior credibility.

mod asymptotic;
mod conjugate;
mod model;
mod ratio;

pub use asymptotic::{
    bias, bvm_approximation, credibility_test, fisher_information, identifiability_probe,
    log_likelihood, map_asymptotic_law, map_asymptotic_terms, mle, observed_information,
    MapLaw, TestReport,
};
pub use conjugate::{normal_known_variance_update, NormalGammaState};
pub use model::{
    CubicNormal, ExponentialRate, LikelihoodKind, LikelihoodModel, LossModel, NormalLocation,
    Tempered, VacuousModel,
};
pub use ratio::{ratio_curve, ratio_posterior, ratio_value};

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interval::Interval;
use crate::numerics::{bisect, global_sup_on, neumaier_sum, OptimizerConfig};
use crate::possibility::{ExtendedVariance, ModeSet, PossibilityFn, Repr};
use crate::serde_ext::ser_vec_f64;
use serde::Serialize;
use std::sync::Arc;

pub type SharedModel = Arc<dyn LikelihoodModel>;

/// Half-width of the default parameter window in units of `1/sqrt(J)`.
const LIKELIHOOD_WINDOW: f64 = 12.0;

/// Scan resolution for credible-interval end points.
const INTERVAL_SCAN_POINTS: usize = 2001;

/// Numerical settings for posteriors that have no closed form.
#[derive(Debug, Clone, Default)]
pub struct PosteriorOptions {
    /// Parameter range to work on; derived from the data and prior if unset.
    pub domain: Option<Interval>,
    pub config: OptimizerConfig,
}

pub(crate) fn check_observations(ys: &[f64]) -> Result<()> {
    if ys.is_empty() {
        return Err(Error::Empty("observations"));
    }
    if ys.iter().any(|y| y.is_nan()) {
        return Err(Error::NaN("observations"));
    }
    Ok(())
}

/// `f(theta | y) ∝ prod L(y_i | theta) f(theta)`, normalised to sup 1.
pub fn posterior(prior: &PossibilityFn, model: &SharedModel, ys: &[f64]) -> Result<PossibilityFn> {
    posterior_with(prior, model, ys, &PosteriorOptions::default())
}

pub fn posterior_with(
    prior: &PossibilityFn,
    model: &SharedModel,
    ys: &[f64],
    opts: &PosteriorOptions,
) -> Result<PossibilityFn> {
    check_observations(ys)?;
    if let Some(r) = model.conjugate_posterior(prior, ys) {
        return r;
    }
    if let Some(x) = prior.as_point_mass() {
        return if log_likelihood(model.as_ref(), x, ys) > f64::NEG_INFINITY {
            PossibilityFn::point_mass(x)
        } else {
            Err(Error::DegeneratePosterior)
        };
    }
    let domain = posterior_domain(prior, model.as_ref(), ys, opts)?;
    let loss = posterior_loss(prior, model, ys);
    let probe = UniformGrid::over(&domain, opts.config.grid_points.max(3))
        .map(|g| g.points())
        .unwrap_or_else(|_| vec![domain.lo()]);
    if probe.iter().all(|&t| loss(t) == f64::INFINITY) {
        return Err(Error::DegeneratePosterior);
    }
    PossibilityFn::from_loss(loss, domain, &opts.config)
}

/// `-sum ln L(y_i | theta) - ln f(theta)`.
fn posterior_loss(
    prior: &PossibilityFn,
    model: &SharedModel,
    ys: &[f64],
) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let prior = prior.clone();
    let model = model.clone();
    let ys: Arc<[f64]> = ys.into();
    move |t| {
        let lp = prior.ln_value(t);
        if lp == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        -(log_likelihood(model.as_ref(), t, &ys) + lp)
    }
}

/// Parameter window for numeric posteriors: a window around the MLE merged
/// with the prior's working domain, clipped to both supports.
fn posterior_domain(
    prior: &PossibilityFn,
    model: &dyn LikelihoodModel,
    ys: &[f64],
    opts: &PosteriorOptions,
) -> Result<Interval> {
    if let Some(d) = opts.domain {
        return Ok(d);
    }
    let lik = likelihood_window(model, ys);
    let prior_dom = prior.working_domain().ok();
    let d = match (lik, prior_dom) {
        (Ok(l), Some(p)) if prior.is_flat() => l.intersect(&p).unwrap_or(p),
        (Ok(l), Some(p)) => l.hull(&p),
        (Ok(l), None) => l,
        (Err(_), Some(p)) => p,
        (Err(e), None) => return Err(e),
    };
    d.intersect(&prior.support())
        .and_then(|d| d.intersect(&model.parameter_domain()))
        .ok_or(Error::DegeneratePosterior)
}

fn likelihood_window(model: &dyn LikelihoodModel, ys: &[f64]) -> Result<Interval> {
    let search = model.search_domain(ys)?;
    let centre = mle(model, ys).ok();
    let info = centre.and_then(|t| observed_information(model, ys, t).ok());
    if let (Some(t), Some(j)) = (centre, info) {
        let h = LIKELIHOOD_WINDOW / j.sqrt();
        if let Some(w) = Interval::new(t - h, t + h).ok().and_then(|w| w.intersect(&search)) {
            if !w.is_point() {
                return Ok(w);
            }
        }
    }
    Ok(search)
}

/// `sup_theta prod L(y_i | theta) f(theta)`, a score in `[0, 1]`.
///
/// Only defined for possibilistic likelihoods, which are dimensionless.
pub fn marginal_likelihood(prior: &PossibilityFn, model: &SharedModel, ys: &[f64]) -> Result<f64> {
    check_observations(ys)?;
    if model.kind() == LikelihoodKind::Probabilistic {
        return Err(Error::Unsupported(
            "marginal likelihood of a probabilistic model has units".into(),
        ));
    }
    let at = |t: f64| (log_likelihood(model.as_ref(), t, ys) + prior.ln_value(t)).exp();
    if let Some(x) = prior.as_point_mass() {
        return Ok(at(x));
    }
    if let Some(r) = model.conjugate_posterior(prior, ys) {
        return match r {
            Ok(post) => Ok(at(representative(&post.expected_value()?))),
            Err(Error::DegeneratePosterior) => Ok(0.0),
            Err(e) => Err(e),
        };
    }
    let opts = PosteriorOptions::default();
    let domain = match posterior_domain(prior, model.as_ref(), ys, &opts) {
        Ok(d) => d,
        Err(Error::DegeneratePosterior) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let loss = posterior_loss(prior, model, ys);
    let r = global_sup_on(|t| -loss(t), domain, &opts.config)?;
    Ok(r.value.exp().min(1.0))
}

/// A finite point of the mode set, preferring the left end.
fn representative(ms: &ModeSet) -> f64 {
    let c = ms.components()[0];
    if c.lo().is_finite() {
        c.lo()
    } else if c.hi().is_finite() {
        c.hi()
    } else {
        0.0
    }
}

/// The MAP estimate, i.e. the mode set of the posterior.
pub fn map_estimate(posterior: &PossibilityFn) -> Result<ModeSet> {
    posterior.expected_value()
}

/// End points where the posterior crosses `alpha`. A side that never drops
/// below `alpha` inside the working domain stops at the domain edge and is
/// flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CredibleInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_at_edge: bool,
    pub hi_at_edge: bool,
}

pub fn credible_interval(posterior: &PossibilityFn, alpha: f64) -> Result<CredibleInterval> {
    if alpha.is_nan() {
        return Err(Error::NaN("alpha"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let ms = posterior.expected_value()?;
    if ms.components().len() > 1 {
        return Err(Error::Multimodal);
    }
    let exact = |lo: f64, hi: f64| CredibleInterval {
        lo,
        hi,
        lo_at_edge: false,
        hi_at_edge: false,
    };
    match &posterior.repr {
        Repr::Normal { mean, precision } if *precision > 0.0 => {
            let h = (-2.0 * alpha.ln() / precision).sqrt();
            return Ok(exact(mean - h, mean + h));
        }
        Repr::Normal { .. } => {
            return Ok(CredibleInterval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                lo_at_edge: true,
                hi_at_edge: true,
            })
        }
        Repr::StudentT { dof, loc, scale } if *dof > 0.0 => {
            let h = (dof * scale * (alpha.powf(-2.0 / dof) - 1.0)).sqrt();
            return Ok(exact(loc - h, loc + h));
        }
        Repr::Indicator(s) => {
            let h = s.hull().ok_or(Error::Empty("indicator set"))?;
            return Ok(exact(h.lo(), h.hi()));
        }
        _ => {}
    }
    let domain = posterior.working_domain()?;
    let mode = ms.hull();
    let grid = UniformGrid::over(&domain, INTERVAL_SCAN_POINTS)?;
    let xs = grid.points();
    let g = |x: f64| posterior.value(x) - alpha;
    let tol = |x: f64| 1e-12 * x.abs().max(1.0);

    let right: Vec<f64> = xs.iter().copied().filter(|&x| x > mode.hi()).collect();
    let last = right.iter().rposition(|&x| g(x) >= 0.0);
    let (hi, hi_at_edge) = match last {
        Some(i) if i + 1 == right.len() => (domain.hi(), true),
        Some(i) => (bisect(g, right[i], right[i + 1], tol(right[i]))?, false),
        None if right.is_empty() => (mode.hi(), true),
        None => (bisect(g, mode.hi(), right[0], tol(right[0]))?, false),
    };

    let left: Vec<f64> = xs.iter().copied().filter(|&x| x < mode.lo()).collect();
    let first = left.iter().position(|&x| g(x) >= 0.0);
    let (lo, lo_at_edge) = match first {
        Some(0) => (domain.lo(), true),
        Some(i) => (bisect(g, left[i - 1], left[i], tol(left[i]))?, false),
        None if left.is_empty() => (mode.lo(), true),
        None => (bisect(g, left[left.len() - 1], mode.lo(), tol(mode.lo()))?, false),
    };
    Ok(CredibleInterval {
        lo,
        hi,
        lo_at_edge,
        hi_at_edge,
    })
}

/// Summary of a posterior and, optionally, of a test against it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferenceReport {
    pub map: ModeSet,
    pub variance: ExtendedVariance,
    #[serde(serialize_with = "ser_vec_f64")]
    pub interval: Vec<f64>,
    pub alpha: f64,
    pub lambda: Option<f64>,
    pub threshold: Option<f64>,
    pub reject: Option<bool>,
    pub marginal_likelihood: Option<f64>,
}

impl InferenceReport {
    pub fn summarize(posterior: &PossibilityFn, alpha: f64) -> Result<Self> {
        let ci = credible_interval(posterior, alpha)?;
        Ok(Self {
            map: map_estimate(posterior)?,
            variance: posterior.variance()?,
            interval: vec![ci.lo, ci.hi],
            alpha,
            lambda: None,
            threshold: None,
            reject: None,
            marginal_likelihood: None,
        })
    }

    pub fn with_test(mut self, t: &TestReport) -> Self {
        self.lambda = Some(t.lambda);
        self.threshold = Some(t.threshold);
        self.reject = Some(t.reject);
        self
    }

    pub fn with_marginal_likelihood(mut self, m: f64) -> Self {
        self.marginal_likelihood = Some(m);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

/// Sum of `values` with compensation; shared by the submodules.
pub(crate) fn compensated(values: impl IntoIterator<Item = f64>) -> f64 {
    neumaier_sum(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalSet;
    use approx::assert_relative_eq;

    fn normal_model(v: f64) -> SharedModel {
        Arc::new(NormalLocation::new(v).unwrap())
    }

    /// A normal-location model without the closed-form update.
    struct GridNormal(f64);
    impl LikelihoodModel for GridNormal {
        fn kind(&self) -> LikelihoodKind {
            LikelihoodKind::Possibilistic
        }
        fn ln_likelihood(&self, theta: f64, y: f64) -> f64 {
            -(y - theta).powi(2) / (2.0 * self.0)
        }
        fn search_domain(&self, ys: &[f64]) -> Result<Interval> {
            NormalLocation::new(self.0)?.search_domain(ys)
        }
        fn conditional(&self, theta: f64) -> Result<PossibilityFn> {
            PossibilityFn::normal(theta, self.0)
        }
        fn describe(&self) -> String {
            "grid-normal".into()
        }
    }

    fn sup_gap(a: &PossibilityFn, b: &PossibilityFn, lo: f64, hi: f64) -> f64 {
        let g = UniformGrid::new(lo, hi, 2001).unwrap();
        g.points()
            .into_iter()
            .map(|x| (a.eval(x).unwrap() - b.eval(x).unwrap()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_observation_flat_prior() {
        let post = posterior(&PossibilityFn::uninformative(), &normal_model(1.0), &[0.0]).unwrap();
        assert_eq!(post.kind(), crate::Kind::Normal);
        assert_eq!(post.params(), vec![0.0, 1.0]);
    }

    #[test]
    fn flat_prior_gives_mean_and_scaled_variance() {
        let ys = [0.3, 1.2, -0.4, 2.2];
        let post = posterior(&PossibilityFn::uninformative(), &normal_model(2.0), &ys).unwrap();
        assert_relative_eq!(post.params()[0], 0.825, max_relative = 1e-15);
        assert_relative_eq!(post.params()[1], 0.5, max_relative = 1e-15);
    }

    #[test]
    fn normal_prior_matches_grid_posterior() {
        let ys = [1.0, 2.5, 0.7];
        let prior = PossibilityFn::normal(-1.0, 4.0).unwrap();
        let closed = posterior(&prior, &normal_model(1.5), &ys).unwrap();
        let (t0, t) = (0.25, 2.0);
        let m = (-t0 + t * 4.2 / 3.0) / (t0 + t);
        assert_relative_eq!(closed.params()[0], m, max_relative = 1e-14);
        assert_relative_eq!(closed.params()[1], 1.0 / (t0 + t), max_relative = 1e-14);
        let grid_model: SharedModel = Arc::new(GridNormal(1.5));
        let numeric = posterior(&prior, &grid_model, &ys).unwrap();
        assert_eq!(numeric.kind(), crate::Kind::LossBased);
        assert!(sup_gap(&closed, &numeric, -2.0, 4.0) < 1e-9);
    }

    #[test]
    fn sufficient_statistic_gives_same_posterior() {
        let ys = [0.1, 0.9, 1.7, -0.2, 0.6];
        let mean = ys.iter().sum::<f64>() / 5.0;
        let model: SharedModel = Arc::new(GridNormal(1.0));
        let reduced: SharedModel = Arc::new(GridNormal(1.0 / 5.0));
        let opts = PosteriorOptions {
            domain: Some(Interval::new(-3.0, 4.0).unwrap()),
            ..Default::default()
        };
        let flat = PossibilityFn::uninformative();
        let a = posterior_with(&flat, &model, &ys, &opts).unwrap();
        let b = posterior_with(&flat, &reduced, &[mean], &opts).unwrap();
        assert!(sup_gap(&a, &b, -3.0, 4.0) < 1e-12);
    }

    #[test]
    fn posterior_is_normalised_for_either_likelihood_kind() {
        let prior = PossibilityFn::gamma(2.0, 1.0).unwrap();
        let ys = [0.5, 1.5, 0.8];
        let models: Vec<SharedModel> = vec![
            Arc::new(ExponentialRate),
            Arc::new(NormalLocation::probabilistic(0.5).unwrap()),
            Arc::new(GridNormal(0.5)),
        ];
        for m in &models {
            let p = posterior(&prior, m, &ys).unwrap();
            let d = p.working_domain().unwrap();
            let grid_max = UniformGrid::over(&d, 4001)
                .unwrap()
                .points()
                .into_iter()
                .map(|x| p.eval(x).unwrap())
                .fold(0.0, f64::max);
            let at_mode = p.eval(map_estimate(&p).unwrap().unique().unwrap()).unwrap();
            assert!(grid_max <= 1.0 + 1e-12, "{}", m.describe());
            assert!((at_mode - 1.0).abs() < 1e-6, "{} {at_mode}", m.describe());
        }
    }

    #[test]
    fn probabilistic_flat_prior_is_likelihood_ratio() {
        struct NumericExp;
        impl LikelihoodModel for NumericExp {
            fn kind(&self) -> LikelihoodKind {
                LikelihoodKind::Probabilistic
            }
            fn ln_likelihood(&self, t: f64, y: f64) -> f64 {
                ExponentialRate.ln_likelihood(t, y)
            }
            fn parameter_domain(&self) -> Interval {
                Interval::nonnegative()
            }
            fn search_domain(&self, ys: &[f64]) -> Result<Interval> {
                ExponentialRate.search_domain(ys)
            }
            fn describe(&self) -> String {
                "numeric-exp".into()
            }
        }
        let ys = [0.4, 1.1, 0.7, 2.0];
        let flat = PossibilityFn::indicator_interval(0.0, f64::INFINITY).unwrap();
        let closed = posterior(&flat, &(Arc::new(ExponentialRate) as SharedModel), &ys).unwrap();
        assert_eq!(closed.kind(), crate::Kind::Gamma);
        let numeric = posterior(&flat, &(Arc::new(NumericExp) as SharedModel), &ys).unwrap();
        let theta_hat = 4.0 / 4.2;
        let lr = |t: f64| {
            (ys.iter().map(|y| ExponentialRate.ln_likelihood(t, *y)).sum::<f64>()
                - ys.iter().map(|y| ExponentialRate.ln_likelihood(theta_hat, *y)).sum::<f64>())
            .exp()
        };
        for t in [0.2, 0.6, 0.95, 1.4, 2.5] {
            assert_relative_eq!(closed.eval(t).unwrap(), lr(t), max_relative = 1e-12);
            assert!((numeric.eval(t).unwrap() - lr(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn tempered_likelihood_tempers_the_posterior() {
        let ys = [0.2, -0.5, 1.1];
        let base = normal_model(0.8);
        let hot: SharedModel = Arc::new(Tempered::new(base.clone(), 2.5).unwrap());
        let flat = PossibilityFn::uninformative();
        let a = posterior(&flat, &hot, &ys).unwrap();
        let b = posterior(&flat, &base, &ys).unwrap().temper(2.5).unwrap();
        assert_eq!(a.params(), b.params());
    }

    #[test]
    fn prior_data_conflict_is_an_error() {
        let model: SharedModel = Arc::new(VacuousModel::new(Interval::new(0.0, 1.0).unwrap().into()).unwrap());
        let r = posterior(&PossibilityFn::normal(0.0, 1.0).unwrap(), &model, &[2.0]);
        assert_eq!(r.unwrap_err(), Error::DegeneratePosterior);
        let prior = PossibilityFn::indicator_interval(5.0, 6.0).unwrap();
        let bounded: SharedModel = Arc::new(LossModel::new(
            |t, y| if (y - t).abs() < 1.0 { (y - t).powi(2) } else { f64::INFINITY },
            Interval::new(-20.0, 20.0).unwrap(),
            Interval::new(-10.0, 10.0).unwrap(),
        ).unwrap().prenormalized());
        let r = posterior_with(
            &prior,
            &bounded,
            &[0.0],
            &PosteriorOptions { domain: Some(Interval::new(4.0, 7.0).unwrap()), ..Default::default() },
        );
        assert_eq!(r.unwrap_err(), Error::DegeneratePosterior);
    }

    #[test]
    fn marginal_likelihood_examples() {
        let vac: SharedModel = Arc::new(VacuousModel::new(IntervalSet::real()).unwrap());
        for y in [-3.0, 0.0, 17.5] {
            let m = marginal_likelihood(&PossibilityFn::normal(1.0, 2.0).unwrap(), &vac, &[y]).unwrap();
            assert_eq!(m, 1.0);
        }
        let nm = normal_model(1.0);
        assert_eq!(marginal_likelihood(&PossibilityFn::uninformative(), &nm, &[3.3]).unwrap(), 1.0);
        let m = marginal_likelihood(&PossibilityFn::point_mass(0.0).unwrap(), &nm, &[2.0]).unwrap();
        assert_relative_eq!(m, (-2.0f64).exp(), max_relative = 1e-15);
        let grid: SharedModel = Arc::new(GridNormal(1.0));
        let m = marginal_likelihood(&PossibilityFn::normal(0.0, 1.0).unwrap(), &grid, &[2.0]).unwrap();
        // sup of exp(-(2-t)^2/2 - t^2/2) at t = 1
        assert_relative_eq!(m, (-1.0f64).exp(), max_relative = 1e-9);
        let exp: SharedModel = Arc::new(ExponentialRate);
        assert!(marginal_likelihood(&PossibilityFn::gamma(1.0, 1.0).unwrap(), &exp, &[1.0]).is_err());
    }

    #[test]
    fn map_of_flat_posterior_is_sample_mean() {
        let ys = [2.0, 3.0, 2.5];
        let post = posterior(&PossibilityFn::uninformative(), &normal_model(1.0), &ys).unwrap();
        assert_eq!(map_estimate(&post).unwrap().unique().unwrap(), 2.5);
        let p = PossibilityFn::normal(2.5, 0.1).unwrap();
        assert_eq!(map_estimate(&p).unwrap().unique().unwrap(), 2.5);
    }

    #[test]
    fn credible_interval_of_normal() {
        let p = PossibilityFn::normal(1.0, 4.0).unwrap();
        let ci = credible_interval(&p, 0.05).unwrap();
        let h = 2.0 * (-2.0 * 0.05f64.ln()).sqrt();
        assert_relative_eq!(ci.lo, 1.0 - h, max_relative = 1e-14);
        assert_relative_eq!(ci.hi, 1.0 + h, max_relative = 1e-14);
        assert_relative_eq!(h / 2.0, 2.4477, max_relative = 1e-4);
        let narrow = credible_interval(&p, 1.0 - 1e-12).unwrap();
        assert!(narrow.hi - narrow.lo < 1e-5);
        let ind = PossibilityFn::indicator_interval(0.0, 1.0).unwrap();
        let ci = credible_interval(&ind, 0.3).unwrap();
        assert_eq!((ci.lo, ci.hi), (0.0, 1.0));
    }

    #[test]
    fn numeric_credible_interval_matches_closed_form() {
        let p = PossibilityFn::gamma(3.0, 2.0).unwrap();
        let ci = credible_interval(&p, 0.1).unwrap();
        for x in [ci.lo, ci.hi] {
            assert!((p.eval(x).unwrap() - 0.1).abs() < 1e-10);
        }
        assert!(!ci.lo_at_edge && !ci.hi_at_edge);
        let t = PossibilityFn::student_t(3.0, 1.0, 0.5).unwrap();
        let ci = credible_interval(&t, 0.2).unwrap();
        for x in [ci.lo, ci.hi] {
            assert_relative_eq!(t.eval(x).unwrap(), 0.2, max_relative = 1e-12);
        }
    }

    #[test]
    fn heavy_tail_stops_at_the_edge() {
        let tab = crate::Tabulated::new(
            UniformGrid::new(0.0, 4.0, 5).unwrap(),
            vec![0.1, 1.0, 0.5, 0.5, 0.5],
        )
        .unwrap();
        let ci = credible_interval(&PossibilityFn::tabulated(tab), 0.3).unwrap();
        assert!(ci.hi_at_edge && !ci.lo_at_edge);
        assert_eq!(ci.hi, 4.0);
        assert_relative_eq!(ci.lo, 1.0 - 0.7 / 0.9, max_relative = 1e-9);
    }

    #[test]
    fn multimodal_interval_is_an_error() {
        let p = PossibilityFn::indicator(IntervalSet::points(&[0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(credible_interval(&p, 0.5).unwrap_err(), Error::Multimodal);
        assert!(credible_interval(&PossibilityFn::normal(0.0, 1.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn report_serialises_infinities() {
        let r = InferenceReport::summarize(&PossibilityFn::normal(0.0, f64::INFINITY).unwrap(), 0.1);
        // a flat posterior has a set-valued mode but still summarises
        let r = r.unwrap();
        let js = r.to_json().unwrap();
        assert!(js.contains("\"inf\""), "{js}");
    }
}
