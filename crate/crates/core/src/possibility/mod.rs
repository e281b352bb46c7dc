//! Possibility functions, the parametric families and the moment operators.

mod moments;
mod record;
mod tabulated;

pub use moments::{numeric_mode_set, numeric_variance_ln, ExtendedVariance, ModeSet};
pub use record::{PossibilityRecord, RECORD_VERSION};
pub use tabulated::{Tabulated, NORMALIZATION_TOL, TRUNCATION};

use crate::error::{invalid, Error, Result};
use crate::grid::UniformGrid;
use crate::interval::{Interval, IntervalSet};
use crate::numerics::{global_sup_on, OptimizerConfig};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Relative tolerance for membership in the mode set.
pub const MODE_TOL: f64 = 1e-9;

/// Number of effective standard deviations spanned by default working
/// domains on each side of the mode.
pub const WORKING_SDS: f64 = 8.0;

/// Log-value threshold defining level-set working domains.
const WORKING_LN_LEVEL: f64 = -0.5 * WORKING_SDS * WORKING_SDS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Normal,
    Gamma,
    InverseGamma,
    Beta,
    ChiSquared,
    StudentT,
    Indicator,
    LossBased,
    Tabulated,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Normal => "normal",
            Kind::Gamma => "gamma",
            Kind::InverseGamma => "inverse-gamma",
            Kind::Beta => "beta",
            Kind::ChiSquared => "chi-squared",
            Kind::StudentT => "student-t",
            Kind::Indicator => "indicator",
            Kind::LossBased => "loss-based",
            Kind::Tabulated => "tabulated",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "normal" => Kind::Normal,
            "gamma" => Kind::Gamma,
            "inverse-gamma" | "invgamma" => Kind::InverseGamma,
            "beta" => Kind::Beta,
            "chi-squared" | "chisquared" | "chi2" => Kind::ChiSquared,
            "student-t" | "student" | "t" => Kind::StudentT,
            "indicator" => Kind::Indicator,
            "loss-based" => Kind::LossBased,
            "tabulated" => Kind::Tabulated,
            other => return invalid(format!("unknown family '{other}'")),
        })
    }
}

/// A loss `L` turned into `exp(-weight (L - offset))`, capped at 1.
#[derive(Clone)]
pub(crate) struct LossRepr {
    pub(crate) loss: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub(crate) offset: f64,
    pub(crate) weight: f64,
    pub(crate) domain: Interval,
    /// Argmax carried over from a source function, when known exactly.
    pub(crate) modes: Option<IntervalSet>,
}

#[derive(Clone)]
pub(crate) enum Repr {
    Normal { mean: f64, precision: f64 },
    Gamma { shape: f64, rate: f64 },
    InverseGamma { shape: f64, scale: f64 },
    Beta { alpha: f64, beta: f64 },
    ChiSquared { center: f64, scale: f64 },
    StudentT { dof: f64, loc: f64, scale: f64 },
    Indicator(IntervalSet),
    LossBased(LossRepr),
    Tabulated(Tabulated),
}

/// A function `f: R -> [0, 1]` with `sup f = 1`.
///
/// Immutable; cheap to clone.
#[derive(Clone)]
pub struct PossibilityFn {
    pub(crate) repr: Repr,
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_nan() {
        return Err(Error::NaN("family parameter"));
    }
    if v < 0.0 || v.is_infinite() {
        return invalid(format!("{name} must be finite and >= 0, got {v}"));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    nonneg(name, v)?;
    if v == 0.0 {
        return invalid(format!("{name} must be > 0"));
    }
    Ok(())
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_nan() {
        return Err(Error::NaN("family parameter"));
    }
    if !v.is_finite() {
        return invalid(format!("{name} must be finite, got {v}"));
    }
    Ok(())
}

/// `a ln(a x / a0)` style terms with `0 ln 0 = 0`.
fn xlogy(a: f64, y: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * y.ln()
    }
}

impl PossibilityFn {
    /// Normal with the given variance; `variance = 0` is a point mass and
    /// `variance = inf` the uninformative constant.
    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        finite("mean", mean)?;
        if variance.is_nan() {
            return Err(Error::NaN("family parameter"));
        }
        if variance < 0.0 {
            return invalid(format!("variance must be >= 0, got {variance}"));
        }
        Self::normal_precision(mean, 1.0 / variance)
    }

    /// Normal parametrised by precision `tau` in `[0, inf]`.
    pub fn normal_precision(mean: f64, precision: f64) -> Result<Self> {
        finite("mean", mean)?;
        if precision.is_nan() {
            return Err(Error::NaN("family parameter"));
        }
        if precision < 0.0 {
            return invalid(format!("precision must be >= 0, got {precision}"));
        }
        Ok(Self {
            repr: Repr::Normal { mean, precision },
        })
    }

    /// Gamma with shape and rate on `[0, inf)`. `(0, 0)` is the constant 1.
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        nonneg("shape", shape)?;
        nonneg("rate", rate)?;
        if shape > 0.0 && rate == 0.0 {
            return invalid("gamma with positive shape needs a positive rate");
        }
        Ok(Self {
            repr: Repr::Gamma { shape, rate },
        })
    }

    /// Inverse-gamma, the gamma function evaluated at `1/x`.
    pub fn inverse_gamma(shape: f64, scale: f64) -> Result<Self> {
        nonneg("shape", shape)?;
        nonneg("scale", scale)?;
        if shape == 0.0 && scale > 0.0 {
            return invalid("inverse-gamma with zero shape has no attained maximum");
        }
        if shape > 0.0 && scale == 0.0 {
            return invalid("inverse-gamma with positive shape needs a positive scale");
        }
        Ok(Self {
            repr: Repr::InverseGamma { shape, scale },
        })
    }

    /// Beta on `[0, 1]` with `alpha` successes and `beta` failures.
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        nonneg("alpha", alpha)?;
        nonneg("beta", beta)?;
        Ok(Self {
            repr: Repr::Beta { alpha, beta },
        })
    }

    /// `exp(-(sqrt(x) - sqrt(center))^2 / scale)` on `[0, inf)`.
    pub fn chi_squared(center: f64, scale: f64) -> Result<Self> {
        nonneg("center", center)?;
        positive("scale", scale)?;
        Ok(Self {
            repr: Repr::ChiSquared { center, scale },
        })
    }

    /// `(1 + (x - loc)^2 / (dof scale))^(-dof/2)`; `dof = 0` is constant 1.
    pub fn student_t(dof: f64, loc: f64, scale: f64) -> Result<Self> {
        nonneg("dof", dof)?;
        finite("loc", loc)?;
        positive("scale", scale)?;
        Ok(Self {
            repr: Repr::StudentT { dof, loc, scale },
        })
    }

    pub fn indicator(set: IntervalSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::Empty("indicator set"));
        }
        Ok(Self {
            repr: Repr::Indicator(set),
        })
    }

    pub fn indicator_interval(lo: f64, hi: f64) -> Result<Self> {
        Self::indicator(Interval::new(lo, hi)?.into())
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::indicator(Interval::point(x)?.into())
    }

    pub fn uninformative() -> Self {
        Self {
            repr: Repr::Indicator(IntervalSet::real()),
        }
    }

    pub fn tabulated(t: Tabulated) -> Self {
        Self {
            repr: Repr::Tabulated(t),
        }
    }

    /// Builds `kind` from a flat parameter list in the record order:
    /// normal `(mean, variance)`, gamma and beta `(alpha, beta)`,
    /// inverse-gamma `(shape, scale)`, chi-squared `(center, scale)`,
    /// student-t `(dof, loc, scale)`, indicator `(lo1, hi1, lo2, hi2, ...)`.
    pub fn from_params(kind: Kind, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() != n {
                return invalid(format!(
                    "{kind} takes {n} parameters, got {}",
                    params.len()
                ));
            }
            Ok(())
        };
        match kind {
            Kind::Normal => {
                want(2)?;
                Self::normal(params[0], params[1])
            }
            Kind::Gamma => {
                want(2)?;
                Self::gamma(params[0], params[1])
            }
            Kind::InverseGamma => {
                want(2)?;
                Self::inverse_gamma(params[0], params[1])
            }
            Kind::Beta => {
                want(2)?;
                Self::beta(params[0], params[1])
            }
            Kind::ChiSquared => {
                want(2)?;
                Self::chi_squared(params[0], params[1])
            }
            Kind::StudentT => {
                want(3)?;
                Self::student_t(params[0], params[1], params[2])
            }
            Kind::Indicator => {
                if params.is_empty() || !params.len().is_multiple_of(2) {
                    return Err(Error::MalformedSet(
                        "indicator needs an even, non-zero number of bounds".into(),
                    ));
                }
                let parts = params
                    .chunks(2)
                    .map(|c| Interval::new(c[0], c[1]))
                    .collect::<Result<Vec<_>>>()?;
                Self::indicator(IntervalSet::new(parts))
            }
            Kind::LossBased | Kind::Tabulated => {
                invalid(format!("{kind} cannot be built from parameters"))
            }
        }
    }

    pub fn kind(&self) -> Kind {
        match &self.repr {
            Repr::Normal { .. } => Kind::Normal,
            Repr::Gamma { .. } => Kind::Gamma,
            Repr::InverseGamma { .. } => Kind::InverseGamma,
            Repr::Beta { .. } => Kind::Beta,
            Repr::ChiSquared { .. } => Kind::ChiSquared,
            Repr::StudentT { .. } => Kind::StudentT,
            Repr::Indicator(_) => Kind::Indicator,
            Repr::LossBased(_) => Kind::LossBased,
            Repr::Tabulated(_) => Kind::Tabulated,
        }
    }

    /// Parameters in the order accepted by [`PossibilityFn::from_params`].
    /// Empty for loss-based and tabulated functions.
    pub fn params(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Normal { mean, precision } => vec![*mean, 1.0 / precision],
            Repr::Gamma { shape, rate } => vec![*shape, *rate],
            Repr::InverseGamma { shape, scale } => vec![*shape, *scale],
            Repr::Beta { alpha, beta } => vec![*alpha, *beta],
            Repr::ChiSquared { center, scale } => vec![*center, *scale],
            Repr::StudentT { dof, loc, scale } => vec![*dof, *loc, *scale],
            Repr::Indicator(s) => s.components().iter().flat_map(|c| [c.lo(), c.hi()]).collect(),
            Repr::LossBased(_) | Repr::Tabulated(_) => Vec::new(),
        }
    }

    /// The set outside which the function vanishes identically.
    pub fn support(&self) -> Interval {
        match &self.repr {
            Repr::Normal { .. } | Repr::StudentT { .. } => Interval::REAL,
            Repr::Gamma { .. } | Repr::InverseGamma { .. } | Repr::ChiSquared { .. } => {
                Interval::nonnegative()
            }
            Repr::Beta { .. } => Interval::new(0.0, 1.0).expect("unit interval"),
            Repr::Indicator(s) => s.hull().expect("non-empty indicator"),
            Repr::LossBased(l) => l.domain,
            Repr::Tabulated(t) => t.grid().interval(),
        }
    }

    pub fn as_tabulated(&self) -> Option<&Tabulated> {
        match &self.repr {
            Repr::Tabulated(t) => Some(t),
            _ => None,
        }
    }

    pub fn indicator_set(&self) -> Option<&IntervalSet> {
        match &self.repr {
            Repr::Indicator(s) => Some(s),
            _ => None,
        }
    }

    /// The location of a point mass, if this is one.
    pub fn as_point_mass(&self) -> Option<f64> {
        match &self.repr {
            Repr::Normal { mean, precision } if precision.is_infinite() => Some(*mean),
            Repr::Indicator(s) if s.len() == 1 && s.components()[0].is_point() => {
                Some(s.components()[0].lo())
            }
            _ => None,
        }
    }

    /// True when the function is identically 1 on its support.
    pub fn is_flat(&self) -> bool {
        match &self.repr {
            Repr::Normal { precision, .. } => *precision == 0.0,
            Repr::Gamma { shape, rate } => *shape == 0.0 && *rate == 0.0,
            Repr::InverseGamma { shape, .. } => *shape == 0.0,
            Repr::Beta { alpha, beta } => *alpha == 0.0 && *beta == 0.0,
            Repr::StudentT { dof, .. } => *dof == 0.0,
            Repr::Indicator(s) => s.len() == 1,
            _ => false,
        }
    }

    /// `ln f(x)` without input validation; `-inf` where `f` vanishes.
    pub(crate) fn ln_value(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Normal { mean, precision } => {
                let d = x - mean;
                if precision.is_infinite() {
                    if d == 0.0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else if *precision == 0.0 {
                    0.0
                } else {
                    -0.5 * precision * d * d
                }
            }
            Repr::Gamma { shape, rate } => gamma_ln(*shape, *rate, x),
            Repr::InverseGamma { shape, scale } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else if *shape == 0.0 {
                    0.0
                } else if x == 0.0 || x.is_infinite() {
                    f64::NEG_INFINITY
                } else {
                    gamma_ln(*shape, *scale, 1.0 / x)
                }
            }
            Repr::Beta { alpha, beta } => {
                if !(0.0..=1.0).contains(&x) {
                    return f64::NEG_INFINITY;
                }
                let s = alpha + beta;
                if s == 0.0 {
                    return 0.0;
                }
                let a = xlogy(*alpha, x * s / alpha);
                let b = xlogy(*beta, (1.0 - x) * s / beta);
                (a + b).min(0.0)
            }
            Repr::ChiSquared { center, scale } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let d = x.sqrt() - center.sqrt();
                    -d * d / scale
                }
            }
            Repr::StudentT { dof, loc, scale } => {
                if *dof == 0.0 {
                    0.0
                } else {
                    let d = x - loc;
                    -0.5 * dof * (d * d / (dof * scale)).ln_1p()
                }
            }
            Repr::Indicator(s) => {
                if s.contains(x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Repr::LossBased(l) => {
                if !l.domain.contains(x) {
                    f64::NEG_INFINITY
                } else {
                    let v = -l.weight * ((l.loss)(x) - l.offset);
                    if v.is_nan() {
                        f64::NEG_INFINITY
                    } else {
                        v.min(0.0)
                    }
                }
            }
            Repr::Tabulated(t) => t.eval(x).ln(),
        }
    }

    /// `f(x)` without input validation.
    pub(crate) fn value(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Tabulated(t) => t.eval(x),
            _ => self.ln_value(x).exp(),
        }
    }

    /// Evaluates `f(x)`; zero outside the support.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::NaN("evaluation point"));
        }
        Ok(self.value(x))
    }

    /// Evaluates `ln f(x)`.
    pub fn ln_eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::NaN("evaluation point"));
        }
        Ok(self.ln_value(x))
    }

    /// `sup_{x in set} f(x)`, with `sup {} = 0`.
    pub fn credibility(&self, set: &IntervalSet) -> Result<f64> {
        let mut best: f64 = 0.0;
        for c in set.components() {
            best = best.max(self.sup_on(c)?);
            if best >= 1.0 {
                break;
            }
        }
        Ok(best)
    }

    fn sup_on(&self, c: &Interval) -> Result<f64> {
        let Some(c) = c.intersect(&self.support()) else {
            return Ok(0.0);
        };
        if c.is_point() {
            return Ok(self.value(c.lo()));
        }
        match &self.repr {
            Repr::Indicator(s) => Ok(if s.intersect_interval(&c).is_empty() {
                0.0
            } else {
                1.0
            }),
            Repr::Tabulated(t) => Ok(t.sup_on(c.lo(), c.hi())),
            Repr::LossBased(_) => {
                let r = global_sup_on(|x| self.ln_value(x), c, &OptimizerConfig::default())?;
                Ok(r.value.exp().max(self.value(c.lo())).max(self.value(c.hi())))
            }
            _ => {
                // Closed-form families are non-increasing away from the mode set.
                let modes = self.expected_value()?;
                let hull = modes.hull();
                if c.intersect(&hull).is_some() {
                    Ok(1.0)
                } else if c.hi() < hull.lo() {
                    Ok(self.value(c.hi()))
                } else {
                    Ok(self.value(c.lo()))
                }
            }
        }
    }

    /// Pointwise power `f^b`, `b > 0`.
    pub fn temper(&self, b: f64) -> Result<Self> {
        if b.is_nan() {
            return Err(Error::NaN("tempering power"));
        }
        if !(b > 0.0) || b.is_infinite() {
            return invalid(format!("tempering power must be positive and finite, got {b}"));
        }
        if b == 1.0 {
            return Ok(self.clone());
        }
        let repr = match &self.repr {
            Repr::Normal { mean, precision } => Repr::Normal {
                mean: *mean,
                precision: precision * b,
            },
            Repr::Gamma { shape, rate } => Repr::Gamma {
                shape: shape * b,
                rate: rate * b,
            },
            Repr::InverseGamma { shape, scale } => Repr::InverseGamma {
                shape: shape * b,
                scale: scale * b,
            },
            Repr::Beta { alpha, beta } => Repr::Beta {
                alpha: alpha * b,
                beta: beta * b,
            },
            Repr::ChiSquared { center, scale } => Repr::ChiSquared {
                center: *center,
                scale: scale / b,
            },
            Repr::StudentT { dof, loc, scale } => Repr::StudentT {
                dof: dof * b,
                loc: *loc,
                scale: scale / b,
            },
            Repr::Indicator(s) => Repr::Indicator(s.clone()),
            Repr::LossBased(l) => Repr::LossBased(LossRepr {
                weight: l.weight * b,
                ..l.clone()
            }),
            Repr::Tabulated(t) => Repr::Tabulated(t.powf(b)),
        };
        Ok(Self { repr })
    }

    /// Bounded interval carrying all but a negligible part of the function:
    /// mode +- 8 standard deviations, or the level set `ln f >= -32` for the
    /// skewed families.
    pub fn working_domain(&self) -> Result<Interval> {
        if self.is_flat() {
            let s = self.support();
            return if s.is_bounded() {
                Ok(s)
            } else {
                Err(Error::UnboundedDomain(format!(
                    "{} is flat on {s}; supply a domain",
                    self.kind()
                )))
            };
        }
        match &self.repr {
            Repr::Normal { mean, precision } => {
                if precision.is_infinite() {
                    return Interval::point(*mean);
                }
                let h = WORKING_SDS / precision.sqrt();
                Interval::new(mean - h, mean + h)
            }
            Repr::StudentT { loc, scale, .. } => {
                let h = WORKING_SDS * scale.sqrt();
                Interval::new(loc - h, loc + h)
            }
            Repr::InverseGamma { shape, scale } => {
                let mode = scale / shape;
                let h = WORKING_SDS * (scale * scale / shape.powi(3)).sqrt();
                Interval::new((mode - h).max(0.0), mode + h)
            }
            Repr::Gamma { .. } | Repr::Beta { .. } | Repr::ChiSquared { .. } => {
                self.level_set_domain()
            }
            Repr::Indicator(s) => {
                let h = s.hull().expect("non-empty indicator");
                if h.is_bounded() {
                    Ok(h)
                } else {
                    Err(Error::UnboundedDomain(format!("indicator of {s}")))
                }
            }
            Repr::LossBased(l) => Ok(l.domain),
            Repr::Tabulated(t) => Ok(t.grid().interval()),
        }
    }

    fn level_set_domain(&self) -> Result<Interval> {
        let mode = self.expected_value()?.unique()?;
        let support = self.support();
        let g = |x: f64| self.ln_value(x) - WORKING_LN_LEVEL;
        let lo = if mode <= support.lo() || g(support.lo()) >= 0.0 {
            support.lo()
        } else {
            crate::numerics::bisect(g, support.lo(), mode, 1e-14 * mode.abs().max(1.0))?
        };
        let hi = if support.hi().is_finite() && g(support.hi()) >= 0.0 {
            support.hi()
        } else {
            let mut step = mode.abs().max(1.0);
            let mut hi = mode + step;
            while g(hi) > 0.0 {
                step *= 2.0;
                hi = mode + step;
                if !hi.is_finite() {
                    return Err(Error::UnboundedDomain("level set".into()));
                }
            }
            crate::numerics::bisect(g, mode, hi, 1e-14 * hi.abs().max(1.0))?
        };
        Interval::new(lo, hi)
    }

    /// Samples `f` on `grid`.
    pub fn sample(&self, grid: &UniformGrid) -> Vec<f64> {
        grid.points().into_iter().map(|x| self.value(x)).collect()
    }

    /// Tabulates on `n` points over `domain` (or the working domain).
    pub fn tabulate(&self, domain: Option<Interval>, n: usize) -> Result<Tabulated> {
        let d = match domain {
            Some(d) => d,
            None => self.working_domain()?,
        };
        let grid = UniformGrid::over(&d, n)?;
        Tabulated::normalized(grid, self.sample(&grid))
    }

    /// `exp(-(L - min L))` over a bounded domain. A constant loss gives the
    /// indicator of the domain.
    pub fn from_loss(
        loss: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: Interval,
        config: &OptimizerConfig,
    ) -> Result<Self> {
        if !domain.is_bounded() {
            return Err(Error::UnboundedDomain(domain.to_string()));
        }
        let grid_n = config.grid_points.max(3);
        let probe = if domain.is_point() {
            vec![loss(domain.lo())]
        } else {
            UniformGrid::over(&domain, grid_n)?
                .points()
                .into_iter()
                .map(&loss)
                .collect()
        };
        if probe.iter().any(|v| v.is_nan()) {
            return Err(Error::NaN("loss"));
        }
        if probe.contains(&f64::NEG_INFINITY) {
            return Err(Error::UnboundedLoss);
        }
        let min_grid = probe.iter().copied().fold(f64::INFINITY, f64::min);
        if !min_grid.is_finite() {
            return invalid("loss is infinite everywhere on the domain");
        }
        if probe.iter().all(|&v| v == min_grid) {
            return Self::indicator(domain.into());
        }
        let r = global_sup_on(|x| -loss(x), domain, config)?;
        if r.value == f64::INFINITY {
            return Err(Error::UnboundedLoss);
        }
        let offset = (-r.value).min(min_grid);
        Ok(Self {
            repr: Repr::LossBased(LossRepr {
                loss: Arc::new(loss),
                offset,
                weight: 1.0,
                domain,
                modes: None,
            }),
        })
    }

    /// Loss-based function with a known minimum value `offset`.
    pub(crate) fn from_loss_with_offset(
        loss: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        offset: f64,
        domain: Interval,
    ) -> Self {
        Self::from_loss_with_modes(loss, offset, domain, None)
    }

    pub(crate) fn from_loss_with_modes(
        loss: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        offset: f64,
        domain: Interval,
        modes: Option<IntervalSet>,
    ) -> Self {
        Self {
            repr: Repr::LossBased(LossRepr {
                loss,
                offset,
                weight: 1.0,
                domain,
                modes,
            }),
        }
    }
}

fn gamma_ln(shape: f64, rate: f64, x: f64) -> f64 {
    if x < 0.0 || x.is_nan() {
        return f64::NEG_INFINITY;
    }
    if shape == 0.0 {
        return if rate == 0.0 { 0.0 } else { -rate * x };
    }
    if x == 0.0 || x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    // shape (ln u + 1 - u) with u = rate x / shape = 1 + d
    let d = (rate * x - shape) / shape;
    (shape * (d.ln_1p() - d)).min(0.0)
}

impl fmt::Debug for PossibilityFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::LossBased(l) => f
                .debug_struct("PossibilityFn")
                .field("kind", &Kind::LossBased)
                .field("offset", &l.offset)
                .field("weight", &l.weight)
                .field("domain", &l.domain)
                .finish(),
            Repr::Tabulated(t) => f
                .debug_struct("PossibilityFn")
                .field("kind", &Kind::Tabulated)
                .field("grid", t.grid())
                .finish(),
            Repr::Indicator(s) => f
                .debug_struct("PossibilityFn")
                .field("kind", &Kind::Indicator)
                .field("set", s)
                .finish(),
            _ => f
                .debug_struct("PossibilityFn")
                .field("kind", &self.kind())
                .field("params", &self.params())
                .finish(),
        }
    }
}

impl fmt::Display for PossibilityFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Indicator(s) => write!(f, "indicator({s})"),
            Repr::Tabulated(t) => write!(f, "tabulated({} points)", t.grid().len()),
            Repr::LossBased(l) => write!(f, "loss-based(on {})", l.domain),
            _ => {
                let p: Vec<String> = self.params().iter().map(|v| v.to_string()).collect();
                write!(f, "{}({})", self.kind(), p.join(", "))
            }
        }
    }
}
