//! Transforms of uncertain variables: change of variable, independent
//! products, marginalisation, linear combinations and variance pushforward.

use crate::error::{invalid, Error, Result};
use crate::grid::UniformGrid;
use crate::interval::{Interval, IntervalSet};
use crate::numerics::{bisect, global_sup_on, OptimizerConfig};
use crate::possibility::{ExtendedVariance, Kind, PossibilityFn, Repr, Tabulated};
use log::warn;
use rayon::prelude::*;
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Points in the parameter scan used to locate preimages of a target value.
const PREIMAGE_SCAN_POINTS: usize = 4001;

/// A map applied to an uncertain variable.
#[derive(Clone)]
pub enum Transform {
    /// `x -> scale x + shift`.
    Affine { scale: f64, shift: f64 },
    /// `x -> 1 / x`.
    Reciprocal,
    /// A strictly monotone bijection with its inverse.
    Monotone { forward: RealFn, inverse: RealFn },
    /// Any continuous map; preimages are located numerically.
    General(RealFn),
}

impl Transform {
    pub fn affine(scale: f64, shift: f64) -> Self {
        Transform::Affine { scale, shift }
    }

    pub fn monotone(
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Transform::Monotone {
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
        }
    }

    pub fn general(map: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Transform::General(Arc::new(map))
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Transform::Affine { scale, shift } => scale * x + shift,
            Transform::Reciprocal => 1.0 / x,
            Transform::Monotone { forward, .. } => forward(x),
            Transform::General(f) => f(x),
        }
    }
}

/// Possibility function of `zeta(x)` when `x` is described by `pf`:
/// `f(y) = sup { pf(x) : zeta(x) = y }`, zero where the preimage is empty.
///
/// Closed forms are used where the family is preserved; declared monotone
/// maps use `pf(zeta^-1(y))` directly. The general path locates every
/// preimage by a sign-change scan over the working domain of `pf` and
/// bisection, and needs a bounded `target_domain`.
pub fn pushforward(
    pf: &PossibilityFn,
    zeta: &Transform,
    target_domain: Option<Interval>,
) -> Result<PossibilityFn> {
    match zeta {
        Transform::Affine { scale, shift } => affine_pushforward(pf, *scale, *shift, target_domain),
        Transform::Reciprocal => match &pf.repr {
            Repr::Gamma { shape, rate } if *shape > 0.0 => PossibilityFn::inverse_gamma(*shape, *rate),
            Repr::InverseGamma { shape, scale } if *shape > 0.0 => PossibilityFn::gamma(*shape, *scale),
            _ => {
                let map: RealFn = Arc::new(|x: f64| 1.0 / x);
                general_pushforward(pf, map, target_domain)
            }
        },
        Transform::Monotone { forward, inverse } => {
            monotone_pushforward(pf, forward.clone(), inverse.clone(), target_domain)
        }
        Transform::General(map) => general_pushforward(pf, map.clone(), target_domain),
    }
}

fn affine_pushforward(
    pf: &PossibilityFn,
    a: f64,
    b: f64,
    target_domain: Option<Interval>,
) -> Result<PossibilityFn> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::NaN("affine coefficients"));
    }
    if !a.is_finite() || !b.is_finite() {
        return invalid("affine coefficients must be finite");
    }
    if a == 0.0 {
        return PossibilityFn::point_mass(b);
    }
    match &pf.repr {
        Repr::Normal { mean, precision } => {
            PossibilityFn::normal_precision(a * mean + b, precision / (a * a))
        }
        Repr::StudentT { dof, loc, scale } => PossibilityFn::student_t(*dof, a * loc + b, a * a * scale),
        Repr::Indicator(s) => PossibilityFn::indicator(s.affine(a, b)),
        Repr::ChiSquared { center, scale } if a > 0.0 && b == 0.0 => {
            PossibilityFn::chi_squared(a * center, a * scale)
        }
        Repr::Gamma { shape, rate } if a > 0.0 && b == 0.0 && *shape > 0.0 => {
            PossibilityFn::gamma(*shape, rate / a)
        }
        Repr::InverseGamma { shape, scale } if a > 0.0 && b == 0.0 && *shape > 0.0 => {
            PossibilityFn::inverse_gamma(*shape, a * scale)
        }
        _ => {
            let fwd: RealFn = Arc::new(move |x| a * x + b);
            let inv: RealFn = Arc::new(move |y| (y - b) / a);
            monotone_pushforward(pf, fwd, inv, target_domain)
        }
    }
}

fn source_domain(pf: &PossibilityFn) -> Result<Interval> {
    match pf.working_domain() {
        Ok(d) => Ok(d),
        Err(_) if pf.support().is_bounded() => Ok(pf.support()),
        Err(e) => Err(e),
    }
}

fn monotone_pushforward(
    pf: &PossibilityFn,
    forward: RealFn,
    inverse: RealFn,
    target_domain: Option<Interval>,
) -> Result<PossibilityFn> {
    let domain = match target_domain {
        Some(d) => d,
        None => {
            let s = source_domain(pf)?;
            let (p, q) = (forward(s.lo()), forward(s.hi()));
            Interval::new(p.min(q), p.max(q))?
        }
    };
    if !domain.is_bounded() {
        return Err(Error::UnboundedDomain(domain.to_string()));
    }
    // a monotone map carries the argmax exactly, which a grid scan can miss
    // when the map squeezes the mode into a tiny cell
    let modes = pf.expected_value().ok().and_then(|m| {
        let parts: Option<Vec<Interval>> = m
            .components()
            .iter()
            .map(|c| {
                let (p, q) = (forward(c.lo()), forward(c.hi()));
                Interval::new(p.min(q), p.max(q)).ok().filter(|i| domain.contains_interval(i))
            })
            .collect();
        parts.map(IntervalSet::new)
    });
    let src = pf.clone();
    let loss = move |y: f64| -src.ln_value(inverse(y));
    Ok(PossibilityFn::from_loss_with_modes(Arc::new(loss), 0.0, domain, modes))
}

/// Preimage scan of a continuous map over a fixed parameter grid.
struct PreimageScan {
    map: RealFn,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PreimageScan {
    fn new(map: RealFn, domain: Interval, n: usize) -> Result<Self> {
        let xs = UniformGrid::over(&domain, n)?.points();
        let ys: Vec<f64> = xs.iter().map(|&x| map(x)).collect();
        if ys.iter().any(|y| y.is_nan()) {
            return Err(Error::NaN("transform"));
        }
        Ok(Self { map, xs, ys })
    }

    /// Best `ln pf` over the scanned preimage of `y`.
    fn sup_ln(&self, pf: &PossibilityFn, y: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut consider = |x: f64| {
            let v = pf.ln_value(x);
            if v > best {
                best = v;
            }
        };
        for i in 0..self.xs.len() {
            let d = self.ys[i] - y;
            if d == 0.0 {
                consider(self.xs[i]);
                continue;
            }
            if i + 1 < self.xs.len() {
                let e = self.ys[i + 1] - y;
                if e != 0.0 && d.signum() != e.signum() {
                    let g = |x: f64| (self.map)(x) - y;
                    if let Ok(r) = bisect(g, self.xs[i], self.xs[i + 1], 0.0) {
                        consider(r);
                    }
                }
            }
        }
        best
    }
}

fn general_pushforward(
    pf: &PossibilityFn,
    map: RealFn,
    target_domain: Option<Interval>,
) -> Result<PossibilityFn> {
    let domain = target_domain
        .ok_or_else(|| Error::UnboundedDomain("general pushforward needs a target domain".into()))?;
    if !domain.is_bounded() {
        return Err(Error::UnboundedDomain(domain.to_string()));
    }
    if let Some(x) = pf.as_point_mass() {
        return PossibilityFn::point_mass(map(x));
    }
    let src_domain = source_domain(pf)?;
    let scan = PreimageScan::new(map, src_domain, PREIMAGE_SCAN_POINTS)?;
    let src = pf.clone();
    let loss = move |y: f64| -scan.sup_ln(&src, y);
    Ok(PossibilityFn::from_loss_with_offset(Arc::new(loss), 0.0, domain))
}

/// A possibility function of two variables.
#[derive(Debug, Clone)]
pub enum JointPossibilityFn {
    /// `f(x, y) = f1(x) f2(y)`.
    Product(PossibilityFn, PossibilityFn),
    /// Values on a rectangular grid, `values[i * ny + j] = f(x_i, y_j)`.
    Gridded {
        gx: UniformGrid,
        gy: UniformGrid,
        values: Vec<f64>,
    },
}

/// Joint function of two independently described variables.
pub fn independent_product(pf1: &PossibilityFn, pf2: &PossibilityFn) -> JointPossibilityFn {
    JointPossibilityFn::Product(pf1.clone(), pf2.clone())
}

impl JointPossibilityFn {
    /// Samples `f` on a grid and rescales to unit maximum.
    pub fn from_fn(
        gx: UniformGrid,
        gy: UniformGrid,
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Result<Self> {
        let xs = gx.points();
        let ys = gy.points();
        let mut values: Vec<f64> = xs
            .par_iter()
            .flat_map_iter(|&x| ys.iter().map(move |&y| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return invalid("joint values must be non-negative numbers");
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return invalid("joint function vanishes on the grid");
        }
        if (max - 1.0).abs() > crate::possibility::NORMALIZATION_TOL {
            warn!("renormalising joint function with maximum {max}");
        }
        if max != 1.0 {
            for v in &mut values {
                *v /= max;
            }
        }
        Ok(Self::Gridded { gx, gy, values })
    }

    /// Product of two factors sampled on the given grids. Each value is the
    /// plain product `f1(x_i) * f2(y_j)`.
    pub fn grid_product(
        pf1: &PossibilityFn,
        pf2: &PossibilityFn,
        gx: UniformGrid,
        gy: UniformGrid,
    ) -> Self {
        let a = pf1.sample(&gx);
        let b = pf2.sample(&gy);
        let values = a.iter().flat_map(|&u| b.iter().map(move |&v| u * v)).collect();
        Self::Gridded { gx, gy, values }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if x.is_nan() || y.is_nan() {
            return Err(Error::NaN("evaluation point"));
        }
        Ok(match self {
            Self::Product(a, b) => a.value(x) * b.value(y),
            Self::Gridded { gx, gy, values } => {
                match (exact_index(gx, x), exact_index(gy, y)) {
                    (Some(i), Some(j)) => values[i * gy.len() + j],
                    _ => bilinear(gx, gy, values, x, y),
                }
            }
        })
    }

    pub fn is_product(&self) -> bool {
        matches!(self, Self::Product(..))
    }

    /// Numeric maximum over the stored grid (product form: 1).
    pub fn grid_sup(&self) -> f64 {
        match self {
            Self::Product(..) => 1.0,
            Self::Gridded { values, .. } => values.iter().copied().fold(0.0, f64::max),
        }
    }
}

fn exact_index(g: &UniformGrid, x: f64) -> Option<usize> {
    let i = g.nearest_index(x)?;
    (g.point(i) == x).then_some(i)
}

fn bilinear(gx: &UniformGrid, gy: &UniformGrid, values: &[f64], x: f64, y: f64) -> f64 {
    if x < gx.lo() || x > gx.hi() || y < gy.lo() || y > gy.hi() {
        return 0.0;
    }
    let cell = |g: &UniformGrid, v: f64| {
        let i = (((v - g.lo()) / g.spacing()).floor() as usize).min(g.len() - 2);
        (i, ((v - g.point(i)) / g.spacing()).clamp(0.0, 1.0))
    };
    let (i, s) = cell(gx, x);
    let (j, t) = cell(gy, y);
    let ny = gy.len();
    let v = |a: usize, b: usize| values[a * ny + b];
    (1.0 - s) * ((1.0 - t) * v(i, j) + t * v(i, j + 1)) + s * ((1.0 - t) * v(i + 1, j) + t * v(i + 1, j + 1))
}

/// Which variable of a joint function to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    First,
    Second,
}

/// `f(x) = sup_y f(x, y)` (or over `x` for [`Axis::Second`]).
///
/// Product-form joints return the factor itself. Gridded joints are
/// reduced column by column and renormalised, with a warning, only if the
/// maximum is off by more than `1e-6`.
pub fn marginalize(joint: &JointPossibilityFn, axis: Axis) -> Result<PossibilityFn> {
    match joint {
        JointPossibilityFn::Product(a, b) => Ok(match axis {
            Axis::First => a.clone(),
            Axis::Second => b.clone(),
        }),
        JointPossibilityFn::Gridded { gx, gy, values } => {
            let (nx, ny) = (gx.len(), gy.len());
            let out: Vec<f64> = match axis {
                Axis::First => (0..nx)
                    .map(|i| values[i * ny..(i + 1) * ny].iter().copied().fold(0.0, f64::max))
                    .collect(),
                Axis::Second => (0..ny)
                    .map(|j| (0..nx).map(|i| values[i * ny + j]).fold(0.0, f64::max))
                    .collect(),
            };
            let grid = if axis == Axis::First { *gx } else { *gy };
            Ok(PossibilityFn::tabulated(Tabulated::normalized(grid, out)?))
        }
    }
}

/// Possibility function of `alpha x + y` for `(x, y)` described by `joint`:
/// `f(z) = sup { f(x, y) : alpha x + y = z }`.
///
/// Product forms use closed forms where available (normals add variances,
/// point masses shift, indicators give Minkowski sums) and
/// otherwise maximise along each constraint line. Gridded joints credit
/// every grid pair to the target node nearest `alpha x_i + y_j`.
pub fn linear_pushforward(
    joint: &JointPossibilityFn,
    alpha: f64,
    config: &OptimizerConfig,
) -> Result<PossibilityFn> {
    if alpha.is_nan() {
        return Err(Error::NaN("linear coefficient"));
    }
    if alpha == 0.0 || !alpha.is_finite() {
        return invalid(format!("linear coefficient must be finite and non-zero, got {alpha}"));
    }
    match joint {
        JointPossibilityFn::Product(a, b) => product_linear(a, b, alpha, config),
        JointPossibilityFn::Gridded { gx, gy, values } => {
            let lo_hi = [alpha * gx.lo() + gy.lo(), alpha * gx.hi() + gy.hi(),
                alpha * gx.lo() + gy.hi(), alpha * gx.hi() + gy.lo()];
            let lo = lo_hi.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = lo_hi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let target = UniformGrid::new(lo, hi, config.grid_points)?;
            let out = grid_linear_sup(gx, gy, values, alpha, &target);
            Ok(PossibilityFn::tabulated(Tabulated::normalized(target, out)?))
        }
    }
}

/// Exhaustive grid maximisation behind the gridded linear pushforward.
pub fn grid_linear_sup(
    gx: &UniformGrid,
    gy: &UniformGrid,
    values: &[f64],
    alpha: f64,
    target: &UniformGrid,
) -> Vec<f64> {
    let xs = gx.points();
    let ys = gy.points();
    let ny = ys.len();
    let mut out = vec![0.0; target.len()];
    for (i, &x) in xs.iter().enumerate() {
        let acc = 0.0 + alpha * x;
        for (j, &y) in ys.iter().enumerate() {
            let v = values[i * ny + j];
            if v <= 0.0 {
                continue;
            }
            if let Some(k) = target.nearest_index(acc + 1.0 * y) {
                if v > out[k] {
                    out[k] = v;
                }
            }
        }
    }
    out
}

fn product_linear(
    a: &PossibilityFn,
    b: &PossibilityFn,
    alpha: f64,
    config: &OptimizerConfig,
) -> Result<PossibilityFn> {
    if let Some(y0) = b.as_point_mass() {
        return pushforward(a, &Transform::affine(alpha, y0), None);
    }
    if let Some(x0) = a.as_point_mass() {
        return pushforward(b, &Transform::affine(1.0, alpha * x0), None);
    }
    match (&a.repr, &b.repr) {
        (
            Repr::Normal {
                mean: m1,
                precision: t1,
            },
            Repr::Normal {
                mean: m2,
                precision: t2,
            },
        ) => {
            // Quadratic exponents inf-convolve: variances add.
            let var = alpha * alpha / t1 + 1.0 / t2;
            return PossibilityFn::normal(alpha * m1 + m2, var);
        }
        (Repr::Indicator(s1), Repr::Indicator(s2)) => {
            return PossibilityFn::indicator(s1.affine(alpha, 0.0).minkowski_sum(s2));
        }
        _ => {}
    }
    if a.is_flat() || b.is_flat() {
        let sa = a.expected_value()?.set().affine(alpha, 0.0);
        let sum: IntervalSet = sa.minkowski_sum(b.expected_value()?.set());
        if sum.len() == 1 && sum.components()[0] == Interval::REAL {
            return Ok(PossibilityFn::uninformative());
        }
    }
    let da = source_domain(a)?;
    let db = source_domain(b)?;
    let ends = [
        alpha * da.lo() + db.lo(),
        alpha * da.hi() + db.hi(),
        alpha * da.lo() + db.hi(),
        alpha * da.hi() + db.lo(),
    ];
    let lo = ends.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ends.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let target = UniformGrid::new(lo, hi, config.grid_points)?;
    let cfg = OptimizerConfig {
        domain: None,
        ..*config
    };
    let zs = target.points();
    let out: Vec<f64> = zs
        .par_iter()
        .map(|&z| {
            // alpha x + y = z with y in db  <=>  x in (z - db) / alpha
            let (p, q) = ((z - db.hi()) / alpha, (z - db.lo()) / alpha);
            let line = Interval::new(p.min(q), p.max(q)).ok().and_then(|l| l.intersect(&da));
            match line {
                None => Ok(0.0),
                Some(l) => global_sup_on(|x| a.ln_value(x) + b.ln_value(z - alpha * x), l, &cfg)
                    .map(|r| r.value.exp()),
            }
        })
        .collect::<Result<_>>()?;
    Ok(PossibilityFn::tabulated(Tabulated::normalized(target, out)?))
}

/// `sum_i x_i^2` for `x_i` independently described by `Normal(mu_i, var)`.
pub fn sum_of_squares_possibility(means: &[f64], variance: f64) -> Result<PossibilityFn> {
    if means.is_empty() {
        return Err(Error::Empty("means"));
    }
    if variance.is_nan() || means.iter().any(|m| m.is_nan()) {
        return Err(Error::NaN("sum of squares input"));
    }
    if !(variance > 0.0) || variance.is_infinite() {
        return invalid(format!("variance must be positive and finite, got {variance}"));
    }
    let center = means.iter().map(|m| m * m).sum();
    PossibilityFn::chi_squared(center, 2.0 * variance)
}

/// Variance after a bijective map with derivative `derivative` at the mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushedVariance {
    pub variance: ExtendedVariance,
    /// Set when a finite variance met a vanishing derivative.
    pub degenerate_derivative: bool,
}

/// `V*(zeta(x)) = zeta'(mode)^2 V*(x)`. A vanishing derivative sends a
/// finite variance to infinity and is flagged.
pub fn variance_pushforward(v: ExtendedVariance, derivative: f64) -> Result<PushedVariance> {
    if derivative.is_nan() {
        return Err(Error::NaN("derivative"));
    }
    if !derivative.is_finite() {
        return invalid("derivative must be finite");
    }
    let d2 = derivative * derivative;
    Ok(match v {
        ExtendedVariance::Finite(_) if d2 == 0.0 => PushedVariance {
            variance: ExtendedVariance::Infinite,
            degenerate_derivative: true,
        },
        ExtendedVariance::Finite(x) => PushedVariance {
            variance: ExtendedVariance::from_value(d2 * x)?,
            degenerate_derivative: false,
        },
        other => PushedVariance {
            variance: other,
            degenerate_derivative: d2 == 0.0,
        },
    })
}

/// True if the family is closed under the pushforward by `zeta`.
pub fn has_closed_form(kind: Kind, zeta: &Transform) -> bool {
    match zeta {
        Transform::Affine { shift, scale } => match kind {
            Kind::Normal | Kind::StudentT | Kind::Indicator => true,
            Kind::ChiSquared | Kind::Gamma | Kind::InverseGamma => *shift == 0.0 && *scale > 0.0,
            _ => false,
        },
        Transform::Reciprocal => matches!(kind, Kind::Gamma | Kind::InverseGamma),
        _ => false,
    }
}
