//! Finite-sample possibility functions and their distance to the limits in
//! the law of large numbers, the central limit theorem and the
//! Bernstein-von Mises approximation.

use crate::error::{invalid, Error, Result};
use crate::grid::UniformGrid;
use crate::inference::{bvm_approximation, posterior, SharedModel};
use crate::interval::{Interval, IntervalSet};
use crate::numerics::{is_strictly_log_concave, max_product_convolve, OptimizerConfig};
use crate::possibility::{ExtendedVariance, PossibilityFn, Repr, Tabulated};
use crate::serde_ext::sig17;
use crate::transform::JointPossibilityFn;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Grid size of the base function in the tropical (max-product) path.
pub const TROPICAL_POINTS: usize = 201;

/// Multiply-compare operations allowed for one tropical power.
pub const TROPICAL_BUDGET: u128 = 20_000_000_000;

/// Grid used to probe log-concavity.
const CONCAVITY_PROBE_POINTS: usize = 2001;

/// Default exclusion band around the boundary of the LLN limit.
pub const DEFAULT_COLLAR: f64 = 0.5;

/// Window around the MLE, in posterior standard deviations, on which BvM
/// distances are measured.
const BVM_WINDOW: f64 = 8.0;

/// Possibility function of the mean of `n` variables each described by `pf`:
/// `f_n(x) = sup { prod f(x_i) : mean(x) = x }`.
///
/// Log-concave functions reduce to `f(x)^n`. Indicators map to the mean of
/// their set. Anything else is tabulated and raised to the `n`-th
/// max-product power by repeated squaring.
pub fn sample_mean_possibility(pf: &PossibilityFn, n: usize) -> Result<PossibilityFn> {
    if n < 1 {
        return invalid("sample size must be at least 1");
    }
    if n == 1 {
        return Ok(pf.clone());
    }
    match &pf.repr {
        Repr::Normal { .. } | Repr::Gamma { .. } | Repr::Beta { .. } | Repr::ChiSquared { .. } => {
            return pf.temper(n as f64)
        }
        Repr::Indicator(s) => return PossibilityFn::indicator(set_mean(s, n)),
        _ => {}
    }
    let domain = pf.working_domain()?;
    let probe = UniformGrid::over(&domain, CONCAVITY_PROBE_POINTS)?;
    let ln: Vec<f64> = probe.points().into_iter().map(|x| pf.ln_value(x)).collect();
    if is_strictly_log_concave(&ln) {
        return pf.temper(n as f64);
    }
    let base = match &pf.repr {
        Repr::Tabulated(t) if t.grid().len() <= 2 * TROPICAL_POINTS => t.clone(),
        _ => pf.tabulate(Some(domain), TROPICAL_POINTS)?,
    };
    let values = tropical_power(base.values(), n)?;
    let g = base.grid();
    let grid = UniformGrid::new(g.lo(), g.hi(), n * (g.len() - 1) + 1)?;
    Ok(PossibilityFn::tabulated(Tabulated::normalized(grid, values)?))
}

/// `{(x_1 + ... + x_n) / n : x_i in s}`.
fn set_mean(s: &IntervalSet, n: usize) -> IntervalSet {
    let mut acc = s.clone();
    for _ in 1..n {
        acc = acc.minkowski_sum(s);
    }
    acc.affine(1.0 / n as f64, 0.0)
}

/// `a` convolved with itself `n` times in the max-product semiring.
fn tropical_power(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let len = a.len() as u128;
    // squarings dominate: sum over k of (2^k len)^2 < (4/3) (n len)^2
    let cost = 4 * (n as u128 * len).pow(2) / 3;
    if cost > TROPICAL_BUDGET {
        return Err(Error::BudgetExceeded(cost));
    }
    let mut result: Option<Vec<f64>> = None;
    let mut power = a.to_vec();
    let mut k = n;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(r) => max_product_convolve(&r, &power),
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        power = max_product_convolve(&power, &power);
    }
    Ok(result.expect("n >= 1"))
}

/// Mean of `n <= 3` variables on a 2-d tensor grid: the joint function of
/// the mean, sampled on the grids refined by a factor `n`.
pub fn sample_mean_possibility_2d(
    f: impl Fn(f64, f64) -> f64 + Sync,
    gx: UniformGrid,
    gy: UniformGrid,
    n: usize,
) -> Result<JointPossibilityFn> {
    if !(1..=3).contains(&n) {
        return invalid("two-dimensional sample means support 1 <= n <= 3");
    }
    let (nx, ny) = (gx.len(), gy.len());
    let base: Vec<f64> = gx
        .points()
        .into_iter()
        .flat_map(|x| gy.points().into_iter().map(move |y| (x, y)))
        .map(|(x, y)| f(x, y))
        .collect();
    if base.iter().any(|v| v.is_nan() || *v < 0.0) {
        return invalid("joint values must be non-negative numbers");
    }
    let mut acc = base.clone();
    let (mut ax, mut ay) = (nx, ny);
    for _ in 1..n {
        acc = max_product_convolve_2d(&acc, ax, ay, &base, nx, ny);
        ax += nx - 1;
        ay += ny - 1;
    }
    let mx = UniformGrid::new(gx.lo(), gx.hi(), ax)?;
    let my = UniformGrid::new(gy.lo(), gy.hi(), ay)?;
    JointPossibilityFn::from_fn(mx, my, |x, y| {
        let i = mx.nearest_index(x).expect("grid node");
        let j = my.nearest_index(y).expect("grid node");
        acc[i * ay + j]
    })
}

fn max_product_convolve_2d(
    a: &[f64],
    ax: usize,
    ay: usize,
    b: &[f64],
    bx: usize,
    by: usize,
) -> Vec<f64> {
    let (ox, oy) = (ax + bx - 1, ay + by - 1);
    (0..ox)
        .into_par_iter()
        .flat_map_iter(|k| {
            let i_lo = k.saturating_sub(bx - 1);
            let i_hi = k.min(ax - 1);
            (0..oy).map(move |l| {
                let j_lo = l.saturating_sub(by - 1);
                let j_hi = l.min(ay - 1);
                let mut best: f64 = 0.0;
                for i in i_lo..=i_hi {
                    for j in j_lo..=j_hi {
                        let v = a[i * ay + j] * b[(k - i) * by + (l - j)];
                        if v > best {
                            best = v;
                        }
                    }
                }
                best
            })
        })
        .collect()
}

/// What the finite-`n` functions are compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitKind {
    IndicatorOfHull,
    Normal,
    ChiSquared,
    ExactMatch,
}

impl LimitKind {
    pub fn name(&self) -> &'static str {
        match self {
            LimitKind::IndicatorOfHull => "indicator-of-hull",
            LimitKind::Normal => "normal",
            LimitKind::ChiSquared => "chi-squared",
            LimitKind::ExactMatch => "exact-match",
        }
    }
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sup-norm distances to a limit along a schedule of sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub n_schedule: Vec<usize>,
    pub distances: Vec<f64>,
    pub limit_kind: LimitKind,
}

impl ConvergenceReport {
    pub fn new(n_schedule: Vec<usize>, distances: Vec<f64>, limit_kind: LimitKind) -> Result<Self> {
        if n_schedule.len() != distances.len() {
            return Err(Error::GridMismatch(format!(
                "{} sizes vs {} distances",
                n_schedule.len(),
                distances.len()
            )));
        }
        if distances.iter().any(|d| d.is_nan() || *d < 0.0) {
            return invalid("distances must be non-negative");
        }
        check_schedule(&n_schedule)?;
        Ok(Self {
            n_schedule,
            distances,
            limit_kind,
        })
    }

    /// `n,distance,limit_kind` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,distance,limit_kind\n");
        for (n, d) in self.n_schedule.iter().zip(&self.distances) {
            out.push_str(&format!("{n},{},{}\n", sig17(*d), self.limit_kind));
        }
        out
    }

    /// True if every distance is no larger than the previous one.
    pub fn is_non_increasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[1] < w[0])
    }
}

fn check_schedule(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::Empty("sample-size schedule"));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("sample sizes must be positive and strictly increasing");
    }
    Ok(())
}

/// `max_i |a_i - b_i|` for values on a shared grid.
pub fn sup_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} values", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::Empty("grid"));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Pointwise sup-norm distance of two possibility functions on `grid`.
pub fn opm_distance(a: &PossibilityFn, b: &PossibilityFn, grid: &[f64]) -> Result<f64> {
    if grid.iter().any(|x| x.is_nan()) {
        return Err(Error::NaN("grid"));
    }
    let va: Vec<f64> = grid.iter().map(|&x| a.value(x)).collect();
    let vb: Vec<f64> = grid.iter().map(|&x| b.value(x)).collect();
    sup_distance(&va, &vb)
}

/// Credibility that the two coordinates of `joint` differ by more than
/// `delta`: the sup of the joint function off the band `|x - y| <= delta`.
/// Product forms are sampled on their working domains.
pub fn credibility_distance(joint: &JointPossibilityFn, delta: f64, points: usize) -> Result<f64> {
    if delta.is_nan() || delta < 0.0 {
        return invalid("delta must be non-negative");
    }
    type Lookup<'a> = Box<dyn Fn(usize, usize) -> f64 + 'a>;
    let (xs, ys, value): (Vec<f64>, Vec<f64>, Lookup<'_>) = match joint {
        JointPossibilityFn::Product(a, b) => {
            let xs = sample_points(a, points)?;
            let ys = sample_points(b, points)?;
            let (va, vb): (Vec<f64>, Vec<f64>) =
                (xs.iter().map(|&x| a.value(x)).collect(), ys.iter().map(|&y| b.value(y)).collect());
            (xs, ys, Box::new(move |i, j| va[i] * vb[j]))
        }
        JointPossibilityFn::Gridded { gx, gy, values } => {
            let ny = gy.len();
            (gx.points(), gy.points(), Box::new(move |i, j| values[i * ny + j]))
        }
    };
    let mut best: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            if (x - y).abs() > delta {
                best = best.max(value(i, j));
            }
        }
    }
    Ok(best)
}

/// The working domain sampled at `points` nodes; a single node for point
/// masses.
fn sample_points(pf: &PossibilityFn, points: usize) -> Result<Vec<f64>> {
    if let Some(x) = pf.as_point_mass() {
        return Ok(vec![x]);
    }
    Ok(UniformGrid::over(&pf.working_domain()?, points)?.points())
}

/// Distances between `f_{s_n}` and the indicator of the convex hull of
/// `argmax f`, over the grid points at least `collar` away from the hull
/// boundary.
pub fn lln_report(
    pf: &PossibilityFn,
    n_schedule: &[usize],
    grid: &[f64],
    collar: f64,
) -> Result<ConvergenceReport> {
    check_schedule(n_schedule)?;
    if grid.is_empty() {
        return Err(Error::Empty("evaluation grid"));
    }
    if collar.is_nan() || collar < 0.0 {
        return invalid("collar must be non-negative");
    }
    let hull = pf.expected_value()?.hull();
    let kept: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&x| (x - hull.lo()).abs() >= collar && (x - hull.hi()).abs() >= collar)
        .collect();
    if kept.is_empty() {
        return Err(Error::Empty("grid outside the collar"));
    }
    let limit: Vec<f64> = kept.iter().map(|&x| if hull.contains(x) { 1.0 } else { 0.0 }).collect();
    let distances = n_schedule
        .iter()
        .map(|&n| {
            let f = sample_mean_possibility(pf, n)?;
            let v: Vec<f64> = kept.iter().map(|&x| f.value(x)).collect();
            sup_distance(&v, &limit)
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::new(n_schedule.to_vec(), distances, LimitKind::IndicatorOfHull)
}

/// `f_{t_n}(t) = f(mu + t / sqrt(n))^n`, the possibility function of the
/// centred and scaled mean of a log-concave `f` with mode `mu`.
pub fn scaled_mean_possibility(pf: &PossibilityFn, n: usize, t: f64) -> Result<f64> {
    let mu = pf.expected_value()?.unique()?;
    let nf = n as f64;
    Ok((nf * pf.ln_value(mu + t / nf.sqrt())).exp())
}

/// Distances between `f_{t_n}` and `N(0, V*(f))` (the constant 1 when the
/// curvature at the mode vanishes).
pub fn clt_report(pf: &PossibilityFn, n_schedule: &[usize], grid: &[f64]) -> Result<ConvergenceReport> {
    check_schedule(n_schedule)?;
    if grid.is_empty() {
        return Err(Error::Empty("evaluation grid"));
    }
    let domain = pf.working_domain()?;
    let probe = UniformGrid::over(&domain, CONCAVITY_PROBE_POINTS)?;
    let ln: Vec<f64> = probe.points().into_iter().map(|x| pf.ln_value(x)).collect();
    if !is_strictly_log_concave(&ln) {
        return Err(Error::NotLogConcave(format!("{}", pf.kind())));
    }
    let limit = match pf.variance()? {
        ExtendedVariance::Finite(v) => PossibilityFn::normal(0.0, v)?,
        ExtendedVariance::Infinite => PossibilityFn::uninformative(),
        ExtendedVariance::Zero => {
            return Err(Error::NotAMaximum("kink at the mode has no normal limit".into()))
        }
    };
    let target: Vec<f64> = grid.iter().map(|&t| limit.value(t)).collect();
    let distances = n_schedule
        .iter()
        .map(|&n| {
            let v = grid
                .iter()
                .map(|&t| scaled_mean_possibility(pf, n, t))
                .collect::<Result<Vec<_>>>()?;
            sup_distance(&v, &target)
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::new(n_schedule.to_vec(), distances, LimitKind::Normal)
}

/// Distances between the exact posterior after the first `n` observations
/// and its normal approximation, on a window around the MLE.
pub fn bvm_report(
    model: &SharedModel,
    prior: &PossibilityFn,
    data: &[f64],
    theta0: f64,
    n_schedule: &[usize],
) -> Result<ConvergenceReport> {
    check_schedule(n_schedule)?;
    if n_schedule[n_schedule.len() - 1] > data.len() {
        return invalid(format!(
            "schedule needs {} observations, {} given",
            n_schedule[n_schedule.len() - 1],
            data.len()
        ));
    }
    let distances = n_schedule
        .par_iter()
        .map(|&n| {
            let ys = &data[..n];
            let exact = posterior(prior, model, ys)?;
            let approx = bvm_approximation(model.as_ref(), ys, theta0)?;
            let p = approx.params();
            let h = BVM_WINDOW * p[1].sqrt();
            let window = Interval::new(p[0] - h, p[0] + h)?;
            let centre = exact.expected_value()?.hull().midpoint();
            let window = window.hull(&Interval::new(centre - h, centre + h)?);
            let grid = UniformGrid::over(&window, OptimizerConfig::default().grid_points * 5)?;
            opm_distance(&exact, &approx, &grid.points())
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::new(n_schedule.to_vec(), distances, LimitKind::Normal)
}

/// Test families on bounded domains, by name: `quartic` is
/// `exp(-(x^2 + x^4))`, `flat-quartic` is `exp(-x^4)` and `bimodal` is
/// `exp(-(x^2 - 1)^2)` with modes at `-1` and `1`.
pub fn named_family(name: &str) -> Result<PossibilityFn> {
    let cfg = OptimizerConfig::default();
    let d = Interval::new(-3.0, 3.0)?;
    match name {
        "quartic" => PossibilityFn::from_loss(|x| x * x + x.powi(4), d, &cfg),
        "flat-quartic" => PossibilityFn::from_loss(|x| x.powi(4), d, &cfg),
        "bimodal" => PossibilityFn::from_loss(|x| (x * x - 1.0).powi(2), d, &cfg),
        "normal" => PossibilityFn::normal(0.0, 1.0),
        other => invalid(format!(
            "unknown family '{other}' (expected quartic, flat-quartic, bimodal or normal)"
        )),
    }
}
