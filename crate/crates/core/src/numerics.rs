//! Numerical kernels: bounded global maximisation, finite differences,
//! root finding, compensated summation and the brute-force sup-convolution
//! oracle.

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interval::Interval;
use rayon::prelude::*;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Largest number of tuples `brute_force_supconv` will enumerate.
pub const SUPCONV_BUDGET: u128 = 100_000_000;
/// Maximum number of factors for `brute_force_supconv`.
pub const SUPCONV_MAX_FACTORS: usize = 4;
/// Maximum points per factor for `brute_force_supconv`.
pub const SUPCONV_MAX_POINTS: usize = 201;

/// Settings for grid-scan plus golden-section maximisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub grid_points: usize,
    pub refine_iters: usize,
    pub abscissa_tol: f64,
    pub domain: Option<Interval>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_points: 401,
            refine_iters: 100,
            abscissa_tol: 1e-10,
            domain: None,
        }
    }
}

impl OptimizerConfig {
    pub fn on(domain: Interval) -> Self {
        Self {
            domain: Some(domain),
            ..Self::default()
        }
    }

    pub fn with_points(mut self, n: usize) -> Self {
        self.grid_points = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid_points must be >= 3, got {}",
                self.grid_points
            )));
        }
        if !(self.abscissa_tol > 0.0) {
            return Err(Error::InvalidParameter("abscissa_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupResult {
    pub arg: f64,
    pub value: f64,
}

/// Maximises `objective` over the configured bounded domain.
///
/// The objective may return `-inf`; `NaN` is an error. Plateaus resolve to
/// their smallest abscissa.
pub fn global_sup(objective: impl Fn(f64) -> f64, config: &OptimizerConfig) -> Result<SupResult> {
    let domain = config
        .domain
        .ok_or_else(|| Error::UnboundedDomain("optimizer domain not set".into()))?;
    global_sup_on(objective, domain, config)
}

/// As [`global_sup`] with an explicit domain.
pub fn global_sup_on(
    objective: impl Fn(f64) -> f64,
    domain: Interval,
    config: &OptimizerConfig,
) -> Result<SupResult> {
    config.validate()?;
    if !domain.is_bounded() {
        return Err(Error::UnboundedDomain(domain.to_string()));
    }
    let f = |x: f64| -> Result<f64> {
        let v = objective(x);
        if v.is_nan() {
            Err(Error::NaN("objective"))
        } else {
            Ok(v)
        }
    };
    if domain.is_point() {
        return Ok(SupResult {
            arg: domain.lo(),
            value: f(domain.lo())?,
        });
    }
    let grid = UniformGrid::over(&domain, config.grid_points)?;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..grid.len() {
        let v = f(grid.point(i))?;
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let x_best = grid.point(best_i);
    if best == f64::NEG_INFINITY {
        return Ok(SupResult {
            arg: x_best,
            value: best,
        });
    }
    let left = grid.point(best_i.saturating_sub(1));
    let right = grid.point((best_i + 1).min(grid.len() - 1));

    let (gx, gv) = golden_max(&f, left, right, config)?;
    if gv > best {
        let (px, pv) = parabolic_polish(&f, gx, gv, domain)?;
        return Ok(SupResult { arg: px, value: pv });
    }

    // No strict improvement: either the maximum sits on the node or the
    // node lies on a plateau. A plateau extending to the right means its left
    // edge is inside the previous cell.
    let probe = 0.5 * (x_best + right);
    if best_i > 0 && right > x_best && f(probe)? >= best {
        let mut lo = left;
        let mut hi = x_best;
        for _ in 0..200 {
            if hi - lo <= config.abscissa_tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if f(mid)? >= best {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(SupResult {
            arg: hi,
            value: f(hi)?,
        });
    }
    let (px, pv) = parabolic_polish(&f, x_best, best, domain)?;
    Ok(SupResult { arg: px, value: pv })
}

fn golden_max(
    f: &impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    config: &OptimizerConfig,
) -> Result<(f64, f64)> {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..config.refine_iters {
        if b - a <= config.abscissa_tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// One parabolic step through `x0 +- h`, accepted only if it does not lose.
fn parabolic_polish(
    f: &impl Fn(f64) -> Result<f64>,
    x0: f64,
    f0: f64,
    domain: Interval,
) -> Result<(f64, f64)> {
    let h = 1e-5 * x0.abs().max(1.0);
    if !domain.contains(x0 - h) || !domain.contains(x0 + h) {
        return Ok((x0, f0));
    }
    let fm = f(x0 - h)?;
    let fp = f(x0 + h)?;
    if !(fm < f0 && fp < f0) || !fm.is_finite() || !fp.is_finite() {
        return Ok((x0, f0));
    }
    let denom = fp - 2.0 * f0 + fm;
    let v = x0 - 0.5 * h * (fp - fm) / denom;
    if !v.is_finite() || (v - x0).abs() > h {
        return Ok((x0, f0));
    }
    let fv = f(v)?;
    Ok(if fv >= f0 { (v, fv) } else { (x0, f0) })
}

/// Maximises `objective(x(t), y(t))` along a parametrised curve.
pub fn constrained_sup(
    objective: impl Fn(f64, f64) -> f64,
    curve: impl Fn(f64) -> (f64, f64),
    t_domain: Interval,
    config: &OptimizerConfig,
) -> Result<SupResult> {
    global_sup_on(
        |t| {
            let (x, y) = curve(t);
            objective(x, y)
        },
        t_domain,
        config,
    )
}

/// Multiplier turning the `eps^(1/3)` step into `eps^(1/4)`, the
/// round-off optimal step for second differences.
pub const SECOND_ORDER_SCALE: f64 = 20.158_736_798_317_967;

/// Finite-difference step `eps^(1/3) max(1, |x|) scale`.
pub fn fd_step(x: f64, scale: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0) * scale
}

/// `(f(x+h) - 2f(x) + f(x-h)) / h^2` with `h = fd_step(x, scale)`.
pub fn central_second_difference(f: impl Fn(f64) -> f64, x: f64, scale: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NaN("difference point"));
    }
    let h = fd_step(x, scale);
    let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
    if !(fm.is_finite() && f0.is_finite() && fp.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "function not finite on [{}, {}]",
            x - h,
            x + h
        )));
    }
    Ok((fp - 2.0 * f0 + fm) / (h * h))
}

/// `(f(x+h) - f(x-h)) / 2h` with `h = fd_step(x, scale)`.
pub fn central_first_difference(f: impl Fn(f64) -> f64, x: f64, scale: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NaN("difference point"));
    }
    let h = fd_step(x, scale);
    let (fm, fp) = (f(x - h), f(x + h));
    if !(fm.is_finite() && fp.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "function not finite on [{}, {}]",
            x - h,
            x + h
        )));
    }
    Ok((fp - fm) / (2.0 * h))
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo.is_nan() || fhi.is_nan() {
        return Err(Error::NaN("bisection"));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidParameter(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm.is_nan() {
            return Err(Error::NaN("bisection"));
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Horner evaluation; `coeffs[i]` multiplies `x^i`.
pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

/// Real roots of a polynomial, ascending. Roots of even multiplicity are
/// reported when they coincide with a critical point.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
    }
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => return vec![-c[0] / c[1]],
        _ => {}
    }
    let lead = c[c.len() - 1];
    let bound = 1.0
        + c[..c.len() - 1]
            .iter()
            .map(|v| (v / lead).abs())
            .fold(0.0, f64::max);
    let mut knots = vec![-bound];
    knots.extend(
        real_roots(&poly_derivative(&c))
            .into_iter()
            .filter(|x| x.abs() < bound),
    );
    knots.push(bound);
    let p = |x: f64| poly_eval(&c, x);
    let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (pa, pb) = (p(a), p(b));
        let root = if pa == 0.0 {
            Some(a)
        } else if pa.signum() != pb.signum() && pb != 0.0 {
            bisect(p, a, b, 0.0).ok()
        } else {
            None
        };
        if let Some(r) = root {
            if roots.last().is_none_or(|&l| r > l) {
                roots.push(r);
            }
        }
    }
    if let Some(&last) = knots.last() {
        if p(last) == 0.0 && roots.last().is_none_or(|&l| last > l) {
            roots.push(last);
        }
    }
    // Double roots at critical points.
    for &k in &knots[1..knots.len() - 1] {
        if p(k).abs() <= 1e-12 * scale && !roots.iter().any(|r| (r - k).abs() < 1e-9) {
            roots.push(k);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Neumaier compensated summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// True when every discrete second difference of `ln_values` is below
/// `-1e-10`, skipping triples that touch `-inf`.
pub fn is_strictly_log_concave(ln_values: &[f64]) -> bool {
    let mut checked = 0;
    for w in ln_values.windows(3) {
        if w.iter().any(|v| !v.is_finite()) {
            continue;
        }
        checked += 1;
        if w[2] - 2.0 * w[1] + w[0] >= -1e-10 {
            return false;
        }
    }
    checked > 0
}

/// Abscissae and values of one factor in a brute-force sup-convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub xs: Vec<f64>,
    pub fs: Vec<f64>,
}

impl Samples {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::GridMismatch(format!(
                "{} abscissae vs {} values",
                xs.len(),
                fs.len()
            )));
        }
        if xs.is_empty() {
            return Err(Error::Empty("samples"));
        }
        if xs.iter().chain(&fs).any(|v| v.is_nan()) {
            return Err(Error::NaN("samples"));
        }
        Ok(Self { xs, fs })
    }

    pub fn from_fn(grid: &UniformGrid, f: impl Fn(f64) -> f64) -> Self {
        let xs = grid.points();
        let fs = xs.iter().map(|&x| f(x)).collect();
        Self { xs, fs }
    }

    pub fn point(x: f64) -> Self {
        Self {
            xs: vec![x],
            fs: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

/// How the factors' abscissae combine into the target variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Combiner {
    Sum,
    Mean,
    /// `sum_i c_i x_i`.
    Linear(Vec<f64>),
}

impl Combiner {
    fn partial(&self, i: usize, acc: f64, x: f64) -> f64 {
        match self {
            Combiner::Sum | Combiner::Mean => acc + x,
            Combiner::Linear(c) => acc + c[i] * x,
        }
    }

    fn finish(&self, k: usize, acc: f64) -> f64 {
        match self {
            Combiner::Mean => acc / k as f64,
            _ => acc,
        }
    }
}

/// Exhaustive sup-convolution: for every tuple of factor samples the product
/// of values is credited to the target node nearest the combined abscissa.
/// Target nodes never reached get 0.
pub fn brute_force_supconv(
    factors: &[Samples],
    combiner: &Combiner,
    target: &UniformGrid,
) -> Result<Vec<f64>> {
    if factors.is_empty() {
        return Err(Error::Empty("factor list"));
    }
    if factors.len() > SUPCONV_MAX_FACTORS {
        return Err(Error::InvalidParameter(format!(
            "at most {SUPCONV_MAX_FACTORS} factors, got {}",
            factors.len()
        )));
    }
    if let Some(f) = factors.iter().find(|f| f.len() > SUPCONV_MAX_POINTS) {
        return Err(Error::InvalidParameter(format!(
            "at most {SUPCONV_MAX_POINTS} points per factor, got {}",
            f.len()
        )));
    }
    if let Combiner::Linear(c) = combiner {
        if c.len() != factors.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for {} factors",
                c.len(),
                factors.len()
            )));
        }
    }
    let tuples: u128 = factors.iter().map(|f| f.len() as u128).product();
    if tuples > SUPCONV_BUDGET {
        return Err(Error::BudgetExceeded(tuples));
    }
    let k = factors.len();
    // Parallel over the first factor; each task owns a private buffer and
    // buffers are merged by max, which is order independent.
    let first = &factors[0];
    let partials: Vec<Vec<f64>> = (0..first.len())
        .into_par_iter()
        .map(|i| {
            let mut out = vec![0.0; target.len()];
            let acc = combiner.partial(0, 0.0, first.xs[i]);
            recurse(factors, combiner, target, 1, acc, first.fs[i], k, &mut out);
            out
        })
        .collect();
    let mut out = vec![0.0; target.len()];
    for p in partials {
        for (o, v) in out.iter_mut().zip(p) {
            if v > *o {
                *o = v;
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    factors: &[Samples],
    combiner: &Combiner,
    target: &UniformGrid,
    depth: usize,
    acc: f64,
    prod: f64,
    k: usize,
    out: &mut [f64],
) {
    if prod <= 0.0 {
        return;
    }
    if depth == k {
        if let Some(j) = target.nearest_index(combiner.finish(k, acc)) {
            if prod > out[j] {
                out[j] = prod;
            }
        }
        return;
    }
    let f = &factors[depth];
    for (&x, &v) in f.xs.iter().zip(&f.fs) {
        recurse(
            factors,
            combiner,
            target,
            depth + 1,
            combiner.partial(depth, acc, x),
            prod * v,
            k,
            out,
        );
    }
}

/// Max-product convolution of two sequences on a shared uniform spacing:
/// `out[k] = max_{i+j=k} a[i] b[j]`.
pub fn max_product_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a.len() + b.len() - 1;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let i_lo = k.saturating_sub(b.len() - 1);
            let i_hi = k.min(a.len() - 1);
            let mut best: f64 = 0.0;
            for i in i_lo..=i_hi {
                let v = a[i] * b[k - i];
                if v > best {
                    best = v;
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(lo: f64, hi: f64) -> OptimizerConfig {
        OptimizerConfig::on(Interval::new(lo, hi).unwrap())
    }

    #[test]
    fn sup_of_standard_normal() {
        let r = global_sup(|x| (-0.5 * x * x).exp(), &cfg(-8.0, 8.0)).unwrap();
        assert_abs_diff_eq!(r.arg, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn sup_off_grid() {
        let pi = std::f64::consts::PI;
        let r = global_sup(|x| (-(x - pi) * (x - pi)).exp(), &cfg(-8.0, 8.0)).unwrap();
        assert_abs_diff_eq!(r.arg, pi, epsilon = 1e-8);
    }

    #[test]
    fn plateau_takes_smallest_abscissa() {
        let r = global_sup(
            |x| if (2.0..=5.0).contains(&x) { 1.0 } else { 0.0 },
            &cfg(-8.0, 8.0),
        )
        .unwrap();
        assert_abs_diff_eq!(r.arg, 2.0, epsilon = 1e-9);
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn sup_never_below_grid_best() {
        let f = |x: f64| (3.0 * x).sin() + 0.3 * x;
        let c = cfg(-3.0, 3.0);
        let r = global_sup(f, &c).unwrap();
        let g = UniformGrid::new(-3.0, 3.0, c.grid_points).unwrap();
        let best = g.points().into_iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        assert!(r.value >= best);
    }

    #[test]
    fn nan_objective_is_error() {
        assert!(matches!(
            global_sup(|_| f64::NAN, &cfg(0.0, 1.0)),
            Err(Error::NaN(_))
        ));
    }

    #[test]
    fn unbounded_domain_is_error() {
        let c = OptimizerConfig::on(Interval::REAL);
        assert!(matches!(global_sup(|x| x, &c), Err(Error::UnboundedDomain(_))));
    }

    #[test]
    fn constrained_on_line() {
        let r = constrained_sup(
            |x, y| (-x * x).exp() * (-y * y).exp(),
            |t| (t, 2.0 - t),
            Interval::new(-5.0, 5.0).unwrap(),
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.arg, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r.value, (-2.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn constrained_point_indicators() {
        let r = constrained_sup(
            |x, y| if x == 1.0 && y == 3.0 { 1.0 } else { 0.0 },
            |t| (t, 5.0 - 2.0 * t),
            Interval::point(1.0).unwrap(),
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn second_differences() {
        let d = central_second_difference(|x| (-0.5 * x * x).exp(), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(d, -1.0, epsilon = 1e-5);
        let d = central_second_difference(|x| 3.0 * x + 1.0, 2.0, SECOND_ORDER_SCALE).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-6);
        let d = central_second_difference(|x| (-x.powi(4)).exp(), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn second_order_scale_gives_quarter_power_step() {
        let h = fd_step(1.0, SECOND_ORDER_SCALE);
        assert!((h - f64::EPSILON.powf(0.25)).abs() < 1e-18);
    }

    #[test]
    fn cubic_roots() {
        // (x - 1)(x + 2)(x - 3)
        let r = real_roots(&[6.0, -5.0, -2.0, 1.0]);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(real_roots(&[1.0, 0.0, 1.0]).is_empty());
        let d = real_roots(&[1.0, -2.0, 1.0]);
        assert_eq!(d.len(), 1);
        assert_abs_diff_eq!(d[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn neumaier_beats_naive() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(v), 2.0);
    }

    #[test]
    fn log_concavity_probe() {
        let g = UniformGrid::new(-2.0, 2.0, 101).unwrap();
        let quartic: Vec<f64> = g.points().iter().map(|x| -(x * x + x.powi(4))).collect();
        assert!(is_strictly_log_concave(&quartic));
        let bimodal: Vec<f64> = g
            .points()
            .iter()
            .map(|x| -(x * x - 1.0).powi(2))
            .collect();
        assert!(!is_strictly_log_concave(&bimodal));
    }

    #[test]
    fn supconv_of_point_indicators() {
        let t = UniformGrid::new(0.0, 6.0, 61).unwrap();
        let out = brute_force_supconv(
            &[Samples::point(1.0), Samples::point(2.0)],
            &Combiner::Sum,
            &t,
        )
        .unwrap();
        let j = t.nearest_index(3.0).unwrap();
        assert_eq!(out[j], 1.0);
        assert_eq!(out.iter().filter(|&&v| v > 0.0).count(), 1);
    }

    #[test]
    fn supconv_single_factor_identity() {
        let g = UniformGrid::new(-3.0, 3.0, 61).unwrap();
        let s = Samples::from_fn(&g, |x| (-0.5 * x * x).exp());
        let out = brute_force_supconv(std::slice::from_ref(&s), &Combiner::Sum, &g).unwrap();
        assert_eq!(out, s.fs);
    }

    #[test]
    fn supconv_budget() {
        let g = UniformGrid::new(-1.0, 1.0, 201).unwrap();
        let s = Samples::from_fn(&g, |_| 1.0);
        let f = vec![s; 4];
        assert!(matches!(
            brute_force_supconv(&f, &Combiner::Sum, &g),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn tropical_matches_brute_force() {
        let g = UniformGrid::new(-2.0, 2.0, 41).unwrap();
        let a = Samples::from_fn(&g, |x| (-(x * x - 1.0).powi(2)).exp());
        let b = Samples::from_fn(&g, |x| (-(x - 0.3).abs()).exp());
        let t = UniformGrid::new(-4.0, 4.0, 81).unwrap();
        let brute = brute_force_supconv(&[a.clone(), b.clone()], &Combiner::Sum, &t).unwrap();
        assert_eq!(max_product_convolve(&a.fs, &b.fs), brute);
    }
}
