use super::{PossibilityFn, Repr, Tabulated, MODE_TOL, WORKING_SDS};
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interval::{Interval, IntervalSet};
use crate::numerics::{bisect, global_sup_on, OptimizerConfig};
use crate::serde_ext::ser_f64;
use serde::{Serialize, Serializer};
use std::fmt;

/// `|f''(mode)|` at or below this is treated as flat.
pub const CURVATURE_TOL: f64 = 1e-8;

/// Relative gap between second differences at `h` and `h/2` that signals a
/// kink (growing) or a flat top (shrinking).
pub const KINK_GAP: f64 = 1e-3;

/// Same test on tabulated data, comparing spacings `2d` and `d`.
pub const TABULATED_KINK_GAP: f64 = 0.1;

/// Grid size used to locate modes of loss-based functions.
const MODE_SCAN_POINTS: usize = 2001;

/// The argmax set of a possibility function.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    set: IntervalSet,
}

impl ModeSet {
    pub fn new(set: IntervalSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::Empty("mode set"));
        }
        Ok(Self { set })
    }

    pub fn point(x: f64) -> Self {
        Self {
            set: IntervalSet::from(Interval::point(x).expect("finite mode")),
        }
    }

    pub(crate) fn interval(lo: f64, hi: f64) -> Self {
        Self {
            set: IntervalSet::from(Interval::new(lo, hi).expect("ordered bounds")),
        }
    }

    pub fn set(&self) -> &IntervalSet {
        &self.set
    }

    pub fn components(&self) -> &[Interval] {
        self.set.components()
    }

    pub fn hull(&self) -> Interval {
        self.set.hull().expect("non-empty mode set")
    }

    pub fn contains(&self, x: f64) -> bool {
        self.set.contains(x)
    }

    pub fn singleton(&self) -> Option<f64> {
        match self.set.components() {
            [c] if c.is_point() => Some(c.lo()),
            _ => None,
        }
    }

    /// The unique mode, or [`Error::SetValuedMode`].
    pub fn unique(&self) -> Result<f64> {
        self.singleton()
            .ok_or(Error::SetValuedMode(self.set.len()))
    }

    /// Image under a monotone map.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> ModeSet {
        let parts = self
            .components()
            .iter()
            .map(|c| {
                let (a, b) = (f(c.lo()), f(c.hi()));
                Interval::new(a.min(b), a.max(b)).expect("finite image")
            })
            .collect();
        ModeSet {
            set: IntervalSet::new(parts),
        }
    }
}

impl Serialize for ModeSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.singleton() {
            Some(x) => s.serialize_f64(x),
            None => self.set.serialize(s),
        }
    }
}

impl fmt::Display for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.singleton() {
            Some(x) => write!(f, "{{{x}}}"),
            None => write!(f, "{}", self.set),
        }
    }
}

/// The second-derivative variance: positive, zero at a kink, infinite when
/// flat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedVariance {
    Finite(f64),
    Zero,
    Infinite,
}

impl ExtendedVariance {
    /// Wraps a non-negative number, mapping `0` and `inf` to their tags.
    pub fn from_value(v: f64) -> Result<Self> {
        if v.is_nan() {
            return Err(Error::NaN("variance"));
        }
        if v < 0.0 {
            return Err(Error::InvalidParameter(format!("negative variance {v}")));
        }
        Ok(if v == 0.0 {
            Self::Zero
        } else if v.is_infinite() {
            Self::Infinite
        } else {
            Self::Finite(v)
        })
    }

    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(v) => *v,
            Self::Zero => 0.0,
            Self::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

impl Serialize for ExtendedVariance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_f64(&self.value(), s)
    }
}

impl fmt::Display for ExtendedVariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Zero => f.write_str("0"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl PossibilityFn {
    /// The set of maximisers, `E*`.
    pub fn expected_value(&self) -> Result<ModeSet> {
        let inf = f64::INFINITY;
        Ok(match &self.repr {
            Repr::Normal { mean, precision } => {
                if *precision == 0.0 {
                    ModeSet::new(IntervalSet::real())?
                } else {
                    ModeSet::point(*mean)
                }
            }
            Repr::Gamma { shape, rate } => {
                if *rate == 0.0 {
                    ModeSet::interval(0.0, inf)
                } else {
                    ModeSet::point(shape / rate)
                }
            }
            Repr::InverseGamma { shape, scale } => {
                if *shape == 0.0 {
                    ModeSet::interval(0.0, inf)
                } else {
                    ModeSet::point(scale / shape)
                }
            }
            Repr::Beta { alpha, beta } => {
                if alpha + beta == 0.0 {
                    ModeSet::interval(0.0, 1.0)
                } else {
                    ModeSet::point(alpha / (alpha + beta))
                }
            }
            Repr::ChiSquared { center, .. } => ModeSet::point(*center),
            Repr::StudentT { dof, loc, .. } => {
                if *dof == 0.0 {
                    ModeSet::new(IntervalSet::real())?
                } else {
                    ModeSet::point(*loc)
                }
            }
            Repr::Indicator(s) => ModeSet::new(s.clone())?,
            Repr::LossBased(l) => match &l.modes {
                Some(m) => ModeSet::new(m.clone())?,
                None => numeric_mode_set(|x| self.ln_value(x), l.domain, MODE_SCAN_POINTS)?,
            },
            Repr::Tabulated(t) => tabulated_mode_set(t)?,
        })
    }

    /// `V* = -1 / f''(mode)` with the kink and flat conventions.
    pub fn variance(&self) -> Result<ExtendedVariance> {
        use ExtendedVariance::*;
        let ev = self.expected_value()?;
        if ev.singleton().is_none() {
            return match ev.components() {
                [c] if !c.is_point() => Ok(Infinite),
                parts => Err(Error::SetValuedMode(parts.len())),
            };
        }
        Ok(match &self.repr {
            Repr::Normal { precision, .. } => {
                if precision.is_infinite() {
                    Zero
                } else {
                    Finite(1.0 / precision)
                }
            }
            Repr::Gamma { shape, rate } => {
                if *shape == 0.0 {
                    Zero
                } else {
                    Finite(shape / (rate * rate))
                }
            }
            Repr::InverseGamma { shape, scale } => Finite(scale * scale / shape.powi(3)),
            Repr::Beta { alpha, beta } => {
                if *alpha == 0.0 || *beta == 0.0 {
                    Zero
                } else {
                    Finite(alpha * beta / (alpha + beta).powi(3))
                }
            }
            Repr::ChiSquared { center, scale } => {
                if *center == 0.0 {
                    Zero
                } else {
                    Finite(2.0 * center * scale)
                }
            }
            Repr::StudentT { scale, .. } => Finite(*scale),
            Repr::Indicator(_) => Zero,
            Repr::LossBased(_) => self.numeric_variance_at(ev.unique()?)?,
            Repr::Tabulated(t) => tabulated_variance(t, ev.unique()?)?,
        })
    }

    /// Mode set located numerically from `ln f` on `n` points over `domain`
    /// (or the working domain), independent of any closed form.
    pub fn numeric_mode(&self, domain: Option<Interval>, n: usize) -> Result<ModeSet> {
        if let Repr::Tabulated(t) = &self.repr {
            return tabulated_mode_set(t);
        }
        let d = match domain {
            Some(d) => d,
            None => self.working_domain()?,
        };
        if d.is_point() {
            return Ok(ModeSet::point(d.lo()));
        }
        numeric_mode_set(|x| self.ln_value(x), d, n)
    }

    /// Variance from second differences of `ln f` at `mode`.
    pub fn numeric_variance_at(&self, mode: f64) -> Result<ExtendedVariance> {
        if let Repr::Tabulated(t) = &self.repr {
            return tabulated_variance(t, mode);
        }
        let scale = match self.working_domain() {
            Ok(d) if d.width() > 0.0 => d.width() / (2.0 * WORKING_SDS),
            _ => mode.abs().max(1.0),
        };
        numeric_variance_ln(|x| self.ln_value(x), mode, self.support(), scale)
    }
}

/// Argmax set of a continuous function given through `ln f`.
///
/// Grid nodes within `MODE_TOL` of the best value form runs; a run whose
/// values are all equal is a plateau, anything else is refined to a point
/// by golden-section search.
pub fn numeric_mode_set(
    ln_f: impl Fn(f64) -> f64,
    domain: Interval,
    n: usize,
) -> Result<ModeSet> {
    let grid = UniformGrid::over(&domain, n)?;
    let xs = grid.points();
    let vs: Vec<f64> = xs.iter().map(|&x| ln_f(x)).collect();
    if vs.iter().any(|v| v.is_nan()) {
        return Err(Error::NaN("log-possibility"));
    }
    let best = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::DegeneratePosterior);
    }
    let thr = best + (-MODE_TOL).ln_1p();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, &v) in vs.iter().enumerate() {
        if v >= thr {
            match runs.last_mut() {
                Some((_, end)) if *end + 1 == i => *end = i,
                _ => runs.push((i, i)),
            }
        }
    }
    let cfg = OptimizerConfig::default().with_points(41);
    let mut found: Vec<(Interval, f64)> = Vec::new();
    for (a, b) in runs {
        let flat = vs[a..=b].iter().all(|&v| v == vs[a]);
        if a != b && flat {
            let lo = plateau_edge(&ln_f, &xs, a, a.checked_sub(1), vs[a]);
            let hi = plateau_edge(&ln_f, &xs, b, (b + 1 < xs.len()).then_some(b + 1), vs[b]);
            found.push((Interval::new(lo, hi)?, vs[a]));
        } else {
            let lo = xs[a.saturating_sub(1)];
            let hi = xs[(b + 1).min(xs.len() - 1)];
            let r = global_sup_on(&ln_f, Interval::new(lo, hi)?, &cfg)?;
            let (x, v) = if r.value >= vs[a..=b].iter().copied().fold(f64::NEG_INFINITY, f64::max)
            {
                polish(&ln_f, r.arg, r.value, lo, hi)
            } else {
                let k = (a..=b).max_by(|&i, &j| vs[i].total_cmp(&vs[j]).then(j.cmp(&i))).unwrap();
                (xs[k], vs[k])
            };
            found.push((Interval::point(x)?, v));
        }
    }
    let top = found.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let keep = top + (-MODE_TOL).ln_1p();
    ModeSet::new(IntervalSet::new(
        found
            .into_iter()
            .filter(|(_, v)| *v >= keep)
            .map(|(iv, _)| iv)
            .collect(),
    ))
}

/// Newton steps on central differences of `ln f`. Golden section stalls
/// once value differences reach round-off, about `sqrt(eps)` times the
/// curvature scale; the derivative keeps its sign much closer to the mode.
fn polish(ln_f: &impl Fn(f64) -> f64, x0: f64, v0: f64, lo: f64, hi: f64) -> (f64, f64) {
    let (mut x, mut v) = (x0, v0);
    for _ in 0..3 {
        let h2 = f64::EPSILON.powf(0.25) * (hi - lo);
        let d2 = (ln_f(x + h2) - 2.0 * v + ln_f(x - h2)) / (h2 * h2);
        if !(d2 < 0.0 && d2.is_finite()) {
            break;
        }
        let h1 = f64::EPSILON.cbrt() / (-d2).sqrt();
        let d1 = (ln_f(x + h1) - ln_f(x - h1)) / (2.0 * h1);
        let next = x - d1 / d2;
        if !next.is_finite() || next < lo || next > hi || next == x {
            break;
        }
        let w = ln_f(next);
        if w < v - 1e-14 * v.abs().max(1.0) {
            break;
        }
        (x, v) = (next, w.max(v));
    }
    (x, v)
}

/// Locates where a plateau at level `level` ends between node `inside` and
/// its neighbour `outside`.
fn plateau_edge(
    ln_f: &impl Fn(f64) -> f64,
    xs: &[f64],
    inside: usize,
    outside: Option<usize>,
    level: f64,
) -> f64 {
    let Some(o) = outside else {
        return xs[inside];
    };
    let g = |x: f64| if ln_f(x) >= level { 1.0 } else { -1.0 };
    bisect(g, xs[inside], xs[o], 1e-12 * xs[inside].abs().max(1.0)).unwrap_or(xs[inside])
}

/// Classifies curvature from second differences at step `h` (`a`) and
/// `h/2` (`b`).
fn classify(a: f64, b: f64, gap: f64) -> Result<ExtendedVariance> {
    use ExtendedVariance::*;
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return Ok(Zero);
    }
    if a.is_nan() || b.is_nan() {
        return Err(Error::NaN("second difference"));
    }
    if a.abs() <= CURVATURE_TOL || b.abs() <= CURVATURE_TOL {
        return Ok(Infinite);
    }
    if a > 0.0 || b > 0.0 {
        return Err(Error::NotAMaximum(format!(
            "positive curvature {a} at the mode"
        )));
    }
    let rho = b / a;
    if rho > 1.0 + gap {
        Ok(Zero)
    } else if rho < 1.0 - gap {
        Ok(Infinite)
    } else {
        Ok(Finite(-1.0 / b))
    }
}

/// Variance at `mode` from `ln f` by central (or one-sided at a boundary)
/// differences with step `eps^(1/6) scale`, halving once to detect kinks
/// and flat tops; the two differences are then Richardson-combined. `scale` should be of the order of a standard deviation.
pub fn numeric_variance_ln(
    ln_f: impl Fn(f64) -> f64,
    mode: f64,
    support: Interval,
    scale: f64,
) -> Result<ExtendedVariance> {
    let base = f64::EPSILON.powf(1.0 / 6.0);
    let mut h = base * scale.abs().max(f64::MIN_POSITIVE);
    let mut out = ExtendedVariance::Infinite;
    for _ in 0..3 {
        out = variance_with_step(&ln_f, mode, support, h)?;
        match out {
            ExtendedVariance::Finite(v) => {
                let h_new = base * v.sqrt();
                if h_new >= 0.25 * h && h_new <= 4.0 * h {
                    break;
                }
                h = h_new;
            }
            _ => break,
        }
    }
    Ok(out)
}

fn variance_with_step(
    ln_f: &impl Fn(f64) -> f64,
    x0: f64,
    support: Interval,
    h: f64,
) -> Result<ExtendedVariance> {
    let g0 = ln_f(x0);
    let left = x0 - 2.0 * h >= support.lo();
    let right = x0 + 2.0 * h <= support.hi();
    let central = |h: f64| (ln_f(x0 + h) - 2.0 * g0 + ln_f(x0 - h)) / (h * h);
    if left && right {
        let (a, b) = (central(h), central(0.5 * h));
        return Ok(extrapolate(classify(a, b, KINK_GAP)?, (4.0 * b - a) / 3.0));
    }
    if !left && !right {
        return Ok(ExtendedVariance::Infinite);
    }
    let s = if right { 1.0 } else { -1.0 };
    let slope = |h: f64| (ln_f(x0 + s * h) - g0) / h;
    let (s1, s2) = (slope(h), slope(0.5 * h));
    if s1 == f64::NEG_INFINITY || (s1 < 0.0 && s2 / s1 > 0.75) {
        return Ok(ExtendedVariance::Zero);
    }
    let one_sided =
        |h: f64| (g0 - 2.0 * ln_f(x0 + s * h) + ln_f(x0 + 2.0 * s * h)) / (h * h);
    let (a, b) = (one_sided(h), one_sided(0.5 * h));
    Ok(extrapolate(classify(a, b, KINK_GAP)?, 2.0 * b - a))
}

fn extrapolate(v: ExtendedVariance, curvature: f64) -> ExtendedVariance {
    match v {
        ExtendedVariance::Finite(_) if curvature < 0.0 => ExtendedVariance::Finite(-1.0 / curvature),
        other => other,
    }
}

fn tabulated_mode_set(t: &Tabulated) -> Result<ModeSet> {
    let v = t.values();
    let best = v.iter().copied().fold(0.0, f64::max);
    if best <= 0.0 {
        return Err(Error::DegeneratePosterior);
    }
    let thr = best * (1.0 - MODE_TOL);
    let g = t.grid();
    let mut parts: Vec<Interval> = Vec::new();
    let mut i = 0;
    while i < v.len() {
        if v[i] >= thr {
            let start = i;
            while i + 1 < v.len() && v[i + 1] >= thr {
                i += 1;
            }
            parts.push(Interval::new(g.point(start), g.point(i))?);
        }
        i += 1;
    }
    ModeSet::new(IntervalSet::new(parts))
}

fn tabulated_variance(t: &Tabulated, mode: f64) -> Result<ExtendedVariance> {
    let g = t.grid();
    let i = g
        .nearest_index(mode)
        .ok_or_else(|| Error::InvalidParameter(format!("mode {mode} outside grid")))?;
    let ln = |k: usize| t.values()[k].ln();
    let d = g.spacing();
    let n = g.len();
    if i >= 1 && i + 1 < n {
        let a = (ln(i + 1) - 2.0 * ln(i) + ln(i - 1)) / (d * d);
        if i >= 2 && i + 2 < n {
            let wide = (ln(i + 2) - 2.0 * ln(i) + ln(i - 2)) / (4.0 * d * d);
            return classify(wide, a, TABULATED_KINK_GAP);
        }
        return classify(a, a, TABULATED_KINK_GAP);
    }
    // Boundary node: a non-vanishing one-sided slope is a kink.
    let (k1, k2) = if i == 0 { (1, 2) } else { (n - 2, n.saturating_sub(3)) };
    let s1 = (ln(k1) - ln(i)) / d;
    let s2 = (ln(k2) - ln(i)) / (2.0 * d);
    if s1 == f64::NEG_INFINITY || (s1 < 0.0 && s1 / s2 > 0.75) {
        return Ok(ExtendedVariance::Zero);
    }
    let one = (ln(i) - 2.0 * ln(k1) + ln(k2)) / (d * d);
    classify(one, one, TABULATED_KINK_GAP)
}
