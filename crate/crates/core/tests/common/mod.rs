//! Generators and checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use possic::transform::{independent_product, linear_pushforward, pushforward, Transform};
use possic::{Interval, OptimizerConfig, PossibilityFn, Result};
use proptest::prelude::*;

/// Unimodal parametric families with interior modes.
pub fn unimodal() -> impl Strategy<Value = PossibilityFn> {
    prop_oneof![
        (-3.0..3.0f64, 0.1..4.0f64).prop_map(|(m, v)| PossibilityFn::normal(m, v).unwrap()),
        (1.5..8.0f64, 0.5..4.0f64).prop_map(|(a, b)| PossibilityFn::gamma(a, b).unwrap()),
        (0.5..6.0f64, 0.5..4.0f64).prop_map(|(a, b)| PossibilityFn::inverse_gamma(a, b).unwrap()),
        (1.5..8.0f64, 1.5..8.0f64).prop_map(|(a, b)| PossibilityFn::beta(a, b).unwrap()),
        (0.5..9.0f64, 0.5..3.0f64).prop_map(|(c, s)| PossibilityFn::chi_squared(c, s).unwrap()),
        (1.0..12.0f64, -2.0..2.0f64, 0.1..2.0f64)
            .prop_map(|(n, m, s)| PossibilityFn::student_t(n, m, s).unwrap()),
    ]
}

/// One step of a randomised pipeline.
#[derive(Debug, Clone)]
pub enum Step {
    Temper(f64),
    Affine(f64, f64),
    Exp,
    Cube,
    AddNormal(f64, f64),
    Tabulate,
}

pub fn step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (0.2..5.0f64).prop_map(Step::Temper),
        (prop_oneof![-3.0..-0.3f64, 0.3..3.0f64], -2.0..2.0f64).prop_map(|(a, b)| Step::Affine(a, b)),
        Just(Step::Exp),
        Just(Step::Cube),
        (-2.0..2.0f64, 0.1..2.0f64).prop_map(|(m, v)| Step::AddNormal(m, v)),
        Just(Step::Tabulate),
    ]
}

pub fn apply(pf: &PossibilityFn, step: &Step) -> Result<PossibilityFn> {
    match step {
        Step::Temper(b) => pf.temper(*b),
        Step::Affine(a, b) => pushforward(pf, &Transform::affine(*a, *b), None),
        Step::Exp => {
            // keep exp(x) in a range where grids stay meaningful
            let d = pf.working_domain()?;
            if d.hi() > 5.0 || d.lo() < -20.0 {
                return Ok(pf.clone());
            }
            pushforward(pf, &Transform::monotone(f64::exp, f64::ln), None)
        }
        Step::Cube => {
            let d = pf.working_domain()?;
            if d.hi().abs().max(d.lo().abs()) > 20.0 {
                return Ok(pf.clone());
            }
            pushforward(pf, &Transform::monotone(|x| x * x * x, f64::cbrt), None)
        }
        Step::AddNormal(m, v) => {
            let other = PossibilityFn::normal(*m, *v)?;
            linear_pushforward(&independent_product(pf, &other), 1.0, &OptimizerConfig::default())
        }
        Step::Tabulate => Ok(PossibilityFn::tabulated(pf.tabulate(None, 2001)?)),
    }
}

/// `(grid max, value at the located mode)` over the working domain.
pub fn sup_probe(pf: &PossibilityFn) -> Result<(f64, f64)> {
    let d = pf.working_domain()?;
    let grid_max = if d.is_point() {
        pf.eval(d.lo())?
    } else {
        possic::UniformGrid::over(&d, 4001)?
            .points()
            .into_iter()
            .map(|x| pf.eval(x))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max)
    };
    let at_mode = pf.eval(pf.expected_value()?.hull().midpoint())?;
    Ok((grid_max, at_mode))
}

pub fn is_normalised(pf: &PossibilityFn, tol: f64) -> Result<bool> {
    let (grid_max, at_mode) = sup_probe(pf)?;
    Ok(grid_max <= 1.0 + tol && (at_mode - 1.0).abs() <= tol)
}

/// Strictly monotone maps with inverses, by index.
pub fn monotone_map(k: usize, a: f64, b: f64) -> (Transform, Box<dyn Fn(f64) -> f64>) {
    match k % 3 {
        0 => (Transform::affine(a, b), Box::new(move |x| a * x + b)),
        1 => (Transform::monotone(f64::exp, f64::ln), Box::new(f64::exp)),
        _ => (
            Transform::monotone(|x| x * x * x + x, invert_cubic),
            Box::new(|x| x * x * x + x),
        ),
    }
}

/// Real root of `x^3 + x = y` (Cardano; the discriminant is always positive).
fn invert_cubic(y: f64) -> f64 {
    let d = (y * y / 4.0 + 1.0 / 27.0).sqrt();
    (y / 2.0 + d).cbrt() + (y / 2.0 - d).cbrt()
}

/// Width of one cell of the `n`-point grid over the working domain.
pub fn cell(pf: &PossibilityFn, n: usize) -> Result<f64> {
    let d: Interval = pf.working_domain()?;
    Ok(d.width() / (n - 1) as f64)
}
