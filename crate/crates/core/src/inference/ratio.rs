use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interval::Interval;
use crate::numerics::{global_sup_on, real_roots, OptimizerConfig};
use crate::possibility::{PossibilityFn, Repr, Tabulated};
use crate::transform::{pushforward, Transform};
use rayon::prelude::*;

/// `d/dx ln f = -P(x) / Q(x)` with `Q > 0`, for the smooth symmetric families.
struct LogSlope {
    p: Vec<f64>,
    q: Vec<f64>,
}

fn log_slope(pf: &PossibilityFn) -> Option<LogSlope> {
    match &pf.repr {
        Repr::Normal { mean, precision } if *precision > 0.0 && precision.is_finite() => {
            Some(LogSlope {
                p: vec![-precision * mean, *precision],
                q: vec![1.0],
            })
        }
        Repr::StudentT { dof, loc, scale } if *dof > 0.0 => Some(LogSlope {
            p: vec![-dof * loc, *dof],
            q: vec![dof * scale + loc * loc, -2.0 * loc, 1.0],
        }),
        _ => None,
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len().max(b.len()))
        .map(|i| a.get(i).unwrap_or(&0.0) + b.get(i).unwrap_or(&0.0))
        .collect()
}

/// Coefficients of `c(r t)` as a polynomial in `t`.
fn dilate(c: &[f64], r: f64) -> Vec<f64> {
    let mut pow = 1.0;
    c.iter()
        .map(|v| {
            let out = v * pow;
            pow *= r;
            out
        })
        .collect()
}

/// `sup_t num(r t) den(t)`: the possibility of `x / y = r` for independent
/// `x ~ num`, `y ~ den`.
///
/// Normal and Student-t pairs are maximised exactly through the roots of
/// the stationarity polynomial `r P1(r t) Q2(t) + P2(t) Q1(r t)`; other
/// pairs by a bounded scan in `t`.
pub fn ratio_value(num: &PossibilityFn, den: &PossibilityFn, r: f64) -> Result<f64> {
    if r.is_nan() {
        return Err(Error::NaN("ratio"));
    }
    if let Some(d) = den.as_point_mass() {
        return Ok(num.value(r * d));
    }
    if let Some(a) = num.as_point_mass() {
        return Ok(if r != 0.0 {
            den.value(a / r)
        } else if a == 0.0 {
            1.0
        } else {
            0.0
        });
    }
    let phi = |t: f64| num.ln_value(r * t) + den.ln_value(t);
    if let (Some(s1), Some(s2)) = (log_slope(num), log_slope(den)) {
        let lhs = poly_mul(&dilate(&s1.p, r), &s2.q).into_iter().map(|c| r * c).collect::<Vec<_>>();
        let rhs = poly_mul(&s2.p, &dilate(&s1.q, r));
        let mut candidates = real_roots(&poly_add(&lhs, &rhs));
        candidates.push(den.expected_value()?.unique()?);
        let best = candidates
            .into_iter()
            .map(phi)
            .fold(f64::NEG_INFINITY, f64::max);
        return Ok(best.exp());
    }
    let den_dom = den.working_domain()?;
    let t_dom = match (r != 0.0, num.working_domain()) {
        (true, Ok(nd)) => nd.affine(1.0 / r, 0.0).intersect(&den_dom).unwrap_or(den_dom),
        _ => den_dom,
    };
    let best = global_sup_on(phi, t_dom, &OptimizerConfig::default())?;
    Ok(best.value.exp())
}

/// [`ratio_value`] at every `r`, evaluated in parallel.
pub fn ratio_curve(num: &PossibilityFn, den: &PossibilityFn, rs: &[f64]) -> Result<Vec<f64>> {
    if rs.is_empty() {
        return Err(Error::Empty("ratio grid"));
    }
    rs.par_iter().map(|&r| ratio_value(num, den, r)).collect()
}

/// Possibility function of the ratio tabulated on `grid`; point-mass
/// denominators are handled exactly.
pub fn ratio_posterior(num: &PossibilityFn, den: &PossibilityFn, grid: &UniformGrid) -> Result<PossibilityFn> {
    if let Some(d) = den.as_point_mass() {
        if d == 0.0 {
            return Err(Error::InvalidParameter("denominator is exactly zero".into()));
        }
        return pushforward(num, &Transform::affine(1.0 / d, 0.0), Some(Interval::REAL));
    }
    let values = ratio_curve(num, den, &grid.points())?;
    Ok(PossibilityFn::tabulated(Tabulated::normalized(*grid, values)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Grid maximum, then a second grid over the two cells around it.
    fn brute(num: &PossibilityFn, den: &PossibilityFn, r: f64, lo: f64, hi: f64) -> f64 {
        let h = |t: f64| num.value(r * t) * den.value(t);
        let g = UniformGrid::new(lo, hi, 200_001).unwrap();
        let (i, _) = g
            .points()
            .into_iter()
            .map(h)
            .enumerate()
            .fold((0, -1.0), |b, (i, v)| if v > b.1 { (i, v) } else { b });
        let a = g.point(i.saturating_sub(1));
        let b = g.point((i + 1).min(g.len() - 1));
        UniformGrid::new(a, b, 20_001)
            .unwrap()
            .points()
            .into_iter()
            .map(h)
            .fold(0.0, f64::max)
    }

    #[test]
    fn point_masses_divide() {
        let a = PossibilityFn::point_mass(2.0).unwrap();
        let b = PossibilityFn::point_mass(4.0).unwrap();
        let g = UniformGrid::new(0.0, 1.0, 11).unwrap();
        let p = ratio_posterior(&a, &b, &g).unwrap();
        assert_eq!(p.as_point_mass(), Some(0.5));
        assert_eq!(ratio_value(&a, &b, 0.5).unwrap(), 1.0);
        assert_eq!(ratio_value(&a, &b, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn exact_pairs_match_brute_force() {
        let pairs = [
            (PossibilityFn::normal(1.0, 0.5).unwrap(), PossibilityFn::normal(0.5, 0.2).unwrap()),
            (
                PossibilityFn::student_t(4.0, 1.0, 0.3).unwrap(),
                PossibilityFn::student_t(6.0, 0.1, 0.05).unwrap(),
            ),
            (PossibilityFn::normal(-2.0, 1.0).unwrap(), PossibilityFn::student_t(3.0, 0.8, 0.4).unwrap()),
        ];
        for (num, den) in &pairs {
            for r in [-30.0, -2.0, 0.0, 0.7, 2.0, 5.0, 40.0] {
                let v = ratio_value(num, den, r).unwrap();
                let b = brute(num, den, r, -20.0, 20.0);
                assert!(v >= b - 1e-12, "{r}: {v} < {b}");
                assert!(v - b < 1e-9, "{r}: {v} vs {b}");
            }
        }
    }

    #[test]
    fn mode_is_ratio_of_modes() {
        let num = PossibilityFn::student_t(10.0, 1.2, 0.1).unwrap();
        let den = PossibilityFn::student_t(10.0, 0.4, 0.01).unwrap();
        assert_relative_eq!(ratio_value(&num, &den, 3.0).unwrap(), 1.0, max_relative = 1e-14);
        let g = UniformGrid::new(0.0, 10.0, 1001).unwrap();
        let p = ratio_posterior(&num, &den, &g).unwrap();
        let m = p.expected_value().unwrap().hull();
        assert!((m.midpoint() - 3.0).abs() <= g.spacing());
    }

    #[test]
    fn tail_tends_to_denominator_at_zero() {
        let num = PossibilityFn::normal(1.0, 0.1).unwrap();
        let den = PossibilityFn::normal(0.5, 0.1).unwrap();
        let at_zero = den.eval(0.0).unwrap();
        let far = ratio_value(&num, &den, 1e6).unwrap();
        assert!((far - at_zero).abs() < 1e-3);
        let g = [-1e6, 1e6];
        let both = ratio_curve(&num, &den, &g).unwrap();
        assert!(both[0] < 1.0 && both[1] < 1.0);
    }

    #[test]
    fn general_pair_uses_scan() {
        let num = PossibilityFn::gamma(3.0, 2.0).unwrap();
        let den = PossibilityFn::gamma(5.0, 4.0).unwrap();
        for r in [0.5, 1.2, 3.0] {
            let v = ratio_value(&num, &den, r).unwrap();
            let b = brute(&num, &den, r, 0.0, 10.0);
            assert!((v - b).abs() < 1e-6, "{r}: {v} vs {b}");
        }
    }

    #[test]
    fn empty_grid_rejected() {
        let p = PossibilityFn::normal(0.0, 1.0).unwrap();
        assert!(ratio_curve(&p, &p, &[]).is_err());
    }
}
