use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use log::warn;

/// Values below this are stored as exact zeros.
pub const TRUNCATION: f64 = 1e-12;

/// Deviation of the maximum from 1 tolerated without a warning.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// A possibility function sampled on a uniform grid, linearly interpolated
/// between nodes and zero outside the grid range.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl Tabulated {
    /// Validates values in `[0, 1]` whose maximum is 1 within `1e-9`.
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        Self::check_shape(&grid, &values)?;
        let max = values.iter().copied().fold(0.0, f64::max);
        if (max - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "tabulated maximum is {max}, expected 1"
            )));
        }
        let values = values.into_iter().map(|v| clean(v.min(1.0))).collect();
        Ok(Self { grid, values })
    }

    /// Rescales so the maximum is exactly 1, warning if the correction
    /// exceeds [`NORMALIZATION_TOL`].
    pub fn normalized(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        Self::check_shape(&grid, &values)?;
        let max = values.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(Error::DegeneratePosterior);
        }
        if (max - 1.0).abs() > NORMALIZATION_TOL {
            warn!("renormalising tabulated function with maximum {max}");
        }
        let values = values
            .into_iter()
            .map(|v| if v == max { 1.0 } else { clean(v / max) })
            .collect();
        Ok(Self { grid, values })
    }

    fn check_shape(grid: &UniformGrid, values: &[f64]) -> Result<()> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values on a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NaN("tabulated values"));
        }
        if let Some(v) = values.iter().find(|&&v| v < 0.0 || v.is_infinite()) {
            return Err(Error::InvalidParameter(format!(
                "tabulated value {v} is negative or infinite"
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x < g.lo() || x > g.hi() {
            return 0.0;
        }
        let pos = (x - g.lo()) / g.spacing();
        let i = (pos.floor() as usize).min(g.len() - 2);
        let t = (x - g.point(i)) / g.spacing();
        if t <= 0.0 {
            return self.values[i];
        }
        if t >= 1.0 {
            return self.values[i + 1];
        }
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// Exact supremum of the interpolant over `[a, b]`.
    pub fn sup_on(&self, a: f64, b: f64) -> f64 {
        let g = &self.grid;
        let lo = a.max(g.lo());
        let hi = b.min(g.hi());
        if lo > hi {
            return 0.0;
        }
        let mut best = self.eval(lo).max(self.eval(hi));
        for (i, &v) in self.values.iter().enumerate() {
            let x = g.point(i);
            if x >= lo && x <= hi && v > best {
                best = v;
            }
        }
        best
    }

    pub fn powf(&self, b: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| clean(v.powf(b))).collect(),
        }
    }
}

fn clean(v: f64) -> f64 {
    if v < TRUNCATION {
        0.0
    } else {
        v
    }
}
