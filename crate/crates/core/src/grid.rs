//! Uniform grids over bounded intervals.

use crate::error::{Error, Result};
use crate::interval::Interval;
use serde::{Deserialize, Serialize};

/// `n` equally spaced points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl UniformGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::UnboundedDomain(format!("grid [{lo}, {hi}]")));
        }
        if lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "grid needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 3 points, got {n}"
            )));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn over(iv: &Interval, n: usize) -> Result<Self> {
        Self::new(iv.lo(), iv.hi(), n)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi).expect("validated bounds")
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// The `i`-th node; the last node is exactly `hi`.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Index of the closest node, `None` outside the grid range.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        if !(self.lo..=self.hi).contains(&x) {
            let h = 0.5 * self.spacing();
            if x < self.lo - h || x > self.hi + h || x.is_nan() {
                return None;
            }
        }
        let k = ((x - self.lo) / self.spacing()).round();
        Some((k.max(0.0) as usize).min(self.n - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = UniformGrid::new(-1.0, 1.0, 201).unwrap();
        assert_eq!(g.point(0), -1.0);
        assert_eq!(g.point(200), 1.0);
        assert_eq!(g.point(100), 0.0);
    }

    #[test]
    fn nearest() {
        let g = UniformGrid::new(0.0, 1.0, 11).unwrap();
        assert_eq!(g.nearest_index(0.26), Some(3));
        assert_eq!(g.nearest_index(1.04), Some(10));
        assert_eq!(g.nearest_index(1.2), None);
    }

    #[test]
    fn rejects_bad() {
        assert!(UniformGrid::new(0.0, 1.0, 2).is_err());
        assert!(UniformGrid::new(1.0, 0.0, 5).is_err());
        assert!(UniformGrid::new(0.0, f64::INFINITY, 5).is_err());
    }
}
