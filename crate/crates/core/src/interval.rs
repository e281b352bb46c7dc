//! Closed intervals on the extended real line and finite unions of them.

use crate::error::{Error, Result};
use crate::serde_ext::{de_f64, ser_f64};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A closed interval `[lo, hi]`, possibly with infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(serialize_with = "ser_f64", deserialize_with = "de_f64")]
    lo: f64,
    #[serde(serialize_with = "ser_f64", deserialize_with = "de_f64")]
    hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::NaN("interval bound"));
        }
        if lo > hi {
            return Err(Error::MalformedSet(format!("[{lo}, {hi}] has lo > hi")));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::MalformedSet(format!("[{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x)
    }

    /// `[0, inf)`.
    pub fn nonnegative() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lo).min(self.hi)
    }

    /// Image under `x -> a x + b`.
    pub fn affine(&self, a: f64, b: f64) -> Interval {
        if a == 0.0 {
            return Interval { lo: b, hi: b };
        }
        let (p, q) = (a * self.lo + b, a * self.hi + b);
        Interval {
            lo: p.min(q),
            hi: p.max(q),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A finite union of closed intervals, stored sorted and merged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn real() -> Self {
        Self::from(Interval::REAL)
    }

    /// Sorts and merges overlapping or touching components.
    pub fn new(parts: Vec<Interval>) -> Self {
        let mut parts = parts;
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => merged.push(p),
            }
        }
        Self { parts: merged }
    }

    pub fn points(xs: &[f64]) -> Result<Self> {
        Ok(Self::new(
            xs.iter().map(|&x| Interval::point(x)).collect::<Result<_>>()?,
        ))
    }

    pub fn components(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn hull(&self) -> Option<Interval> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some(Interval {
            lo: first.lo,
            hi: last.hi,
        })
    }

    pub fn intersect_interval(&self, iv: &Interval) -> IntervalSet {
        Self {
            parts: self.parts.iter().filter_map(|p| p.intersect(iv)).collect(),
        }
    }

    pub fn affine(&self, a: f64, b: f64) -> IntervalSet {
        Self::new(self.parts.iter().map(|p| p.affine(a, b)).collect())
    }

    /// `{x + y : x in self, y in other}`.
    pub fn minkowski_sum(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for p in &self.parts {
            for q in &other.parts {
                out.push(Interval {
                    lo: p.lo + q.lo,
                    hi: p.hi + q.hi,
                });
            }
        }
        Self::new(out)
    }

    /// Distance from `x` to the nearest component, 0 inside.
    pub fn distance(&self, x: f64) -> f64 {
        self.parts
            .iter()
            .map(|p| {
                if p.contains(x) {
                    0.0
                } else if x < p.lo {
                    p.lo - x
                } else {
                    x - p.hi
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        Self { parts: vec![iv] }
    }
}

impl TryFrom<Vec<Interval>> for IntervalSet {
    type Error = Error;

    fn try_from(parts: Vec<Interval>) -> Result<Self> {
        for p in &parts {
            Interval::new(p.lo, p.hi)?;
        }
        Ok(Self::new(parts))
    }
}

impl From<IntervalSet> for Vec<Interval> {
    fn from(s: IntervalSet) -> Self {
        s.parts
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" u "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reversed_bounds() {
        assert!(matches!(Interval::new(2.0, 1.0), Err(Error::MalformedSet(_))));
        assert!(matches!(Interval::new(f64::NAN, 1.0), Err(Error::NaN(_))));
    }

    #[test]
    fn merge_sorts_and_joins() {
        let s = IntervalSet::new(vec![
            Interval::new(3.0, 4.0).unwrap(),
            Interval::new(0.0, 1.0).unwrap(),
            Interval::new(0.5, 2.0).unwrap(),
        ]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.components()[0], Interval::new(0.0, 2.0).unwrap());
        assert_eq!(s.hull().unwrap(), Interval::new(0.0, 4.0).unwrap());
    }

    #[test]
    fn minkowski_of_points() {
        let a = IntervalSet::points(&[1.0]).unwrap();
        let b = IntervalSet::points(&[2.0]).unwrap();
        assert!(a.minkowski_sum(&b).contains(3.0));
        assert_eq!(a.minkowski_sum(&b).len(), 1);
    }

    #[test]
    fn affine_negative_flips() {
        let iv = Interval::new(1.0, 2.0).unwrap().affine(-2.0, 1.0);
        assert_eq!(iv, Interval::new(-3.0, -1.0).unwrap());
    }

    #[test]
    fn json_round_trip_with_infinity() {
        let s = IntervalSet::from(Interval::nonnegative());
        let txt = serde_json::to_string(&s).unwrap();
        assert!(txt.contains("\"inf\""));
        let back: IntervalSet = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn distance_to_set() {
        let s = IntervalSet::points(&[-1.0, 1.0]).unwrap();
        assert_eq!(s.distance(0.0), 1.0);
        assert_eq!(s.distance(1.0), 0.0);
    }
}
