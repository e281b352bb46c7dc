use super::{Kind, PossibilityFn, Repr, Tabulated};
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interval::Interval;
use crate::serde_ext::{de_vec_f64, ser_vec_f64};
use serde::{Deserialize, Serialize};

pub const RECORD_VERSION: u32 = 1;

/// Points used when a loss-based function is written out as a table.
const LOSS_EXPORT_POINTS: usize = 2001;

/// Serialised form of a [`PossibilityFn`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PossibilityRecord {
    pub version: u32,
    pub kind: Kind,
    #[serde(serialize_with = "ser_vec_f64", deserialize_with = "de_vec_f64")]
    pub params: Vec<f64>,
    pub domain: Interval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub values: Vec<f64>,
}

impl PossibilityFn {
    /// Loss-based functions are exported as a table over their domain.
    pub fn to_record(&self) -> Result<PossibilityRecord> {
        let table = match &self.repr {
            Repr::Tabulated(t) => Some(t.clone()),
            Repr::LossBased(l) => Some(self.tabulate(Some(l.domain), LOSS_EXPORT_POINTS)?),
            _ => None,
        };
        Ok(match table {
            Some(t) => PossibilityRecord {
                version: RECORD_VERSION,
                kind: Kind::Tabulated,
                params: Vec::new(),
                domain: t.grid().interval(),
                grid: Some(GridRecord {
                    lo: t.grid().lo(),
                    hi: t.grid().hi(),
                    n: t.grid().len(),
                    values: t.values().to_vec(),
                }),
            },
            None => PossibilityRecord {
                version: RECORD_VERSION,
                kind: self.kind(),
                params: self.params(),
                domain: self.support(),
                grid: None,
            },
        })
    }

    pub fn from_record(rec: &PossibilityRecord) -> Result<Self> {
        if rec.version != RECORD_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported record version {} (expected {RECORD_VERSION})",
                rec.version
            )));
        }
        match rec.kind {
            Kind::Tabulated | Kind::LossBased => {
                let g = rec
                    .grid
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParameter("tabulated record without grid".into()))?;
                let grid = UniformGrid::new(g.lo, g.hi, g.n)?;
                Ok(Self::tabulated(Tabulated::new(grid, g.values.clone())?))
            }
            kind => Self::from_params(kind, &rec.params),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_record()?)
            .map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: PossibilityRecord =
            serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Self::from_record(&rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::OptimizerConfig;

    #[test]
    fn parametric_round_trip() {
        for pf in [
            PossibilityFn::normal(1.0, 2.0).unwrap(),
            PossibilityFn::normal(0.0, f64::INFINITY).unwrap(),
            PossibilityFn::gamma(2.0, 4.0).unwrap(),
            PossibilityFn::inverse_gamma(2.0, 4.0).unwrap(),
            PossibilityFn::beta(1.0, 3.0).unwrap(),
            PossibilityFn::chi_squared(9.0, 2.0).unwrap(),
            PossibilityFn::student_t(2.0, 2.0, 0.5).unwrap(),
            PossibilityFn::uninformative(),
        ] {
            let js = pf.to_json().unwrap();
            let back = PossibilityFn::from_json(&js).unwrap();
            assert_eq!(back.kind(), pf.kind());
            assert_eq!(back.params(), pf.params(), "{js}");
        }
    }

    #[test]
    fn loss_based_exports_table() {
        let f = PossibilityFn::from_loss(
            |x| x * x,
            Interval::new(-2.0, 2.0).unwrap(),
            &OptimizerConfig::default(),
        )
        .unwrap();
        let back = PossibilityFn::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back.kind(), Kind::Tabulated);
        assert!((back.eval(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn wrong_version_rejected() {
        let mut rec = PossibilityFn::normal(0.0, 1.0).unwrap().to_record().unwrap();
        rec.version = 99;
        assert!(PossibilityFn::from_record(&rec).is_err());
    }
}
