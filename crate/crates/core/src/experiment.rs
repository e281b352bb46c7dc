//! Replication harness for the ratio of two normal means.
//!
//! Each replication draws `n` observations of `Y` and `Y'`, updates the
//! posterior of each mean, and evaluates the possibility of `mu / mu' = r`
//! on a fixed grid. Curves are averaged across replications.
//!
//! Draws come from ChaCha20 (a counter-based generator with a 64-bit
//! stream id): the generator is seeded with the experiment seed and
//! replication `i` uses stream `i`, so results do not depend on thread
//! scheduling. Normal variates use Box-Muller.

use crate::error::{invalid, Error, Result};
use crate::inference::{normal_known_variance_update, ratio_curve, NormalGammaState};
use crate::possibility::PossibilityFn;
use crate::serde_ext::sig17;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Environment variable capping the worker count (0 or unset = all cores).
pub const THREADS_VAR: &str = "POSSIC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Normal,
    /// Uniform with the given location and standard deviation.
    Uniform,
}

/// One observation stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub location: f64,
    pub scale: f64,
    pub kind: GeneratorKind,
}

impl StreamSpec {
    pub fn normal(location: f64, scale: f64) -> Self {
        Self {
            location,
            scale,
            kind: GeneratorKind::Normal,
        }
    }

    /// `n` draws from stream `stream` of the generator seeded with `seed`.
    pub fn sample(&self, seed: u64, stream: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        self.draw(&mut rng, n)
    }

    fn draw(&self, rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
        match self.kind {
            GeneratorKind::Normal => standard_normals(rng, n)
                .into_iter()
                .map(|z| self.location + self.scale * z)
                .collect(),
            GeneratorKind::Uniform => {
                let half = self.scale * 3f64.sqrt();
                (0..n)
                    .map(|_| self.location + half * (2.0 * rng.random::<f64>() - 1.0))
                    .collect()
            }
        }
    }
}

/// Box-Muller pairs; `u1` is taken in `(0, 1]` so the logarithm is finite.
fn standard_normals(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let u1 = 1.0 - rng.random::<f64>();
        let u2 = rng.random::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        out.push(radius * angle.cos());
        out.push(radius * angle.sin());
    }
    out.truncate(n);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanModel {
    /// Unknown mean and precision with a normal-gamma prior; the mean's
    /// posterior is a Student-t.
    Students,
    /// Known variance (the stream's scale squared) with a normal prior of
    /// precision `k / variance` centred at `mu`.
    NormalKnownVariance,
}

/// Uniform grid of ratios plus isolated sentinel points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    #[serde(default)]
    pub sentinels: Vec<f64>,
}

impl RatioGrid {
    /// Sorted grid nodes and sentinels.
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi && self.points >= 2) {
            return invalid("ratio grid needs finite lo < hi and at least 2 points");
        }
        if self.sentinels.iter().any(|s| !s.is_finite()) {
            return invalid("sentinels must be finite");
        }
        let mut v = crate::grid::UniformGrid::new(self.lo, self.hi, self.points)?.points();
        v.extend_from_slice(&self.sentinels);
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(v)
    }
}

impl Default for RatioGrid {
    fn default() -> Self {
        Self {
            lo: -500.0,
            hi: 500.0,
            points: 2001,
            sentinels: vec![-1e4, 1e4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub n_obs: usize,
    pub replications: usize,
    pub numerator: StreamSpec,
    pub denominator: StreamSpec,
    pub numerator_prior: NormalGammaState,
    pub denominator_prior: NormalGammaState,
    pub model: MeanModel,
    pub r_grid: RatioGrid,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_obs: 10,
            replications: 1000,
            numerator: StreamSpec::normal(1.0, 1.0),
            denominator: StreamSpec::normal(0.01, 0.1),
            numerator_prior: NormalGammaState::flat(),
            denominator_prior: NormalGammaState::flat(),
            model: MeanModel::Students,
            r_grid: RatioGrid::default(),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_obs < 1 || self.replications < 1 {
            return invalid("n_obs and replications must be at least 1");
        }
        for s in [&self.numerator, &self.denominator] {
            if !(s.scale > 0.0 && s.scale.is_finite() && s.location.is_finite()) {
                return invalid("stream scales must be positive and locations finite");
            }
        }
        for p in [&self.numerator_prior, &self.denominator_prior] {
            NormalGammaState::new(p.k, p.mu, p.alpha, p.beta)?;
        }
        self.r_grid.values()?;
        Ok(())
    }
}

/// Across-replication summary for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub n_obs: usize,
    pub r: Vec<f64>,
    pub mean_f: Vec<f64>,
    /// Population standard deviation across replications.
    pub std_f: Vec<f64>,
    pub maps: Vec<f64>,
    pub map_mean: f64,
    /// `f_{mu'}(0)` for each replication: the limit of every curve as
    /// `|r| -> inf`.
    pub denominator_at_zero: Vec<f64>,
}

impl ReplicationSummary {
    pub fn map_std(&self) -> f64 {
        mean_std(self.maps.iter().copied()).1
    }

    pub fn denominator_at_zero_mean(&self) -> f64 {
        mean_std(self.denominator_at_zero.iter().copied()).0
    }

    /// Mean curve at the grid point nearest `r`.
    pub fn mean_at(&self, r: f64) -> f64 {
        let i = self
            .r
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - r).abs().total_cmp(&(b.1 - r).abs()))
            .map(|(i, _)| i)
            .expect("non-empty grid");
        self.mean_f[i]
    }

    /// `r,mean_f,std_f`.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("r,mean_f,std_f\n");
        for ((r, m), s) in self.r.iter().zip(&self.mean_f).zip(&self.std_f) {
            out.push_str(&format!("{},{},{}\n", sig17(*r), sig17(*m), sig17(*s)));
        }
        out
    }

    /// `replication,map`.
    pub fn maps_csv(&self) -> String {
        let mut out = String::from("replication,map\n");
        for (i, m) in self.maps.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", sig17(*m)));
        }
        out
    }
}

/// Mean and population standard deviation, accumulated in index order.
fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = crate::numerics::neumaier_sum(xs.clone()) / n;
    let var = crate::numerics::neumaier_sum(xs.map(|x| (x - mean) * (x - mean))) / n;
    (mean, var.sqrt())
}

struct Replication {
    curve: Vec<f64>,
    map: f64,
    den_at_zero: f64,
}

fn mean_posterior(
    model: MeanModel,
    prior: &NormalGammaState,
    stream: &StreamSpec,
    ys: &[f64],
) -> Result<PossibilityFn> {
    match model {
        MeanModel::Students => prior.update(ys)?.student_marginal(),
        MeanModel::NormalKnownVariance => {
            let variance = stream.scale * stream.scale;
            let p = PossibilityFn::normal_precision(prior.mu, prior.k / variance)?;
            normal_known_variance_update(&p, variance, ys)
        }
    }
}

fn replicate(cfg: &ExperimentConfig, rs: &[f64], ys: &[f64], ys_prime: &[f64]) -> Result<Replication> {
    let num = mean_posterior(cfg.model, &cfg.numerator_prior, &cfg.numerator, ys)?;
    let den = mean_posterior(cfg.model, &cfg.denominator_prior, &cfg.denominator, ys_prime)?;
    let map = num.expected_value()?.unique()? / den.expected_value()?.unique()?;
    Ok(Replication {
        curve: ratio_curve(&num, &den, rs)?,
        map,
        den_at_zero: den.value(0.0),
    })
}

/// Worker pool sized by `POSSIC_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidParameter(format!("{THREADS_VAR} must be a non-negative integer, got '{v}'")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))
}

/// Observations `(y, y')` of replication `i`: stream `i` of the seeded
/// generator, `y` drawn first.
pub fn replication_data(cfg: &ExperimentConfig, i: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(i as u64);
    let ys = cfg.numerator.draw(&mut rng, cfg.n_obs);
    let ys_prime = cfg.denominator.draw(&mut rng, cfg.n_obs);
    (ys, ys_prime)
}

/// Runs `cfg.replications` independent replications.
pub fn run_ratio_experiment(cfg: &ExperimentConfig) -> Result<ReplicationSummary> {
    cfg.validate()?;
    let rs = cfg.r_grid.values()?;
    let reps = thread_pool()?.install(|| {
        (0..cfg.replications)
            .into_par_iter()
            .map(|i| {
                let (ys, ys_prime) = replication_data(cfg, i);
                replicate(cfg, &rs, &ys, &ys_prime)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(aggregate(cfg.n_obs, rs, reps))
}

/// A single replication on supplied observations.
pub fn run_ratio_experiment_on(cfg: &ExperimentConfig, ys: &[f64], ys_prime: &[f64]) -> Result<ReplicationSummary> {
    cfg.validate()?;
    if ys.is_empty() || ys.len() != ys_prime.len() {
        return invalid("need the same positive number of y and y_prime observations");
    }
    let rs = cfg.r_grid.values()?;
    let rep = replicate(cfg, &rs, ys, ys_prime)?;
    Ok(aggregate(ys.len(), rs, vec![rep]))
}

fn aggregate(n_obs: usize, r: Vec<f64>, reps: Vec<Replication>) -> ReplicationSummary {
    let (mean_f, std_f) = (0..r.len())
        .map(|j| mean_std(reps.iter().map(|rep| rep.curve[j])))
        .unzip();
    let maps: Vec<f64> = reps.iter().map(|rep| rep.map).collect();
    ReplicationSummary {
        n_obs,
        r,
        mean_f,
        std_f,
        map_mean: mean_std(maps.iter().copied()).0,
        maps,
        denominator_at_zero: reps.iter().map(|rep| rep.den_at_zero).collect(),
    }
}

/// Observations read from CSV with header `y` or `y,y_prime`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub y: Vec<f64>,
    pub y_prime: Option<Vec<f64>>,
}

pub fn parse_observations(text: &str) -> Result<Observations> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::InvalidParameter(format!("observation csv: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    let paired = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["y"] => false,
        ["y", "y_prime"] => true,
        _ => return invalid(format!("observation header must be 'y' or 'y,y_prime', got '{}'", header.join(","))),
    };
    let (mut y, mut y_prime) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidParameter(format!("observation csv: {e}")))?;
        let field = |k: usize| -> Result<f64> {
            let s = rec.get(k).unwrap_or("");
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => invalid(format!("row {}: '{s}' is not a finite number", line + 2)),
            }
        };
        y.push(field(0)?);
        if paired {
            y_prime.push(field(1)?);
        }
    }
    if y.is_empty() {
        return Err(Error::Empty("observations"));
    }
    Ok(Observations {
        y,
        y_prime: paired.then_some(y_prime),
    })
}
