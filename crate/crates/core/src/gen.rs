//! Random symmetric instance generation and per-instance characteristics.
//!
//! Each instance draws one of four weight distributions with randomized
//! parameters, symmetrizes the matrix, floors a random symmetric subset of
//! edges to a small positive value, then rescales so that the 95th
//! percentile of the positive entries lands on a fixed target before a
//! constant offset is added.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Exp, LogNormal, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, stream, Stream};
use crate::stats::percentile;
use crate::tsp::TspInstance;

const MAX_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Uniform,
    Normal,
    Exponential,
    Lognormal,
}

impl Distribution {
    pub const ALL: [Distribution; 4] = [
        Distribution::Uniform,
        Distribution::Normal,
        Distribution::Exponential,
        Distribution::Lognormal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Normal => "normal",
            Distribution::Exponential => "exponential",
            Distribution::Lognormal => "lognormal",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Either a fixed distribution or a fresh uniform pick per instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistributionChoice {
    #[default]
    Random,
    Fixed(Distribution),
}

impl fmt::Display for DistributionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Random => f.write_str("random"),
            Self::Fixed(d) => d.fmt(f),
        }
    }
}

impl From<DistributionChoice> for String {
    fn from(choice: DistributionChoice) -> Self {
        choice.to_string()
    }
}

impl TryFrom<String> for DistributionChoice {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for DistributionChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "uniform" => Ok(Self::Fixed(Distribution::Uniform)),
            "normal" => Ok(Self::Fixed(Distribution::Normal)),
            "exponential" => Ok(Self::Fixed(Distribution::Exponential)),
            "lognormal" => Ok(Self::Fixed(Distribution::Lognormal)),
            other => Err(Error::InvalidConfig(format!(
                "unknown distribution '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n: usize,
    pub distribution: DistributionChoice,
    /// Range of the per-instance keep probability for the edge mask.
    pub density_threshold_range: (f64, f64),
    /// Value given to masked edges before scaling.
    pub floor_value: f64,
    pub scale_target: f64,
    pub scale_percentile: f64,
    pub offset: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 100,
            distribution: DistributionChoice::Random,
            density_threshold_range: (0.3, 1.0),
            floor_value: 0.01,
            scale_target: 9.9,
            scale_percentile: 95.0,
            offset: 0.1,
        }
    }
}

impl GenConfig {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.density_threshold_range;
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "density threshold range ({lo}, {hi}) must satisfy 0 < low <= high <= 1"
            )));
        }
        if !(self.floor_value > 0.0 && self.floor_value.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "floor value must be positive, got {}",
                self.floor_value
            )));
        }
        if !(self.scale_target > 0.0 && self.scale_target.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "scale target must be positive, got {}",
                self.scale_target
            )));
        }
        if !(self.scale_percentile > 0.0 && self.scale_percentile <= 100.0) {
            return Err(Error::InvalidConfig(format!(
                "scale percentile must be in (0, 100], got {}",
                self.scale_percentile
            )));
        }
        if !(self.offset >= 0.0 && self.offset.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "offset must be nonnegative, got {}",
                self.offset
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceCharacteristics {
    pub density: f64,
    pub avg_edge_weight: f64,
    pub std_edge_weight: f64,
    pub cv_edge_weight: f64,
    pub edge_weight_range: f64,
}

#[inline]
fn draw(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn sample_matrix<D: rand_distr::Distribution<f64>>(
    rng: &mut Stream,
    n: usize,
    dist: D,
    abs: bool,
) -> Vec<f64> {
    (0..n * n)
        .map(|_| {
            let v = dist.sample(rng);
            if abs {
                v.abs()
            } else {
                v
            }
        })
        .collect()
}

/// Matrix after sampling, symmetrizing and masking, before any scaling.
pub(crate) struct RawSample {
    pub weights: Vec<f64>,
    pub distribution: Distribution,
}

pub(crate) fn sample_unscaled(config: &GenConfig, rng: &mut Stream) -> RawSample {
    let n = config.n;
    let distribution = match config.distribution {
        DistributionChoice::Fixed(d) => d,
        DistributionChoice::Random => Distribution::ALL[rng.random_range(0..4)],
    };

    // parameter ranges are fixed by the generation scheme
    let mut m = match distribution {
        Distribution::Uniform => {
            let low = draw(rng, 0.1, 1.0);
            let high = draw(rng, low + 0.5, low + 5.0);
            sample_matrix(rng, n, Uniform::new(low, high).expect("high > low"), false)
        }
        Distribution::Normal => {
            let mean = draw(rng, 1.0, 5.0);
            let std = draw(rng, 0.1, 2.0);
            sample_matrix(rng, n, Normal::new(mean, std).expect("std > 0"), true)
        }
        Distribution::Exponential => {
            let scale = draw(rng, 0.5, 2.0);
            sample_matrix(rng, n, Exp::new(1.0 / scale).expect("rate > 0"), false)
        }
        Distribution::Lognormal => {
            let mean = draw(rng, 0.0, 2.0);
            let sigma = draw(rng, 0.1, 1.0);
            sample_matrix(
                rng,
                n,
                LogNormal::new(mean, sigma).expect("sigma > 0"),
                false,
            )
        }
    };

    for i in 0..n {
        m[i * n + i] = 0.0;
        for j in (i + 1)..n {
            let s = (m[i * n + j] + m[j * n + i]) / 2.0;
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }

    let (lo, hi) = config.density_threshold_range;
    let threshold = draw(rng, lo, hi);
    for i in 0..n {
        for j in (i + 1)..n {
            let keep = rng.random::<f64>() < threshold;
            if !keep {
                m[i * n + j] = config.floor_value;
                m[j * n + i] = config.floor_value;
            }
        }
    }

    RawSample {
        weights: m,
        distribution,
    }
}

fn positive_entries(weights: &[f64]) -> Vec<f64> {
    weights.iter().copied().filter(|&w| w > 0.0).collect()
}

/// Generates one instance; a pure function of `(config, seed)`.
pub fn generate_instance(config: &GenConfig, seed: u64) -> Result<TspInstance> {
    config.validate()?;
    let n = config.n;
    for attempt in 0..MAX_ATTEMPTS {
        let sub = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, &[attempt as u64])
        };
        let mut rng = stream(sub);
        let RawSample {
            mut weights,
            distribution,
        } = sample_unscaled(config, &mut rng);

        let positive = positive_entries(&weights);
        if positive.is_empty() {
            continue;
        }
        let p = percentile(&positive, config.scale_percentile);
        if !(p > 0.0 && p.is_finite()) {
            continue;
        }
        let factor = config.scale_target / p;
        for (k, w) in weights.iter_mut().enumerate() {
            *w = if k / n == k % n {
                0.0
            } else {
                *w * factor + config.offset
            };
        }
        let floor = config.floor_value * factor + config.offset;
        let instance = TspInstance::from_flat(n, weights)?
            .with_name(format!("{distribution}-n{n}-{seed:016x}"))
            .with_floor(floor);
        return Ok(instance);
    }
    Err(Error::DegenerateSample {
        attempts: MAX_ATTEMPTS,
    })
}

/// `count` instances; member `k` is generated from a seed derived from
/// `(master_seed, k)` so any member can be regenerated on its own.
pub fn generate_batch(
    config: &GenConfig,
    count: usize,
    master_seed: u64,
) -> Result<Vec<TspInstance>> {
    if count == 0 {
        return Err(Error::InvalidConfig(
            "batch count must be at least 1".into(),
        ));
    }
    (0..count)
        .map(|k| {
            generate_instance(config, batch_seed(master_seed, k)).map_err(|e| Error::Batch {
                index: k,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn batch_seed(master_seed: u64, index: usize) -> u64 {
    derive_seed(master_seed, &[index as u64])
}

/// Density and weight statistics over the off-diagonal entries.
///
/// Density counts entries strictly above the instance's floor weight (or
/// above zero when the instance carries no floor). The weight statistics
/// use the population standard deviation over all positive entries.
pub fn instance_characteristics(instance: &TspInstance) -> InstanceCharacteristics {
    let n = instance.n();
    let floor = instance.floor().unwrap_or(0.0);
    let mut above = 0usize;
    let mut count = 0usize;
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for w in instance.off_diagonal() {
        if w > floor {
            above += 1;
        }
        if w > 0.0 {
            count += 1;
            sum += w;
            min = min.min(w);
            max = max.max(w);
        }
    }
    if count == 0 {
        return InstanceCharacteristics {
            density: 0.0,
            avg_edge_weight: 0.0,
            std_edge_weight: 0.0,
            cv_edge_weight: 0.0,
            edge_weight_range: 0.0,
        };
    }
    let mean = sum / count as f64;
    let var = instance
        .off_diagonal()
        .filter(|&w| w > 0.0)
        .map(|w| (w - mean).powi(2))
        .sum::<f64>()
        / count as f64;
    let std = var.sqrt();
    InstanceCharacteristics {
        density: above as f64 / (n * (n - 1)) as f64,
        avg_edge_weight: mean,
        std_edge_weight: std,
        cv_edge_weight: if mean > 0.0 { std / mean } else { 0.0 },
        edge_weight_range: max - min,
    }
}
