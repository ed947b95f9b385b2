//! Random K-sparse complex channel realizations.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::rng::complex_gaussian;
use crate::{Error, Result, C64};

/// Law of the dominant (nonzero) taps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TapDistribution {
    /// Every dominant tap has magnitude `1/sqrt(k)` and a uniform phase, so
    /// `||h||_2 = 1` for every realization.
    EqualMagnitudeUniform,
    /// Dominant taps are i.i.d. `CN(0, 1/k)`; unit energy holds in expectation.
    Gaussian,
}

impl TapDistribution {
    pub fn label(self) -> &'static str {
        match self {
            TapDistribution::EqualMagnitudeUniform => "uniform",
            TapDistribution::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for TapDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TapDistribution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" | "equal_magnitude_uniform" | "equalmagnitudeuniform" => {
                Ok(TapDistribution::EqualMagnitudeUniform)
            }
            "gaussian" => Ok(TapDistribution::Gaussian),
            other => Err(format!(
                "unknown tap distribution `{other}` (expected uniform|gaussian)"
            )),
        }
    }
}

/// Length-N complex channel with K dominant taps.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseChannel {
    taps: Vec<C64>,
    support: Vec<usize>,
}

impl SparseChannel {
    /// Builds a channel from explicit taps; the support is the set of nonzero
    /// positions.
    pub fn from_taps(taps: Vec<C64>) -> Self {
        let support = taps
            .iter()
            .enumerate()
            .filter(|(_, t)| **t != C64::new(0.0, 0.0))
            .map(|(i, _)| i)
            .collect();
        Self { taps, support }
    }

    pub fn taps(&self) -> &[C64] {
        &self.taps
    }

    /// Strictly increasing indices of the dominant taps.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

/// Draws a K-sparse channel: support uniform without replacement over
/// `[0, n)`, dominant taps from `dist`.
pub fn generate_sparse_channel<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    dist: TapDistribution,
    rng: &mut R,
) -> Result<SparseChannel> {
    if k == 0 || k > n {
        return Err(Error::InvalidSparsity { k, n });
    }
    let mut support = index::sample(rng, n, k).into_vec();
    support.sort_unstable();

    let mut taps = vec![C64::new(0.0, 0.0); n];
    let kf = k as f64;
    for &i in &support {
        taps[i] = match dist {
            TapDistribution::EqualMagnitudeUniform => {
                let theta = rng.random::<f64>() * std::f64::consts::TAU;
                C64::from_polar(1.0 / kf.sqrt(), theta)
            }
            TapDistribution::Gaussian => complex_gaussian(rng, 1.0 / kf),
        };
    }
    Ok(SparseChannel { taps, support })
}
