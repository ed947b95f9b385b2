//! Metrics, the three-arm trial pipeline and the Monte-Carlo sweep.
//!
//! Per-trial randomness comes from [`crate::rng::trial_stream`]: the channel,
//! the training symbols and each arm's noise read separate streams keyed by
//! `(master_seed, trial_index)`. Trial `t` of every grid cell therefore sees
//! the same channel positions, training symbols and noise prefix, and only the
//! quantity under study changes between cells.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::channel::{generate_sparse_channel, SparseChannel, TapDistribution};
use crate::recovery::{cosamp, top_indices, ChannelEstimate, RecoveryConfig};
use crate::rng::{trial_stream, Substream};
use crate::sensing::{
    assemble_system, build_sensing_matrix, extract_virtual, extraction_pattern, generate_training,
    measure_full_rate, measure_rows, measure_subsampled, pattern_capacity, recombine, virtual_rows,
    AssembledSystem, NoiseMode,
};
use crate::{Error, Result, C64};

/// Estimator arm compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arm {
    /// CoSaMP on the `M` Nyquist-rate training measurements.
    TraditionalShort,
    /// CoSaMP on `M` recombined plus `M_e` virtual measurements.
    Proposed,
    /// CoSaMP on `M + M_e` Nyquist-rate measurements.
    BoundLong,
}

impl Arm {
    pub const ALL: [Arm; 3] = [Arm::TraditionalShort, Arm::Proposed, Arm::BoundLong];

    pub fn label(self) -> &'static str {
        match self {
            Arm::TraditionalShort => "traditional_short",
            Arm::Proposed => "proposed",
            Arm::BoundLong => "bound_long",
        }
    }

    fn noise_stream(self) -> Substream {
        match self {
            Arm::TraditionalShort => Substream::TraditionalNoise,
            Arm::Proposed => Substream::ProposedNoise,
            Arm::BoundLong => Substream::BoundNoise,
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Arm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "traditional_short" | "traditionalshort" => Ok(Arm::TraditionalShort),
            "proposed" => Ok(Arm::Proposed),
            "bound_long" | "boundlong" => Ok(Arm::BoundLong),
            other => Err(format!(
                "unknown arm `{other}` (expected traditional_short|proposed|bound_long)"
            )),
        }
    }
}

/// `sigma_n^2 = 10^(-snr/10)` for unit received power; infinite SNR is noiseless.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSlice {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub k: usize,
    pub me: usize,
    pub snr_db: f64,
    pub dist: TapDistribution,
    pub noise_mode: NoiseMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub arm: Arm,
    pub success: bool,
    /// `||h - h_hat||_2^2`
    pub squared_error: f64,
    pub trial_index: u64,
}

/// Channel and per-arm systems of one trial, before recovery.
#[derive(Debug, Clone)]
pub struct TrialRealization {
    pub channel: SparseChannel,
    pub systems: Vec<(Arm, AssembledSystem)>,
}

impl TrialRealization {
    pub fn system(&self, arm: Arm) -> Option<&AssembledSystem> {
        self.systems.iter().find(|(a, _)| *a == arm).map(|(_, s)| s)
    }
}

/// Draws the channel, training and noise of one trial and assembles the
/// system every requested arm will solve.
///
/// In `Independent` noise mode the proposed arm's first `M` rows reuse the
/// short arm's measurement (same stream), and its virtual rows get fresh
/// noise from the proposed stream.
pub fn realize_trial(
    slice: &TrialSlice,
    arms: &[Arm],
    trial_index: u64,
    master_seed: u64,
) -> Result<TrialRealization> {
    let stream = |s| trial_stream(master_seed, trial_index, s);
    let sigma2 = noise_variance(slice.snr_db);

    let channel = generate_sparse_channel(
        slice.n,
        slice.k,
        slice.dist,
        &mut stream(Substream::Channel),
    )?;
    let long_rows = slice.m + slice.me;
    let training = generate_training(slice.n, long_rows, &mut stream(Substream::Training))?;
    let x_long = build_sensing_matrix(&training, long_rows, slice.n)?;
    let x_short = x_long.truncated(slice.m)?;

    let no_rows = DVector::<C64>::zeros(0);
    let no_matrix = DMatrix::<C64>::zeros(0, slice.n);
    let full_rate = |x: &DMatrix<C64>, r: DVector<C64>| {
        assemble_system(&r, &no_rows, x, &no_matrix, sigma2, NoiseMode::Independent)
    };
    let short_measurement = || {
        measure_full_rate(
            &x_short,
            &channel,
            sigma2,
            &mut stream(Arm::TraditionalShort.noise_stream()),
        )
    };

    let mut systems = Vec::with_capacity(arms.len());
    for &arm in arms {
        let system = match arm {
            Arm::TraditionalShort => full_rate(x_short.as_matrix(), short_measurement()?)?,
            Arm::BoundLong => {
                let r =
                    measure_full_rate(&x_long, &channel, sigma2, &mut stream(arm.noise_stream()))?;
                full_rate(x_long.as_matrix(), r)?
            }
            Arm::Proposed => {
                let pattern = extraction_pattern(slice.m, slice.p, slice.me)?;
                let mut rng = stream(arm.noise_stream());
                match slice.noise_mode {
                    NoiseMode::Subsample => {
                        let grid =
                            measure_subsampled(&x_short, &channel, slice.p, sigma2, &mut rng)?;
                        let r = recombine(&grid);
                        let (r_e, x_e) = extract_virtual(&grid, &x_short, &pattern)?;
                        assemble_system(
                            &r,
                            &r_e,
                            x_short.as_matrix(),
                            &x_e,
                            sigma2,
                            NoiseMode::Subsample,
                        )?
                    }
                    NoiseMode::Independent => {
                        if !slice.n.is_multiple_of(slice.p) {
                            return Err(Error::BlockPartition {
                                n: slice.n,
                                p: slice.p,
                            });
                        }
                        let r = short_measurement()?;
                        let x_e = virtual_rows(&x_short, &pattern)?;
                        let r_e = measure_rows(&x_e, &channel, sigma2, &mut rng)?;
                        assemble_system(
                            &r,
                            &r_e,
                            x_short.as_matrix(),
                            &x_e,
                            sigma2,
                            NoiseMode::Independent,
                        )?
                    }
                }
            }
        };
        systems.push((arm, system));
    }
    Ok(TrialRealization { channel, systems })
}

/// Runs every requested arm on one trial; outcomes follow the order of `arms`.
pub fn run_trial(
    slice: &TrialSlice,
    arms: &[Arm],
    trial_index: u64,
    master_seed: u64,
) -> Result<Vec<TrialOutcome>> {
    let trial = realize_trial(slice, arms, trial_index, master_seed)?;
    let config = RecoveryConfig::new(slice.k);
    trial
        .systems
        .iter()
        .map(|(arm, system)| {
            let est = cosamp(system, &config)?;
            Ok(TrialOutcome {
                arm: *arm,
                success: support_success(&trial.channel, &est),
                squared_error: squared_error(&trial.channel, &est)?,
                trial_index,
            })
        })
        .collect()
}

pub fn squared_error(h: &SparseChannel, est: &ChannelEstimate) -> Result<f64> {
    if est.coeffs.len() != h.len() {
        return Err(Error::Dimension(format!(
            "estimate has {} taps, channel has {}",
            est.coeffs.len(),
            h.len()
        )));
    }
    Ok(h.taps()
        .iter()
        .zip(&est.coeffs)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum())
}

/// Mean over estimates of `||h - h_hat||^2 / l`.
pub fn average_mse(h: &SparseChannel, estimates: &[ChannelEstimate], l: usize) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptyStatistic);
    }
    if l == 0 {
        return Err(Error::Dimension(
            "normalizing length must be at least 1".into(),
        ));
    }
    let mut sum = NeumaierSum::default();
    for est in estimates {
        sum.add(squared_error(h, est)? / l as f64);
    }
    Ok(sum.total() / estimates.len() as f64)
}

/// True iff the `K` largest-magnitude estimated taps sit exactly on the true
/// support (ties toward the smaller index). Zero taps never count.
pub fn support_success(h: &SparseChannel, est: &ChannelEstimate) -> bool {
    let k = h.sparsity();
    let magnitudes: Vec<f64> = est.coeffs.iter().map(|c| c.norm()).collect();
    let mut picked = top_indices(&magnitudes, k);
    if picked.len() != k || picked.iter().any(|&j| magnitudes[j] == 0.0) {
        return false;
    }
    picked.sort_unstable();
    picked == h.support()
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub recovery_probability: f64,
    /// Mean of `||h - h_hat||^2 / n`.
    pub average_mse: f64,
    /// Binomial standard error `sqrt(p (1 - p) / trials)`.
    pub recovery_stderr: f64,
    /// Sample standard deviation of the per-trial MSE over `sqrt(trials)`.
    pub mse_stderr: f64,
    pub trials: usize,
}

/// Aggregates outcomes in the order given; `n` normalizes the MSE.
pub fn aggregate(outcomes: &[TrialOutcome], n: usize) -> Result<AggregateStats> {
    if outcomes.is_empty() {
        return Err(Error::EmptyStatistic);
    }
    let t = outcomes.len() as f64;
    let successes = outcomes.iter().filter(|o| o.success).count() as f64;
    let p = successes / t;

    let per_trial: Vec<f64> = outcomes
        .iter()
        .map(|o| o.squared_error / n as f64)
        .collect();
    let mut sum = NeumaierSum::default();
    per_trial.iter().for_each(|&x| sum.add(x));
    let mean = sum.total() / t;
    let mse_stderr = if outcomes.len() > 1 {
        let mut dev = NeumaierSum::default();
        per_trial
            .iter()
            .for_each(|&x| dev.add((x - mean) * (x - mean)));
        (dev.total() / (t - 1.0) / t).sqrt()
    } else {
        0.0
    };

    Ok(AggregateStats {
        recovery_probability: p,
        average_mse: mean,
        recovery_stderr: (p * (1.0 - p) / t).sqrt(),
        mse_stderr,
        trials: outcomes.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub k_list: Vec<usize>,
    pub me_list: Vec<usize>,
    pub snr_db_list: Vec<f64>,
    pub dist: TapDistribution,
    pub trials: usize,
    pub master_seed: u64,
    pub noise_mode: NoiseMode,
    pub arms: Vec<Arm>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 96,
            m: 32,
            p: 8,
            k_list: vec![4],
            me_list: (0..=56).step_by(8).collect(),
            snr_db_list: vec![10.0, 15.0, 20.0],
            dist: TapDistribution::EqualMagnitudeUniform,
            trials: 500,
            master_seed: 42,
            noise_mode: NoiseMode::Subsample,
            arms: Arm::ALL.to_vec(),
        }
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items
        .iter()
        .enumerate()
        .any(|(i, a)| items[..i].contains(a))
}

impl ExperimentConfig {
    /// Checks the grid; errors name the offending config key.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: String| {
            Err(Error::Config {
                key: key.to_string(),
                reason,
            })
        };
        for (key, v) in [
            ("n", self.n),
            ("m", self.m),
            ("p", self.p),
            ("trials", self.trials),
        ] {
            if v == 0 {
                return bad(key, "must be at least 1".into());
            }
        }
        if !self.n.is_multiple_of(self.p) {
            return bad("p", format!("{} does not divide n = {}", self.p, self.n));
        }
        for (key, empty) in [
            ("k_list", self.k_list.is_empty()),
            ("me_list", self.me_list.is_empty()),
            ("snr_db_list", self.snr_db_list.is_empty()),
            ("arms", self.arms.is_empty()),
        ] {
            if empty {
                return bad(key, "must list at least one value".into());
            }
        }
        if let Some(&k) = self.k_list.iter().find(|&&k| k == 0 || k > self.n) {
            return bad("k_list", format!("sparsity {k} outside 1..={}", self.n));
        }
        if self
            .snr_db_list
            .iter()
            .any(|s| s.is_nan() || *s == f64::NEG_INFINITY)
        {
            return bad("snr_db_list", "entries must be numbers or inf".into());
        }
        for (key, dup) in [
            ("k_list", has_duplicates(&self.k_list)),
            ("me_list", has_duplicates(&self.me_list)),
            ("snr_db_list", has_duplicates(&self.snr_db_list)),
            ("arms", has_duplicates(&self.arms)),
        ] {
            if dup {
                return bad(key, "entries must be unique".into());
            }
        }
        let max_me = *self.me_list.iter().max().expect("non-empty");
        let capacity = pattern_capacity(self.m, self.p);
        if self.arms.contains(&Arm::Proposed) && max_me > capacity {
            return bad(
                "me_list",
                format!("{max_me} virtual measurements requested, at most {capacity} distinct patterns exist for m = {}, p = {}", self.m, self.p),
            );
        }
        Ok(())
    }

    /// Grid points in `(k, me, snr)` order.
    pub fn slices(&self) -> Vec<TrialSlice> {
        let mut out = Vec::new();
        for &k in &self.k_list {
            for &me in &self.me_list {
                for &snr_db in &self.snr_db_list {
                    out.push(TrialSlice {
                        n: self.n,
                        m: self.m,
                        p: self.p,
                        k,
                        me,
                        snr_db,
                        dist: self.dist,
                        noise_mode: self.noise_mode,
                    });
                }
            }
        }
        out
    }
}

/// Aggregate for one `(arm, dist, k, me, snr)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub arm: Arm,
    pub dist: TapDistribution,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub k: usize,
    pub me: usize,
    pub snr_db: f64,
    pub seed: u64,
    pub stats: AggregateStats,
}

/// Canonical table order: `(arm, dist, k, snr_db, me)` with arms and
/// distributions compared by label.
pub fn sort_cells(cells: &mut [CellResult]) {
    cells.sort_by(|a, b| {
        a.arm
            .label()
            .cmp(b.arm.label())
            .then(a.dist.label().cmp(b.dist.label()))
            .then(a.k.cmp(&b.k))
            .then(a.snr_db.total_cmp(&b.snr_db))
            .then(a.me.cmp(&b.me))
    });
}

/// Runs `config.trials` trials for every grid cell on `workers` threads.
///
/// Trials are reduced in trial-index order, so the table does not depend on
/// the worker count.
pub fn run_sweep(config: &ExperimentConfig, workers: usize) -> Result<Vec<CellResult>> {
    config.validate()?;
    let slices = config.slices();
    let jobs: Vec<(usize, u64)> = (0..slices.len())
        .flat_map(|s| (0..config.trials as u64).map(move |t| (s, t)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    let outcomes: Vec<Vec<TrialOutcome>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, t)| run_trial(&slices[s], &config.arms, t, config.master_seed))
            .collect::<Result<_>>()
    })?;

    let mut cells = Vec::with_capacity(slices.len() * config.arms.len());
    for (s, slice) in slices.iter().enumerate() {
        let chunk = &outcomes[s * config.trials..(s + 1) * config.trials];
        for (a, &arm) in config.arms.iter().enumerate() {
            let arm_outcomes: Vec<TrialOutcome> = chunk.iter().map(|o| o[a].clone()).collect();
            cells.push(CellResult {
                arm,
                dist: slice.dist,
                n: slice.n,
                m: slice.m,
                p: slice.p,
                k: slice.k,
                me: slice.me,
                snr_db: slice.snr_db,
                seed: config.master_seed,
                stats: aggregate(&arm_outcomes, slice.n)?,
            });
        }
    }
    sort_cells(&mut cells);
    Ok(cells)
}
