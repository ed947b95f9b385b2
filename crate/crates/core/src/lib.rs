//! Sparse multipath channel estimation from parallel low-speed ADC sub-samples.
//!
//! The crate models a receiver whose Nyquist-rate correlator is replaced by
//! `P` parallel branches, each integrating over one block of the channel
//! delay span. Sub-samples from those branches are recombined into the
//! ordinary training measurements and, by cyclically shifting which row each
//! branch contributes, into additional "virtual" measurements. Channels are
//! recovered with CoSaMP and the pieces are wired into a deterministic
//! Monte-Carlo harness that compares three estimators:
//!
//! * [`Arm::TraditionalShort`]: `M` full-rate measurements,
//! * [`Arm::Proposed`]: `M` recombined plus `M_e` virtual measurements,
//! * [`Arm::BoundLong`]: `M + M_e` full-rate measurements.
//!
//! Module map:
//!
//! * [`channel`]: random K-sparse complex channels.
//! * [`sensing`]: training sequences, Toeplitz sensing, sub-sampling and
//!   virtual measurement extraction.
//! * [`linalg`]: least squares on a column subset.
//! * [`recovery`]: CoSaMP plus brute-force and genie reference estimators.
//! * [`evaluation`]: metrics, per-trial pipeline and the sweep harness.
//! * [`cli`]: config parsing, CSV emission and SVG plotting.

pub mod channel;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod recovery;
pub mod rng;
pub mod sensing;

pub use channel::{generate_sparse_channel, SparseChannel, TapDistribution};
pub use error::{Error, Result};
pub use evaluation::{
    run_sweep, run_trial, AggregateStats, Arm, CellResult, ExperimentConfig, TrialOutcome,
    TrialSlice,
};
pub use recovery::{cosamp, ChannelEstimate, RecoveryConfig};
pub use sensing::{AssembledSystem, NoiseMode, SensingMatrix, SubsampleGrid, TrainingSequence};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
