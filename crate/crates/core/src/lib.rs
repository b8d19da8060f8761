//! Secrecy-capacity bounds for the binary beampointing (BBP) wiretap channel
//! with in-block memory and unit-delayed feedback.
//!
//! A base station probes a subset of `K` quantized beams at each channel use.
//! The legitimate receiver and a passive eavesdropper each see a single bit:
//! one when their (block-constant, uniformly drawn) direction lies inside the
//! probed set. Each block lasts `L` channel uses and every probe may contain at
//! most `B` beams.
//!
//! The crate provides:
//!
//! * [`bounds`]: closed-form outer bound, eavesdropper leakage rate and inner
//!   bound, plus the per-prefix probability table behind the leakage formula.
//! * [`policy`] and [`sim`]: the adaptive joint communication and sensing
//!   (JCAS) probing policy and a seeded, parallel block simulator.
//! * [`estimate`]: plug-in Monte Carlo estimates of the main-channel rate and
//!   of the leakage.
//! * [`enumerate`] and [`verify`]: an exact enumeration oracle for small
//!   instances and a report comparing it against every closed form.
//! * [`sweep`]: the bound-versus-budget CSV sweep used by the `bbp` binary.

pub mod beams;
pub mod bounds;
pub mod config;
pub mod entropy;
pub mod enumerate;
pub mod error;
pub mod estimate;
pub mod policy;
pub mod schedule;
pub mod sim;
pub mod stats;
pub mod sweep;
pub mod verify;

pub use beams::BeamSet;
pub use bounds::{
    inner_bound, leakage_rate, leakage_rate_with, outer_bound, prefix_probability_table,
    BoundPoint, PrefixEntry, PrefixKind, PrefixProbabilityTable, T3Variant,
};
pub use config::ModelConfig;
pub use entropy::binary_entropy;
pub use enumerate::{exact_enumeration, ExactEnumeration};
pub use error::{Error, Result};
pub use estimate::{estimate_leakage, estimate_main_rate, RateEstimate};
pub use policy::{jcas_step, Feedback, HalvingRule, PolicyState};
pub use schedule::{compute_schedule, ExplorationSchedule};
pub use sim::{channel_output, draw_states, simulate_block, BlockTranscript};
pub use stats::TranscriptStats;
pub use sweep::SweepSpec;
pub use verify::{verify_against_closed_forms, T3Verdict, VerificationReport};
