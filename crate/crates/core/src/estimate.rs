//! Monte Carlo plug-in estimates of the main-channel rate and the
//! eavesdropper leakage.
//!
//! Both rates are `(1/L) H(Y^L | S)` for the respective receiver. Directions
//! are uniform and the policy treats beam labels symmetrically, so the output
//! law is the same for every direction and the estimators pool all blocks.
//! The value is the sum of plug-in per-step conditional entropies, which for
//! the empirical law equals the plug-in entropy of the whole sequence.
//! Standard errors use the delta method for that sequence entropy:
//! `Var(H) ~ (sum p log2^2 p - H^2) / n`.

use crate::config::ModelConfig;
use crate::error::{Error, Result};
use crate::schedule::ExplorationSchedule;
use crate::sim::simulate_stats;
use crate::stats::{Channel, TranscriptStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Bits per channel use.
    pub value: f64,
    pub stderr: f64,
    pub blocks: u64,
}

impl RateEstimate {
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.value - reference;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    pub fn within(&self, reference: f64, sigmas: f64) -> bool {
        self.z_score(reference).abs() <= sigmas
    }
}

impl TranscriptStats {
    pub fn rate_estimate(&self, channel: Channel) -> Result<RateEstimate> {
        if self.blocks() == 0 {
            return Err(Error::NoBlocks);
        }
        let l = self.block_len() as f64;
        let value = self.step_entropies(channel).iter().sum::<f64>() / l;
        let (h, m2) = self.sequence_entropy_moments(channel);
        let var = ((m2 - h * h) / self.blocks() as f64).max(0.0);
        Ok(RateEstimate {
            value: value.clamp(0.0, 1.0),
            stderr: var.sqrt() / l,
            blocks: self.blocks(),
        })
    }

    pub fn main_rate_estimate(&self) -> Result<RateEstimate> {
        self.rate_estimate(Channel::Legit)
    }

    pub fn leakage_estimate(&self) -> Result<RateEstimate> {
        self.rate_estimate(Channel::Eaves)
    }
}

/// Simulate `config.blocks` blocks and estimate `(1/L) H(Y_e^L | S_e)`.
pub fn estimate_leakage(
    config: &ModelConfig,
    schedule: &ExplorationSchedule,
) -> Result<RateEstimate> {
    simulate_stats(config, schedule)?.leakage_estimate()
}

/// Simulate `config.blocks` blocks and estimate `(1/L) H(Y_l^L | S_l)`.
pub fn estimate_main_rate(
    config: &ModelConfig,
    schedule: &ExplorationSchedule,
) -> Result<RateEstimate> {
    simulate_stats(config, schedule)?.main_rate_estimate()
}
