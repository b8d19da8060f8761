use crate::error::{Error, Result};
use crate::policy::HalvingRule;

/// Largest beam count the simulator's fixed-width beam sets can hold.
pub const MAX_SIM_BEAMS: u32 = 128;
/// Longest block the simulator can record (output sequences are packed in a `u64`).
pub const MAX_SIM_BLOCK: usize = 64;

/// Problem parameters shared by every computation.
///
/// `k` beams, block length `l` channel uses, per-symbol cost budget `b`
/// (number of beams a single probe may contain), and the Monte Carlo block
/// count and seed. The total horizon in channel uses is `blocks * l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub k: u32,
    pub l: usize,
    pub b: f64,
    pub seed: u64,
    pub blocks: u64,
    pub rule: HalvingRule,
}

impl ModelConfig {
    pub fn new(k: u32, b: f64, l: usize) -> Result<Self> {
        let cfg = ModelConfig {
            k,
            l,
            b,
            seed: 0,
            blocks: 0,
            rule: HalvingRule::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_blocks(mut self, blocks: u64) -> Self {
        self.blocks = blocks;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rule(mut self, rule: HalvingRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_params(self.k, self.b, self.l)
    }

    /// Extra limits that apply only when blocks are simulated.
    pub fn validate_for_simulation(&self) -> Result<()> {
        self.validate()?;
        if self.k > MAX_SIM_BEAMS {
            return Err(Error::InvalidParameter(format!(
                "simulation supports K <= {MAX_SIM_BEAMS}, got {}",
                self.k
            )));
        }
        if self.l > MAX_SIM_BLOCK {
            return Err(Error::InvalidParameter(format!(
                "simulation supports L <= {MAX_SIM_BLOCK}, got {}",
                self.l
            )));
        }
        Ok(())
    }

    pub fn total_channel_uses(&self) -> u64 {
        self.blocks * self.l as u64
    }
}

pub(crate) fn validate_params(k: u32, b: f64, l: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("K must be >= 2, got {k}")));
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "B must be a finite real > 0, got {b}"
        )));
    }
    if l < 1 {
        return Err(Error::InvalidParameter("L must be >= 1".into()));
    }
    Ok(())
}
