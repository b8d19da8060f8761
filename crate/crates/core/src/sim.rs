//! Block simulator for the BBP wiretap channel.
//!
//! Within a block both directions are fixed; each channel use the receivers
//! see `Y = 1` iff their direction is inside the probed set, and both bits are
//! fed back before the next use.
//!
//! Monte Carlo runs are split into fixed chunks of [`CHUNK_BLOCKS`] blocks.
//! Chunk `i` draws from ChaCha8 seeded with the run seed on stream `i`, so the
//! blocks generated do not depend on how many worker threads process the
//! chunks, and the merged statistics are integer counts.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::beams::BeamSet;
use crate::config::ModelConfig;
use crate::error::{Error, Result};
use crate::policy::{jcas_step, Feedback, PolicyState};
use crate::schedule::ExplorationSchedule;
use crate::stats::TranscriptStats;

pub const CHUNK_BLOCKS: u64 = 1 << 14;

/// Independent uniform legitimate and eavesdropper directions in `1..=k`.
/// They may coincide.
pub fn draw_states<R: Rng + ?Sized>(k: u32, rng: &mut R) -> (u32, u32) {
    (rng.gen_range(1..=k), rng.gen_range(1..=k))
}

/// `Y = s^T x` for a one-hot state `s`.
pub fn channel_output(x: &BeamSet, s: u32) -> bool {
    x.contains(s)
}

/// One simulated block.
///
/// Output sequences are packed LSB-first: bit `j - 1` is the output of
/// channel use `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTranscript {
    pub s_l: u32,
    pub s_e: u32,
    pub probes: Vec<BeamSet>,
    pub y_l: u64,
    pub y_e: u64,
    /// Every probe respected `|x| <= floor(B)`.
    pub cost_ok: bool,
    /// Probe sizes clamped to the candidate set during this block.
    pub clamped: u32,
}

impl BlockTranscript {
    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    pub fn legit(&self, j: usize) -> bool {
        self.y_l >> (j - 1) & 1 == 1
    }

    pub fn eaves(&self, j: usize) -> bool {
        self.y_e >> (j - 1) & 1 == 1
    }

    /// Recompute both output sequences from the probes and directions.
    pub fn replay_outputs(&self) -> (u64, u64) {
        self.probes
            .iter()
            .enumerate()
            .fold((0, 0), |(l, e), (i, p)| {
                (
                    l | u64::from(channel_output(p, self.s_l)) << i,
                    e | u64::from(channel_output(p, self.s_e)) << i,
                )
            })
    }

    /// `s_l s_e probes y_l y_e`, probes as comma-separated hex masks and
    /// outputs as `0`/`1` strings in time order.
    pub fn to_line(&self) -> String {
        let probes: Vec<String> = self.probes.iter().map(BeamSet::to_hex).collect();
        format!(
            "{} {} {} {} {}",
            self.s_l,
            self.s_e,
            probes.join(","),
            bit_string(self.y_l, self.len()),
            bit_string(self.y_e, self.len())
        )
    }

    pub fn parse_line(line: &str, line_no: usize, budget: f64) -> Result<BlockTranscript> {
        let err = |reason: &str| Error::TranscriptParse {
            line: line_no,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(err("expected 5 fields"));
        }
        let s_l = fields[0].parse().map_err(|_| err("bad s_l"))?;
        let s_e = fields[1].parse().map_err(|_| err("bad s_e"))?;
        let probes = fields[2]
            .split(',')
            .map(|h| BeamSet::from_hex(h).ok_or_else(|| err("bad probe mask")))
            .collect::<Result<Vec<_>>>()?;
        let y_l = parse_bits(fields[3], probes.len()).ok_or_else(|| err("bad y_l"))?;
        let y_e = parse_bits(fields[4], probes.len()).ok_or_else(|| err("bad y_e"))?;
        let cost_ok = probes.iter().all(|p| p.len() as f64 <= budget.floor());
        Ok(BlockTranscript {
            s_l,
            s_e,
            probes,
            y_l,
            y_e,
            cost_ok,
            clamped: 0,
        })
    }
}

fn bit_string(bits: u64, len: usize) -> String {
    (0..len)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn parse_bits(s: &str, len: usize) -> Option<u64> {
    if s.len() != len {
        return None;
    }
    s.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        '0' => Some(acc),
        '1' => Some(acc | 1 << i),
        _ => None,
    })
}

/// Draw the directions and run one block of the policy.
pub fn simulate_block<R: Rng + ?Sized>(
    config: &ModelConfig,
    schedule: &ExplorationSchedule,
    rng: &mut R,
) -> Result<BlockTranscript> {
    let (s_l, s_e) = draw_states(config.k, rng);
    simulate_block_with_states(config, schedule, s_l, s_e, rng)
}

/// Run one block with the directions given.
pub fn simulate_block_with_states<R: Rng + ?Sized>(
    config: &ModelConfig,
    schedule: &ExplorationSchedule,
    s_l: u32,
    s_e: u32,
    rng: &mut R,
) -> Result<BlockTranscript> {
    let max_cost = config.b.floor();
    let mut state = PolicyState::new(config.k);
    let mut feedback = Feedback::default();
    let mut probes = Vec::with_capacity(config.l);
    let (mut y_l, mut y_e) = (0u64, 0u64);
    for i in 0..config.l {
        let (probe, next) = jcas_step(&state, feedback, schedule, config.rule, rng)?;
        feedback = Feedback::new(channel_output(&probe, s_l), channel_output(&probe, s_e));
        y_l |= u64::from(feedback.legit) << i;
        y_e |= u64::from(feedback.eaves) << i;
        probes.push(probe);
        state = next;
    }
    let cost_ok = probes.iter().all(|p| p.len() as f64 <= max_cost);
    Ok(BlockTranscript {
        s_l,
        s_e,
        probes,
        y_l,
        y_e,
        cost_ok,
        clamped: state.clamped,
    })
}

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_count(blocks: u64) -> u64 {
    blocks.div_ceil(CHUNK_BLOCKS)
}

fn blocks_in_chunk(blocks: u64, chunk: u64) -> u64 {
    (blocks - chunk * CHUNK_BLOCKS).min(CHUNK_BLOCKS)
}

fn run_chunk(
    config: &ModelConfig,
    schedule: &ExplorationSchedule,
    chunk: u64,
    mut sink: impl FnMut(&BlockTranscript) -> Result<()>,
) -> Result<()> {
    let mut rng = chunk_rng(config.seed, chunk);
    for _ in 0..blocks_in_chunk(config.blocks, chunk) {
        let t = simulate_block(config, schedule, &mut rng)?;
        sink(&t)?;
    }
    Ok(())
}

/// Simulate `config.blocks` blocks on the current rayon pool and collect
/// output statistics.
pub fn simulate_stats(
    config: &ModelConfig,
    schedule: &ExplorationSchedule,
) -> Result<TranscriptStats> {
    check_run(config, schedule)?;
    (0..chunk_count(config.blocks))
        .into_par_iter()
        .map(|chunk| {
            let mut stats = TranscriptStats::new(config.l);
            run_chunk(config, schedule, chunk, |t| {
                stats.add(t);
                Ok(())
            })?;
            Ok(stats)
        })
        .try_reduce(|| TranscriptStats::new(config.l), |a, b| Ok(a.merged(b)))
}

/// Same blocks as [`simulate_stats`], generated sequentially, with every
/// block also written to `out` as one transcript line.
pub fn dump_transcripts<W: Write>(
    config: &ModelConfig,
    schedule: &ExplorationSchedule,
    out: &mut W,
) -> Result<TranscriptStats> {
    check_run(config, schedule)?;
    let mut stats = TranscriptStats::new(config.l);
    for chunk in 0..chunk_count(config.blocks) {
        run_chunk(config, schedule, chunk, |t| {
            stats.add(t);
            writeln!(out, "{}", t.to_line())?;
            Ok(())
        })?;
    }
    Ok(stats)
}

/// Read a transcript dump back.
pub fn read_transcripts<R: BufRead>(input: R, budget: f64) -> Result<Vec<BlockTranscript>> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(i, line)| BlockTranscript::parse_line(&line?, i + 1, budget))
        .collect()
}

fn check_run(config: &ModelConfig, schedule: &ExplorationSchedule) -> Result<()> {
    config.validate_for_simulation()?;
    if config.blocks == 0 {
        return Err(Error::NoBlocks);
    }
    if schedule.len() != config.l || schedule.k() != config.k {
        return Err(Error::InvalidParameter(format!(
            "schedule for K={}, L={} does not match config K={}, L={}",
            schedule.k(),
            schedule.len(),
            config.k,
            config.l
        )));
    }
    Ok(())
}
