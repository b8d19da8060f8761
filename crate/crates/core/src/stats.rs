//! Output statistics of simulated or enumerated blocks, and the plug-in
//! entropy computations shared by the Monte Carlo estimators and the exact
//! oracle.
//!
//! Blocks are summarized by the joint histogram of the two packed output
//! sequences. Every prefix statistic (counts of a prefix and of a one
//! following it) is derived from that histogram, so merging two runs is
//! adding counts.

use std::collections::BTreeMap;

use crate::entropy::h2;
use crate::sim::BlockTranscript;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    Legit,
    Eaves,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Legit => "legit",
            Channel::Eaves => "eaves",
        }
    }
}

/// Mask of the first `len` outputs.
pub(crate) fn prefix_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Per-step conditional entropies `H(Y_j | Y^{j-1}, stratum)` in bits for a
/// weighted collection of `(stratum, sequence, weight)` triples.
///
/// With a single stratum this is the plug-in `H(Y_j | Y^{j-1})` of the
/// empirical law. Groups are kept in ordered maps so the floating-point sum
/// is reproducible.
pub(crate) fn step_entropies<I>(items: I, l: usize) -> Vec<f64>
where
    I: IntoIterator<Item = (u32, u64, f64)> + Clone,
{
    (1..=l)
        .map(|j| {
            let mut groups: BTreeMap<(u32, u64), (f64, f64)> = BTreeMap::new();
            let mut total = 0.0;
            for (stratum, seq, w) in items.clone() {
                let g = groups
                    .entry((stratum, seq & prefix_mask(j - 1)))
                    .or_default();
                g.0 += w;
                if seq >> (j - 1) & 1 == 1 {
                    g.1 += w;
                }
                total += w;
            }
            if total <= 0.0 {
                return 0.0;
            }
            groups
                .values()
                .map(|&(w, ones)| w / total * h2(ones / w))
                .sum()
        })
        .collect()
}

/// Count of blocks whose prefix matched and how many of them output a one next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipEstimate {
    pub count: u64,
    pub ones: u64,
    pub p: f64,
    /// Binomial standard error `sqrt(p(1-p)/count)`.
    pub stderr: f64,
}

/// Histogram of joint output sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptStats {
    l: usize,
    blocks: u64,
    joint: BTreeMap<(u64, u64), u64>,
    /// Blocks in which a probe exceeded `floor(B)`.
    pub cost_violations: u64,
    /// Probe sizes clamped to the candidate set, summed over blocks.
    pub clamped: u64,
}

impl TranscriptStats {
    pub fn new(l: usize) -> Self {
        TranscriptStats {
            l,
            blocks: 0,
            joint: BTreeMap::new(),
            cost_violations: 0,
            clamped: 0,
        }
    }

    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    pub fn add(&mut self, t: &BlockTranscript) {
        debug_assert_eq!(t.len(), self.l);
        self.blocks += 1;
        *self.joint.entry((t.y_l, t.y_e)).or_default() += 1;
        self.cost_violations += u64::from(!t.cost_ok);
        self.clamped += u64::from(t.clamped);
    }

    pub fn merged(mut self, other: TranscriptStats) -> TranscriptStats {
        debug_assert_eq!(self.l, other.l);
        self.blocks += other.blocks;
        self.cost_violations += other.cost_violations;
        self.clamped += other.clamped;
        for (key, n) in other.joint {
            *self.joint.entry(key).or_default() += n;
        }
        self
    }

    /// Joint `(y_l, y_e)` histogram.
    pub fn joint(&self) -> &BTreeMap<(u64, u64), u64> {
        &self.joint
    }

    pub fn sequences(&self, channel: Channel) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for (&(l, e), &n) in &self.joint {
            let key = match channel {
                Channel::Legit => l,
                Channel::Eaves => e,
            };
            *out.entry(key).or_default() += n;
        }
        out
    }

    /// Plug-in `H(Y_j | Y^{j-1})` for `j = 1..=L`, pooled over directions.
    pub fn step_entropies(&self, channel: Channel) -> Vec<f64> {
        let seqs = self.sequences(channel);
        step_entropies(seqs.iter().map(|(&s, &n)| (0, s, n as f64)), self.l)
    }

    /// Plug-in entropy of the whole output sequence and `sum p log2^2 p`,
    /// the two ingredients of the delta-method variance.
    pub fn sequence_entropy_moments(&self, channel: Channel) -> (f64, f64) {
        let n = self.blocks as f64;
        self.sequences(channel)
            .values()
            .fold((0.0, 0.0), |(h, m2), &c| {
                let p = c as f64 / n;
                let lp = p.log2();
                (h - p * lp, m2 + p * lp * lp)
            })
    }

    /// Blocks whose `channel` output starts with `prefix` (length `j - 1`)
    /// and how often output `j` is one. `None` when the prefix never occurred.
    pub fn prefix_flip(&self, channel: Channel, j: usize, prefix: u64) -> Option<FlipEstimate> {
        let mask = prefix_mask(j - 1);
        let (mut count, mut ones) = (0u64, 0u64);
        for (&seq, &n) in &self.sequences(channel) {
            if seq & mask == prefix {
                count += n;
                if seq >> (j - 1) & 1 == 1 {
                    ones += n;
                }
            }
        }
        (count > 0).then(|| {
            let p = ones as f64 / count as f64;
            FlipEstimate {
                count,
                ones,
                p,
                stderr: (p * (1.0 - p) / count as f64).sqrt(),
            }
        })
    }

    /// Blocks with a joint output `(1, 0)` at some use followed later by an
    /// eavesdropper one.
    pub fn eaves_hits_after_legit_only_hit(&self) -> u64 {
        self.count_joint(|l, e, len| {
            (1..=len).any(|i| bit(l, i) && !bit(e, i) && (i + 1..=len).any(|j| bit(e, j)))
        })
    }

    /// Blocks with a joint output `(0, 1)` followed later by an eavesdropper one.
    pub fn eaves_hits_after_eaves_only_hit(&self) -> u64 {
        self.count_joint(|l, e, len| {
            (1..=len).any(|i| !bit(l, i) && bit(e, i) && (i + 1..=len).any(|j| bit(e, j)))
        })
    }

    fn count_joint(&self, pred: impl Fn(u64, u64, usize) -> bool) -> u64 {
        self.joint
            .iter()
            .filter(|(&(l, e), _)| pred(l, e, self.l))
            .map(|(_, &n)| n)
            .sum()
    }
}

fn bit(seq: u64, j: usize) -> bool {
    seq >> (j - 1) & 1 == 1
}
