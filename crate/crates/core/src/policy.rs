//! The JCAS adaptive beam-probing policy.
//!
//! Before the legitimate receiver answers with a one, the policy explores
//! `c_j` fresh beams per channel use, drawn uniformly from the beams not yet
//! ruled out. Once a probe hits (detection at use `k`), it keeps a set known
//! to contain the receiver and probes a random part of it:
//! `max(c_k / 2^(j-k), 1)` beams under [`HalvingRule::AsPrinted`], or an exact
//! random half under [`HalvingRule::Bisection`]. A miss removes the probed
//! beams from the known set; a hit shrinks the known set to the probe.
//!
//! The policy only ever reads the legitimate receiver's feedback.

use rand::Rng;

use crate::beams::BeamSet;
use crate::error::{Error, Result};
use crate::schedule::ExplorationSchedule;

/// Probe size rule after detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HalvingRule {
    /// `max(floor(c_k / 2^(j-k)), 1)` beams, clamped to the known set. Once the
    /// known set is a single beam the output becomes deterministic.
    #[default]
    AsPrinted,
    /// Half of the known set, with odd sizes rounded down or up with equal
    /// probability. A singleton known set is probed or left dark with
    /// probability 1/2 each, so every post-detection use carries one bit.
    Bisection,
}

impl HalvingRule {
    pub fn name(self) -> &'static str {
        match self {
            HalvingRule::AsPrinted => "as-printed",
            HalvingRule::Bisection => "bisection",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "as-printed" | "printed" => Some(HalvingRule::AsPrinted),
            "bisection" => Some(HalvingRule::Bisection),
            _ => None,
        }
    }
}

/// Unit-delayed feedback from the previous channel use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Feedback {
    pub legit: bool,
    pub eaves: bool,
}

impl Feedback {
    pub fn new(legit: bool, eaves: bool) -> Self {
        Feedback { legit, eaves }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detection {
    /// Channel use `k` of the first legitimate hit.
    pub time: usize,
    /// `c_int_k`, the exploration size at detection.
    pub probe_size: u32,
    /// Beams currently known to contain the legitimate direction.
    pub known: BeamSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyState {
    pub k: u32,
    /// Beams the next probe is drawn from.
    pub candidate: BeamSet,
    /// Previous probe.
    pub last_explored: BeamSet,
    pub detection: Option<Detection>,
    /// 1-based channel use the next probe is for.
    pub step: usize,
    /// Times a requested probe size exceeded the candidate set and was clamped.
    pub clamped: u32,
}

/// Probe sizes available at a step and their probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeSize {
    Fixed(usize),
    /// `lower` or `lower + 1`, each with probability 1/2.
    Split {
        lower: usize,
    },
}

impl ProbeSize {
    pub fn options(self) -> impl Iterator<Item = (usize, f64)> {
        let (a, b) = match self {
            ProbeSize::Fixed(n) => ((n, 1.0), None),
            ProbeSize::Split { lower } => ((lower, 0.5), Some((lower + 1, 0.5))),
        };
        std::iter::once(a).chain(b)
    }

    pub fn max(self) -> usize {
        match self {
            ProbeSize::Fixed(n) => n,
            ProbeSize::Split { lower } => lower + 1,
        }
    }
}

impl PolicyState {
    pub fn new(k: u32) -> Self {
        PolicyState {
            k,
            candidate: BeamSet::full(k),
            last_explored: BeamSet::empty(),
            detection: None,
            step: 1,
            clamped: 0,
        }
    }

    pub fn is_detected(&self) -> bool {
        self.detection.is_some()
    }

    /// Update the candidate set with the feedback of the previous use.
    /// Only `feedback.legit` is consulted.
    pub fn observe(&self, feedback: Feedback) -> PolicyState {
        let mut next = self.clone();
        if self.step == 1 {
            return next;
        }
        let hit = feedback.legit;
        match self.detection {
            None if !hit => {
                next.candidate = self.candidate.difference(&self.last_explored);
            }
            None => {
                next.detection = Some(Detection {
                    time: self.step - 1,
                    probe_size: self.last_explored.len() as u32,
                    known: self.last_explored,
                });
                next.candidate = self.last_explored;
            }
            Some(det) => {
                let known = if hit {
                    self.last_explored
                } else {
                    det.known.difference(&self.last_explored)
                };
                next.detection = Some(Detection { known, ..det });
                next.candidate = known;
            }
        }
        next
    }

    /// Probe size for an already observed state, and whether the schedule
    /// asked for more beams than the candidate set holds.
    pub fn probe_size(
        &self,
        schedule: &ExplorationSchedule,
        rule: HalvingRule,
    ) -> (ProbeSize, bool) {
        let available = self.candidate.len();
        let requested = match (self.detection, rule) {
            (None, _) => schedule.c_int(self.step) as usize,
            (Some(det), HalvingRule::AsPrinted) => {
                let shift = (self.step - det.time) as u32;
                (det.probe_size.checked_shr(shift).unwrap_or(0) as usize).max(1)
            }
            (Some(_), HalvingRule::Bisection) => {
                return if available.is_multiple_of(2) {
                    (ProbeSize::Fixed(available / 2), false)
                } else {
                    (
                        ProbeSize::Split {
                            lower: available / 2,
                        },
                        false,
                    )
                };
            }
        };
        (
            ProbeSize::Fixed(requested.min(available)),
            requested > available,
        )
    }

    /// Store the probe sent at this step and advance.
    pub fn record(mut self, probe: BeamSet) -> PolicyState {
        self.last_explored = probe;
        self.step += 1;
        self
    }
}

/// One channel use of the JCAS policy: fold in the previous feedback, pick the
/// probe, and return it with the successor state.
pub fn jcas_step<R: Rng + ?Sized>(
    state: &PolicyState,
    prev_feedback: Feedback,
    schedule: &ExplorationSchedule,
    rule: HalvingRule,
    rng: &mut R,
) -> Result<(BeamSet, PolicyState)> {
    if state.step == 0 || state.step > schedule.len() {
        return Err(Error::InvalidParameter(format!(
            "policy step {} outside 1..={}",
            state.step,
            schedule.len()
        )));
    }
    let mut observed = state.observe(prev_feedback);
    let (size, clamped) = observed.probe_size(schedule, rule);
    if clamped {
        observed.clamped += 1;
    }
    let n = match size {
        ProbeSize::Fixed(n) => n,
        ProbeSize::Split { lower } => lower + usize::from(rng.gen_bool(0.5)),
    };
    let probe = observed.candidate.random_subset(n, rng);
    Ok((probe, observed.record(probe)))
}
