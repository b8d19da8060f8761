//! Exact output distribution of the JCAS policy for small instances.
//!
//! The recursion runs the policy's own state update and probe-size rule, and
//! branches over every probe subset the policy could draw (each with its
//! uniform probability) for every legitimate direction. Probes never depend
//! on the eavesdropper, so each leaf is expanded over all `K` eavesdropper
//! directions at the end. The result is the exact law of
//! `(S_l, S_e, Y_l^L, Y_e^L)`.

use std::collections::BTreeMap;

use crate::beams::BeamSet;
use crate::config::validate_params;
use crate::error::{Error, Result};
use crate::policy::{Feedback, HalvingRule, PolicyState};
use crate::schedule::{compute_schedule, ExplorationSchedule};
use crate::sim::channel_output;
use crate::stats::{prefix_mask, step_entropies, Channel};

pub const MAX_ENUM_BEAMS: u32 = 8;
pub const MAX_ENUM_BLOCK: usize = 4;

#[derive(Debug, Clone)]
pub struct ExactEnumeration {
    pub k: u32,
    pub b: f64,
    pub l: usize,
    pub rule: HalvingRule,
    /// `P(s_l, s_e, y_l, y_e)`.
    pub joint: BTreeMap<(u32, u32, u64, u64), f64>,
    /// Probe-sequence leaves visited, summed over legitimate directions.
    pub leaves: u64,
}

/// Exact enumeration under the default halving rule.
pub fn exact_enumeration(k: u32, b: f64, l: usize) -> Result<ExactEnumeration> {
    exact_enumeration_with(k, b, l, HalvingRule::default())
}

pub fn exact_enumeration_with(
    k: u32,
    b: f64,
    l: usize,
    rule: HalvingRule,
) -> Result<ExactEnumeration> {
    validate_params(k, b, l)?;
    let schedule = compute_schedule(k, b, l)?;
    if k > MAX_ENUM_BEAMS || l > MAX_ENUM_BLOCK || !schedule.is_integral() {
        return Err(Error::EnumerationTooLarge {
            k,
            b,
            l,
            max_k: MAX_ENUM_BEAMS,
            max_l: MAX_ENUM_BLOCK,
            estimated_leaves: estimated_leaves(&schedule),
        });
    }
    let mut out = ExactEnumeration {
        k,
        b,
        l,
        rule,
        joint: BTreeMap::new(),
        leaves: 0,
    };
    let p_state = 1.0 / f64::from(k);
    for s_l in 1..=k {
        let mut walk = Walk {
            schedule: &schedule,
            rule,
            s_l,
            probes: Vec::with_capacity(l),
            out: &mut out,
        };
        walk.step(&PolicyState::new(k), Feedback::default(), 0, p_state);
    }
    Ok(out)
}

/// Rough leaf count `K^2 * prod_j C(K - cum_{j-1}, c_j)` of the exploration tree.
pub fn estimated_leaves(schedule: &ExplorationSchedule) -> f64 {
    let k = f64::from(schedule.k());
    (1..=schedule.len()).fold(k * k, |acc, j| {
        let n = (k - schedule.cum(j - 1)).max(0.0).floor() as u64;
        acc * binomial(n, u64::from(schedule.c_int(j)))
    })
}

fn binomial(n: u64, r: u64) -> f64 {
    if r > n {
        return 1.0;
    }
    (0..r.min(n - r)).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

struct Walk<'a> {
    schedule: &'a ExplorationSchedule,
    rule: HalvingRule,
    s_l: u32,
    probes: Vec<BeamSet>,
    out: &'a mut ExactEnumeration,
}

impl Walk<'_> {
    fn step(&mut self, state: &PolicyState, fb: Feedback, y_l: u64, p: f64) {
        let j = self.probes.len();
        if j == self.schedule.len() {
            self.leaf(y_l, p);
            return;
        }
        let observed = state.observe(fb);
        let (size, _) = observed.probe_size(self.schedule, self.rule);
        for (n, w) in size.options() {
            let choices = observed.candidate.subsets(n);
            let q = p * w / choices.len() as f64;
            for probe in choices {
                let hit = channel_output(&probe, self.s_l);
                self.probes.push(probe);
                let next = observed.clone().record(probe);
                self.step(
                    &next,
                    Feedback::new(hit, false),
                    y_l | u64::from(hit) << j,
                    q,
                );
                self.probes.pop();
            }
        }
    }

    fn leaf(&mut self, y_l: u64, p: f64) {
        self.out.leaves += 1;
        let k = self.out.k;
        let q = p / f64::from(k);
        for s_e in 1..=k {
            let y_e = self.probes.iter().enumerate().fold(0u64, |acc, (i, x)| {
                acc | u64::from(channel_output(x, s_e)) << i
            });
            *self.out.joint.entry((self.s_l, s_e, y_l, y_e)).or_default() += q;
        }
    }
}

/// Exact prefix probability and conditional flip probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPrefix {
    pub mass: f64,
    pub flip: f64,
}

impl ExactEnumeration {
    pub fn total_mass(&self) -> f64 {
        self.joint.values().sum()
    }

    fn items(&self, channel: Channel) -> Vec<(u32, u64, f64)> {
        self.joint
            .iter()
            .map(|(&(s_l, s_e, y_l, y_e), &p)| match channel {
                Channel::Legit => (s_l, y_l, p),
                Channel::Eaves => (s_e, y_e, p),
            })
            .collect()
    }

    /// `H(Y_j | Y^{j-1}, S)` for `j = 1..=L`, conditioned on the receiver's
    /// own direction.
    pub fn step_entropies(&self, channel: Channel) -> Vec<f64> {
        step_entropies(self.items(channel), self.l)
    }

    /// Same quantity computed from the direction-pooled law.
    pub fn pooled_step_entropies(&self, channel: Channel) -> Vec<f64> {
        let items: Vec<_> = self
            .items(channel)
            .into_iter()
            .map(|(_, y, p)| (0, y, p))
            .collect();
        step_entropies(items, self.l)
    }

    pub fn main_rate(&self) -> f64 {
        self.step_entropies(Channel::Legit).iter().sum::<f64>() / self.l as f64
    }

    pub fn leakage(&self) -> f64 {
        self.step_entropies(Channel::Eaves).iter().sum::<f64>() / self.l as f64
    }

    /// `P(Y^{j-1} = prefix)` and `P(Y_j = 1 | prefix)`; the flip is zero when
    /// the prefix has no mass.
    pub fn prefix(&self, channel: Channel, j: usize, prefix: u64) -> ExactPrefix {
        let mask = prefix_mask(j - 1);
        let (mut mass, mut ones) = (0.0, 0.0);
        for (_, y, p) in self.items(channel) {
            if y & mask == prefix {
                mass += p;
                if y >> (j - 1) & 1 == 1 {
                    ones += p;
                }
            }
        }
        ExactPrefix {
            mass,
            flip: if mass > 0.0 { ones / mass } else { 0.0 },
        }
    }

    /// Probability of an eavesdropper one after a joint `(1, 0)` output.
    pub fn eaves_hit_after_legit_only_hit(&self) -> f64 {
        self.joint
            .iter()
            .filter(|(&(_, _, y_l, y_e), _)| {
                (0..self.l).any(|i| y_l >> i & 1 == 1 && y_e >> i & 1 == 0 && y_e >> (i + 1) != 0)
            })
            .map(|(_, &p)| p)
            .fold(0.0, |a, p| a + p)
    }
}
