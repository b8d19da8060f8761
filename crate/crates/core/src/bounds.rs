//! Closed-form secrecy-capacity bounds.
//!
//! The outer bound is the feedback capacity of the main channel under the
//! exploration schedule. The inner bound subtracts the eavesdropper leakage
//! `(1/L) I(X^L; Y_e^L | S_e)` evaluated for the JCAS policy. The leakage is
//! a sum over eavesdropper output prefixes of the form `0^k 1^(j-1-k)`; the
//! prefix masses and conditional flip probabilities are exposed through
//! [`PrefixProbabilityTable`] so they can be checked one by one against the
//! enumeration oracle.

use crate::entropy::h2;
use crate::error::Result;
use crate::schedule::{compute_schedule, ExplorationSchedule};

/// How the deep-prefix term (prefixes `0^k 1^(j-1-k)` with `k < j-2`) is
/// normalized.
///
/// `AsPrinted` keeps the per-state factor `1/K` of the closed form.
/// `SummedOverStates` multiplies by `K`, i.e. sums the per-state mass over the
/// `K` equiprobable eavesdropper directions the same way the other two terms
/// are marginalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum T3Variant {
    #[default]
    AsPrinted,
    SummedOverStates,
}

impl T3Variant {
    fn scale(self, k: f64) -> f64 {
        match self {
            T3Variant::AsPrinted => 1.0,
            T3Variant::SummedOverStates => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            T3Variant::AsPrinted => "as-printed",
            T3Variant::SummedOverStates => "summed-over-states",
        }
    }
}

/// Per-step contribution `(1 - S/K) H(c_j / (K - S)) + S/K`, `S = cum_{j-1}`.
///
/// This is `H(Y_j | Y^{j-1}, S)` for the legitimate receiver: with
/// probability `1 - S/K` the direction is still unknown and the probe hits
/// with probability `c_j / (K - S)`; otherwise it has been found and one full
/// bit per use is available.
pub fn main_rate_terms(schedule: &ExplorationSchedule) -> Vec<f64> {
    let k = f64::from(schedule.k());
    (1..=schedule.len())
        .map(|j| {
            let explored = schedule.cum(j - 1);
            let remaining = k - explored;
            let hit = if remaining > 0.0 {
                schedule.c(j) / remaining
            } else {
                0.0
            };
            (1.0 - explored / k) * h2(hit) + explored / k
        })
        .collect()
}

/// Average of [`main_rate_terms`] with no special case for `L = 1`.
pub fn main_channel_rate(schedule: &ExplorationSchedule) -> f64 {
    let terms = main_rate_terms(schedule);
    terms.iter().sum::<f64>() / terms.len() as f64
}

/// Secrecy-capacity outer bound in bits per channel use.
///
/// Zero for `L = 1`: without in-block memory the two receivers see
/// statistically identical memoryless channels and no secret rate survives.
pub fn outer_bound(k: u32, b: f64, l: usize) -> Result<f64> {
    let schedule = compute_schedule(k, b, l)?;
    Ok(outer_from_schedule(&schedule))
}

pub fn outer_from_schedule(schedule: &ExplorationSchedule) -> f64 {
    if schedule.len() == 1 {
        0.0
    } else {
        main_channel_rate(schedule)
    }
}

/// The three per-step pieces of the leakage sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageTerms {
    /// Eavesdropper has seen only zeros: `((K - cum_{j-1})/K) H(c_j/K)`.
    pub undetected: f64,
    /// Eavesdropper first hit at the previous use.
    pub just_detected: f64,
    /// Longer runs of ones; each contributes its mass times `H(1/2) = 1`.
    pub deep: f64,
}

impl LeakageTerms {
    pub fn total(&self) -> f64 {
        self.undetected + self.just_detected + self.deep
    }
}

pub fn leakage_terms(schedule: &ExplorationSchedule, variant: T3Variant) -> Vec<LeakageTerms> {
    let kf = f64::from(schedule.k());
    (1..=schedule.len())
        .map(|j| {
            let undetected = (kf - schedule.cum(j - 1)) / kf * h2(schedule.c(j) / kf);
            let just_detected = if j >= 2 {
                let prev = schedule.c(j - 1);
                let pool = kf - schedule.cum(j - 2);
                prev * pool / (kf * kf) * h2(0.5 * prev / pool)
            } else {
                0.0
            };
            let deep = (1..=j.saturating_sub(3))
                .map(|zeros| deep_prefix_mass(schedule, j, zeros, variant))
                .sum();
            LeakageTerms {
                undetected,
                just_detected,
                deep,
            }
        })
        .collect()
}

/// `(1/K)(c_{k+1}^2 / K^2)(1/2)^(2(j-k-2)-1)`, scaled per `variant`.
fn deep_prefix_mass(
    schedule: &ExplorationSchedule,
    j: usize,
    zeros: usize,
    variant: T3Variant,
) -> f64 {
    debug_assert!(zeros + 2 < j);
    let kf = f64::from(schedule.k());
    let c = schedule.c(zeros + 1);
    let exponent = 2 * (j - zeros - 2) as i32 - 1;
    variant.scale(kf) / kf * (c * c) / (kf * kf) * 0.5f64.powi(exponent)
}

/// Eavesdropper leakage rate with the deep term as printed.
pub fn leakage_rate(k: u32, b: f64, l: usize) -> Result<f64> {
    leakage_rate_with(k, b, l, T3Variant::AsPrinted)
}

pub fn leakage_rate_with(k: u32, b: f64, l: usize, variant: T3Variant) -> Result<f64> {
    let schedule = compute_schedule(k, b, l)?;
    Ok(leakage_from_schedule(&schedule, variant))
}

pub fn leakage_from_schedule(schedule: &ExplorationSchedule, variant: T3Variant) -> f64 {
    let terms = leakage_terms(schedule, variant);
    terms.iter().map(LeakageTerms::total).sum::<f64>() / terms.len() as f64
}

/// Inner bound `outer - leakage`, floored at zero.
pub fn inner_bound(k: u32, b: f64, l: usize) -> Result<f64> {
    Ok(BoundPoint::compute(k, b, l)?.inner)
}

/// Bounds at one `(K, B, L)` point, in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub k: u32,
    pub l: usize,
    pub b: f64,
    pub outer: f64,
    pub leakage: f64,
    /// `outer - leakage`; may be negative.
    pub inner_raw: f64,
    /// `max(inner_raw, 0)`.
    pub inner: f64,
}

impl BoundPoint {
    pub fn compute(k: u32, b: f64, l: usize) -> Result<Self> {
        Self::compute_with(k, b, l, T3Variant::AsPrinted)
    }

    pub fn compute_with(k: u32, b: f64, l: usize, variant: T3Variant) -> Result<Self> {
        let schedule = compute_schedule(k, b, l)?;
        Ok(Self::from_schedule(&schedule, variant))
    }

    pub fn from_schedule(schedule: &ExplorationSchedule, variant: T3Variant) -> Self {
        let outer = outer_from_schedule(schedule);
        let leakage = leakage_from_schedule(schedule, variant);
        let inner_raw = outer - leakage;
        BoundPoint {
            k: schedule.k(),
            l: schedule.len(),
            b: schedule.budget(),
            outer,
            leakage,
            inner_raw,
            inner: inner_raw.max(0.0),
        }
    }

    pub fn gap(&self) -> f64 {
        self.outer - self.inner_raw
    }
}

/// Which branch of the leakage derivation a prefix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixKind {
    /// `0^(j-1)`.
    Undetected,
    /// `0^(j-2) 1`.
    JustDetected,
    /// `0^k 1^(j-1-k)`, `k < j-2`.
    Deep,
}

/// One tabulated eavesdropper prefix `0^zeros 1^(step-1-zeros)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrefixEntry {
    /// 1-based channel use `j` whose output is predicted.
    pub step: usize,
    pub zeros: usize,
    pub kind: PrefixKind,
    /// Marginal probability of the prefix.
    pub mass: f64,
    /// `P(Y_j^e = 1 | prefix)`.
    pub flip: f64,
    /// Whether the leakage sum includes this entry. Deep entries with
    /// `zeros = 0` (eavesdropper hit from the first use) are tabulated but the
    /// leakage sum starts at `zeros = 1`.
    pub in_leakage_sum: bool,
}

impl PrefixEntry {
    pub fn len(&self) -> usize {
        self.step - 1
    }

    pub fn is_empty(&self) -> bool {
        self.step == 1
    }

    /// Prefix packed LSB-first: bit `i` is the output of channel use `i + 1`.
    pub fn bits(&self) -> u64 {
        let ones = self.len() - self.zeros;
        if ones == 0 {
            0
        } else {
            ((1u64 << ones) - 1) << self.zeros
        }
    }

    pub fn label(&self) -> String {
        if self.is_empty() {
            return "-".into();
        }
        let mut s = "0".repeat(self.zeros);
        s.push_str(&"1".repeat(self.len() - self.zeros));
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixProbabilityTable {
    pub k: u32,
    pub l: usize,
    pub variant: T3Variant,
    pub entries: Vec<PrefixEntry>,
}

pub fn prefix_probability_table(k: u32, b: f64, l: usize) -> Result<PrefixProbabilityTable> {
    let schedule = compute_schedule(k, b, l)?;
    Ok(PrefixProbabilityTable::from_schedule(
        &schedule,
        T3Variant::AsPrinted,
    ))
}

impl PrefixProbabilityTable {
    pub fn from_schedule(schedule: &ExplorationSchedule, variant: T3Variant) -> Self {
        let kf = f64::from(schedule.k());
        let mut entries = Vec::new();
        for j in 1..=schedule.len() {
            entries.push(PrefixEntry {
                step: j,
                zeros: j - 1,
                kind: PrefixKind::Undetected,
                mass: (kf - schedule.cum(j - 1)) / kf,
                flip: schedule.c(j) / kf,
                in_leakage_sum: true,
            });
            if j >= 2 {
                let prev = schedule.c(j - 1);
                let pool = kf - schedule.cum(j - 2);
                entries.push(PrefixEntry {
                    step: j,
                    zeros: j - 2,
                    kind: PrefixKind::JustDetected,
                    mass: prev * pool / (kf * kf),
                    flip: 0.5 * prev / pool,
                    in_leakage_sum: true,
                });
            }
            for zeros in (0..j.saturating_sub(2)).rev() {
                entries.push(PrefixEntry {
                    step: j,
                    zeros,
                    kind: PrefixKind::Deep,
                    mass: deep_prefix_mass(schedule, j, zeros, variant),
                    flip: 0.5,
                    in_leakage_sum: zeros >= 1,
                });
            }
        }
        PrefixProbabilityTable {
            k: schedule.k(),
            l: schedule.len(),
            variant,
            entries,
        }
    }

    pub fn entries_for(&self, step: usize) -> impl Iterator<Item = &PrefixEntry> {
        self.entries.iter().filter(move |e| e.step == step)
    }

    pub fn get(&self, step: usize, zeros: usize) -> Option<&PrefixEntry> {
        self.entries
            .iter()
            .find(|e| e.step == step && e.zeros == zeros)
    }

    /// Plug-in leakage `(1/L) sum_j sum_prefix P(prefix) H(flip)` over the
    /// entries the closed form includes.
    pub fn leakage_rate(&self) -> f64 {
        let total: f64 = self
            .entries
            .iter()
            .filter(|e| e.in_leakage_sum)
            .map(|e| e.mass * h2(e.flip))
            .sum();
        total / self.l as f64
    }
}
