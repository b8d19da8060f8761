//! Exploration schedule: how many fresh beams the policy probes at each
//! channel use while the legitimate receiver has not yet been found.
//!
//! `c_1 = min(K/2, B)` and `c_j = min((K - sum_{k<j} c_k) / 2, B)`: each step
//! probes half of the still-unexplored beams, capped by the cost budget.

use crate::config::validate_params;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationSchedule {
    k: u32,
    b: f64,
    /// Real-valued schedule used by the closed forms.
    pub c: Vec<f64>,
    /// `floor(c_j)`, the probe sizes the simulator actually uses.
    pub c_int: Vec<u32>,
    /// `cum[j-1] = c_1 + ... + c_j`.
    pub cum: Vec<f64>,
}

pub fn compute_schedule(k: u32, b: f64, l: usize) -> Result<ExplorationSchedule> {
    validate_params(k, b, l)?;
    let kf = f64::from(k);
    let mut c = Vec::with_capacity(l);
    let mut cum = Vec::with_capacity(l);
    let mut explored = 0.0;
    for _ in 0..l {
        let cj = ((kf - explored) / 2.0).min(b);
        explored += cj;
        c.push(cj);
        cum.push(explored);
    }
    let c_int = c.iter().map(|&x| x.floor() as u32).collect();
    Ok(ExplorationSchedule {
        k,
        b,
        c,
        c_int,
        cum,
    })
}

impl ExplorationSchedule {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn budget(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `c_j` for 1-based `j`, with `c_0 = 0`.
    pub fn c(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.c[j - 1]
        }
    }

    /// Integer probe size for 1-based step `j` (`0` for `j = 0`).
    pub fn c_int(&self, j: usize) -> u32 {
        if j == 0 {
            0
        } else {
            self.c_int[j - 1]
        }
    }

    /// `sum_{k <= j} c_k`; zero for `j = 0`.
    pub fn cum(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.cum[j - 1]
        }
    }

    /// Steps whose real schedule entry is not an integer. Closed forms and the
    /// simulator only agree approximately when this is non-empty.
    pub fn fractional_steps(&self) -> Vec<usize> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x.fract() != 0.0)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.c.iter().all(|x| x.fract() == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c_of(k: u32, b: f64, l: usize) -> Vec<f64> {
        compute_schedule(k, b, l).unwrap().c
    }

    #[test]
    fn hand_unrolled_examples() {
        assert_eq!(c_of(32, 8.0, 5), vec![8.0, 8.0, 8.0, 4.0, 2.0]);
        assert_eq!(c_of(32, 32.0, 3), vec![16.0, 8.0, 4.0]);
        assert_eq!(c_of(2, 1.0, 2), vec![1.0, 0.5]);
        assert_eq!(c_of(4, 1.0, 3), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn integerization_and_sums() {
        let s = compute_schedule(2, 1.0, 3).unwrap();
        assert_eq!(s.c_int, vec![1, 0, 0]);
        assert_eq!(s.cum, vec![1.0, 1.5, 1.75]);
        assert_eq!(s.fractional_steps(), vec![2, 3]);
        assert!(!s.is_integral());
        assert_eq!(s.c(0), 0.0);
        assert_eq!(s.cum(0), 0.0);
        assert!(compute_schedule(32, 8.0, 5).unwrap().is_integral());
    }

    #[test]
    fn entries_can_shrink_with_budget() {
        assert_eq!(c_of(32, 9.0, 3), vec![9.0, 9.0, 7.0]);
        assert!(c_of(32, 9.0, 3)[2] < c_of(32, 8.0, 3)[2]);
    }

    #[test]
    fn rejects_invalid() {
        assert!(compute_schedule(1, 1.0, 2).is_err());
        assert!(compute_schedule(4, 0.0, 2).is_err());
        assert!(compute_schedule(4, 1.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn satisfies_both_min_branches(k in 2u32..200, b in 0.1f64..100.0, l in 1usize..30) {
            let s = compute_schedule(k, b, l).unwrap();
            let kf = f64::from(k);
            for j in 1..=l {
                let cj = s.c(j);
                prop_assert!(cj >= 0.0 && cj <= b);
                prop_assert!(cj <= (kf - s.cum(j - 1)) / 2.0);
                let branch = ((kf - s.cum(j - 1)) / 2.0).min(b);
                prop_assert_eq!(cj, branch);
                prop_assert!(s.c_int(j) as f64 <= cj);
            }
            prop_assert!(s.cum(l) <= kf);
        }

        #[test]
        fn scale_covariant(k in 2u32..64, b in 1u32..64, l in 1usize..20, m in 1u32..8) {
            let base = compute_schedule(k, f64::from(b), l).unwrap();
            let scaled = compute_schedule(m * k, f64::from(m * b), l).unwrap();
            for (x, y) in base.c.iter().zip(&scaled.c) {
                prop_assert!((f64::from(m) * x - y).abs() <= 1e-12 * y.max(1.0));
            }
        }

        // Individual entries are not monotone in B (see
        // `entries_can_shrink_with_budget`), but every partial sum is.
        #[test]
        fn partial_sums_monotone_in_budget(k in 2u32..64, b in 1u32..63, l in 1usize..20) {
            let lo = compute_schedule(k, f64::from(b), l).unwrap();
            let hi = compute_schedule(k, f64::from(b + 1), l).unwrap();
            for (x, y) in lo.cum.iter().zip(&hi.cum) {
                prop_assert!(x <= y);
            }
        }

        #[test]
        fn non_increasing_after_halving_branch(k in 2u32..200, b in 0.1f64..100.0, l in 2usize..30) {
            let s = compute_schedule(k, b, l).unwrap();
            let kf = f64::from(k);
            let switch = (1..=l).find(|&j| (kf - s.cum(j - 1)) / 2.0 < b);
            if let Some(start) = switch {
                for j in start..l {
                    prop_assert!(s.c(j + 1) <= s.c(j));
                }
            }
        }
    }
}
