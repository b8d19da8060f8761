//! Bound-versus-budget sweeps written as CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bounds::{BoundPoint, T3Variant};
use crate::config::{validate_params, ModelConfig};
use crate::error::{Error, Result};
use crate::estimate::RateEstimate;
use crate::policy::HalvingRule;
use crate::schedule::compute_schedule;
use crate::sim::simulate_stats;

pub const CSV_HEADER: &str = "K,L,B,outer,leakage,inner_raw,inner";
pub const MC_CSV_HEADER: &str = "K,L,B,blocks,seed,main_rate,main_stderr,leakage,leakage_stderr";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub k: u32,
    pub ls: Vec<usize>,
    pub b_start: f64,
    pub b_stop: f64,
    pub b_step: f64,
    /// Monte Carlo blocks per grid point; zero skips the overlay.
    pub blocks: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub rule: HalvingRule,
    pub variant: T3Variant,
}

impl Default for SweepSpec {
    /// `K = 32`, `L in {2, 5, 8, 12}`, `B = 1..=32`.
    fn default() -> Self {
        SweepSpec {
            k: 32,
            ls: vec![2, 5, 8, 12],
            b_start: 1.0,
            b_stop: 32.0,
            b_step: 1.0,
            blocks: 0,
            seed: 0,
            out: None,
            rule: HalvingRule::default(),
            variant: T3Variant::default(),
        }
    }
}

/// One Monte Carlo overlay row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McPoint {
    pub l: usize,
    pub b: f64,
    pub main: RateEstimate,
    pub leakage: RateEstimate,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ls.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one L".into()));
        }
        if !(self.b_step.is_finite() && self.b_step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "B step must be > 0, got {}",
                self.b_step
            )));
        }
        if !(self.b_start.is_finite() && self.b_stop.is_finite()) || self.b_start > self.b_stop {
            return Err(Error::InvalidParameter(format!(
                "empty B range {}..={}",
                self.b_start, self.b_stop
            )));
        }
        for &l in &self.ls {
            validate_params(self.k, self.b_start, l)?;
        }
        Ok(())
    }

    /// Budgets `start + i * step` up to `stop` (with a relative slack of 1e-9
    /// so decimal steps reach the endpoint).
    pub fn budgets(&self) -> Vec<f64> {
        let slack = 1e-9 * self.b_step;
        (0u64..)
            .map(|i| self.b_start + i as f64 * self.b_step)
            .take_while(|&b| b <= self.b_stop + slack)
            .collect()
    }

    fn grid(&self) -> Vec<(usize, f64)> {
        let mut ls = self.ls.clone();
        ls.sort_unstable();
        ls.dedup();
        let budgets = self.budgets();
        ls.into_iter()
            .flat_map(|l| budgets.iter().map(move |&b| (l, b)))
            .collect()
    }

    /// Closed-form rows, sorted by `(L, B)`.
    pub fn rows(&self) -> Result<Vec<BoundPoint>> {
        self.validate()?;
        self.grid()
            .into_iter()
            .map(|(l, b)| BoundPoint::compute_with(self.k, b, l, self.variant))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<usize> {
        let rows = self.rows()?;
        writeln!(out, "{CSV_HEADER}")?;
        for p in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.k, p.l, p.b, p.outer, p.leakage, p.inner_raw, p.inner
            )?;
        }
        Ok(rows.len())
    }

    /// Monte Carlo estimates at every grid point, each seeded with `seed`.
    pub fn mc_rows(&self) -> Result<Vec<McPoint>> {
        self.validate()?;
        self.grid()
            .into_iter()
            .map(|(l, b)| {
                let config = ModelConfig::new(self.k, b, l)?
                    .with_blocks(self.blocks)
                    .with_seed(self.seed)
                    .with_rule(self.rule);
                config.validate_for_simulation()?;
                let stats = simulate_stats(&config, &compute_schedule(self.k, b, l)?)?;
                Ok(McPoint {
                    l,
                    b,
                    main: stats.main_rate_estimate()?,
                    leakage: stats.leakage_estimate()?,
                })
            })
            .collect()
    }

    pub fn write_mc_csv<W: Write>(&self, out: &mut W) -> Result<usize> {
        let rows = self.mc_rows()?;
        writeln!(out, "{MC_CSV_HEADER}")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                self.k,
                r.l,
                r.b,
                self.blocks,
                self.seed,
                r.main.value,
                r.main.stderr,
                r.leakage.value,
                r.leakage.stderr
            )?;
        }
        Ok(rows.len())
    }
}

/// Path of the Monte Carlo overlay written next to `out`.
pub fn mc_sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".mc.csv");
    PathBuf::from(s)
}
