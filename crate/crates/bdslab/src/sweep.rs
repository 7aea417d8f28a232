//! Grid evaluation of extra-reward surfaces over pool-power space.
//!
//! A sweep walks a rectangular grid of `(alpha, beta)` pool sizes, sets the
//! infiltration ratio to its revenue-maximising value at every cell, resolves
//! the equilibrium trade price, and records one actor's relative extra reward
//! for each requested participation ratio.  The result is the full surface
//! plus its extrema, suitable for locating worst cases (the betraying miner
//! tops out just below +100%, the attacking pool always ends in the red at
//! full participation).
//!
//! Cells where no valid scenario exists are skipped and reported, not
//! errored, so a single bad corner cannot abort a long sweep.  Cells are
//! evaluated in parallel; row order and extrema are nevertheless
//! deterministic functions of the grid alone.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{self, Actor, PricePolicy, Scenario};

/// Which actor's relative extra reward a sweep records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMetric {
    /// Treasury of the pool that mounts the infiltration.
    AttackerPoolRer,
    /// A miner who sells stolen blocks back to the victim.
    BdsMinerRer,
    /// The victim pool's own membership.
    VictimRer,
}

impl SweepMetric {
    /// The revenue-report actor this metric reads.
    pub fn actor(self) -> Actor {
        match self {
            SweepMetric::AttackerPoolRer => Actor::AttackerPool,
            SweepMetric::BdsMinerRer => Actor::BdsMiner,
            SweepMetric::VictimRer => Actor::VictimOwnMiners,
        }
    }
}

/// A rectangular `(alpha, beta)` grid crossed with participation ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_step: f64,
    /// Betrayal participation ratios evaluated at every cell.
    pub participations: Vec<f64>,
    pub metric: SweepMetric,
}

impl GridSpec {
    /// The default surface: both powers from 1% to 49% in 1% steps,
    /// participation from one fifth to full in fifths.
    pub fn new(metric: SweepMetric) -> Self {
        GridSpec {
            alpha_min: 0.01,
            alpha_max: 0.49,
            alpha_step: 0.01,
            beta_min: 0.01,
            beta_max: 0.49,
            beta_step: 0.01,
            participations: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            metric,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, min, max, step) in [
            ("alpha", self.alpha_min, self.alpha_max, self.alpha_step),
            ("beta", self.beta_min, self.beta_max, self.beta_step),
        ] {
            if !(min > 0.0 && min <= max && max < 0.5) {
                return Err(Error::InvalidParameter(format!(
                    "{name} range must satisfy 0 < min <= max < 0.5, got [{min}, {max}]"
                )));
            }
            if !step.is_finite() || step <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} step must be positive and finite, got {step}"
                )));
            }
        }
        if self.participations.is_empty() {
            return Err(Error::InvalidParameter(
                "participation list must not be empty".into(),
            ));
        }
        for &r in &self.participations {
            if !(0.0..=1.0).contains(&r) || r.is_nan() {
                return Err(Error::InvalidParameter(format!(
                    "participation ratio must lie in [0, 1], got {r}"
                )));
            }
        }
        Ok(())
    }

    fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
        // Integer-indexed so accumulated rounding cannot drop the last line.
        let n = ((max - min) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| min + i as f64 * step).collect()
    }

    fn alphas(&self) -> Vec<f64> {
        Self::axis(self.alpha_min, self.alpha_max, self.alpha_step)
    }

    fn betas(&self) -> Vec<f64> {
        Self::axis(self.beta_min, self.beta_max, self.beta_step)
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    /// Optimal infiltration ratio for this cell.
    pub tau: f64,
    pub participation: f64,
    /// The metric actor's relative extra reward, as a fraction.
    pub rer_analytic: f64,
}

/// A grid point that produced no row, with the validation message explaining
/// why (typically: the optimal infiltration would meet or exceed the victim's
/// size).
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCell {
    pub alpha: f64,
    pub beta: f64,
    pub reason: String,
}

/// Full surface plus extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Alpha-major, beta-minor, participation-innermost ordering.
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedCell>,
    /// First row attaining the maximal metric value, in row order.
    pub argmax: Option<SweepRow>,
    /// First row attaining the minimal metric value, in row order.
    pub argmin: Option<SweepRow>,
}

/// Evaluate the metric surface over the whole grid.
///
/// Every cell uses the cell's own optimal infiltration ratio and the
/// equilibrium trade price.  Ties for the extrema resolve to the first row in
/// output order, so the result is reproducible bit for bit.
pub fn run_sweep(grid: &GridSpec) -> Result<SweepResult> {
    grid.validate()?;
    let alphas = grid.alphas();
    let betas = grid.betas();
    let actor = grid.metric.actor();

    let cells: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();

    // Each cell yields either its rows or a skip record; the indexed collect
    // keeps output order independent of scheduling.
    let evaluated: Vec<std::result::Result<Vec<SweepRow>, SkippedCell>> = cells
        .par_iter()
        .map(|&(alpha, beta)| evaluate_cell(alpha, beta, &grid.participations, actor))
        .collect();

    let mut rows = Vec::with_capacity(cells.len() * grid.participations.len());
    let mut skipped = Vec::new();
    for cell in evaluated {
        match cell {
            Ok(cell_rows) => rows.extend(cell_rows),
            Err(skip) => skipped.push(skip),
        }
    }

    let argmax = extremum(&rows, |best, row| row.rer_analytic > best.rer_analytic);
    let argmin = extremum(&rows, |best, row| row.rer_analytic < best.rer_analytic);
    Ok(SweepResult {
        rows,
        skipped,
        argmax,
        argmin,
    })
}

fn evaluate_cell(
    alpha: f64,
    beta: f64,
    participations: &[f64],
    actor: Actor,
) -> std::result::Result<Vec<SweepRow>, SkippedCell> {
    let skip = |err: Error| SkippedCell {
        alpha,
        beta,
        reason: err.to_string(),
    };
    let tau = model::optimal_tau(alpha, beta).map_err(skip)?;
    let mut rows = Vec::with_capacity(participations.len());
    for &participation in participations {
        let scenario = Scenario::new(alpha, beta, tau, participation).map_err(skip)?;
        let report = model::revenue_report(&scenario, PricePolicy::Equilibrium).map_err(skip)?;
        let rers = model::actor_rers(&scenario, &report);
        rows.push(SweepRow {
            alpha,
            beta,
            tau,
            participation,
            rer_analytic: rers.get(actor),
        });
    }
    Ok(rows)
}

fn extremum(rows: &[SweepRow], better: impl Fn(&SweepRow, &SweepRow) -> bool) -> Option<SweepRow> {
    let mut iter = rows.iter();
    let mut best = *iter.next()?;
    for row in iter {
        if better(&best, row) {
            best = *row;
        }
    }
    Some(best)
}

/// How one cell's extra rewards respond to the participation ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    /// Betraying-miner reward never rises as participation grows.
    pub bds_miner_non_increasing: bool,
    /// Attacking pool's treasury reward never rises as participation grows.
    pub attacker_pool_non_increasing: bool,
    /// Every successive difference in both series is below 1e-9 in
    /// magnitude: the response to participation is beneath numerical
    /// resolution at this sampling, so ranking the samples is meaningless.
    /// Check this before trusting the monotonicity flags.
    pub flat: bool,
    /// Largest betraying-miner value observed (at the smallest ratio unless
    /// the series misbehaves).
    pub bds_miner_max: f64,
    /// Smallest attacking-pool value observed (at full participation unless
    /// the series misbehaves).
    pub attacker_pool_min: f64,
}

impl MonotonicityReport {
    /// True when both series are non-increasing.
    pub fn monotone(&self) -> bool {
        self.bds_miner_non_increasing && self.attacker_pool_non_increasing
    }
}

/// Sample participation on `[0, 1]` for a fixed cell and report whether the
/// betraying-miner and attacking-pool rewards fall as participation rises.
///
/// `samples` is the number of evaluation points past zero (so the grid is
/// `k / samples` for `k = 0..=samples`).  The attacking-pool series includes
/// the zero-participation baseline; the betraying-miner series starts at the
/// first positive ratio because that actor does not exist without betrayal.
/// Increases below 1e-12 are tolerated as floating-point noise.
pub fn monotonicity_report(
    alpha: f64,
    beta: f64,
    tau: f64,
    samples: usize,
) -> Result<MonotonicityReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 participation samples, got {samples}"
        )));
    }
    let mut bds = Vec::with_capacity(samples);
    let mut pool = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let participation = k as f64 / samples as f64;
        let scenario = Scenario::new(alpha, beta, tau, participation)?;
        let report = model::revenue_report(&scenario, PricePolicy::Equilibrium)?;
        let rers = model::actor_rers(&scenario, &report);
        pool.push(rers.get(Actor::AttackerPool));
        if k > 0 {
            bds.push(rers.get(Actor::BdsMiner));
        }
    }
    let non_increasing = |series: &[f64]| series.windows(2).all(|pair| pair[1] <= pair[0] + 1e-12);
    let below_resolution = |series: &[f64]| {
        series
            .windows(2)
            .all(|pair| (pair[1] - pair[0]).abs() < 1e-9)
    };
    Ok(MonotonicityReport {
        bds_miner_non_increasing: non_increasing(&bds),
        attacker_pool_non_increasing: non_increasing(&pool),
        flat: below_resolution(&bds) && below_resolution(&pool),
        bds_miner_max: bds.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        attacker_pool_min: pool.iter().cloned().fold(f64::INFINITY, f64::min),
    })
}
