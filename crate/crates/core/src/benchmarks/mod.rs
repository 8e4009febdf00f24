//! Benchmark forecast generators.
//!
//! * `exactly_zero`: every draw is zero.
//! * `last_historical`: Poisson draws around the last observed value.
//! * `conflictology_country12` / `conflictology_neighbors12`: the last 12
//!   observed values (of the unit, plus its grid neighbours) are the
//!   forecast distribution.
//! * `conflictology_bootstrap240`: draws sampled from all observations of
//!   the last 240 months across every unit.
//!
//! All generators are deterministic in (panel, spec, seed); stochastic
//! ones draw from streams keyed by (seed, unit, month).

mod poisson;

use std::fmt;
use std::str::FromStr;

use rand::RngExt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forecast::{ForecastSet, Submission, MAX_DRAWS, MIN_DRAWS};
use crate::model::{EvaluationWindow, GridTopology, Level, MonthId, ObservationPanel, UnitId};
use crate::rng::{cell_rng, Purpose};

pub use poisson::{poisson_expand, poisson_expand_cell, sample_poisson};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkKind {
    ExactlyZero,
    LastHistorical,
    ConflictologyWindow,
    BootstrapPool,
}

/// Parameters of one benchmark model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkSpec {
    pub kind: BenchmarkKind,
    pub lookback_months: u32,
    pub use_neighbors: bool,
    /// Ignored by the conflictology window, whose size follows the lookback.
    pub n_draws: usize,
    pub seed: u64,
}

impl BenchmarkSpec {
    pub fn exactly_zero() -> Self {
        BenchmarkSpec {
            kind: BenchmarkKind::ExactlyZero,
            lookback_months: 1,
            use_neighbors: false,
            n_draws: MAX_DRAWS,
            seed: 0,
        }
    }

    pub fn last_historical(seed: u64) -> Self {
        BenchmarkSpec {
            kind: BenchmarkKind::LastHistorical,
            seed,
            ..Self::exactly_zero()
        }
    }

    pub fn conflictology(lookback_months: u32, use_neighbors: bool) -> Self {
        BenchmarkSpec {
            kind: BenchmarkKind::ConflictologyWindow,
            lookback_months,
            use_neighbors,
            n_draws: 0,
            seed: 0,
        }
    }

    pub fn bootstrap(lookback_months: u32, seed: u64) -> Self {
        BenchmarkSpec {
            kind: BenchmarkKind::BootstrapPool,
            lookback_months,
            seed,
            ..Self::exactly_zero()
        }
    }

    /// Looks up one of the named benchmark models.
    pub fn named(name: &str, seed: u64) -> Result<Self> {
        match name {
            "exactly_zero" => Ok(Self::exactly_zero()),
            "last_historical" => Ok(Self::last_historical(seed)),
            "conflictology_country12" | "conflictology12" => Ok(Self::conflictology(12, false)),
            "conflictology_neighbors12" => Ok(Self::conflictology(12, true)),
            "conflictology_bootstrap240" | "bootstrap240" => Ok(Self::bootstrap(240, seed)),
            other => Err(Error::domain(format!(
                "unknown benchmark {other:?}; expected one of {}",
                NAMED.join(", ")
            ))),
        }
    }

    pub fn with_n_draws(mut self, n_draws: usize) -> Self {
        self.n_draws = n_draws;
        self
    }

    /// Forecasts for every unit in `units` over every window.
    pub fn generate(
        &self,
        panel: &ObservationPanel,
        units: &[UnitId],
        windows: &[EvaluationWindow],
        topo: &GridTopology,
    ) -> Result<Submission> {
        let mut sub = Submission::new(panel.level());
        for window in windows {
            let sets = match self.kind {
                BenchmarkKind::ExactlyZero => gen_exactly_zero(units, window, self.n_draws)?,
                BenchmarkKind::LastHistorical => {
                    gen_last_historical(panel, units, window, self.n_draws, self.seed)?
                }
                BenchmarkKind::ConflictologyWindow => gen_conflictology_window(
                    panel,
                    units,
                    window,
                    self.lookback_months,
                    self.use_neighbors.then_some(topo),
                )?,
                BenchmarkKind::BootstrapPool => gen_bootstrap_pool(
                    panel,
                    units,
                    window,
                    self.lookback_months,
                    self.n_draws,
                    self.seed,
                )?,
            };
            for set in sets {
                sub.insert(set)?;
            }
        }
        Ok(sub)
    }
}

/// Names accepted by [`BenchmarkSpec::named`].
pub const NAMED: [&str; 5] = [
    "exactly_zero",
    "last_historical",
    "conflictology_country12",
    "conflictology_neighbors12",
    "conflictology_bootstrap240",
];

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchmarkKind::ExactlyZero => "exactly_zero",
            BenchmarkKind::LastHistorical => "last_historical",
            BenchmarkKind::ConflictologyWindow => "conflictology_window",
            BenchmarkKind::BootstrapPool => "bootstrap_pool",
        })
    }
}

impl FromStr for BenchmarkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(BenchmarkSpec::named(s, 0)?.kind)
    }
}

fn check_n_draws(n_draws: usize) -> Result<()> {
    if (MIN_DRAWS..=MAX_DRAWS).contains(&n_draws) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "n_draws {n_draws} outside [{MIN_DRAWS}, {MAX_DRAWS}]"
        )))
    }
}

fn lookback_start(window: &EvaluationWindow, lookback: u32) -> Result<MonthId> {
    if lookback < 1 {
        return Err(Error::domain("lookback must be at least one month"));
    }
    window.train_cutoff().minus(lookback - 1).ok_or_else(|| {
        Error::domain(format!(
            "lookback of {lookback} months before {} precedes the calendar epoch",
            window.train_cutoff()
        ))
    })
}

/// Runs `per_unit` for every unit in parallel, keeping unit order and
/// collecting all per-unit history errors into one.
fn per_unit<F>(units: &[UnitId], window: &EvaluationWindow, per_unit: F) -> Result<Vec<ForecastSet>>
where
    F: Fn(UnitId) -> Result<Vec<ForecastSet>, Vec<MonthId>> + Sync,
{
    let results: Vec<_> = units.par_iter().map(|&u| (u, per_unit(u))).collect();
    let mut sets = Vec::with_capacity(units.len() * 12);
    let mut missing = Vec::new();
    for (unit, r) in results {
        match r {
            Ok(s) => sets.extend(s),
            Err(months) => missing.push((unit, months)),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingHistory(missing));
    }
    debug_assert!(sets.iter().all(|s| window.contains(s.month)));
    Ok(sets)
}

/// All-zero draws for every unit and forecast month.
pub fn gen_exactly_zero(units: &[UnitId], window: &EvaluationWindow, n_draws: usize) -> Result<Vec<ForecastSet>> {
    check_n_draws(n_draws)?;
    Ok(units
        .iter()
        .flat_map(|&u| window.forecast_months().map(move |m| ForecastSet::new(u, m, vec![0; n_draws])))
        .collect())
}

/// Poisson draws with mean equal to the observation at the window cutoff.
pub fn gen_last_historical(
    panel: &ObservationPanel,
    units: &[UnitId],
    window: &EvaluationWindow,
    n_draws: usize,
    seed: u64,
) -> Result<Vec<ForecastSet>> {
    check_n_draws(n_draws)?;
    let cutoff = window.train_cutoff();
    per_unit(units, window, |unit| {
        let point = panel.get(unit, cutoff).ok_or_else(|| vec![cutoff])? as f64;
        Ok(window
            .forecast_months()
            .map(|month| {
                let draws = poisson_expand_cell(point, n_draws, seed, Purpose::LastHistorical, unit, month)
                    .expect("arguments checked above");
                ForecastSet::new(unit, month, draws)
            })
            .collect())
    })
}

/// Repeats `values` as whole copies until there are at least
/// [`MIN_DRAWS`] of them, which leaves the empirical distribution unchanged.
fn tile_to_minimum(values: Vec<u32>) -> Vec<u32> {
    if values.is_empty() || values.len() >= MIN_DRAWS {
        return values;
    }
    let copies = MIN_DRAWS.div_ceil(values.len());
    values.repeat(copies)
}

/// The last `lookback` observations of each unit, plus those of its grid
/// neighbours when `neighbors` is given, form the forecast for every month.
pub fn gen_conflictology_window(
    panel: &ObservationPanel,
    units: &[UnitId],
    window: &EvaluationWindow,
    lookback: u32,
    neighbors: Option<&GridTopology>,
) -> Result<Vec<ForecastSet>> {
    let first = lookback_start(window, lookback)?;
    let cutoff = window.train_cutoff();
    if neighbors.is_some() && panel.level() != Level::Pgm {
        return Err(Error::domain("neighbour conflictology needs a pgm panel"));
    }
    let sets = per_unit(units, window, |unit| {
        let mut values = panel.history(unit, first, cutoff)?;
        if let Some(topo) = neighbors {
            let ids = topo.neighbors(unit.id()).map_err(|_| Vec::new())?;
            for gid in ids {
                let n = UnitId::pgm(gid).expect("neighbour inside grid");
                values.extend(panel.history(n, first, cutoff)?);
            }
        }
        let draws = tile_to_minimum(values);
        Ok(window
            .forecast_months()
            .map(|m| ForecastSet::new(unit, m, draws.clone()))
            .collect())
    })?;
    if let Some(s) = sets.iter().find(|s| s.draws.len() > MAX_DRAWS) {
        return Err(Error::domain(format!(
            "conflictology window for {} yields {} draws, above {MAX_DRAWS}",
            s.unit,
            s.draws.len()
        )));
    }
    Ok(sets)
}

/// Draws sampled uniformly with replacement from one pool holding every
/// observation in the `lookback` months up to the cutoff, across all
/// units of the panel.
pub fn gen_bootstrap_pool(
    panel: &ObservationPanel,
    units: &[UnitId],
    window: &EvaluationWindow,
    lookback: u32,
    n_draws: usize,
    seed: u64,
) -> Result<Vec<ForecastSet>> {
    check_n_draws(n_draws)?;
    let first = lookback_start(window, lookback)?;
    let cutoff = window.train_cutoff();
    let range = first..=cutoff;
    let pool: Vec<u32> = panel
        .iter()
        .filter(|(_, m, _)| range.contains(m))
        .map(|(_, _, v)| v)
        .collect();
    if pool.is_empty() {
        return Err(Error::EmptyPool(format!(
            "no observations between {first} and {cutoff}"
        )));
    }
    let mut covered = vec![false; lookback as usize];
    for (_, m, _) in panel.iter().filter(|(_, m, _)| range.contains(m)) {
        covered[(m.get() - first.get()) as usize] = true;
    }
    let uncovered: Vec<MonthId> = covered
        .iter()
        .enumerate()
        .filter(|(_, c)| !**c)
        .map(|(i, _)| first.plus(i as u32))
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::EmptyPool(format!(
            "panel has no observations for {} month(s) of the {lookback}-month pool, first {}",
            uncovered.len(),
            uncovered[0]
        )));
    }
    per_unit(units, window, |unit| {
        Ok(window
            .forecast_months()
            .map(|month| {
                let mut rng = cell_rng(seed, Purpose::Bootstrap, unit, Some(month));
                let draws = (0..n_draws)
                    .map(|_| pool[rng.random_range(0..pool.len())])
                    .collect();
                ForecastSet::new(unit, month, draws)
            })
            .collect())
    })
}
