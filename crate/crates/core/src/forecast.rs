use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Level, MonthId, UnitId};

/// Fewest draws a submission may carry per cell.
pub const MIN_DRAWS: usize = 15;
/// Most draws a submission may carry per cell.
pub const MAX_DRAWS: usize = 1000;

/// Predictive sample for one (unit, month). Draw order is significant:
/// Fourier resampling in the ignorance score depends on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForecastSet {
    pub unit: UnitId,
    pub month: MonthId,
    pub draws: Vec<u32>,
}

impl ForecastSet {
    pub fn new(unit: UnitId, month: MonthId, draws: Vec<u32>) -> Self {
        ForecastSet { unit, month, draws }
    }

    pub fn check_draw_count(&self) -> Result<()> {
        let n = self.draws.len();
        if (MIN_DRAWS..=MAX_DRAWS).contains(&n) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "({}, {}) has {n} draws, outside [{MIN_DRAWS}, {MAX_DRAWS}]",
                self.unit, self.month
            )))
        }
    }
}

/// A full set of forecasts at one level of analysis, keyed by
/// (unit, month) and iterated in key order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submission {
    level: Level,
    cells: BTreeMap<(UnitId, MonthId), Vec<u32>>,
}

impl Submission {
    pub fn new(level: Level) -> Self {
        Submission {
            level,
            cells: BTreeMap::new(),
        }
    }

    pub fn from_sets(level: Level, sets: impl IntoIterator<Item = ForecastSet>) -> Result<Self> {
        let mut sub = Submission::new(level);
        for set in sets {
            sub.insert(set)?;
        }
        Ok(sub)
    }

    pub fn insert(&mut self, set: ForecastSet) -> Result<()> {
        if set.unit.level() != self.level {
            return Err(Error::domain(format!(
                "unit {} does not belong to a {} submission",
                set.unit, self.level
            )));
        }
        match self.cells.entry((set.unit, set.month)) {
            std::collections::btree_map::Entry::Occupied(_) => Err(Error::domain(format!(
                "duplicate forecast for ({}, {})",
                set.unit, set.month
            ))),
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(set.draws);
                Ok(())
            }
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, unit: UnitId, month: MonthId) -> Option<&[u32]> {
        self.cells.get(&(unit, month)).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (UnitId, MonthId, &[u32])> + '_ {
        self.cells.iter().map(|(&(u, m), d)| (u, m, d.as_slice()))
    }

    pub fn keys(&self) -> impl Iterator<Item = (UnitId, MonthId)> + '_ {
        self.cells.keys().copied()
    }

    pub fn into_sets(self) -> impl Iterator<Item = ForecastSet> {
        self.cells
            .into_iter()
            .map(|((unit, month), draws)| ForecastSet { unit, month, draws })
    }
}

impl Extend<ForecastSet> for Submission {
    /// Panics on duplicate or wrong-level cells; use [`Submission::insert`]
    /// for fallible insertion.
    fn extend<T: IntoIterator<Item = ForecastSet>>(&mut self, iter: T) {
        for set in iter {
            self.insert(set).expect("valid forecast set");
        }
    }
}
