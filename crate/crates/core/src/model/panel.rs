use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Level, MonthId, UnitId};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Series {
    first: MonthId,
    values: Vec<u32>,
}

impl Series {
    fn last(&self) -> MonthId {
        self.first.plus(self.values.len() as u32 - 1)
    }

    fn offset(&self, month: MonthId) -> Option<usize> {
        let off = month.get().checked_sub(self.first.get())? as usize;
        (off < self.values.len()).then_some(off)
    }
}

/// Observed fatalities per (unit, month). Each unit covers one contiguous
/// month range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationPanel {
    level: Level,
    series: BTreeMap<UnitId, Series>,
}

impl ObservationPanel {
    pub fn new(level: Level) -> Self {
        ObservationPanel {
            level,
            series: BTreeMap::new(),
        }
    }

    /// Builds a panel from unordered records. Duplicate keys and gaps inside
    /// a unit's month range are errors.
    pub fn from_records(
        level: Level,
        records: impl IntoIterator<Item = (UnitId, MonthId, u32)>,
    ) -> Result<Self> {
        let mut by_unit: BTreeMap<UnitId, BTreeMap<MonthId, u32>> = BTreeMap::new();
        for (unit, month, value) in records {
            if by_unit.entry(unit).or_default().insert(month, value).is_some() {
                return Err(Error::domain(format!(
                    "duplicate observation for ({unit}, {month})"
                )));
            }
        }
        let mut panel = ObservationPanel::new(level);
        for (unit, months) in by_unit {
            let first = *months.keys().next().expect("non-empty group");
            let last = *months.keys().next_back().expect("non-empty group");
            let span = (last.get() - first.get() + 1) as usize;
            if span != months.len() {
                return Err(Error::domain(format!(
                    "unit {unit} has {} observations over a {span}-month range",
                    months.len()
                )));
            }
            panel.insert_series(unit, first, months.into_values().collect())?;
        }
        Ok(panel)
    }

    /// Adds a unit whose observations start at `first` and run for
    /// `values.len()` consecutive months.
    pub fn insert_series(&mut self, unit: UnitId, first: MonthId, values: Vec<u32>) -> Result<()> {
        if unit.level() != self.level {
            return Err(Error::domain(format!(
                "unit {unit} does not belong to a {} panel",
                self.level
            )));
        }
        if values.is_empty() {
            return Err(Error::domain(format!("unit {unit} has no observations")));
        }
        if self.series.contains_key(&unit) {
            return Err(Error::domain(format!("unit {unit} already present")));
        }
        self.series.insert(unit, Series { first, values });
        Ok(())
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn get(&self, unit: UnitId, month: MonthId) -> Option<u32> {
        let s = self.series.get(&unit)?;
        s.offset(month).map(|i| s.values[i])
    }

    pub fn contains(&self, unit: UnitId, month: MonthId) -> bool {
        self.get(unit, month).is_some()
    }

    /// Overwrites an existing observation.
    pub fn set(&mut self, unit: UnitId, month: MonthId, value: u32) -> Result<()> {
        let s = self
            .series
            .get_mut(&unit)
            .ok_or_else(|| Error::domain(format!("unit {unit} not in panel")))?;
        let i = s
            .offset(month)
            .ok_or_else(|| Error::domain(format!("({unit}, {month}) not in panel")))?;
        s.values[i] = value;
        Ok(())
    }

    pub fn units(&self) -> impl Iterator<Item = UnitId> + '_ {
        self.series.keys().copied()
    }

    pub fn n_units(&self) -> usize {
        self.series.len()
    }

    /// Number of (unit, month) cells.
    pub fn len(&self) -> usize {
        self.series.values().map(|s| s.values.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// First and last observed month of `unit`.
    pub fn span(&self, unit: UnitId) -> Option<(MonthId, MonthId)> {
        self.series.get(&unit).map(|s| (s.first, s.last()))
    }

    /// Earliest and latest month over all units.
    pub fn month_range(&self) -> Option<(MonthId, MonthId)> {
        let first = self.series.values().map(|s| s.first).min()?;
        let last = self.series.values().map(|s| s.last()).max()?;
        Some((first, last))
    }

    /// Values of `unit` over `first..=last` in month order, or the months
    /// that are missing.
    pub fn history(&self, unit: UnitId, first: MonthId, last: MonthId) -> Result<Vec<u32>, Vec<MonthId>> {
        let months = (first.get()..=last.get()).map(|m| MonthId::new(m).expect("positive"));
        let Some(s) = self.series.get(&unit) else {
            return Err(months.collect());
        };
        let mut values = Vec::new();
        let mut missing = Vec::new();
        for m in months {
            match s.offset(m) {
                Some(i) => values.push(s.values[i]),
                None => missing.push(m),
            }
        }
        if missing.is_empty() {
            Ok(values)
        } else {
            Err(missing)
        }
    }

    /// All cells ordered by unit, then month.
    pub fn iter(&self) -> impl Iterator<Item = (UnitId, MonthId, u32)> + '_ {
        self.series.iter().flat_map(|(&unit, s)| {
            s.values
                .iter()
                .enumerate()
                .map(move |(i, &v)| (unit, s.first.plus(i as u32), v))
        })
    }

    pub fn zero_share(&self) -> f64 {
        let n = self.len();
        if n == 0 {
            return f64::NAN;
        }
        self.iter().filter(|c| c.2 == 0).count() as f64 / n as f64
    }
}
