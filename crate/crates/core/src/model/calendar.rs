use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const EPOCH_YEAR: i32 = 1980;

/// Months since December 1979: `MonthId(1)` is January 1980.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthId(u32);

impl MonthId {
    pub fn new(value: u32) -> Result<Self> {
        if value == 0 {
            return Err(Error::domain("month_id must be positive"));
        }
        Ok(MonthId(value))
    }

    pub fn from_date(year: i32, month: u32) -> Result<Self> {
        if year < EPOCH_YEAR {
            return Err(Error::domain(format!("year {year} precedes {EPOCH_YEAR}")));
        }
        if !(1..=12).contains(&month) {
            return Err(Error::domain(format!("month {month} outside 1..=12")));
        }
        let value = (year - EPOCH_YEAR) as u32 * 12 + month;
        Ok(MonthId(value))
    }

    /// Inverse of [`MonthId::from_date`].
    pub fn to_date(self) -> (i32, u32) {
        let zero_based = self.0 - 1;
        (EPOCH_YEAR + (zero_based / 12) as i32, zero_based % 12 + 1)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Month `n` steps later.
    pub fn plus(self, n: u32) -> MonthId {
        MonthId(self.0 + n)
    }

    /// Month `n` steps earlier, if it exists.
    pub fn minus(self, n: u32) -> Option<MonthId> {
        self.0.checked_sub(n).filter(|v| *v > 0).map(MonthId)
    }
}

impl fmt::Display for MonthId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (y, m) = self.to_date();
        write!(f, "{}[{y:04}-{m:02}]", self.0)
    }
}

/// Accepts a bare month id (`532`) or a date (`2024-04`).
impl FromStr for MonthId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((y, m)) = s.split_once('-') {
            let year = y
                .parse()
                .map_err(|_| Error::domain(format!("bad year in {s:?}")))?;
            let month = m
                .parse()
                .map_err(|_| Error::domain(format!("bad month in {s:?}")))?;
            MonthId::from_date(year, month)
        } else {
            let v = s
                .parse()
                .map_err(|_| Error::domain(format!("bad month id {s:?}")))?;
            MonthId::new(v)
        }
    }
}
