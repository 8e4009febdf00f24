use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::grid::GRID_CELLS;

/// Level of analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    /// Country-month.
    Cm,
    /// PRIO-GRID-month.
    Pgm,
}

impl Level {
    /// Name of the unit id column in the columnar file formats.
    pub fn unit_column(self) -> &'static str {
        match self {
            Level::Cm => "country_id",
            Level::Pgm => "priogrid_gid",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Cm => "cm",
            Level::Pgm => "pgm",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cm" => Ok(Level::Cm),
            "pgm" => Ok(Level::Pgm),
            other => Err(Error::domain(format!("unknown level {other:?}"))),
        }
    }
}

/// A country (cm) or PRIO-GRID cell (pgm).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitId {
    level: Level,
    id: u32,
}

impl UnitId {
    pub fn new(level: Level, id: u32) -> Result<Self> {
        match level {
            Level::Cm if id == 0 => Err(Error::domain("country id must be positive")),
            Level::Pgm if id == 0 || id > GRID_CELLS => Err(Error::domain(format!(
                "priogrid gid {id} outside [1, {GRID_CELLS}]"
            ))),
            _ => Ok(UnitId { level, id }),
        }
    }

    pub fn cm(id: u32) -> Result<Self> {
        Self::new(Level::Cm, id)
    }

    pub fn pgm(gid: u32) -> Result<Self> {
        Self::new(Level::Pgm, gid)
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn id(&self) -> u32 {
        self.id
    }
}

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.id)
    }
}
