use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use crate::error::Result;
use crate::forecast::{MAX_DRAWS, MIN_DRAWS};
use crate::io::columnar::{read_table, Table, Values};
use crate::io::text::Universe;
use crate::model::{Level, MonthId, UnitId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    MissingColumn,
    WrongColumnType,
    NullValue,
    InvalidId,
    NegativeCount,
    DuplicateDraw,
    NonContiguousDraws,
    DrawCountLow,
    DrawCountHigh,
    UnknownUnit,
    UnknownCell,
    MissingCell,
}

impl ViolationKind {
    pub fn describe(self) -> &'static str {
        match self {
            ViolationKind::MissingColumn => "missing column",
            ViolationKind::WrongColumnType => "wrong column type",
            ViolationKind::NullValue => "null value",
            ViolationKind::InvalidId => "invalid unit or month id",
            ViolationKind::NegativeCount => "negative count",
            ViolationKind::DuplicateDraw => "duplicate draw",
            ViolationKind::NonContiguousDraws => "draw ids not contiguous from 0",
            ViolationKind::DrawCountLow => "draw-count below 15",
            ViolationKind::DrawCountHigh => "draw-count above 1000",
            ViolationKind::UnknownUnit => "unknown unit",
            ViolationKind::UnknownCell => "cell outside universe",
            ViolationKind::MissingCell => "missing cell",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// 0-based data row, when one row is to blame.
    pub row: Option<usize>,
    pub cell: Option<(UnitId, MonthId)>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(r) = self.row {
            write!(f, " at row {r}")?;
        }
        if let Some((u, m)) = self.cell {
            write!(f, " in ({u}, {m})")?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub level: Level,
    pub rows: usize,
    pub cells: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn kinds(&self) -> BTreeSet<ViolationKind> {
        self.violations.iter().map(|v| v.kind).collect()
    }

    /// One line per violation class with its count and first example.
    pub fn summary(&self) -> String {
        if self.is_valid() {
            return format!("valid: {} rows, {} cells", self.rows, self.cells);
        }
        let mut lines = vec![format!(
            "invalid: {} violation(s) over {} rows, {} cells",
            self.violations.len(),
            self.rows,
            self.cells
        )];
        for kind in self.kinds() {
            let first = self.violations.iter().find(|v| v.kind == kind).expect("kind present");
            lines.push(format!("  {kind}: {} (first: {first})", self.count(kind)));
        }
        lines.join("\n")
    }
}

fn violation(kind: ViolationKind, row: Option<usize>, cell: Option<(UnitId, MonthId)>, detail: impl Into<String>) -> Violation {
    Violation {
        kind,
        row,
        cell,
        detail: detail.into(),
    }
}

/// Rows of one cell in file order: (draw id, prediction, row).
pub(crate) type CellRows = BTreeMap<(UnitId, MonthId), Vec<(i32, i32, usize)>>;

/// Checks the schema and per-cell structure of a submission table.
/// Returns the grouped cells when the schema allowed grouping.
pub(crate) fn check_submission_table(table: &Table, level: Level) -> (Option<CellRows>, Vec<Violation>) {
    let mut violations = Vec::new();
    let names = [level.unit_column(), "month_id", "draw", "prediction"];
    let mut cols: Vec<&[i32]> = Vec::new();
    for name in names {
        match table.column(name) {
            None => violations.push(violation(ViolationKind::MissingColumn, None, None, name)),
            Some(c) => match &c.values {
                Values::Int32(v) => cols.push(v),
                other => violations.push(violation(
                    ViolationKind::WrongColumnType,
                    None,
                    None,
                    format!("{name} is {}, expected int32", other.type_name()),
                )),
            },
        }
    }
    if !violations.is_empty() {
        return (None, violations);
    }
    let nulls = |cols: &[&str]| -> BTreeSet<usize> {
        cols.iter()
            .flat_map(|n| table.column(n).expect("checked").nulls.iter().copied())
            .collect()
    };
    // Rows with a null key cannot be placed in a cell; a null prediction
    // still occupies its draw slot.
    let null_keys = nulls(&names[..3]);
    let null_preds = nulls(&names[3..]);
    for &r in null_keys.union(&null_preds) {
        violations.push(violation(ViolationKind::NullValue, Some(r), None, ""));
    }

    let (units, months, draws, preds) = (cols[0], cols[1], cols[2], cols[3]);
    let mut cells: CellRows = BTreeMap::new();
    for row in 0..table.n_rows {
        if null_keys.contains(&row) {
            continue;
        }
        let unit = u32::try_from(units[row]).ok().and_then(|id| UnitId::new(level, id).ok());
        let month = u32::try_from(months[row]).ok().and_then(|m| MonthId::new(m).ok());
        let (Some(unit), Some(month)) = (unit, month) else {
            violations.push(violation(
                ViolationKind::InvalidId,
                Some(row),
                None,
                format!("{}={} month_id={}", level.unit_column(), units[row], months[row]),
            ));
            continue;
        };
        if preds[row] < 0 && !null_preds.contains(&row) {
            violations.push(violation(
                ViolationKind::NegativeCount,
                Some(row),
                Some((unit, month)),
                format!("prediction {}", preds[row]),
            ));
        }
        cells.entry((unit, month)).or_default().push((draws[row], preds[row], row));
    }

    for (&cell, rows) in &cells {
        let n = rows.len();
        if n < MIN_DRAWS {
            violations.push(violation(ViolationKind::DrawCountLow, None, Some(cell), format!("{n} draws")));
        } else if n > MAX_DRAWS {
            violations.push(violation(ViolationKind::DrawCountHigh, None, Some(cell), format!("{n} draws")));
        }
        let mut seen = BTreeSet::new();
        for &(d, _, row) in rows {
            if !seen.insert(d) {
                violations.push(violation(ViolationKind::DuplicateDraw, Some(row), Some(cell), format!("draw {d}")));
            }
        }
        let contiguous = seen.first() == Some(&0) && seen.last() == Some(&(seen.len() as i32 - 1));
        if !contiguous {
            violations.push(violation(
                ViolationKind::NonContiguousDraws,
                None,
                Some(cell),
                format!("draw ids span {:?}..={:?}", seen.first(), seen.last()),
            ));
        }
    }
    (Some(cells), violations)
}

fn check_universe(cells: &CellRows, universe: &Universe, violations: &mut Vec<Violation>) {
    let mut unknown_units = BTreeSet::new();
    for &(unit, month) in cells.keys() {
        if !universe.has_unit(unit) {
            if unknown_units.insert(unit) {
                violations.push(violation(ViolationKind::UnknownUnit, None, Some((unit, month)), ""));
            }
        } else if !universe.contains(unit, month) {
            violations.push(violation(ViolationKind::UnknownCell, None, Some((unit, month)), ""));
        }
    }
    for (unit, month) in universe.cells() {
        if !cells.contains_key(&(unit, month)) {
            violations.push(violation(ViolationKind::MissingCell, None, Some((unit, month)), ""));
        }
    }
}

/// Validates a submission file at `level`, optionally against the universe
/// of cells it must cover. Errors only when the file cannot be read at
/// all; every other defect is a classified violation.
pub fn validate_submission(path: &Path, level: Level, universe: Option<&Universe>) -> Result<ValidationReport> {
    let table = read_table(path)?;
    let (cells, mut violations) = check_submission_table(&table, level);
    if let (Some(cells), Some(universe)) = (&cells, universe) {
        check_universe(cells, universe, &mut violations);
    }
    Ok(ValidationReport {
        level,
        rows: table.n_rows,
        cells: cells.as_ref().map_or(0, BTreeMap::len),
        violations,
    })
}
