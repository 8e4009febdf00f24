use std::collections::BTreeMap;
use std::path::Path;

use crate::benchmarks::poisson_expand_cell;
use crate::error::{Error, Result};
use crate::evaluation::{ScoreRow, ScoreTable};
use crate::forecast::{ForecastSet, Submission};
use crate::io::columnar::{read_table, write_table, Column, OutColumn, Table, Values};
use crate::io::validate::{check_submission_table, ValidationReport};
use crate::metrics::ScoreTriple;
use crate::model::{Level, MonthId, ObservationPanel, UnitId};
use crate::rng::Purpose;

fn detect_level(path: &Path, table: &Table) -> Result<Level> {
    match (
        table.has_column(Level::Cm.unit_column()),
        table.has_column(Level::Pgm.unit_column()),
    ) {
        (true, false) => Ok(Level::Cm),
        (false, true) => Ok(Level::Pgm),
        (true, true) => Err(Error::format(path, "both country_id and priogrid_gid columns present")),
        (false, false) => Err(Error::format(path, "no country_id or priogrid_gid column")),
    }
}

fn column<'t>(path: &Path, table: &'t Table, name: &str) -> Result<&'t Column> {
    let col = table
        .column(name)
        .ok_or_else(|| Error::format(path, format!("missing column {name}")))?;
    if let Some(&r) = col.nulls.first() {
        return Err(Error::format(path, format!("null {name} at row {r}")));
    }
    Ok(col)
}

fn int32_column<'t>(path: &Path, table: &'t Table, name: &str) -> Result<&'t [i32]> {
    match &column(path, table, name)?.values {
        Values::Int32(v) => Ok(v),
        other => Err(Error::format(path, format!("{name} is {}, expected int32", other.type_name()))),
    }
}

fn double_column<'t>(path: &Path, table: &'t Table, name: &str) -> Result<&'t [f64]> {
    match &column(path, table, name)?.values {
        Values::Double(v) => Ok(v),
        other => Err(Error::format(path, format!("{name} is {}, expected double", other.type_name()))),
    }
}

fn keys(path: &Path, table: &Table, level: Level) -> Result<Vec<(UnitId, MonthId)>> {
    let units = int32_column(path, table, level.unit_column())?;
    let months = int32_column(path, table, "month_id")?;
    units
        .iter()
        .zip(months)
        .enumerate()
        .map(|(row, (&u, &m))| {
            let unit = u32::try_from(u).ok().and_then(|u| UnitId::new(level, u).ok());
            let month = u32::try_from(m).ok().and_then(|m| MonthId::new(m).ok());
            unit.zip(month).ok_or_else(|| {
                Error::format(path, format!("row {row}: invalid id {}={u} month_id={m}", level.unit_column()))
            })
        })
        .collect()
}

/// Reads observed fatalities. The level follows from the unit column.
pub fn read_observations(path: &Path) -> Result<ObservationPanel> {
    let table = read_table(path)?;
    let level = detect_level(path, &table)?;
    let keys = keys(path, &table, level)?;
    let values = int32_column(path, &table, "fatalities")?;
    let mut records = Vec::with_capacity(keys.len());
    for (row, (&(u, m), &v)) in keys.iter().zip(values).enumerate() {
        let v = u32::try_from(v).map_err(|_| Error::format(path, format!("row {row}: negative fatalities {v}")))?;
        records.push((u, m, v));
    }
    ObservationPanel::from_records(level, records).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_observations(path: &Path, panel: &ObservationPanel) -> Result<()> {
    let (mut u, mut m, mut v) = (Vec::new(), Vec::new(), Vec::new());
    for (unit, month, value) in panel.iter() {
        u.push(unit.id() as i32);
        m.push(month.get() as i32);
        v.push(i32::try_from(value).map_err(|_| Error::domain(format!("count {value} exceeds int32")))?);
    }
    write_table(
        path,
        "observations",
        &[
            OutColumn::Int32(panel.level().unit_column(), u),
            OutColumn::Int32("month_id", m),
            OutColumn::Int32("fatalities", v),
        ],
    )
}

/// Reads a sample submission, rejecting it if validation finds any
/// violation. Draws keep their file order within each cell.
pub fn read_submission(path: &Path) -> Result<Submission> {
    let table = read_table(path)?;
    let level = detect_level(path, &table)?;
    let (cells, violations) = check_submission_table(&table, level);
    if !violations.is_empty() {
        return Err(Error::InvalidSubmission {
            path: path.to_path_buf(),
            report: Box::new(ValidationReport {
                level,
                rows: table.n_rows,
                cells: cells.as_ref().map_or(0, |c| c.len()),
                violations,
            }),
        });
    }
    let cells = cells.expect("no violations implies grouped cells");
    let mut sub = Submission::new(level);
    for ((unit, month), rows) in cells {
        let draws = rows.into_iter().map(|(_, p, _)| p as u32).collect();
        sub.insert(ForecastSet::new(unit, month, draws))?;
    }
    Ok(sub)
}

/// Writes a submission in canonical row order: by month then country at
/// cm, by cell then month at pgm, draws ascending by id within a cell.
pub fn write_submission(path: &Path, sub: &Submission) -> Result<()> {
    let level = sub.level();
    let mut cells: Vec<(UnitId, MonthId, &[u32])> = sub.iter().collect();
    if level == Level::Cm {
        cells.sort_by_key(|&(u, m, _)| (m, u));
    }
    let n: usize = cells.iter().map(|c| c.2.len()).sum();
    let (mut u, mut m, mut d, mut p) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for (unit, month, draws) in cells {
        for (i, &x) in draws.iter().enumerate() {
            u.push(unit.id() as i32);
            m.push(month.get() as i32);
            d.push(i as i32);
            p.push(i32::try_from(x).map_err(|_| Error::domain(format!("draw {x} exceeds int32")))?);
        }
    }
    let (u, m) = (
        OutColumn::Int32(level.unit_column(), u),
        OutColumn::Int32("month_id", m),
    );
    let cols = match level {
        Level::Cm => [m, u, OutColumn::Int32("draw", d), OutColumn::Int32("prediction", p)],
        Level::Pgm => [u, m, OutColumn::Int32("draw", d), OutColumn::Int32("prediction", p)],
    };
    write_table(path, "submission", &cols)
}

pub fn write_point_submission(path: &Path, level: Level, points: &[(UnitId, MonthId, f64)]) -> Result<()> {
    let mut u = Vec::with_capacity(points.len());
    let mut m = Vec::with_capacity(points.len());
    let mut p = Vec::with_capacity(points.len());
    for &(unit, month, x) in points {
        if unit.level() != level {
            return Err(Error::domain(format!("unit {unit} in a {level} point submission")));
        }
        u.push(unit.id() as i32);
        m.push(month.get() as i32);
        p.push(x);
    }
    write_table(
        path,
        "points",
        &[
            OutColumn::Int32(level.unit_column(), u),
            OutColumn::Int32("month_id", m),
            OutColumn::Double("prediction", p),
        ],
    )
}

/// Reads a point submission (one `prediction` per cell, double or int32)
/// and expands each point into `n_draws` Poisson draws.
pub fn load_point_submission(path: &Path, n_draws: usize, seed: u64) -> Result<Submission> {
    let table = read_table(path)?;
    let level = detect_level(path, &table)?;
    let keys = keys(path, &table, level)?;
    let points: Vec<f64> = match table.column("prediction").map(|c| &c.values) {
        Some(Values::Int32(v)) => {
            column(path, &table, "prediction")?;
            v.iter().map(|&x| x as f64).collect()
        }
        _ => double_column(path, &table, "prediction")?.to_vec(),
    };
    let mut sub = Submission::new(level);
    for (row, (&(unit, month), &point)) in keys.iter().zip(&points).enumerate() {
        let draws = poisson_expand_cell(point, n_draws, seed, Purpose::PointExpansion, unit, month)
            .map_err(|e| Error::format(path, format!("row {row}: {e}")))?;
        sub.insert(ForecastSet::new(unit, month, draws))
            .map_err(|e| Error::format(path, format!("row {row}: {e}")))?;
    }
    Ok(sub)
}

pub fn write_score_table(path: &Path, table: &ScoreTable) -> Result<()> {
    let rows = table.rows();
    let mut u = Vec::with_capacity(rows.len());
    let mut m = Vec::with_capacity(rows.len());
    let mut w = Vec::with_capacity(rows.len());
    let (mut c, mut i, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        u.push(r.unit.id() as i32);
        m.push(r.month.get() as i32);
        w.push(r.window.clone());
        c.push(r.scores.crps);
        i.push(r.scores.ign);
        s.push(r.scores.mis);
    }
    write_table(
        path,
        "scores",
        &[
            OutColumn::Int32(table.level().unit_column(), u),
            OutColumn::Int32("month_id", m),
            OutColumn::Utf8("window", w),
            OutColumn::Double("crps", c),
            OutColumn::Double("ign", i),
            OutColumn::Double("mis", s),
        ],
    )
}

pub fn read_score_table(path: &Path) -> Result<ScoreTable> {
    let table = read_table(path)?;
    let level = detect_level(path, &table)?;
    let keys = keys(path, &table, level)?;
    let windows = match &column(path, &table, "window")?.values {
        Values::Utf8(v) => v,
        other => return Err(Error::format(path, format!("window is {}, expected string", other.type_name()))),
    };
    let crps = double_column(path, &table, "crps")?;
    let ign = double_column(path, &table, "ign")?;
    let mis = double_column(path, &table, "mis")?;
    let mut interned: BTreeMap<&str, String> = BTreeMap::new();
    let rows = keys
        .iter()
        .enumerate()
        .map(|(r, &(unit, month))| ScoreRow {
            unit,
            month,
            window: interned.entry(&windows[r]).or_insert_with(|| windows[r].clone()).clone(),
            scores: ScoreTriple {
                crps: crps[r],
                ign: ign[r],
                mis: mis[r],
            },
        })
        .collect();
    ScoreTable::from_rows(level, rows).map_err(|e| Error::format(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{validate_submission, ViolationKind};

    fn m(v: u32) -> MonthId {
        MonthId::new(v).unwrap()
    }

    fn sample(level: Level) -> Submission {
        let mut sub = Submission::new(level);
        for id in [7, 3] {
            for month in [500, 501] {
                let unit = UnitId::new(level, id).unwrap();
                let draws = (0..20).map(|i| (i * id + month) % 13).collect();
                sub.insert(ForecastSet::new(unit, m(month), draws)).unwrap();
            }
        }
        sub
    }

    #[test]
    fn submission_round_trip_both_levels() {
        let dir = tempfile::tempdir().unwrap();
        for level in [Level::Cm, Level::Pgm] {
            let path = dir.path().join(format!("{level}.parquet"));
            let sub = sample(level);
            write_submission(&path, &sub).unwrap();
            assert_eq!(read_submission(&path).unwrap(), sub);
            let report = validate_submission(&path, level, None).unwrap();
            assert!(report.is_valid(), "{}", report.summary());
            assert_eq!(report.cells, 4);
            assert_eq!(report.rows, 80);
        }
    }

    #[test]
    fn wrong_level_is_missing_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.parquet");
        write_submission(&path, &sample(Level::Cm)).unwrap();
        let report = validate_submission(&path, Level::Pgm, None).unwrap();
        assert_eq!(report.kinds().into_iter().collect::<Vec<_>>(), vec![ViolationKind::MissingColumn]);
    }

    #[test]
    fn observations_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("obs.parquet");
        let u = UnitId::pgm(1000).unwrap();
        let panel = ObservationPanel::from_records(Level::Pgm, [(u, m(10), 3), (u, m(11), 0)]).unwrap();
        write_observations(&path, &panel).unwrap();
        assert_eq!(read_observations(&path).unwrap(), panel);
    }

    #[test]
    fn point_submission_expands_deterministically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.parquet");
        let u = UnitId::cm(57).unwrap();
        write_point_submission(&path, Level::Cm, &[(u, m(530), 4.5), (u, m(531), 0.0)]).unwrap();
        let a = load_point_submission(&path, 100, 9).unwrap();
        let b = load_point_submission(&path, 100, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(u, m(530)).unwrap().len(), 100);
        assert!(a.get(u, m(531)).unwrap().iter().all(|&x| x == 0));

        write_point_submission(&path, Level::Cm, &[(u, m(530), -1.0)]).unwrap();
        let err = load_point_submission(&path, 100, 9).unwrap_err().to_string();
        assert!(err.contains("row 0"), "{err}");
    }
}
