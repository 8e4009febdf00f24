use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{EvaluationWindow, GridTopology, Level, MonthId, UnitId};

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a window config: one `name,YYYY-MM,YYYY-MM` line per window
/// giving the training cutoff and the first forecast month. Names must be
/// unique and windows must not overlap.
pub fn parse_windows(text: &str) -> Result<Vec<EvaluationWindow>> {
    let mut windows = Vec::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        let [name, cutoff, first] = fields[..] else {
            return Err(Error::domain(format!(
                "window line {line}: expected name,cutoff,first_month"
            )));
        };
        let month = |s: &str| -> Result<MonthId> {
            s.parse()
                .map_err(|e| Error::domain(format!("window line {line}: {e}")))
        };
        let w = EvaluationWindow::new(name, month(cutoff)?, month(first)?)
            .map_err(|e| Error::domain(format!("window line {line}: {e}")))?;
        windows.push(w);
    }
    if windows.is_empty() {
        return Err(Error::domain("window config declares no windows"));
    }
    let mut names = BTreeSet::new();
    for w in &windows {
        if !names.insert(w.name()) {
            return Err(Error::domain(format!("window {} declared twice", w.name())));
        }
    }
    let mut sorted: Vec<&EvaluationWindow> = windows.iter().collect();
    sorted.sort_by_key(|w| w.first_month());
    for pair in sorted.windows(2) {
        if pair[1].first_month() <= pair[0].last_month() {
            return Err(Error::domain(format!(
                "windows {} and {} overlap",
                pair[0].name(),
                pair[1].name()
            )));
        }
    }
    Ok(windows)
}

pub fn read_windows(path: &Path) -> Result<Vec<EvaluationWindow>> {
    parse_windows(&read_text(path)?).map_err(|e| Error::format(path, e.to_string()))
}

/// Reads newline-delimited grid cell ids into a masked topology.
pub fn read_region_mask(path: &Path) -> Result<GridTopology> {
    let text = read_text(path)?;
    let mut gids = Vec::new();
    for (line, content) in content_lines(&text) {
        let gid: u32 = content
            .parse()
            .map_err(|_| Error::format(path, format!("line {line}: bad cell id {content:?}")))?;
        gids.push(gid);
    }
    GridTopology::with_mask(gids).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_region_mask(path: &Path, topology: &GridTopology) -> Result<()> {
    let mut out = String::new();
    for gid in topology.cells() {
        out.push_str(&gid.to_string());
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The set of (unit, month) cells a submission is expected to cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    level: Level,
    cells: BTreeMap<UnitId, BTreeSet<MonthId>>,
}

impl Universe {
    pub fn new(level: Level, cells: impl IntoIterator<Item = (UnitId, MonthId)>) -> Result<Self> {
        let mut map: BTreeMap<UnitId, BTreeSet<MonthId>> = BTreeMap::new();
        for (u, m) in cells {
            if u.level() != level {
                return Err(Error::domain(format!("unit {u} in a {level} universe")));
            }
            map.entry(u).or_default().insert(m);
        }
        Ok(Universe { level, cells: map })
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn has_unit(&self, unit: UnitId) -> bool {
        self.cells.contains_key(&unit)
    }

    pub fn contains(&self, unit: UnitId, month: MonthId) -> bool {
        self.cells.get(&unit).is_some_and(|m| m.contains(&month))
    }

    pub fn len(&self) -> usize {
        self.cells.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cells(&self) -> impl Iterator<Item = (UnitId, MonthId)> + '_ {
        self.cells
            .iter()
            .flat_map(|(&u, ms)| ms.iter().map(move |&m| (u, m)))
    }

    /// Text form: one `unit_id,month_id` line per cell.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (u, m) in self.cells() {
            out.push_str(&format!("{},{}\n", u.id(), m.get()));
        }
        out
    }
}

/// Reads a universe either from `unit_id,month_id` text lines or, for
/// `.parquet` files, from the cells of an observation file.
pub fn read_universe(path: &Path, level: Level) -> Result<Universe> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("parquet")) {
        let panel = super::files::read_observations(path)?;
        if panel.level() != level {
            return Err(Error::format(path, format!("observations are {}, expected {level}", panel.level())));
        }
        return Universe::new(level, panel.iter().map(|(u, m, _)| (u, m)));
    }
    let text = read_text(path)?;
    let mut cells = Vec::new();
    for (line, content) in content_lines(&text) {
        let bad = || Error::format(path, format!("line {line}: expected unit_id,month_id"));
        let (u, m) = content.split_once(',').ok_or_else(bad)?;
        let u: u32 = u.trim().parse().map_err(|_| bad())?;
        let m: MonthId = m.trim().parse().map_err(|_| bad())?;
        let unit = UnitId::new(level, u).map_err(|e| Error::format(path, format!("line {line}: {e}")))?;
        cells.push((unit, m));
    }
    Universe::new(level, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_parse_with_comments() {
        let w = parse_windows("# test years\n\n2018,2017-10,2018-01\nY2019, 2018-10, 2019-01\n").unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0], EvaluationWindow::test_year(2018).unwrap());
        assert_eq!(w[1].name(), "Y2019");
    }

    #[test]
    fn windows_reject_overlap_and_duplicates() {
        assert!(parse_windows("a,2017-10,2018-01\nb,2018-01,2018-06\n").is_err());
        assert!(parse_windows("a,2017-10,2018-01\na,2018-10,2019-01\n").is_err());
        assert!(parse_windows("a,2017-10\n").is_err());
        assert!(parse_windows("# nothing\n").is_err());
        assert!(parse_windows("a,2018-01,2017-10\n").is_err());
    }

    #[test]
    fn universe_text_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.txt");
        let u = Universe::new(
            Level::Cm,
            [(UnitId::cm(3).unwrap(), MonthId::new(500).unwrap()), (UnitId::cm(1).unwrap(), MonthId::new(501).unwrap())],
        )
        .unwrap();
        std::fs::write(&path, u.to_text()).unwrap();
        let back = read_universe(&path, Level::Cm).unwrap();
        assert_eq!(back, u);
        assert_eq!(back.len(), 2);
        assert!(back.contains(UnitId::cm(3).unwrap(), MonthId::new(500).unwrap()));
    }

    #[test]
    fn mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.txt");
        let topo = GridTopology::with_mask([5, 6, 725]).unwrap();
        write_region_mask(&path, &topo).unwrap();
        assert_eq!(read_region_mask(&path).unwrap(), topo);
        std::fs::write(&path, "5\nx\n").unwrap();
        assert!(read_region_mask(&path).is_err());
    }
}
