//! Scoring a submission against observations, yearly and overall
//! aggregation, and ranking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forecast::Submission;
use crate::metrics::{score_cell, IgnConfig, MisConfig, ScoreTriple};
use crate::model::{EvaluationWindow, Level, MonthId, ObservationPanel, UnitId};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub unit: UnitId,
    pub month: MonthId,
    pub window: String,
    pub scores: ScoreTriple,
}

/// Mean scores over the cells of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowAggregate {
    pub window: String,
    pub n_cells: usize,
    pub mean: ScoreTriple,
}

/// Panel cells that were not forecast.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Completeness {
    /// Observed cells inside a declared window without a forecast.
    pub unforecast: Vec<(UnitId, MonthId)>,
    /// Observed cells outside every declared window.
    pub outside_windows: usize,
}

/// Per-cell scores plus the window order used for aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    level: Level,
    windows: Vec<String>,
    rows: Vec<ScoreRow>,
    completeness: Completeness,
}

impl ScoreTable {
    /// Assembles a table from rows, e.g. after reading one from disk. Window
    /// order follows the earliest month scored in each window.
    pub fn from_rows(level: Level, mut rows: Vec<ScoreRow>) -> Result<Self> {
        let mut first_month: BTreeMap<&str, MonthId> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for r in &rows {
            if r.unit.level() != level {
                return Err(Error::domain(format!("row unit {} in a {level} table", r.unit)));
            }
            if !seen.insert((r.unit, r.month)) {
                return Err(Error::domain(format!("duplicate score row ({}, {})", r.unit, r.month)));
            }
            if !r.scores.is_finite() {
                return Err(Error::Unscorable {
                    unit: r.unit,
                    month: r.month,
                    reason: "non-finite score".into(),
                });
            }
            let e = first_month.entry(r.window.as_str()).or_insert(r.month);
            *e = (*e).min(r.month);
        }
        let mut windows: Vec<(MonthId, String)> =
            first_month.into_iter().map(|(w, m)| (m, w.to_string())).collect();
        windows.sort();
        rows.sort_by_key(|r| (r.unit, r.month));
        Ok(ScoreTable {
            level,
            windows: windows.into_iter().map(|(_, w)| w).collect(),
            rows,
            completeness: Completeness::default(),
        })
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Rows ordered by (unit, month).
    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }

    pub fn completeness(&self) -> &Completeness {
        &self.completeness
    }

    pub fn window_names(&self) -> &[String] {
        &self.windows
    }

    pub fn keys(&self) -> BTreeSet<(UnitId, MonthId)> {
        self.rows.iter().map(|r| (r.unit, r.month)).collect()
    }

    /// Arithmetic mean of the cell scores within each window that has at
    /// least one scored cell, in window order.
    pub fn window_aggregates(&self) -> Vec<WindowAggregate> {
        self.windows
            .iter()
            .filter_map(|w| {
                let mut sum = [0.0f64; 3];
                let mut n = 0usize;
                for r in self.rows.iter().filter(|r| &r.window == w) {
                    sum[0] += r.scores.crps;
                    sum[1] += r.scores.ign;
                    sum[2] += r.scores.mis;
                    n += 1;
                }
                (n > 0).then(|| WindowAggregate {
                    window: w.clone(),
                    n_cells: n,
                    mean: ScoreTriple {
                        crps: sum[0] / n as f64,
                        ign: sum[1] / n as f64,
                        mis: sum[2] / n as f64,
                    },
                })
            })
            .collect()
    }

    /// Unweighted mean of the window means.
    pub fn overall(&self) -> Result<ScoreTriple> {
        let means: Vec<ScoreTriple> = self.window_aggregates().into_iter().map(|a| a.mean).collect();
        overall_from_windows(&means)
    }

    /// Table with one row per window and a final `Overall` row.
    pub fn to_markdown(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "| {:<11} | {:>10} | {:>6} | {:>10} |", "", "crps", "ign", "mis").unwrap();
        writeln!(out, "|{:-<13}|{:->11}:|{:->7}:|{:->11}:|", "", "", "", "").unwrap();
        for a in self.window_aggregates() {
            writeln!(out, "{}", md_row(&a.window, &a.mean)).unwrap();
        }
        writeln!(out, "{}", md_row("Overall", &self.overall()?)).unwrap();
        Ok(out)
    }

    /// `window,n_cells,crps,ign,mis` lines, ending with the overall row.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("window,n_cells,crps,ign,mis\n");
        let aggs = self.window_aggregates();
        for a in &aggs {
            writeln!(out, "{},{},{},{},{}", a.window, a.n_cells, a.mean.crps, a.mean.ign, a.mean.mis).unwrap();
        }
        let o = self.overall()?;
        let n: usize = aggs.iter().map(|a| a.n_cells).sum();
        writeln!(out, "overall,{n},{},{},{}", o.crps, o.ign, o.mis).unwrap();
        Ok(out)
    }
}

fn md_row(label: &str, s: &ScoreTriple) -> String {
    format!("| {label:<11} | {:>10.2} | {:>6.2} | {:>10.2} |", s.crps, s.ign, s.mis)
}

/// Mean of per-window aggregates. Errors on an empty list or non-finite
/// values instead of returning NaN.
pub fn overall_from_windows(means: &[ScoreTriple]) -> Result<ScoreTriple> {
    if means.is_empty() {
        return Err(Error::domain("no scored windows to aggregate"));
    }
    let n = means.len() as f64;
    let s = ScoreTriple {
        crps: means.iter().map(|m| m.crps).sum::<f64>() / n,
        ign: means.iter().map(|m| m.ign).sum::<f64>() / n,
        mis: means.iter().map(|m| m.mis).sum::<f64>() / n,
    };
    if !s.is_finite() {
        return Err(Error::domain("non-finite aggregate"));
    }
    Ok(s)
}

/// Scores every forecast cell against the panel.
///
/// Each cell is assigned to the first window containing its month. Cells
/// without an observation or outside every window are errors; observed
/// cells without a forecast are listed in the completeness report.
pub fn score_submission(
    sub: &Submission,
    panel: &ObservationPanel,
    windows: &[EvaluationWindow],
    ign: &IgnConfig,
    mis: &MisConfig,
) -> Result<ScoreTable> {
    if sub.level() != panel.level() {
        return Err(Error::domain(format!(
            "{} submission scored against a {} panel",
            sub.level(),
            panel.level()
        )));
    }
    let window_of = |m: MonthId| windows.iter().find(|w| w.contains(m));

    let outside: Vec<_> = sub.keys().filter(|&(_, m)| window_of(m).is_none()).collect();
    if !outside.is_empty() {
        return Err(Error::OutsideWindows(outside));
    }
    let missing: Vec<_> = sub.keys().filter(|&(u, m)| !panel.contains(u, m)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingObservations(missing));
    }

    let cells: Vec<(UnitId, MonthId, &[u32])> = sub.iter().collect();
    let rows: Vec<ScoreRow> = cells
        .par_iter()
        .map(|&(unit, month, draws)| {
            let y = panel.get(unit, month).expect("checked above");
            let scores = score_cell(draws, y, ign, mis).map_err(|e| Error::Unscorable {
                unit,
                month,
                reason: e.to_string(),
            })?;
            if !scores.is_finite() {
                return Err(Error::Unscorable {
                    unit,
                    month,
                    reason: "non-finite score".into(),
                });
            }
            Ok(ScoreRow {
                unit,
                month,
                window: window_of(month).expect("checked above").name().to_string(),
                scores,
            })
        })
        .collect::<Result<_>>()?;

    let mut completeness = Completeness::default();
    for (unit, month, _) in panel.iter() {
        if window_of(month).is_none() {
            completeness.outside_windows += 1;
        } else if sub.get(unit, month).is_none() {
            completeness.unforecast.push((unit, month));
        }
    }

    let mut windows_used: Vec<String> = Vec::new();
    for w in windows {
        if rows.iter().any(|r| r.window == w.name()) && !windows_used.iter().any(|n| n == w.name()) {
            windows_used.push(w.name().to_string());
        }
    }
    Ok(ScoreTable {
        level: sub.level(),
        windows: windows_used,
        rows,
        completeness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderboardEntry {
    pub name: String,
    pub overall: ScoreTriple,
    /// 1-based position by overall CRPS.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaderboard {
    pub entries: Vec<LeaderboardEntry>,
}

impl Leaderboard {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        writeln!(out, "| rank | {:<32} | {:>10} | {:>6} | {:>10} |", "submission", "crps", "ign", "mis").unwrap();
        writeln!(out, "|-----:|{:-<34}|{:->11}:|{:->7}:|{:->11}:|", "", "", "", "").unwrap();
        for e in &self.entries {
            writeln!(
                out,
                "| {:>4} | {:<32} | {:>10.2} | {:>6.2} | {:>10.2} |",
                e.rank, e.name, e.overall.crps, e.overall.ign, e.overall.mis
            )
            .unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,submission,crps,ign,mis\n");
        for e in &self.entries {
            writeln!(out, "{},{},{},{},{}", e.rank, e.name, e.overall.crps, e.overall.ign, e.overall.mis).unwrap();
        }
        out
    }
}

/// Orders submissions by ascending overall CRPS, ties broken by name. The
/// other scores are reported but do not affect rank. All tables must cover
/// the same cells.
pub fn rank_submissions(tables: &BTreeMap<String, ScoreTable>) -> Result<Leaderboard> {
    check_same_coverage(tables)?;
    let mut entries: Vec<LeaderboardEntry> = tables
        .iter()
        .map(|(name, t)| {
            Ok(LeaderboardEntry {
                name: name.clone(),
                overall: t.overall()?,
                rank: 0,
            })
        })
        .collect::<Result<_>>()?;
    entries.sort_by(|a, b| {
        a.overall
            .crps
            .total_cmp(&b.overall.crps)
            .then_with(|| a.name.cmp(&b.name))
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    Ok(Leaderboard { entries })
}

pub(crate) fn check_same_coverage(tables: &BTreeMap<String, ScoreTable>) -> Result<()> {
    let mut iter = tables.iter();
    let Some((first_name, first)) = iter.next() else {
        return Ok(());
    };
    let keys = first.keys();
    for (name, t) in iter {
        if t.level() != first.level() {
            return Err(Error::CoverageMismatch(format!(
                "{name} is {} but {first_name} is {}",
                t.level(),
                first.level()
            )));
        }
        let other = t.keys();
        if other != keys {
            let only_a = keys.difference(&other).count();
            let only_b = other.difference(&keys).count();
            return Err(Error::CoverageMismatch(format!(
                "{first_name} and {name} differ: {only_a} cell(s) only in {first_name}, {only_b} only in {name}"
            )));
        }
    }
    Ok(())
}
