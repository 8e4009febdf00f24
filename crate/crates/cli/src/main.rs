//! `cfscore`: validate, score, benchmark, pool and report fatality forecasts.
//!
//! Exit codes: 0 success, 1 validation failure, 2 fatal or usage error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use cfscore_core::benchmarks::BenchmarkSpec;
use cfscore_core::ensemble::{compute_weights, pool_submissions, EnsembleSpec, WeightRule};
use cfscore_core::evaluation::{rank_submissions, score_submission, ScoreTable};
use cfscore_core::forecast::Submission;
use cfscore_core::io;
use cfscore_core::metrics::{IgnConfig, MisConfig, ResampleMode};
use cfscore_core::synth::{generate_panel, SynthSpec};
use cfscore_core::{GridTopology, Level, MonthId, ObservationPanel};

#[derive(Parser)]
#[command(name = "cfscore", version, about = "Score probabilistic fatality forecasts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Cm,
    Pgm,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Level {
        match l {
            LevelArg::Cm => Level::Cm,
            LevelArg::Pgm => Level::Pgm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum IgnMode {
    Tile,
    Fourier,
}

#[derive(Clone, Copy, ValueEnum)]
enum MisQ {
    Standard,
    Compat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Inverse,
    Softmin,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a submission file against the format rules.
    Validate {
        submission: PathBuf,
        #[arg(long, value_enum)]
        level: LevelArg,
        /// Cells the submission must cover: `unit_id,month_id` lines or an
        /// observation .parquet file.
        #[arg(long)]
        universe: Option<PathBuf>,
    },
    /// Score a submission against observations.
    Score {
        submission: PathBuf,
        #[arg(long)]
        obs: PathBuf,
        #[arg(long)]
        windows: PathBuf,
        #[arg(long, value_enum, default_value = "fourier")]
        ign_mode: IgnMode,
        #[arg(long, value_enum, default_value = "standard")]
        mis_q: MisQ,
        /// Interval score alpha.
        #[arg(long, default_value_t = 0.1)]
        mis_alpha: f64,
        /// Treat the submission as point predictions, expanded to Poisson draws.
        #[arg(long)]
        points: bool,
        #[arg(long, default_value_t = 1000)]
        n_draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-cell score table output (.parquet).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a benchmark submission.
    Benchmark {
        /// exactly_zero, last_historical, conflictology_country12,
        /// conflictology_neighbors12 or conflictology_bootstrap240.
        kind: String,
        #[arg(long)]
        obs: PathBuf,
        #[arg(long)]
        windows: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        n_draws: Option<usize>,
        /// Grid cells to forecast at pgm, one id per line.
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pool member submissions with weights from their test-window scores.
    Ensemble {
        /// Directory of member submissions (`<name>.parquet`).
        #[arg(long)]
        members: PathBuf,
        /// Directory of score tables with matching file names.
        #[arg(long)]
        test_scores: PathBuf,
        #[arg(long, value_enum, default_value = "inverse")]
        rule: Rule,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        n_draws: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic observation panel.
    Synth {
        #[arg(long, value_enum)]
        level: LevelArg,
        #[arg(long)]
        units: u32,
        /// Inclusive month range, `YYYY-MM..YYYY-MM` or month ids.
        #[arg(long)]
        months: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        zero_share: Option<f64>,
        /// Month-to-month persistence of the conflict state, in [0, 1).
        #[arg(long)]
        persistence: Option<f64>,
        /// Mean of the negative binomial tail.
        #[arg(long)]
        tail_mean: Option<f64>,
        /// Negative binomial shape of the tail.
        #[arg(long)]
        tail_dispersion: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarise score tables per window, with a leaderboard for several.
    Report {
        #[arg(required = true)]
        scores: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Ok,
    Invalid,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Invalid) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("SCORE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("SCORE_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Validate {
            submission,
            level,
            universe,
        } => validate(&submission, level.into(), universe.as_deref()),
        Command::Score {
            submission,
            obs,
            windows,
            ign_mode,
            mis_q,
            mis_alpha,
            points,
            n_draws,
            seed,
            out,
        } => {
            let ign = IgnConfig::with_mode(match ign_mode {
                IgnMode::Tile => ResampleMode::Tile,
                IgnMode::Fourier => ResampleMode::Fourier,
            });
            let mis = match mis_q {
                MisQ::Standard => MisConfig::standard(mis_alpha)?,
                MisQ::Compat => MisConfig::compat(mis_alpha)?,
            };
            let sub = if points {
                io::load_point_submission(&submission, n_draws, seed)?
            } else {
                match load_valid(&submission)? {
                    Some(sub) => sub,
                    None => return Ok(Outcome::Invalid),
                }
            };
            let panel = io::read_observations(&obs)?;
            let windows = io::read_windows(&windows)?;
            let table = score_submission(&sub, &panel, &windows, &ign, &mis)?;
            if let Some(out) = out {
                io::write_score_table(&out, &table)?;
            }
            let c = table.completeness();
            if !c.unforecast.is_empty() {
                eprintln!("note: {} observed in-window cells were not forecast", c.unforecast.len());
            }
            print!("{}", table.to_markdown()?);
            Ok(Outcome::Ok)
        }
        Command::Benchmark {
            kind,
            obs,
            windows,
            seed,
            n_draws,
            mask,
            out,
        } => {
            let mut spec = BenchmarkSpec::named(&kind, seed)?;
            if let Some(n) = n_draws {
                spec = spec.with_n_draws(n);
            }
            let mut panel = io::read_observations(&obs)?;
            let windows = io::read_windows(&windows)?;
            let topo = match &mask {
                Some(path) => {
                    let topo = io::read_region_mask(path)?;
                    if panel.level() == Level::Pgm {
                        panel = restrict(&panel, &topo)?;
                    }
                    topo
                }
                None => GridTopology::full(),
            };
            let units: Vec<_> = panel.units().collect();
            let sub = spec.generate(&panel, &units, &windows, &topo)?;
            io::write_submission(&out, &sub)?;
            eprintln!("{kind}: {} cells written to {}", sub.len(), out.display());
            Ok(Outcome::Ok)
        }
        Command::Ensemble {
            members,
            test_scores,
            rule,
            tau,
            seed,
            n_draws,
            out,
        } => {
            let rule = match rule {
                Rule::Inverse => WeightRule::InverseCrps,
                Rule::Softmin => WeightRule::SoftminCrps { tau },
            };
            let mut subs = BTreeMap::new();
            for (name, path) in parquet_files(&members)? {
                match load_valid(&path)? {
                    Some(sub) => subs.insert(name, sub),
                    None => return Ok(Outcome::Invalid),
                };
            }
            if subs.is_empty() {
                bail!("no member submissions in {}", members.display());
            }
            let mut tables = BTreeMap::new();
            for name in subs.keys() {
                let path = test_scores.join(format!("{name}.parquet"));
                let table = io::read_score_table(&path).with_context(|| format!("test scores for member {name}"))?;
                tables.insert(name.clone(), table);
            }
            let weights = compute_weights(&tables, rule)?;
            for (name, w) in &weights {
                println!("{name}\t{w:.6}");
            }
            let pooled = pool_submissions(&subs, &EnsembleSpec::new(weights, n_draws, seed)?)?;
            io::write_submission(&out, &pooled)?;
            Ok(Outcome::Ok)
        }
        Command::Synth {
            level,
            units,
            months,
            seed,
            zero_share,
            persistence,
            tail_mean,
            tail_dispersion,
            out,
        } => {
            let (first, last) = parse_month_range(&months)?;
            let mut spec = SynthSpec::defaults(level.into(), units, first, last, seed);
            if let Some(z) = zero_share {
                spec.zero_share = z;
            }
            if let Some(p) = persistence {
                spec.persistence = p;
            }
            if let Some(m) = tail_mean {
                spec.tail_mean = m;
            }
            if let Some(k) = tail_dispersion {
                spec.tail_dispersion = k;
            }
            let panel = generate_panel(&spec)?;
            io::write_observations(&out, &panel)?;
            eprintln!(
                "{} units x {} months, zero share {:.4}",
                panel.n_units(),
                last.get() - first.get() + 1,
                panel.zero_share()
            );
            Ok(Outcome::Ok)
        }
        Command::Report { scores, format, out } => {
            let mut tables = BTreeMap::new();
            for path in &scores {
                let name = stem(path)?;
                let table = io::read_score_table(path)?;
                if tables.insert(name.clone(), table).is_some() {
                    bail!("two score tables named {name}");
                }
            }
            let text = report(&tables, format)?;
            match out {
                Some(out) => fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?,
                None => print!("{text}"),
            }
            Ok(Outcome::Ok)
        }
    }
}

fn validate(path: &Path, level: Level, universe: Option<&Path>) -> anyhow::Result<Outcome> {
    let universe = universe.map(|u| io::read_universe(u, level)).transpose()?;
    let report = io::validate_submission(path, level, universe.as_ref())?;
    println!("{}", report.summary());
    Ok(if report.is_valid() { Outcome::Ok } else { Outcome::Invalid })
}

/// Reads a submission, printing the validation report and returning `None`
/// when it breaks the format rules.
fn load_valid(path: &Path) -> anyhow::Result<Option<Submission>> {
    match io::read_submission(path) {
        Ok(sub) => Ok(Some(sub)),
        Err(e @ cfscore_core::Error::InvalidSubmission { .. }) => {
            eprintln!("{e}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn restrict(panel: &ObservationPanel, topo: &GridTopology) -> anyhow::Result<ObservationPanel> {
    let records = panel.iter().filter(|(u, _, _)| topo.contains(u.id()));
    Ok(ObservationPanel::from_records(panel.level(), records)?)
}

fn parse_month_range(s: &str) -> anyhow::Result<(MonthId, MonthId)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("month range {s:?} is not of the form A..B"))?;
    let first: MonthId = a.trim().parse().map_err(|e| anyhow!("month range start: {e}"))?;
    let last: MonthId = b.trim().parse().map_err(|e| anyhow!("month range end: {e}"))?;
    Ok((first, last))
}

fn stem(path: &Path) -> anyhow::Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| anyhow!("cannot name {}", path.display()))
}

/// `.parquet` files in `dir` keyed by file stem, in name order.
fn parquet_files(dir: &Path) -> anyhow::Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "parquet") {
            out.insert(stem(&path)?, path);
        }
    }
    Ok(out)
}

fn report(tables: &BTreeMap<String, ScoreTable>, format: Format) -> anyhow::Result<String> {
    let mut out = String::new();
    match format {
        Format::Md => {
            for (name, table) in tables {
                out.push_str(&format!("## {name}\n\n{}\n", table.to_markdown()?));
            }
            if tables.len() > 1 {
                out.push_str(&format!("## Leaderboard\n\n{}", rank_submissions(tables)?.to_markdown()));
            }
        }
        Format::Csv => {
            out.push_str("submission,window,n_cells,crps,ign,mis\n");
            for (name, table) in tables {
                for line in table.to_csv()?.lines().skip(1) {
                    out.push_str(&format!("{name},{line}\n"));
                }
            }
        }
    }
    Ok(out)
}
