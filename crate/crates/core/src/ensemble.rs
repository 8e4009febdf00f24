//! CRPS-weighted pooling of several submissions into one ensemble forecast.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::RngExt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluation::{check_same_coverage, ScoreTable};
use crate::forecast::{ForecastSet, Submission, MAX_DRAWS, MIN_DRAWS};
use crate::rng::{cell_rng, Purpose};

#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub enum WeightRule {
    /// `w ∝ 1 / crps`.
    #[default]
    InverseCrps,
    /// `w ∝ exp(-crps / tau)`.
    SoftminCrps { tau: f64 },
}


impl FromStr for WeightRule {
    type Err = Error;

    /// `inverse`, or `softmin` / `softmin:<tau>` (tau defaults to 1).
    fn from_str(s: &str) -> Result<Self> {
        let (name, tau) = match s.split_once(':') {
            Some((n, t)) => (n, Some(t)),
            None => (s, None),
        };
        match name {
            "inverse" | "inverse_crps" => Ok(WeightRule::InverseCrps),
            "softmin" | "softmin_crps" => {
                let tau = tau
                    .map(|t| t.parse::<f64>().map_err(|_| Error::domain(format!("bad tau {t:?}"))))
                    .transpose()?
                    .unwrap_or(1.0);
                Ok(WeightRule::SoftminCrps { tau })
            }
            other => Err(Error::domain(format!("unknown weight rule {other:?}"))),
        }
    }
}

/// Weights from each member's overall CRPS, normalised to sum to one.
///
/// Under [`WeightRule::InverseCrps`] a member with CRPS exactly zero takes
/// all the weight; several such members split it equally.
pub fn weights_from_crps(crps: &BTreeMap<String, f64>, rule: WeightRule) -> Result<BTreeMap<String, f64>> {
    if crps.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if let Some((name, c)) = crps.iter().find(|(_, c)| !(c.is_finite() && **c >= 0.0)) {
        return Err(Error::domain(format!("member {name} has invalid CRPS {c}")));
    }
    let raw: BTreeMap<String, f64> = match rule {
        WeightRule::InverseCrps => {
            if crps.values().any(|&c| c == 0.0) {
                crps.iter()
                    .map(|(n, &c)| (n.clone(), if c == 0.0 { 1.0 } else { 0.0 }))
                    .collect()
            } else {
                crps.iter().map(|(n, &c)| (n.clone(), 1.0 / c)).collect()
            }
        }
        WeightRule::SoftminCrps { tau } => {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::domain(format!("softmin tau {tau} must be positive")));
            }
            let best = crps.values().copied().fold(f64::INFINITY, f64::min);
            crps.iter()
                .map(|(n, &c)| (n.clone(), (-(c - best) / tau).exp()))
                .collect()
        }
    };
    let total: f64 = raw.values().sum();
    Ok(raw.into_iter().map(|(n, w)| (n, w / total)).collect())
}

/// Weights from the overall CRPS of each member's test-set score table.
/// The tables must cover identical cells.
pub fn compute_weights(tables: &BTreeMap<String, ScoreTable>, rule: WeightRule) -> Result<BTreeMap<String, f64>> {
    check_same_coverage(tables)?;
    let crps = tables
        .iter()
        .map(|(n, t)| Ok((n.clone(), t.overall()?.crps)))
        .collect::<Result<_>>()?;
    weights_from_crps(&crps, rule)
}

/// Largest-remainder allocation of `n` slots proportional to `weights`.
/// Counts sum to exactly `n` and each differs from `w * n` by less than one.
/// Equal remainders go to the earlier entry.
pub fn allocate_slots(weights: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Member weights plus pooling parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    weights: BTreeMap<String, f64>,
    pub n_draws: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(weights: BTreeMap<String, f64>, n_draws: usize, seed: u64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if weights.values().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::domain("ensemble weights must be non-negative"));
        }
        let sum: f64 = weights.values().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("ensemble weights sum to {sum}, not 1")));
        }
        if !(MIN_DRAWS..=MAX_DRAWS).contains(&n_draws) {
            return Err(Error::domain(format!("n_draws {n_draws} outside [{MIN_DRAWS}, {MAX_DRAWS}]")));
        }
        Ok(EnsembleSpec { weights, n_draws, seed })
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }
}

/// Pools one cell. Each member fills its allocated slots by sampling its own
/// draws uniformly with replacement, from a stream keyed by
/// (seed, unit, month); members are visited in name order.
pub fn pool_draws(
    members: &BTreeMap<String, &ForecastSet>,
    weights: &BTreeMap<String, f64>,
    n_draws: usize,
    seed: u64,
) -> Result<ForecastSet> {
    let (_, first) = members.iter().next().ok_or(Error::EmptyEnsemble)?;
    let (unit, month) = (first.unit, first.month);
    if let Some((name, _)) = members.iter().find(|(_, s)| (s.unit, s.month) != (unit, month)) {
        return Err(Error::domain(format!("member {name} addresses a different cell")));
    }
    let w: Vec<f64> = members
        .keys()
        .map(|n| {
            weights
                .get(n)
                .copied()
                .ok_or_else(|| Error::domain(format!("no weight for member {n}")))
        })
        .collect::<Result<_>>()?;
    if w.iter().sum::<f64>() <= 0.0 {
        return Err(Error::domain("ensemble weights are all zero"));
    }
    let slots = allocate_slots(&w, n_draws);
    let mut rng = cell_rng(seed, Purpose::EnsemblePool, unit, Some(month));
    let mut draws = Vec::with_capacity(n_draws);
    for ((name, set), &k) in members.iter().zip(&slots) {
        if k == 0 {
            continue;
        }
        if set.draws.is_empty() {
            return Err(Error::domain(format!("member {name} has no draws for ({unit}, {month})")));
        }
        draws.extend((0..k).map(|_| set.draws[rng.random_range(0..set.draws.len())]));
    }
    Ok(ForecastSet::new(unit, month, draws))
}

/// Pools every cell of submissions that cover identical cells.
pub fn pool_submissions(members: &BTreeMap<String, Submission>, spec: &EnsembleSpec) -> Result<Submission> {
    let (first_name, first) = members.iter().next().ok_or(Error::EmptyEnsemble)?;
    for (name, sub) in members {
        if sub.level() != first.level() || sub.len() != first.len() || !sub.keys().eq(first.keys()) {
            return Err(Error::CoverageMismatch(format!(
                "members {first_name} and {name} cover different cells"
            )));
        }
        if !spec.weights.contains_key(name) {
            return Err(Error::domain(format!("no weight for member {name}")));
        }
    }
    let keys: Vec<_> = first.keys().collect();
    let sets: Vec<ForecastSet> = keys
        .par_iter()
        .map(|&(unit, month)| {
            let owned: BTreeMap<String, ForecastSet> = members
                .iter()
                .map(|(n, s)| {
                    let d = s.get(unit, month).expect("coverage checked");
                    (n.clone(), ForecastSet::new(unit, month, d.to_vec()))
                })
                .collect();
            let refs: BTreeMap<String, &ForecastSet> = owned.iter().map(|(n, s)| (n.clone(), s)).collect();
            pool_draws(&refs, &spec.weights, spec.n_draws, spec.seed)
        })
        .collect::<Result<_>>()?;
    Submission::from_sets(first.level(), sets)
}
