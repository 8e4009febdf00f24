//! Synthetic zero-inflated, heavy-tailed observation panels.
//!
//! Each unit follows a two-state (peace/conflict) Markov chain whose
//! stationary conflict probability is `1 - zero_share` and whose lag-1
//! autocorrelation is `persistence`. Peace months are zero; conflict months
//! draw `1 + NegBin(mean, dispersion)` fatalities.

use rand::RngExt;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::benchmarks::sample_poisson;
use crate::error::{Error, Result};
use crate::model::{GridTopology, Level, MonthId, ObservationPanel, UnitId};
use crate::rng::{cell_rng, Purpose};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub level: Level,
    pub n_units: u32,
    pub first_month: MonthId,
    pub last_month: MonthId,
    pub zero_share: f64,
    /// Mean of the negative binomial part of conflict-month counts.
    pub tail_mean: f64,
    /// Negative binomial shape; smaller is heavier-tailed.
    pub tail_dispersion: f64,
    pub persistence: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// 87% zeros at cm, 99% at pgm.
    pub fn defaults(level: Level, n_units: u32, first_month: MonthId, last_month: MonthId, seed: u64) -> Self {
        let (zero_share, tail_mean) = match level {
            Level::Cm => (0.87, 40.0),
            Level::Pgm => (0.99, 8.0),
        };
        SynthSpec {
            level,
            n_units,
            first_month,
            last_month,
            zero_share,
            tail_mean,
            tail_dispersion: 1.0,
            persistence: 0.95,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_units == 0 {
            return Err(Error::domain("synthetic panel needs at least one unit"));
        }
        if self.last_month < self.first_month {
            return Err(Error::domain(format!(
                "month range {}..{} is empty",
                self.first_month, self.last_month
            )));
        }
        if !(self.zero_share > 0.0 && self.zero_share < 1.0) {
            return Err(Error::domain(format!("zero_share {} outside (0, 1)", self.zero_share)));
        }
        if !(self.tail_mean > 0.0 && self.tail_dispersion > 0.0) {
            return Err(Error::domain("tail mean and dispersion must be positive"));
        }
        if !(0.0..1.0).contains(&self.persistence) {
            return Err(Error::domain(format!("persistence {} outside [0, 1)", self.persistence)));
        }
        Ok(())
    }

    /// Unit ids: countries `1..=n`, or a compact block of grid cells
    /// starting at the equator and 20 degrees east.
    pub fn units(&self) -> Result<Vec<UnitId>> {
        match self.level {
            Level::Cm => (1..=self.n_units).map(UnitId::cm).collect(),
            Level::Pgm => {
                let width = (self.n_units as f64).sqrt().ceil() as u32;
                let origin = GridTopology::gid_at(0.0, 20.0)?;
                let (row0, col0) = GridTopology::row_col(origin)?;
                (0..self.n_units)
                    .map(|i| UnitId::pgm(GridTopology::gid(row0 + i / width, col0 + i % width)?))
                    .collect()
            }
        }
    }
}

pub fn generate_panel(spec: &SynthSpec) -> Result<ObservationPanel> {
    spec.validate()?;
    let units = spec.units()?;
    let n_months = (spec.last_month.get() - spec.first_month.get() + 1) as usize;
    let pi = 1.0 - spec.zero_share;
    let rho = spec.persistence;
    let stay_conflict = pi + rho * (1.0 - pi);
    let enter_conflict = pi * (1.0 - rho);
    let gamma = Gamma::new(spec.tail_dispersion, spec.tail_mean / spec.tail_dispersion)
        .map_err(|e| Error::domain(format!("tail parameters: {e}")))?;

    let series: Vec<(UnitId, Vec<u32>)> = units
        .par_iter()
        .map(|&unit| {
            let mut rng = cell_rng(spec.seed, Purpose::Synth, unit, None);
            let mut conflict = rng.random_bool(pi);
            let mut values = Vec::with_capacity(n_months);
            for t in 0..n_months {
                if t > 0 {
                    let p = if conflict { stay_conflict } else { enter_conflict };
                    conflict = rng.random_bool(p);
                }
                values.push(if conflict {
                    let rate = gamma.sample(&mut rng);
                    sample_poisson(rate, &mut rng).saturating_add(1)
                } else {
                    0
                });
            }
            (unit, values)
        })
        .collect();

    let mut panel = ObservationPanel::new(spec.level);
    for (unit, values) in series {
        panel.insert_series(unit, spec.first_month, values)?;
    }
    Ok(panel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn months(a: (i32, u32), b: (i32, u32)) -> (MonthId, MonthId) {
        (MonthId::from_date(a.0, a.1).unwrap(), MonthId::from_date(b.0, b.1).unwrap())
    }

    #[test]
    fn cm_zero_share_binomial_bound() {
        let (a, b) = months((2018, 1), (2023, 12));
        let mut spec = SynthSpec::defaults(Level::Cm, 100, a, b, 2024);
        spec.persistence = 0.0;
        let p = generate_panel(&spec).unwrap();
        assert_eq!(p.len(), 7200);
        let z = p.zero_share();
        assert!((z - 0.87).abs() <= 0.02, "{z}");
    }

    #[test]
    fn cm_defaults_zero_share_chain_bound() {
        // Variance of a stationary two-state chain mean: p(1-p)/n * (1+r)/(1-r).
        let (a, b) = months((2018, 1), (2023, 12));
        let spec = SynthSpec::defaults(Level::Cm, 100, a, b, 2024);
        let z = generate_panel(&spec).unwrap().zero_share();
        let r = spec.persistence;
        let n_per_unit = 72.0;
        let var_unit = 0.87 * 0.13 / n_per_unit * (1.0 + r) / (1.0 - r);
        let se = (var_unit / 100.0).sqrt();
        assert!((z - 0.87).abs() <= 3.0 * se, "{z} vs 3se {}", 3.0 * se);
    }

    #[test]
    fn zero_share_converges() {
        let (a, b) = months((1990, 1), (2023, 12));
        for (level, target) in [(Level::Cm, 0.87), (Level::Pgm, 0.99)] {
            let spec = SynthSpec::defaults(level, 400, a, b, 7);
            let z = generate_panel(&spec).unwrap().zero_share();
            assert!((z - target).abs() < 0.01, "{level}: {z}");
        }
    }

    #[test]
    fn near_one_zero_share_is_nearly_empty() {
        let (a, b) = months((2000, 1), (2009, 12));
        let mut spec = SynthSpec::defaults(Level::Cm, 50, a, b, 1);
        spec.zero_share = 1.0 - 1e-9;
        let p = generate_panel(&spec).unwrap();
        assert!(p.iter().all(|c| c.2 == 0));
    }

    #[test]
    fn no_persistence_means_no_autocorrelation() {
        let (a, b) = months((1990, 1), (2023, 12));
        let mut spec = SynthSpec::defaults(Level::Cm, 100, a, b, 3);
        spec.persistence = 0.0;
        let p = generate_panel(&spec).unwrap();
        let mut pairs = Vec::new();
        for u in p.units() {
            let (f, l) = p.span(u).unwrap();
            let h = p.history(u, f, l).unwrap();
            pairs.extend(h.windows(2).map(|w| ((w[0] > 0) as u8 as f64, (w[1] > 0) as u8 as f64)));
        }
        let n = pairs.len() as f64;
        let (mx, my) = (pairs.iter().map(|p| p.0).sum::<f64>() / n, pairs.iter().map(|p| p.1).sum::<f64>() / n);
        let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
        let sx = (pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n).sqrt();
        let sy = (pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n).sqrt();
        let r = cov / (sx * sy);
        assert!(r.abs() < 0.05, "lag-1 correlation {r}");
    }

    #[test]
    fn persistence_raises_autocorrelation() {
        let (a, b) = months((1990, 1), (2023, 12));
        let spec = SynthSpec::defaults(Level::Cm, 100, a, b, 3);
        let p = generate_panel(&spec).unwrap();
        let mut same = 0usize;
        let mut total = 0usize;
        for u in p.units() {
            let (f, l) = p.span(u).unwrap();
            let h = p.history(u, f, l).unwrap();
            for w in h.windows(2) {
                if w[0] > 0 {
                    total += 1;
                    same += (w[1] > 0) as usize;
                }
            }
        }
        // P(conflict | conflict) = 0.13 + 0.95 * 0.87.
        let stay = same as f64 / total as f64;
        assert!((stay - 0.9565).abs() < 0.02, "{stay}");
    }

    #[test]
    fn right_skewed_counts() {
        let (a, b) = months((1990, 1), (2023, 12));
        let p = generate_panel(&SynthSpec::defaults(Level::Cm, 200, a, b, 11)).unwrap();
        let mut nz: Vec<u32> = p.iter().map(|c| c.2).filter(|&v| v > 0).collect();
        assert!(nz.iter().all(|&v| v >= 1));
        nz.sort_unstable();
        let mean = nz.iter().map(|&v| v as f64).sum::<f64>() / nz.len() as f64;
        let median = nz[nz.len() / 2] as f64;
        assert!(mean > median, "mean {mean} median {median}");
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let (a, b) = months((2010, 1), (2012, 12));
        let spec = SynthSpec::defaults(Level::Pgm, 30, a, b, 5);
        assert_eq!(generate_panel(&spec).unwrap(), generate_panel(&spec).unwrap());
        let mut other = spec.clone();
        other.seed = 6;
        assert_ne!(generate_panel(&spec).unwrap(), generate_panel(&other).unwrap());
    }

    #[test]
    fn pgm_units_are_contiguous_block() {
        let (a, b) = months((2010, 1), (2010, 12));
        let spec = SynthSpec::defaults(Level::Pgm, 16, a, b, 5);
        let units = spec.units().unwrap();
        let topo = GridTopology::with_mask(units.iter().map(|u| u.id())).unwrap();
        // Interior cells of a 4x4 block have all eight neighbours.
        assert_eq!(topo.neighbors(units[5].id()).unwrap().len(), 8);
    }

    #[test]
    fn invalid_specs() {
        let (a, b) = months((2010, 1), (2010, 12));
        let base = SynthSpec::defaults(Level::Cm, 10, a, b, 1);
        let mut s = base.clone();
        s.zero_share = 1.0;
        assert!(generate_panel(&s).is_err());
        let mut s = base.clone();
        s.tail_dispersion = 0.0;
        assert!(generate_panel(&s).is_err());
        let mut s = base.clone();
        s.persistence = 1.0;
        assert!(generate_panel(&s).is_err());
        let mut s = base.clone();
        s.first_month = b.plus(1);
        assert!(generate_panel(&s).is_err());
        let mut s = base;
        s.n_units = 0;
        assert!(generate_panel(&s).is_err());
    }
}
