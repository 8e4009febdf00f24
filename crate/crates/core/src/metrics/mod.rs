//! Scoring rules for ensembles of integer draws, and the quantile and
//! resampling primitives they rely on.

mod crps;
mod ignorance;
mod interval;
mod quantile;
mod resample;

pub use crps::crps_ensemble;
pub use ignorance::{ignorance_from_counts, ignorance_score, IgnConfig};
pub use interval::{interval_score, interval_score_bounds, MisConfig};
pub use quantile::quantile_type7;
pub use resample::{resample_to_n, ResampleMode};

use crate::error::Result;

/// CRPS and MIS are in fatalities, IGN in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreTriple {
    pub crps: f64,
    pub ign: f64,
    pub mis: f64,
}

impl ScoreTriple {
    pub fn is_finite(&self) -> bool {
        self.crps.is_finite() && self.ign.is_finite() && self.mis.is_finite()
    }
}

/// All three scores of one forecast against one observation.
pub fn score_cell(draws: &[u32], y: u32, ign: &IgnConfig, mis: &MisConfig) -> Result<ScoreTriple> {
    Ok(ScoreTriple {
        crps: crps_ensemble(draws, y)?,
        ign: ignorance_score(draws, y, ign)?,
        mis: interval_score(draws, y, mis)?,
    })
}
