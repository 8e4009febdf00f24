use crate::error::{Error, Result};
use crate::metrics::resample::{resample_to_n, ResampleMode};
use crate::model::BinScheme;

#[derive(Debug, Clone, PartialEq)]
pub struct IgnConfig {
    /// Every forecast is resampled to this many draws before binning.
    pub n_target: usize,
    pub scheme: BinScheme,
    pub resample_mode: ResampleMode,
}

impl Default for IgnConfig {
    fn default() -> Self {
        IgnConfig {
            n_target: 1000,
            scheme: BinScheme::fatalities(),
            resample_mode: ResampleMode::Fourier,
        }
    }
}

impl IgnConfig {
    pub fn with_mode(mode: ResampleMode) -> Self {
        IgnConfig {
            resample_mode: mode,
            ..Self::default()
        }
    }

    /// Lowest attainable score: every resampled draw in the observed bin.
    pub fn floor(&self) -> f64 {
        let total = (self.n_target + self.scheme.len()) as f64;
        -((self.n_target + 1) as f64 / total).log2()
    }

    /// Highest attainable score: no resampled draw in the observed bin.
    pub fn ceiling(&self) -> f64 {
        let total = (self.n_target + self.scheme.len()) as f64;
        -(1.0 / total).log2()
    }
}

/// Binned log score in bits.
///
/// The draws are resampled to `cfg.n_target` values, binned, and every bin
/// receives one pseudo-count, so the observed bin's probability is
/// `(count + 1) / (n_target + n_bins)` and never zero.
pub fn ignorance_score(draws: &[u32], y: u32, cfg: &IgnConfig) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::domain("ignorance score of an empty ensemble"));
    }
    let resampled = resample_to_n(draws, cfg.n_target, cfg.resample_mode)?;
    let mut counts = vec![0usize; cfg.scheme.len()];
    for v in resampled {
        counts[cfg.scheme.bin_index(v as u64)] += 1;
    }
    Ok(ignorance_from_counts(&counts, cfg.scheme.bin_index(y as u64)))
}

/// `-log2((counts[bin] + 1) / (sum(counts) + counts.len()))`.
pub fn ignorance_from_counts(counts: &[usize], bin: usize) -> f64 {
    let total: usize = counts.iter().sum::<usize>() + counts.len();
    -((counts[bin] + 1) as f64 / total as f64).log2()
}
