use std::cell::RefCell;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResampleMode {
    /// Repeat the sequence cyclically and truncate.
    Tile,
    /// Band-limited Fourier interpolation, rounded to integers and clamped
    /// at zero.
    #[default]
    Fourier,
}

impl FromStr for ResampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tile" => Ok(ResampleMode::Tile),
            "fourier" => Ok(ResampleMode::Fourier),
            other => Err(Error::domain(format!("unknown resample mode {other:?}"))),
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Resamples `draws` (in submitted order) to exactly `n_target` values.
/// Input already of length `n_target` is returned unchanged.
pub fn resample_to_n(draws: &[u32], n_target: usize, mode: ResampleMode) -> Result<Vec<u32>> {
    if n_target < 1 {
        return Err(Error::domain("resample target must be at least 1"));
    }
    if draws.is_empty() {
        return Err(Error::domain("cannot resample an empty ensemble"));
    }
    if draws.len() == n_target {
        return Ok(draws.to_vec());
    }
    match mode {
        ResampleMode::Tile => Ok(draws.iter().copied().cycle().take(n_target).collect()),
        ResampleMode::Fourier => Ok(fourier_resample(draws, n_target)
            .into_iter()
            // `as` saturates: negatives go to 0, overshoot to u32::MAX.
            .map(|v| v.round_ties_even() as u32)
            .collect()),
    }
}

/// Real-valued Fourier resampling of a real sequence: transform, keep the
/// lowest `min(n, m)` frequencies with Hermitian symmetry, inverse
/// transform at length `m` and rescale by `m / n`. An even-length Nyquist
/// bin is split in half when upsampling and folded when downsampling.
pub(crate) fn fourier_resample(x: &[u32], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut spectrum: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v as f64, 0.0)).collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut spectrum));

    let kept = n.min(m);
    let mut out = vec![Complex::new(0.0, 0.0); m];
    // Positive frequencies up to and including the Nyquist bin of `kept`.
    out[..=kept / 2].copy_from_slice(&spectrum[..=kept / 2]);
    if kept.is_multiple_of(2) {
        let nyq = kept / 2;
        if m < n {
            out[nyq] = Complex::new(2.0 * spectrum[nyq].re, 0.0);
        } else if m > n {
            out[nyq] = Complex::new(0.5 * spectrum[nyq].re, 0.0);
        } else {
            out[nyq] = Complex::new(spectrum[nyq].re, 0.0);
        }
    }
    out[0].im = 0.0;
    // Negative frequencies mirror the positive ones.
    for k in 1..=kept / 2 {
        if m - k != k {
            out[m - k] = out[k].conj();
        }
    }

    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m).process(&mut out));
    let scale = 1.0 / n as f64;
    out.into_iter().map(|c| c.re * scale).collect()
}
