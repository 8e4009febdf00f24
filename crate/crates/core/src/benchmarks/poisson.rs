use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forecast::{MAX_DRAWS, MIN_DRAWS};
use crate::model::{MonthId, UnitId};
use crate::rng::{cell_rng, Purpose};

/// Means below this use sequential inversion; larger means use
/// transformed rejection.
const INVERSION_LIMIT: f64 = 10.0;

/// One Poisson(`mean`) variate. Counts beyond `u32::MAX` saturate.
pub fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < INVERSION_LIMIT {
        inversion(mean, rng)
    } else {
        ptrs(mean, rng)
    }
}

fn inversion<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
        // Guards against the cdf stalling just below 1 in floating point.
        if p < f64::EPSILON * cdf && k as f64 > mean {
            break;
        }
    }
    k
}

/// Hormann's PTRS transformed rejection with squeeze.
fn ptrs<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u32;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * loglam - libm::lgamma(k + 1.0);
        if lhs <= rhs {
            return k as u32;
        }
    }
}

fn check_expand_args(point: f64, n_draws: usize) -> Result<()> {
    if !point.is_finite() || point < 0.0 {
        return Err(Error::domain(format!("Poisson mean {point} must be finite and non-negative")));
    }
    if !(MIN_DRAWS..=MAX_DRAWS).contains(&n_draws) {
        return Err(Error::domain(format!(
            "n_draws {n_draws} outside [{MIN_DRAWS}, {MAX_DRAWS}]"
        )));
    }
    Ok(())
}

/// `n_draws` independent Poisson(`point`) variates from a stream seeded
/// only by `seed`.
pub fn poisson_expand(point: f64, n_draws: usize, seed: u64) -> Result<Vec<u32>> {
    check_expand_args(point, n_draws)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_draws).map(|_| sample_poisson(point, &mut rng)).collect())
}

/// Like [`poisson_expand`], with the stream keyed by (seed, unit, month)
/// so cells can be expanded in any order.
pub fn poisson_expand_cell(
    point: f64,
    n_draws: usize,
    seed: u64,
    purpose: Purpose,
    unit: UnitId,
    month: MonthId,
) -> Result<Vec<u32>> {
    check_expand_args(point, n_draws)?;
    let mut rng = cell_rng(seed, purpose, unit, Some(month));
    Ok((0..n_draws).map(|_| sample_poisson(point, &mut rng)).collect())
}
