use crate::error::{Error, Result};

/// Empirical-CDF CRPS of an ensemble against observation `y`:
///
/// `(1/n) sum_i |x_i - y| - (1/(2 n^2)) sum_i sum_j |x_i - x_j|`
///
/// Each draw carries weight `1/n`. The pairwise term is evaluated on the
/// sorted draws in exact integer arithmetic, so the result is independent
/// of draw order and rounded only once.
pub fn crps_ensemble(draws: &[u32], y: u32) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::domain("CRPS of an empty ensemble"));
    }
    let n = draws.len() as i128;
    let mut sorted = draws.to_vec();
    sorted.sort_unstable();

    let abs_err: i128 = sorted.iter().map(|&x| (x as i128 - y as i128).abs()).sum();
    // sum_{i<j} (x_j - x_i) over sorted draws equals half the double sum.
    let half_pairwise: i128 = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| x as i128 * (2 * i as i128 - n + 1))
        .sum();

    let numerator = abs_err * n - half_pairwise;
    Ok(numerator as f64 / (n * n) as f64)
}
