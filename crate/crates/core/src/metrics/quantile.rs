use crate::error::{Error, Result};

/// Linear-interpolation sample quantile (Hyndman-Fan type 7, numpy's
/// default). `sorted` must be ascending.
pub fn quantile_type7(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::domain("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("quantile level {q} outside [0, 1]")));
    }
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]), "sample not sorted");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    match sorted.get(lo + 1) {
        Some(&next) if frac > 0.0 => Ok(sorted[lo] + frac * (next - sorted[lo])),
        _ => Ok(sorted[lo]),
    }
}
