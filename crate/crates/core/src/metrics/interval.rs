use crate::error::{Error, Result};
use crate::metrics::quantile::quantile_type7;

/// Interval score settings. `a` is one minus the nominal coverage; the
/// interval runs from quantile `q_low` to quantile `q_high`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisConfig {
    a: f64,
    q_low: f64,
    q_high: f64,
}

impl MisConfig {
    pub fn new(a: f64, q_low: f64, q_high: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::domain(format!("interval a = {a} outside (0, 1)")));
        }
        if !(0.0 < q_low && q_low < q_high && q_high < 1.0) {
            return Err(Error::domain(format!(
                "interval quantiles ({q_low}, {q_high}) must satisfy 0 < low < high < 1"
            )));
        }
        Ok(MisConfig { a, q_low, q_high })
    }

    /// Central interval: quantiles `a/2` and `1 - a/2`.
    pub fn standard(a: f64) -> Result<Self> {
        Self::new(a, a / 2.0, 1.0 - a / 2.0)
    }

    /// Quantiles `a/2` and `1 - a`, the convention under which `[0, 0, 4, 10]`
    /// has upper bound 8.2 at `a = 0.1`.
    pub fn compat(a: f64) -> Result<Self> {
        Self::new(a, a / 2.0, 1.0 - a)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn q_low(&self) -> f64 {
        self.q_low
    }

    pub fn q_high(&self) -> f64 {
        self.q_high
    }
}

impl Default for MisConfig {
    fn default() -> Self {
        Self::standard(0.1).expect("static config")
    }
}

/// `(U - L) + (2/a)(L - y) 1{L > y} + (2/a)(y - U) 1{y > U}`.
pub fn interval_score_bounds(lower: f64, upper: f64, y: f64, a: f64) -> f64 {
    let mut score = upper - lower;
    if lower - y >= 0.0 {
        score += 2.0 / a * (lower - y);
    }
    if y - upper >= 0.0 {
        score += 2.0 / a * (y - upper);
    }
    score
}

/// Interval score of an ensemble using type-7 sample quantiles.
pub fn interval_score(draws: &[u32], y: u32, cfg: &MisConfig) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::domain("interval score of an empty ensemble"));
    }
    let mut sorted: Vec<f64> = draws.iter().map(|&d| d as f64).collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let lower = quantile_type7(&sorted, cfg.q_low)?;
    let upper = quantile_type7(&sorted, cfg.q_high)?;
    Ok(interval_score_bounds(lower, upper, y as f64, cfg.a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example_compat() {
        let cfg = MisConfig::compat(0.1).unwrap();
        let s = interval_score(&[0, 0, 4, 10], 5, &cfg).unwrap();
        assert!((s - 8.2).abs() < 1e-12);
    }

    #[test]
    fn worked_example_standard() {
        let s = interval_score(&[0, 0, 4, 10], 5, &MisConfig::default()).unwrap();
        assert!((s - 9.1).abs() < 1e-12);
    }

    #[test]
    fn penalty_case() {
        assert_eq!(interval_score_bounds(0.0, 2.0, 5.0, 0.1), 62.0);
        assert_eq!(interval_score_bounds(3.0, 4.0, 1.0, 0.5), 1.0 + 4.0 * 2.0);
    }

    #[test]
    fn perfect_point_forecast() {
        for a in [0.05, 0.1, 0.5] {
            let cfg = MisConfig::standard(a).unwrap();
            assert_eq!(interval_score(&[7; 20], 7, &cfg).unwrap(), 0.0);
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(MisConfig::new(0.0, 0.1, 0.9).is_err());
        assert!(MisConfig::new(0.1, 0.9, 0.1).is_err());
        assert!(MisConfig::new(0.1, 0.0, 0.9).is_err());
        assert!(MisConfig::standard(1.0).is_err());
        assert!(interval_score(&[], 1, &MisConfig::default()).is_err());
    }

    proptest! {
        #[test]
        fn inside_interval_is_width(lo in 0.0f64..100.0, w in 0.0f64..100.0, t in 0.0f64..=1.0, a in 0.01f64..0.99) {
            let hi = lo + w;
            let y = lo + t * w;
            prop_assert!((interval_score_bounds(lo, hi, y, a) - w).abs() < 1e-9);
        }

        #[test]
        fn at_most_one_penalty(lo in 0.0f64..100.0, w in 0.0f64..100.0, y in 0.0f64..300.0) {
            let hi = lo + w;
            let below = lo - y > 0.0;
            let above = y - hi > 0.0;
            prop_assert!(!(below && above));
        }

        #[test]
        fn widening_never_raises_penalty(
            draws in prop::collection::vec(0u32..500, 15..80),
            y in 0u32..800,
            a in 0.02f64..0.5,
            shrink in 0.1f64..0.9,
        ) {
            let wide = MisConfig::standard(a).unwrap();
            let narrow = MisConfig::new(a, wide.q_low() + shrink * (0.5 - wide.q_low()), wide.q_high() - shrink * (wide.q_high() - 0.5) + 1e-6).unwrap();
            let mut sorted: Vec<f64> = draws.iter().map(|&d| d as f64).collect();
            sorted.sort_unstable_by(f64::total_cmp);
            let penalty = |cfg: &MisConfig| {
                let l = quantile_type7(&sorted, cfg.q_low()).unwrap();
                let u = quantile_type7(&sorted, cfg.q_high()).unwrap();
                interval_score_bounds(l, u, y as f64, a) - (u - l)
            };
            prop_assert!(penalty(&wide) <= penalty(&narrow) + 1e-9);
        }
    }
}
