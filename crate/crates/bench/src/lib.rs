//! Fixtures shared by the benchmarks.

use cfscore_core::benchmarks::BenchmarkSpec;
use cfscore_core::synth::{generate_panel, SynthSpec};
use cfscore_core::{EvaluationWindow, GridTopology, Level, MonthId, ObservationPanel, Submission};

/// Deterministic pseudo-random draws with many zeros and a long tail.
pub fn draws(n: usize, seed: u64) -> Vec<u32> {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..n)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            if s.is_multiple_of(3) {
                0
            } else {
                ((s >> 20) % 500) as u32
            }
        })
        .collect()
}

/// A cm panel covering the six test years and one benchmark submission for it.
pub fn panel_and_submission(n_units: u32, kind: &str) -> (ObservationPanel, Vec<EvaluationWindow>, Submission) {
    let first = MonthId::from_date(1997, 11).unwrap();
    let last = MonthId::from_date(2023, 12).unwrap();
    let panel = generate_panel(&SynthSpec::defaults(Level::Cm, n_units, first, last, 1)).unwrap();
    let windows = EvaluationWindow::test_years();
    let units: Vec<_> = panel.units().collect();
    let sub = BenchmarkSpec::named(kind, 1)
        .unwrap()
        .generate(&panel, &units, &windows, &GridTopology::full())
        .unwrap();
    (panel, windows, sub)
}
