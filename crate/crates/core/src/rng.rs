//! Seeded random streams keyed by (seed, purpose, unit, month).
//!
//! Every stochastic operation draws from a stream derived only from its
//! key, so output does not depend on iteration order or thread schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{MonthId, UnitId};

/// Which operation a stream belongs to. Distinct purposes never share a
/// stream for the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    LastHistorical = 1,
    Bootstrap = 2,
    PointExpansion = 3,
    EnsemblePool = 4,
    Synth = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream for one (unit, month) cell. `month = None` keys a per-unit stream.
pub fn cell_rng(seed: u64, purpose: Purpose, unit: UnitId, month: Option<MonthId>) -> ChaCha8Rng {
    let tag = (purpose as u64) << 8 | unit.level() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(tag)));
    rng.set_stream((unit.id() as u64) << 32 | month.map_or(0, |m| m.get() as u64));
    rng
}
