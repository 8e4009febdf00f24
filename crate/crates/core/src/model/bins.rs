use std::fmt;

use crate::error::{Error, Result};

/// Partition of the non-negative integers into contiguous intervals,
/// stored as the ascending lower bound of each interval. The first lower
/// bound is always 0 and the last interval is unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinScheme {
    lower: Vec<u64>,
}

/// `{0}, [1,2], [3,5], [6,10], [11,25], [26,50], [51,100], [101,250],
/// [251,500], [501,1000], [1001,inf)`.
const FATALITY_BINS: [u64; 11] = [0, 1, 3, 6, 11, 26, 51, 101, 251, 501, 1001];

impl BinScheme {
    pub fn from_lower_bounds(lower: Vec<u64>) -> Result<Self> {
        if lower.first() != Some(&0) {
            return Err(Error::domain("first bin must start at 0"));
        }
        if lower.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("bin lower bounds must be strictly increasing"));
        }
        Ok(BinScheme { lower })
    }

    /// The eleven fatality bins used by the ignorance score.
    pub fn fatalities() -> Self {
        BinScheme {
            lower: FATALITY_BINS.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn bin_index(&self, y: u64) -> usize {
        self.lower.partition_point(|&lo| lo <= y) - 1
    }

    /// Inclusive bounds of bin `i`; the upper bound is `None` for the last bin.
    pub fn interval(&self, i: usize) -> Option<(u64, Option<u64>)> {
        let lo = *self.lower.get(i)?;
        Some((lo, self.lower.get(i + 1).map(|next| next - 1)))
    }
}

impl Default for BinScheme {
    fn default() -> Self {
        Self::fatalities()
    }
}

impl fmt::Display for BinScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.len())
            .map(|i| match self.interval(i).unwrap() {
                (lo, Some(hi)) if lo == hi => format!("{lo}"),
                (lo, Some(hi)) => format!("{lo}-{hi}"),
                (lo, None) => format!("{lo}-"),
            })
            .collect();
        f.write_str(&parts.join(", "))
    }
}
