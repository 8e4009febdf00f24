use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub const GRID_ROWS: u32 = 360;
pub const GRID_COLS: u32 = 720;
pub const GRID_CELLS: u32 = GRID_ROWS * GRID_COLS;

/// Degrees per cell side.
pub const CELL_SIZE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Contiguity {
    /// Eight surrounding cells.
    #[default]
    Queen,
    /// The four edge-sharing cells.
    Rook,
}

/// The global 0.5 degree grid, numbered row-major from the south-west
/// corner: `gid = (row - 1) * 720 + col`, row 1 is the southernmost band
/// and column 1 starts at 180 degrees west. The grid does not wrap around
/// the antimeridian.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GridTopology {
    /// `None` means every cell is in the universe.
    region_mask: Option<BTreeSet<u32>>,
    contiguity: Contiguity,
}

impl GridTopology {
    /// All 259 200 cells.
    pub fn full() -> Self {
        Self::default()
    }

    pub fn with_mask(mask: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mask: BTreeSet<u32> = mask.into_iter().collect();
        if let Some(bad) = mask.iter().find(|g| !(1..=GRID_CELLS).contains(*g)) {
            return Err(Error::domain(format!("mask gid {bad} outside the grid")));
        }
        Ok(GridTopology {
            region_mask: Some(mask),
            contiguity: Contiguity::Queen,
        })
    }

    pub fn with_contiguity(mut self, contiguity: Contiguity) -> Self {
        self.contiguity = contiguity;
        self
    }

    pub fn contiguity(&self) -> Contiguity {
        self.contiguity
    }

    pub fn contains(&self, gid: u32) -> bool {
        (1..=GRID_CELLS).contains(&gid)
            && self.region_mask.as_ref().is_none_or(|m| m.contains(&gid))
    }

    /// Cells in the universe, ascending. Enumerates the whole grid when no
    /// mask is set.
    pub fn cells(&self) -> Box<dyn Iterator<Item = u32> + '_> {
        match &self.region_mask {
            Some(mask) => Box::new(mask.iter().copied()),
            None => Box::new(1..=GRID_CELLS),
        }
    }

    pub fn row_col(gid: u32) -> Result<(u32, u32)> {
        check_gid(gid)?;
        Ok(((gid - 1) / GRID_COLS + 1, (gid - 1) % GRID_COLS + 1))
    }

    pub fn gid(row: u32, col: u32) -> Result<u32> {
        if !(1..=GRID_ROWS).contains(&row) || !(1..=GRID_COLS).contains(&col) {
            return Err(Error::domain(format!("row/col ({row}, {col}) outside grid")));
        }
        Ok((row - 1) * GRID_COLS + col)
    }

    /// Cell containing a point. Points on the northern or eastern boundary
    /// fall in the last row or column.
    pub fn gid_at(lat: f64, lon: f64) -> Result<u32> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::domain(format!("({lat}, {lon}) is not a coordinate")));
        }
        let row = (((lat + 90.0) / CELL_SIZE).floor() as u32 + 1).min(GRID_ROWS);
        let col = (((lon + 180.0) / CELL_SIZE).floor() as u32 + 1).min(GRID_COLS);
        Self::gid(row, col)
    }

    /// Contiguous cells of `gid` that lie inside the grid and the region
    /// mask, ascending. Never contains `gid` itself.
    pub fn neighbors(&self, gid: u32) -> Result<Vec<u32>> {
        let (row, col) = Self::row_col(gid)?;
        let mut out = Vec::with_capacity(8);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if (dr, dc) == (0, 0) {
                    continue;
                }
                if self.contiguity == Contiguity::Rook && dr != 0 && dc != 0 {
                    continue;
                }
                let (r, c) = (row as i64 + dr, col as i64 + dc);
                if r < 1 || r > GRID_ROWS as i64 || c < 1 || c > GRID_COLS as i64 {
                    continue;
                }
                let n = (r as u32 - 1) * GRID_COLS + c as u32;
                if self.contains(n) {
                    out.push(n);
                }
            }
        }
        Ok(out)
    }
}

fn check_gid(gid: u32) -> Result<()> {
    if (1..=GRID_CELLS).contains(&gid) {
        Ok(())
    } else {
        Err(Error::domain(format!("gid {gid} outside [1, {GRID_CELLS}]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent enumeration over every cell of the grid by coordinates.
    fn brute_neighbors(gid: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for other in 1..=GRID_CELLS {
            if other == gid {
                continue;
            }
            let (r1, c1) = ((gid - 1) / 720, (gid - 1) % 720);
            let (r2, c2) = ((other - 1) / 720, (other - 1) % 720);
            if r1.abs_diff(r2) <= 1 && c1.abs_diff(c2) <= 1 {
                out.push(other);
            }
        }
        out
    }

    #[test]
    fn interior_cell_has_eight() {
        let topo = GridTopology::full();
        assert_eq!(
            topo.neighbors(722).unwrap(),
            vec![1, 2, 3, 721, 723, 1441, 1442, 1443]
        );
        assert_eq!(topo.neighbors(722).unwrap(), brute_neighbors(722));
    }

    #[test]
    fn corner_cell_has_three() {
        let topo = GridTopology::full();
        assert_eq!(topo.neighbors(1).unwrap(), vec![2, 721, 722]);
        assert_eq!(topo.neighbors(GRID_CELLS).unwrap(), brute_neighbors(GRID_CELLS));
        assert_eq!(topo.neighbors(720).unwrap(), brute_neighbors(720));
    }

    #[test]
    fn edge_cell_has_five() {
        let topo = GridTopology::full();
        assert_eq!(topo.neighbors(5).unwrap().len(), 5);
        assert_eq!(topo.neighbors(721).unwrap(), brute_neighbors(721));
    }

    #[test]
    fn empty_mask_has_no_neighbors() {
        let topo = GridTopology::with_mask([]).unwrap();
        assert!(topo.neighbors(722).unwrap().is_empty());
    }

    #[test]
    fn mask_intersects() {
        let topo = GridTopology::with_mask([2, 723, 5000]).unwrap();
        assert_eq!(topo.neighbors(722).unwrap(), vec![2, 723]);
    }

    #[test]
    fn rook_has_four() {
        let topo = GridTopology::full().with_contiguity(Contiguity::Rook);
        assert_eq!(topo.neighbors(722).unwrap(), vec![2, 721, 723, 1442]);
        assert_eq!(topo.neighbors(1).unwrap(), vec![2, 721]);
    }

    #[test]
    fn out_of_range_gid() {
        let topo = GridTopology::full();
        assert!(topo.neighbors(0).is_err());
        assert!(topo.neighbors(GRID_CELLS + 1).is_err());
    }

    #[test]
    fn coordinates() {
        assert_eq!(GridTopology::gid_at(-90.0, -180.0).unwrap(), 1);
        assert_eq!(GridTopology::gid_at(90.0, 180.0).unwrap(), GRID_CELLS);
        assert_eq!(GridTopology::gid_at(-89.6, -179.4).unwrap(), 2);
        assert_eq!(GridTopology::gid_at(-89.4, -179.6).unwrap(), 721);
    }

    #[test]
    fn symmetry_random_pairs() {
        use rand::{RngExt, SeedableRng};
        let topo = GridTopology::full();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let a = rng.random_range(1..=GRID_CELLS);
            // Half the pairs are near each other so the relation is exercised.
            let b = if rng.random_bool(0.5) {
                let (r, c) = GridTopology::row_col(a).unwrap();
                let r = (r as i64 + rng.random_range(-1..=1)).clamp(1, GRID_ROWS as i64);
                let c = (c as i64 + rng.random_range(-1..=1)).clamp(1, GRID_COLS as i64);
                GridTopology::gid(r as u32, c as u32).unwrap()
            } else {
                rng.random_range(1..=GRID_CELLS)
            };
            let ab = topo.neighbors(a).unwrap().contains(&b);
            let ba = topo.neighbors(b).unwrap().contains(&a);
            assert_eq!(ab, ba, "asymmetric pair {a} {b}");
        }
    }

    proptest! {
        #[test]
        fn neighbor_count_and_irreflexive(gid in 1u32..=GRID_CELLS) {
            let n = GridTopology::full().neighbors(gid).unwrap();
            prop_assert!((3..=8).contains(&n.len()));
            prop_assert!(!n.contains(&gid));
        }

        #[test]
        fn row_col_round_trip(gid in 1u32..=GRID_CELLS) {
            let (r, c) = GridTopology::row_col(gid).unwrap();
            prop_assert_eq!(GridTopology::gid(r, c).unwrap(), gid);
        }
    }
}
