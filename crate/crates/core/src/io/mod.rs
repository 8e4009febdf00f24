//! File formats: Parquet submissions, point submissions, observations and
//! score tables; plain-text window configs, region masks and universes;
//! submission validation.

mod columnar;
mod files;
mod text;
mod validate;

pub use files::{
    load_point_submission, read_observations, read_score_table, read_submission, write_observations,
    write_point_submission, write_score_table, write_submission,
};
pub use text::{parse_windows, read_region_mask, read_universe, read_windows, write_region_mask, Universe};
pub use validate::{validate_submission, ValidationReport, Violation, ViolationKind};
