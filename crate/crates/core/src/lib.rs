//! Scoring and benchmarking engine for probabilistic forecasts of
//! armed-conflict fatality counts.
//!
//! Forecasts arrive as ensembles of non-negative integer draws per
//! (unit, month) cell. The crate provides
//!
//! * the three scoring rules ([`metrics::crps_ensemble`],
//!   [`metrics::ignorance_score`], [`metrics::interval_score`]),
//! * benchmark forecast generators ([`benchmarks`]),
//! * submission scoring, yearly/overall aggregation and ranking
//!   ([`evaluation`]),
//! * CRPS-weighted ensemble pooling ([`ensemble`]),
//! * a synthetic zero-inflated panel generator ([`synth`]),
//! * columnar file formats and submission validation ([`io`]).

pub mod benchmarks;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod forecast;
pub mod io;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use forecast::{ForecastSet, Submission};
pub use model::{
    BinScheme, EvaluationWindow, GridTopology, Level, MonthId, ObservationPanel, UnitId,
};
