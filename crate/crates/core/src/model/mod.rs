//! Units of analysis, calendar, grid topology, bin scheme, evaluation
//! windows and observation panels shared by every other module.

mod bins;
mod calendar;
mod grid;
mod panel;
mod unit;
mod window;

pub use bins::BinScheme;
pub use calendar::MonthId;
pub use grid::{Contiguity, GridTopology, GRID_CELLS, GRID_COLS, GRID_ROWS};
pub use panel::ObservationPanel;
pub use unit::{Level, UnitId};
pub use window::EvaluationWindow;
