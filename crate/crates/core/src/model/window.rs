use crate::error::{Error, Result};
use crate::model::MonthId;

pub const FORECAST_MONTHS: u32 = 12;

/// A training cutoff followed by twelve consecutive forecast months.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationWindow {
    name: String,
    train_cutoff: MonthId,
    first_forecast: MonthId,
}

impl EvaluationWindow {
    pub fn new(name: impl Into<String>, train_cutoff: MonthId, first_forecast: MonthId) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.contains(',') {
            return Err(Error::domain(format!("invalid window name {name:?}")));
        }
        if first_forecast <= train_cutoff {
            return Err(Error::domain(format!(
                "window {name}: first forecast month {first_forecast} not after cutoff {train_cutoff}"
            )));
        }
        Ok(EvaluationWindow {
            name,
            train_cutoff,
            first_forecast,
        })
    }

    /// Calendar-year test window: data up to October of the previous year,
    /// forecasts for January through December.
    pub fn test_year(year: i32) -> Result<Self> {
        Self::new(
            year.to_string(),
            MonthId::from_date(year - 1, 10)?,
            MonthId::from_date(year, 1)?,
        )
    }

    /// The six test windows 2018 to 2023.
    pub fn test_years() -> Vec<Self> {
        (2018..=2023)
            .map(|y| Self::test_year(y).expect("static window"))
            .collect()
    }

    /// Cutoff April 2024, forecasts July 2024 to June 2025 (steps 3 to 14).
    pub fn true_future() -> Self {
        Self::new(
            "true_future",
            MonthId::from_date(2024, 4).expect("static month"),
            MonthId::from_date(2024, 7).expect("static month"),
        )
        .expect("static window")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn train_cutoff(&self) -> MonthId {
        self.train_cutoff
    }

    pub fn forecast_months(&self) -> impl Iterator<Item = MonthId> + '_ {
        (0..FORECAST_MONTHS).map(|i| self.first_forecast.plus(i))
    }

    pub fn first_month(&self) -> MonthId {
        self.first_forecast
    }

    pub fn last_month(&self) -> MonthId {
        self.first_forecast.plus(FORECAST_MONTHS - 1)
    }

    pub fn contains(&self, month: MonthId) -> bool {
        (self.first_forecast..=self.last_month()).contains(&month)
    }

    /// Months between the cutoff and `month`.
    pub fn step(&self, month: MonthId) -> Option<u32> {
        self.contains(month)
            .then(|| month.get() - self.train_cutoff.get())
    }
}
