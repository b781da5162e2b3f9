//! Fixed-resolution time grid and the profile types that live on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MINUTES_PER_DAY: u32 = 1440;

/// A uniform horizon of `num_days` days split into equal intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeGrid {
    interval_minutes: u32,
    intervals_per_day: usize,
    num_days: usize,
}

impl TimeGrid {
    pub fn new(interval_minutes: u32, num_days: usize) -> Result<Self> {
        if interval_minutes == 0 || !MINUTES_PER_DAY.is_multiple_of(interval_minutes) {
            return Err(Error::InvalidGrid(format!(
                "interval_minutes={interval_minutes} must be a positive divisor of 1440"
            )));
        }
        if num_days == 0 {
            return Err(Error::InvalidGrid("num_days must be at least 1".into()));
        }
        Ok(Self {
            interval_minutes,
            intervals_per_day: (MINUTES_PER_DAY / interval_minutes) as usize,
            num_days,
        })
    }

    pub fn hourly(num_days: usize) -> Result<Self> {
        Self::new(60, num_days)
    }

    pub fn interval_minutes(&self) -> u32 {
        self.interval_minutes
    }

    pub fn intervals_per_day(&self) -> usize {
        self.intervals_per_day
    }

    pub fn num_days(&self) -> usize {
        self.num_days
    }

    /// Total number of intervals over the horizon.
    pub fn len(&self) -> usize {
        self.intervals_per_day * self.num_days
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Interval length in hours (the Δh of every kW to kWh conversion).
    pub fn dt_hours(&self) -> f64 {
        f64::from(self.interval_minutes) / 60.0
    }

    /// Same resolution, different horizon.
    pub fn with_days(&self, num_days: usize) -> Result<Self> {
        Self::new(self.interval_minutes, num_days)
    }

    /// Index range of `day` on the full horizon.
    pub fn day_range(&self, day: usize) -> std::ops::Range<usize> {
        let start = day * self.intervals_per_day;
        start..start + self.intervals_per_day
    }

    /// Converts an hour-of-day (may be fractional) to an interval-of-day index.
    pub fn interval_of_hour(&self, hour: f64) -> usize {
        let idx = (hour * 60.0 / f64::from(self.interval_minutes)).floor() as usize;
        idx.min(self.intervals_per_day - 1)
    }

    pub(crate) fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::GridMismatch(format!(
                "{what} has {len} intervals, grid has {}",
                self.len()
            )));
        }
        Ok(())
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            interval_minutes: 60,
            intervals_per_day: 24,
            num_days: 1,
        }
    }
}

/// Non-negative power series in kW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl LoadProfile {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        grid.check_len("load profile", values.len())?;
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "load profile value {v} at interval {i} must be finite and >= 0"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Total energy in kWh.
    pub fn energy_kwh(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dt_hours()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Elementwise sum of profiles on one grid.
    pub fn sum<'a, I>(grid: TimeGrid, profiles: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a LoadProfile>,
    {
        let mut total = Self::zeros(grid);
        for p in profiles {
            if p.grid != grid {
                return Err(Error::GridMismatch("profiles on different grids".into()));
            }
            for (acc, v) in total.values.iter_mut().zip(&p.values) {
                *acc += v;
            }
        }
        Ok(total)
    }
}

/// Signed power series: consumption minus on-site generation. Negative values are surplus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetLoadProfile {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl NetLoadProfile {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        grid.check_len("net-load profile", values.len())?;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
