use crate::error::{Error, Result};
use crate::grid::{LoadProfile, TimeGrid};

/// Solar output as installed capacity times a per-interval output coefficient.
pub fn solar_profile(capacity_kw: f64, coefficients: &[f64], grid: &TimeGrid) -> Result<LoadProfile> {
    if coefficients.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: coefficients.len(),
        });
    }
    if !(capacity_kw.is_finite() && capacity_kw >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "solar capacity {capacity_kw} must be >= 0"
        )));
    }
    if let Some((index, &value)) = coefficients
        .iter()
        .enumerate()
        .find(|(_, c)| !(0.0..=1.0).contains(*c))
    {
        return Err(Error::CoefficientOutOfRange { index, value });
    }
    LoadProfile::new(*grid, coefficients.iter().map(|c| capacity_kw * c).collect())
}

/// Repeats a one-day series over every day of the grid. A coarser day (say hourly values on
/// a 15-minute grid) is held constant over the finer intervals, provided its length divides
/// the intervals per day.
pub fn tile_daily(daily: &[f64], grid: &TimeGrid) -> Result<Vec<f64>> {
    if daily.len() == grid.len() {
        return Ok(daily.to_vec());
    }
    let per_day = grid.intervals_per_day();
    if daily.is_empty() || !per_day.is_multiple_of(daily.len()) {
        return Err(Error::LengthMismatch {
            expected: per_day,
            actual: daily.len(),
        });
    }
    let hold = per_day / daily.len();
    Ok(daily
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v, hold))
        .cycle()
        .take(grid.len())
        .collect())
}
