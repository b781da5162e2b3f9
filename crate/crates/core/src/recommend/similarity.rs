use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::profile::{Category, HouseholdModel};
use crate::schedule::{add_runs, Schedule};

/// Average day of the household's non-shiftable load, kW per interval-of-day.
pub fn mean_day_profile(
    household: &HouseholdModel,
    schedule: &Schedule,
    grid: &TimeGrid,
    category: Category,
) -> Vec<f64> {
    let mut total = vec![0.0; grid.len()];
    for a in household.appliances.iter().filter(|a| a.category == category) {
        add_runs(&mut total, a, schedule.days(&a.id), grid);
    }
    let days = grid.num_days() as f64;
    (0..grid.intervals_per_day())
        .map(|t| (0..grid.num_days()).map(|d| total[d * grid.intervals_per_day() + t]).sum::<f64>() / days)
        .collect()
}

/// `1 / (1 + RMSD)` between two mean-day profiles; 1 exactly when they are identical.
pub fn lifestyle_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::GridMismatch(format!(
            "mean-day profiles have {} and {} intervals",
            a.len(),
            b.len()
        )));
    }
    let msd = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64;
    Ok(1.0 / (1.0 + msd.sqrt()))
}
