use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::LoadProfile;

/// Daily averages over the whole horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HouseholdFeatures {
    /// kWh per day.
    pub avg_daily_energy: f64,
    /// $ per day, TOU on gross consumption.
    pub avg_daily_cost: f64,
}

impl HouseholdFeatures {
    pub fn as_point(&self) -> Vec<f64> {
        vec![self.avg_daily_energy, self.avg_daily_cost]
    }
}

/// `tou` must cover the consumption profile's full horizon.
pub fn compute_features(consumption: &LoadProfile, tou: &[f64]) -> Result<HouseholdFeatures> {
    let grid = consumption.grid();
    grid.check_len("tou tariff", tou.len())?;
    let dt = grid.dt_hours();
    let days = grid.num_days() as f64;
    let mut energy = 0.0;
    let mut cost = 0.0;
    for (c, p) in consumption.values().iter().zip(tou) {
        energy += c * dt;
        cost += c * p * dt;
    }
    Ok(HouseholdFeatures {
        avg_daily_energy: energy / days,
        avg_daily_cost: cost / days,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use proptest::prelude::*;

    #[test]
    fn flat_kilowatt() {
        let g = TimeGrid::hourly(30).unwrap();
        let c = LoadProfile::new(g, vec![1.0; g.len()]).unwrap();
        let f = compute_features(&c, &vec![0.25; g.len()]).unwrap();
        assert!((f.avg_daily_energy - 24.0).abs() < 1e-9);
        assert!((f.avg_daily_cost - 6.0).abs() < 1e-9);
    }

    #[test]
    fn tariff_length_checked() {
        let g = TimeGrid::hourly(2).unwrap();
        assert!(compute_features(&LoadProfile::zeros(g), &[0.1; 24]).is_err());
    }

    proptest! {
        #[test]
        fn matches_summation(v in proptest::collection::vec(0.0f64..5.0, 96), tou in proptest::collection::vec(0.0f64..1.0, 96)) {
            // 30-minute grid, 2 days
            let g = TimeGrid::new(30, 2).unwrap();
            let f = compute_features(&LoadProfile::new(g, v.clone()).unwrap(), &tou).unwrap();
            let mut e = 0.0;
            let mut c = 0.0;
            for i in 0..96 {
                e += v[i] / 2.0;
                c += v[i] * tou[i] / 2.0;
            }
            prop_assert!((f.avg_daily_energy - e / 2.0).abs() <= 1e-9);
            prop_assert!((f.avg_daily_cost - c / 2.0).abs() <= 1e-9);
        }
    }
}
