use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::grid::{LoadProfile, TimeGrid};
use crate::profile::HouseholdModel;
use crate::rng::appliance_day_rng;
use crate::schedule::Schedule;

/// Draws the habitual run schedule of a household over the grid's horizon.
///
/// Each appliance runs at most once per day. On an active day the start is the preferred
/// start plus a rounded Gaussian jitter, clamped to the allowed window, then moved to the
/// nearest start whose run clears the curfew.
pub fn simulate_schedule(model: &HouseholdModel, grid: &TimeGrid) -> Result<Schedule> {
    model.validate(grid)?;
    let mut starts = BTreeMap::new();
    for a in &model.appliances {
        let habit = model.lifestyle_of(&a.id);
        let jitter = if habit.start_jitter > 0.0 {
            Some(Normal::new(0.0, habit.start_jitter).map_err(|e| Error::InvalidHousehold {
                household: model.id.clone(),
                reason: e.to_string(),
            })?)
        } else {
            None
        };
        let mut days = Vec::with_capacity(grid.num_days());
        for day in 0..grid.num_days() {
            let mut rng = appliance_day_rng(model.seed, &a.id, day);
            // Both draws are always taken so the stream layout is fixed.
            let u: f64 = rng.gen();
            let offset = jitter.map(|n| n.sample(&mut rng).round()).unwrap_or(0.0);
            if u >= habit.activation_probability {
                days.push(None);
                continue;
            }
            let target = (a.preferred_start as f64 + offset)
                .clamp(a.earliest_start as f64, a.latest_start as f64) as usize;
            days.push(Some(a.nearest_feasible(target)?));
        }
        starts.insert(a.id.clone(), days);
    }
    Ok(Schedule { starts })
}

/// Per-appliance load profiles, keyed by appliance id.
pub fn simulate_household(
    model: &HouseholdModel,
    grid: &TimeGrid,
) -> Result<BTreeMap<String, LoadProfile>> {
    Ok(simulate_schedule(model, grid)?.appliance_profiles(model, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{night_curfew, ApplianceSpec, Lifestyle};

    fn household(appliances: Vec<(ApplianceSpec, Lifestyle)>) -> HouseholdModel {
        HouseholdModel {
            id: "h".into(),
            lifestyle: appliances.iter().map(|(a, l)| (a.id.clone(), *l)).collect(),
            appliances: appliances.into_iter().map(|(a, _)| a).collect(),
            solar_capacity_kw: 0.0,
            seed: 42,
        }
    }

    #[test]
    fn never_active_gives_zero_profile() {
        let g = TimeGrid::hourly(5).unwrap();
        let h = household(vec![(
            ApplianceSpec::shiftable("wm", "washing machine", 0.5, 2, (0, 20), 10),
            Lifestyle {
                activation_probability: 0.0,
                start_jitter: 3.0,
            },
        )]);
        let p = simulate_household(&h, &g).unwrap();
        assert!(p["wm"].values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forced_start_places_the_run() {
        let g = TimeGrid::hourly(1).unwrap();
        let h = household(vec![(
            ApplianceSpec::shiftable("x", "oven", 2.0, 2, (10, 10), 10),
            Lifestyle::always(),
        )]);
        let p = simulate_household(&h, &g).unwrap();
        let mut expected = vec![0.0; 24];
        expected[10] = 2.0;
        expected[11] = 2.0;
        assert_eq!(p["x"].values(), expected.as_slice());
    }

    #[test]
    fn same_seed_same_bits() {
        let g = TimeGrid::hourly(30).unwrap();
        let h = household(vec![
            (
                ApplianceSpec::shiftable("wm", "washing machine", 0.5, 2, (0, 22), 18),
                Lifestyle {
                    activation_probability: 0.6,
                    start_jitter: 2.5,
                },
            ),
            (
                ApplianceSpec::fixed("tv", "tv", 0.15, 4, 18),
                Lifestyle {
                    activation_probability: 0.9,
                    start_jitter: 1.0,
                },
            ),
        ]);
        let a = simulate_household(&h, &g).unwrap();
        let b = simulate_household(&h, &g).unwrap();
        for (id, p) in &a {
            let bits_a: Vec<u64> = p.values().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u64> = b[id].values().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
    }

    #[test]
    fn non_shiftable_never_moves() {
        let g = TimeGrid::hourly(200).unwrap();
        let h = household(vec![(
            ApplianceSpec::fixed("tv", "tv", 0.15, 4, 18),
            Lifestyle {
                activation_probability: 0.7,
                start_jitter: 5.0,
            },
        )]);
        let s = simulate_schedule(&h, &g).unwrap();
        assert!(s.days("tv").iter().flatten().all(|&st| st == 18));
    }

    #[test]
    fn jittered_starts_respect_curfew() {
        let g = TimeGrid::hourly(300).unwrap();
        let wm = ApplianceSpec::shiftable("wm", "washing machine", 0.5, 2, (0, 22), 21)
            .with_curfew(night_curfew(&g));
        let h = household(vec![(
            wm.clone(),
            Lifestyle {
                activation_probability: 1.0,
                start_jitter: 4.0,
            },
        )]);
        let s = simulate_schedule(&h, &g).unwrap();
        assert!(s.days("wm").iter().flatten().all(|&st| wm.is_feasible_start(st)));
    }

    #[test]
    fn adding_an_appliance_does_not_perturb_others() {
        let g = TimeGrid::hourly(10).unwrap();
        let wm = (
            ApplianceSpec::shiftable("wm", "washing machine", 0.5, 2, (0, 22), 12),
            Lifestyle {
                activation_probability: 0.5,
                start_jitter: 3.0,
            },
        );
        let dw = (
            ApplianceSpec::shiftable("dw", "dish washer", 1.2, 2, (0, 22), 20),
            Lifestyle {
                activation_probability: 0.5,
                start_jitter: 3.0,
            },
        );
        let one = simulate_schedule(&household(vec![wm.clone()]), &g).unwrap();
        let two = simulate_schedule(&household(vec![dw, wm]), &g).unwrap();
        assert_eq!(one.days("wm"), two.days("wm"));
    }
}
