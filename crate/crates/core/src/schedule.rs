use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{LoadProfile, TimeGrid};
use crate::profile::{ApplianceSpec, HouseholdModel};

/// Start interval-of-day per appliance per day; `None` means the appliance is idle that day.
///
/// The habitual schedule produced by the generator and the optimized schedule produced by
/// the building scheduler share this type.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Schedule {
    pub starts: BTreeMap<String, Vec<Option<usize>>>,
}

impl Schedule {
    pub fn days(&self, id: &str) -> &[Option<usize>] {
        self.starts.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn start(&self, id: &str, day: usize) -> Option<usize> {
        self.days(id).get(day).copied().flatten()
    }

    /// Power profile of one appliance under this schedule.
    pub fn appliance_profile(&self, spec: &ApplianceSpec, grid: &TimeGrid) -> LoadProfile {
        let mut profile = LoadProfile::zeros(*grid);
        add_runs(profile.values_mut(), spec, self.days(&spec.id), grid);
        profile
    }

    /// Per-appliance profiles keyed by appliance id.
    pub fn appliance_profiles(
        &self,
        household: &HouseholdModel,
        grid: &TimeGrid,
    ) -> BTreeMap<String, LoadProfile> {
        household
            .appliances
            .iter()
            .map(|a| (a.id.clone(), self.appliance_profile(a, grid)))
            .collect()
    }

    /// Total household consumption, summed in appliance declaration order.
    pub fn consumption(&self, household: &HouseholdModel, grid: &TimeGrid) -> LoadProfile {
        let mut profile = LoadProfile::zeros(*grid);
        for a in &household.appliances {
            add_runs(profile.values_mut(), a, self.days(&a.id), grid);
        }
        profile
    }

    /// Recovers run starts from per-appliance profiles (first non-zero interval of each day).
    pub fn from_profiles(
        household: &HouseholdModel,
        profiles: &BTreeMap<String, LoadProfile>,
        grid: &TimeGrid,
    ) -> Result<Self> {
        let mut starts = BTreeMap::new();
        for a in &household.appliances {
            let profile = profiles.get(&a.id).ok_or_else(|| Error::InvalidHousehold {
                household: household.id.clone(),
                reason: format!("no profile column for appliance '{}'", a.id),
            })?;
            grid.check_len(&a.id, profile.values().len())?;
            let days = (0..grid.num_days())
                .map(|d| {
                    let day = &profile.values()[grid.day_range(d)];
                    day.iter().position(|&v| v > 0.0)
                })
                .collect();
            starts.insert(a.id.clone(), days);
        }
        Ok(Self { starts })
    }
}

pub(crate) fn add_runs(
    values: &mut [f64],
    spec: &ApplianceSpec,
    days: &[Option<usize>],
    grid: &TimeGrid,
) {
    for (day, start) in days.iter().enumerate() {
        if let Some(s) = start {
            let base = grid.day_range(day).start + s;
            for v in &mut values[base..base + spec.duration] {
                *v += spec.rated_power_kw;
            }
        }
    }
}
