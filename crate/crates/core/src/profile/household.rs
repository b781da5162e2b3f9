use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::profile::appliance::ApplianceSpec;

/// Occupant habit for one appliance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lifestyle {
    /// Probability the appliance runs on a given day.
    pub activation_probability: f64,
    /// Standard deviation of the start time around `preferred_start`, in intervals.
    pub start_jitter: f64,
}

impl Lifestyle {
    pub fn always() -> Self {
        Self {
            activation_probability: 1.0,
            start_jitter: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdModel {
    pub id: String,
    pub appliances: Vec<ApplianceSpec>,
    /// Keyed by appliance id.
    pub lifestyle: BTreeMap<String, Lifestyle>,
    #[serde(default)]
    pub solar_capacity_kw: f64,
    pub seed: u64,
}

impl HouseholdModel {
    pub fn appliance(&self, id: &str) -> Option<&ApplianceSpec> {
        self.appliances.iter().find(|a| a.id == id)
    }

    pub fn lifestyle_of(&self, id: &str) -> Lifestyle {
        self.lifestyle.get(id).copied().unwrap_or_else(Lifestyle::always)
    }

    pub fn shiftable(&self) -> impl Iterator<Item = &ApplianceSpec> {
        self.appliances.iter().filter(|a| a.is_shiftable())
    }

    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        let fail = |reason: String| Error::InvalidHousehold {
            household: self.id.clone(),
            reason,
        };
        if self.id.is_empty() {
            return Err(fail("empty household id".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &self.appliances {
            if !seen.insert(a.id.as_str()) {
                return Err(fail(format!("duplicate appliance id '{}'", a.id)));
            }
            a.validate(grid).map_err(|e| match e {
                Error::InvalidHousehold { reason, .. } => fail(reason),
                other => other,
            })?;
            if a.feasible_starts().is_empty() {
                return Err(Error::InfeasibleWindow {
                    appliance: a.id.clone(),
                    reason: format!("household '{}': window entirely inside curfew", self.id),
                });
            }
        }
        for (id, l) in &self.lifestyle {
            if !seen.contains(id.as_str()) {
                return Err(fail(format!("lifestyle entry for unknown appliance '{id}'")));
            }
            if !(0.0..=1.0).contains(&l.activation_probability) {
                return Err(fail(format!(
                    "activation_probability {} for '{id}' outside [0, 1]",
                    l.activation_probability
                )));
            }
            if !(l.start_jitter.is_finite() && l.start_jitter >= 0.0) {
                return Err(fail(format!("start_jitter {} for '{id}' must be >= 0", l.start_jitter)));
            }
        }
        if !(self.solar_capacity_kw.is_finite() && self.solar_capacity_kw >= 0.0) {
            return Err(fail(format!(
                "solar_capacity_kw={} must be >= 0",
                self.solar_capacity_kw
            )));
        }
        Ok(())
    }
}
