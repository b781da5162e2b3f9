use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{NetLoadProfile, TimeGrid};

/// Fleet surplus and each building's share of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// kW per interval.
    pub surplus: Vec<f64>,
    /// kWh per interval, per building.
    pub exports: BTreeMap<String, Vec<f64>>,
}

/// Sums exports only; importing buildings never offset exporting ones.
pub fn aggregate_surplus(grid: &TimeGrid, net_loads: &[(String, NetLoadProfile)]) -> Result<Aggregate> {
    let dt = grid.dt_hours();
    let mut surplus = vec![0.0; grid.len()];
    let mut exports = BTreeMap::new();
    for (id, net) in net_loads {
        if net.grid() != grid {
            return Err(Error::GridMismatch(format!("net load of '{id}' is on a different grid")));
        }
        let export: Vec<f64> = net.values().iter().map(|v| (-v).max(0.0) * dt).collect();
        for (s, v) in surplus.iter_mut().zip(net.values()) {
            *s += (-v).max(0.0);
        }
        if exports.insert(id.clone(), export).is_some() {
            return Err(Error::InvalidParameter(format!("duplicate building id '{id}'")));
        }
    }
    Ok(Aggregate { surplus, exports })
}
