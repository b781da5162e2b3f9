//! Synthetic household fleets.
//!
//! Households come in three sizes (small, medium, large) with different appliance sets, so
//! daily energy use separates into three bands. A fixed share of households is planted with
//! inefficient habits: their shiftable appliances prefer the evening peak instead of cheap
//! hours. Light sleepers get a night curfew on noisy appliances and fall back to midday.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::profile::{night_curfew, ApplianceSpec, HouseholdModel, Lifestyle};
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetSpec {
    pub count: usize,
    #[serde(default)]
    pub inefficient_fraction: f64,
    /// Share of households with a 23:00-06:00 curfew on noisy appliances.
    #[serde(default = "default_noisy_fraction")]
    pub noisy_fraction: f64,
    /// Solar capacity drawn uniformly from `[lo, hi]` kW.
    #[serde(default)]
    pub solar_capacity_kw: [f64; 2],
    #[serde(default = "default_prefix")]
    pub id_prefix: String,
}

fn default_noisy_fraction() -> f64 {
    0.3
}

fn default_prefix() -> String {
    "h".into()
}

impl FleetSpec {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            inefficient_fraction: 0.0,
            noisy_fraction: default_noisy_fraction(),
            solar_capacity_kw: [0.0, 0.0],
            id_prefix: default_prefix(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("inefficient_fraction", self.inefficient_fraction),
            ("noisy_fraction", self.noisy_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("fleet.{name}"), format!("{v} outside [0, 1]")));
            }
        }
        let [lo, hi] = self.solar_capacity_kw;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return Err(Error::config(
                "fleet.solar_capacity_kw",
                format!("[{lo}, {hi}] must satisfy 0 <= lo <= hi"),
            ));
        }
        if self.id_prefix.is_empty() {
            return Err(Error::config("fleet.id_prefix", "must not be empty"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFleet {
    pub households: Vec<HouseholdModel>,
    /// Ids of households planted with inefficient timing.
    pub planted: BTreeSet<String>,
}

#[derive(Clone, Copy)]
enum Size {
    Small,
    Medium,
    Large,
}

struct Hours<'g>(&'g TimeGrid);

impl Hours<'_> {
    fn at(&self, hour: f64) -> usize {
        self.0.interval_of_hour(hour)
    }

    fn span(&self, hours: f64) -> usize {
        ((hours * 60.0 / f64::from(self.0.interval_minutes())).round() as usize).max(1)
    }
}

pub fn synthetic_fleet(spec: &FleetSpec, grid: &TimeGrid, seed: u64) -> Result<SyntheticFleet> {
    spec.validate()?;
    let width = spec.count.max(1).to_string().len().max(3);
    let ids: Vec<String> = (0..spec.count)
        .map(|i| format!("{}{:0width$}", spec.id_prefix, i + 1))
        .collect();

    let mut pick_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "fleet/planted"));
    let n_planted = (spec.inefficient_fraction * spec.count as f64).round() as usize;
    let mut order: Vec<usize> = (0..spec.count).collect();
    order.shuffle(&mut pick_rng);
    let planted: BTreeSet<String> = order[..n_planted].iter().map(|&i| ids[i].clone()).collect();

    let households = ids
        .iter()
        .map(|id| household(id, spec, grid, seed, planted.contains(id)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SyntheticFleet { households, planted })
}

fn household(id: &str, spec: &FleetSpec, grid: &TimeGrid, fleet_seed: u64, inefficient: bool) -> Result<HouseholdModel> {
    let seed = derive_seed(fleet_seed, id);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "layout"));
    let h = Hours(grid);
    let size = match rng.gen_range(0..3) {
        0 => Size::Small,
        1 => Size::Medium,
        _ => Size::Large,
    };
    // Non-shiftable load grows with the dwelling; shiftable appliances do not.
    let scale = match size {
        Size::Small => 1.0,
        Size::Medium => 2.0,
        Size::Large => 3.5,
    } * rng.gen_range(0.9..1.1);
    let light_sleeper = rng.gen::<f64>() < spec.noisy_fraction;
    let [lo, hi] = spec.solar_capacity_kw;
    let solar_capacity_kw = if hi > lo { rng.gen_range(lo..=hi) } else { lo };

    let mut appliances = Vec::new();
    let mut lifestyle = Vec::new();
    let mut fixed = |rng: &mut ChaCha8Rng, aid: &str, name: &str, kw: f64, hours: f64, starts: (u32, u32), p: f64| {
        let start = h.at(f64::from(rng.gen_range(starts.0..=starts.1)));
        let dur = h.span(hours).min(grid.intervals_per_day() - start);
        appliances.push(ApplianceSpec::fixed(aid, name, kw, dur, start));
        lifestyle.push((
            aid.to_string(),
            Lifestyle {
                activation_probability: p,
                start_jitter: 0.0,
            },
        ));
    };
    fixed(&mut rng, "lights", "lights", 0.3 * scale, 5.0, (17, 19), 1.0);
    fixed(&mut rng, "tv", "tv", 0.15 * scale, 3.0, (18, 20), 0.9);
    fixed(&mut rng, "stove", "cooking stove", 2.0 * scale, 1.0, (17, 19), 0.9);
    fixed(&mut rng, "computer", "computer", 0.15 * scale, 3.0, (8, 18), 0.8);
    fixed(&mut rng, "water_heater", "water heater", 2.5 * scale, 1.0, (5, 6), 1.0);

    let mut shiftable = vec![
        ("washing_machine", "washing machine", 0.5, 2.0, 0.5, true),
        ("dish_washer", "dish washer", 1.2, 2.0, 0.7, true),
    ];
    if !matches!(size, Size::Small) {
        shiftable.push(("clothes_dryer", "clothes dryer", 2.5, 1.0, 0.4, true));
        shiftable.push(("oven", "oven", 2.0, 1.0, 0.5, false));
    }
    if matches!(size, Size::Large) {
        shiftable.push(("pool_pump", "pool pump", 1.0, 3.0, 0.7, false));
    }
    let curfew = night_curfew(grid);
    for (aid, name, kw, hours, p, noisy) in shiftable {
        let dur = h.span(hours);
        let latest = grid.intervals_per_day() - dur;
        let restricted = noisy && light_sleeper;
        let hour = if inefficient {
            rng.gen_range(17.0..19.0)
        } else if restricted {
            rng.gen_range(10.0..13.0)
        } else {
            rng.gen_range(0.0..3.0)
        };
        let mut app = ApplianceSpec::shiftable(aid, name, kw, dur, (0, latest), h.at(hour).min(latest));
        if restricted {
            app = app.with_curfew(curfew.iter().copied());
        }
        appliances.push(app);
        lifestyle.push((
            aid.to_string(),
            Lifestyle {
                activation_probability: p,
                start_jitter: h.span(1.0) as f64,
            },
        ));
    }

    let model = HouseholdModel {
        id: id.to_string(),
        appliances,
        lifestyle: lifestyle.into_iter().collect(),
        solar_capacity_kw,
        seed,
    };
    model.validate(grid)?;
    Ok(model)
}
