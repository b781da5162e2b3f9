//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::path::Path;

use bvpp_core::bems::TariffSet;
use bvpp_core::config::ScenarioConfig;
use bvpp_core::grid::TimeGrid;
use bvpp_core::profile::{ApplianceSpec, HouseholdModel};
use bvpp_core::{Scenario, Schedule};

/// Hourly retail, feed-in and market prices for one day.
pub const TARIFFS: &str = r#"
[tariffs]
tou = [0.12, 0.12, 0.12, 0.12, 0.12, 0.12, 0.12, 0.25, 0.25, 0.25, 0.25, 0.25,
       0.25, 0.25, 0.25, 0.25, 0.50, 0.50, 0.50, 0.50, 0.50, 0.25, 0.12, 0.12]
fit = [0.03, 0.03, 0.03, 0.03, 0.03, 0.03, 0.07, 0.07, 0.07, 0.07, 0.05, 0.05,
       0.05, 0.05, 0.05, 0.07, 0.16, 0.16, 0.16, 0.16, 0.16, 0.07, 0.03, 0.03]
market_price = [0.06, 0.06, 0.06, 0.06, 0.06, 0.06, 0.14, 0.14, 0.14, 0.14, 0.10, 0.10,
                0.10, 0.10, 0.10, 0.14, 0.32, 0.32, 0.32, 0.32, 0.32, 0.14, 0.06, 0.06]
"#;

pub const SOLAR: &str = r#"
[solar]
coefficients = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.131, 0.383, 0.609, 0.793, 0.924, 0.991,
                0.991, 0.924, 0.793, 0.609, 0.383, 0.131, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
"#;

pub fn scenario(toml: &str) -> Scenario {
    ScenarioConfig::from_toml_str(toml)
        .unwrap()
        .resolve(Path::new(env!("CARGO_MANIFEST_DIR")))
        .unwrap()
}

/// Case 1 analog: `count` buildings with solar and a feeder battery, one hourly day.
pub fn case1_scenario(count: usize, seed: u64) -> Scenario {
    scenario(&format!(
        r#"
seed = {seed}
{TARIFFS}
{SOLAR}
[bess]
capacity_kwh = 100.0
max_charge_kw = 25.0
max_discharge_kw = 25.0
eta_c = 0.95
eta_d = 0.95

[fleet]
count = {count}
inefficient_fraction = 0.3
solar_capacity_kw = [3.0, 8.0]
"#
    ))
}

/// Case 2 analog: `count` households over `days` hourly days, 30% planted inefficient.
pub fn case2_scenario(count: usize, days: usize, seed: u64) -> Scenario {
    scenario(&format!(
        r#"
seed = {seed}
{TARIFFS}
[grid]
num_days = {days}

[clustering]
clusters = 3
flag_k = 1.0
top_n = 3

[fleet]
count = {count}
inefficient_fraction = 0.3
"#
    ))
}

/// Import cost minus feed-in revenue, computed interval by interval from scratch.
pub fn objective(
    household: &HouseholdModel,
    schedule: &Schedule,
    solar: &[f64],
    tariffs: &TariffSet,
    grid: &TimeGrid,
) -> f64 {
    let mut load = vec![0.0; grid.len()];
    for a in &household.appliances {
        for (day, start) in schedule.days(&a.id).iter().enumerate() {
            if let Some(s) = start {
                let t0 = day * grid.intervals_per_day() + s;
                for v in &mut load[t0..t0 + a.duration] {
                    *v += a.rated_power_kw;
                }
            }
        }
    }
    let dt = grid.dt_hours();
    (0..grid.len())
        .map(|t| {
            let net = load[t] - solar[t];
            if net >= 0.0 {
                tariffs.tou[t] * net * dt
            } else {
                tariffs.fit[t] * net * dt
            }
        })
        .sum()
}

/// Minimum objective over every combination of feasible starts of the active shiftable
/// appliances (single-day schedules only).
pub fn brute_force_min(
    household: &HouseholdModel,
    activations: &Schedule,
    solar: &[f64],
    tariffs: &TariffSet,
    grid: &TimeGrid,
) -> f64 {
    assert_eq!(grid.num_days(), 1);
    let movable: Vec<&ApplianceSpec> = household
        .shiftable()
        .filter(|a| activations.start(&a.id, 0).is_some())
        .collect();
    let mut best = f64::INFINITY;
    let mut current = activations.clone();
    fn walk(
        k: usize,
        movable: &[&ApplianceSpec],
        current: &mut Schedule,
        best: &mut f64,
        eval: &dyn Fn(&Schedule) -> f64,
    ) {
        if k == movable.len() {
            *best = best.min(eval(current));
            return;
        }
        for s in movable[k].earliest_start..=movable[k].latest_start {
            if (s..s + movable[k].duration).any(|t| movable[k].curfew.contains(&t)) {
                continue;
            }
            current.starts.get_mut(&movable[k].id).unwrap()[0] = Some(s);
            walk(k + 1, movable, current, best, eval);
        }
    }
    let eval = |s: &Schedule| objective(household, s, solar, tariffs, grid);
    walk(0, &movable, &mut current, &mut best, &eval);
    best
}

/// Best revenue over every sequence of whole-step SOC moves for a lossless battery.
pub fn brute_force_bess(
    surplus: &[f64],
    prices: &[f64],
    capacity_steps: i64,
    step: f64,
    max_rate_kw: f64,
    dt: f64,
) -> f64 {
    fn walk(
        t: usize,
        soc: i64,
        acc: f64,
        ctx: &(&[f64], &[f64], i64, f64, f64, f64),
        best: &mut f64,
    ) {
        let (surplus, prices, cap, step, rate, dt) = *ctx;
        if t == surplus.len() {
            *best = best.max(acc);
            return;
        }
        for delta in -cap..=cap {
            let next = soc + delta;
            if !(0..=cap).contains(&next) {
                continue;
            }
            let energy = delta as f64 * step;
            let (charge, discharge) = if delta >= 0 { (energy / dt, 0.0) } else { (0.0, -energy / dt) };
            if charge > rate.min(surplus[t]) + 1e-9 || discharge > rate + 1e-9 {
                continue;
            }
            let sold = (surplus[t] - charge + discharge) * dt;
            walk(t + 1, next, acc + prices[t] * sold, ctx, best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    let ctx = (surplus, prices, capacity_steps, step, max_rate_kw, dt);
    walk(0, 0, 0.0, &ctx, &mut best);
    best
}
