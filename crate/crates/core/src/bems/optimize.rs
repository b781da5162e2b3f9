//! Per-building appliance shifting against the import/export bill.
//!
//! Days are independent: no run crosses midnight, so each day is solved on its own.
//! A day is solved by full enumeration of the active shiftable appliances' feasible starts
//! when the cross-product is small enough, otherwise by coordinate descent from the
//! habitual starts. Appliances are always visited in id order and candidates in ascending
//! start order; only strict improvements are accepted, so ties resolve to the
//! lexicographically smallest (appliance id, start) schedule.

use serde::{Deserialize, Serialize};

use crate::bems::cost::interval_costs;
use crate::bems::{cost_breakdown, CostBreakdown, TariffSet};
use crate::error::{Error, Result};
use crate::grid::{LoadProfile, TimeGrid};
use crate::profile::{ApplianceSpec, HouseholdModel};
use crate::schedule::{add_runs, Schedule};

/// Improvements smaller than this ($) are treated as ties.
const IMPROVEMENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Largest per-day cross-product of candidate starts solved by enumeration.
    pub exhaustive_limit: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            exhaustive_limit: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// No active shiftable appliance that day.
    Fixed,
    Exhaustive,
    CoordinateDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOutcome {
    pub schedule: Schedule,
    pub cost: CostBreakdown,
    pub default_cost: CostBreakdown,
    pub methods: Vec<SolveMethod>,
}

/// Shifts the active shiftable appliances of `activations` to minimize import cost minus
/// feed-in revenue. Non-shiftable runs and idle days are kept as they are.
pub fn optimize_schedule(
    household: &HouseholdModel,
    activations: &Schedule,
    solar: &LoadProfile,
    tariffs: &TariffSet,
) -> Result<(Schedule, CostBreakdown)> {
    let out = optimize_schedule_with(
        household,
        activations,
        solar,
        tariffs,
        &OptimizerOptions::default(),
    )?;
    Ok((out.schedule, out.cost))
}

pub fn optimize_schedule_with(
    household: &HouseholdModel,
    activations: &Schedule,
    solar: &LoadProfile,
    tariffs: &TariffSet,
    options: &OptimizerOptions,
) -> Result<ScheduleOutcome> {
    let grid = *solar.grid();
    tariffs.check_grid(&grid)?;
    for a in &household.appliances {
        let days = activations.days(&a.id).len();
        if days != grid.num_days() {
            return Err(Error::GridMismatch(format!(
                "activations for '{}' cover {days} days, grid has {}",
                a.id,
                grid.num_days()
            )));
        }
    }

    let mut shiftable: Vec<&ApplianceSpec> = household.shiftable().collect();
    shiftable.sort_by(|a, b| a.id.cmp(&b.id));
    let candidates: Vec<Vec<usize>> = shiftable.iter().map(|a| a.feasible_starts()).collect();
    for (a, c) in shiftable.iter().zip(&candidates) {
        if c.is_empty() {
            return Err(Error::InfeasibleWindow {
                appliance: a.id.clone(),
                reason: format!("household '{}': no start clears the curfew", household.id),
            });
        }
    }

    // Everything that does not move: non-shiftable runs.
    let mut fixed = vec![0.0; grid.len()];
    for a in household.appliances.iter().filter(|a| !a.is_shiftable()) {
        add_runs(&mut fixed, a, activations.days(&a.id), &grid);
    }

    let mut schedule = activations.clone();
    let mut methods = Vec::with_capacity(grid.num_days());
    for day in 0..grid.num_days() {
        let active: Vec<usize> = (0..shiftable.len())
            .filter(|&i| activations.start(&shiftable[i].id, day).is_some())
            .collect();
        if active.is_empty() {
            methods.push(SolveMethod::Fixed);
            continue;
        }
        let range = grid.day_range(day);
        let problem = DayProblem {
            appliances: active.iter().map(|&i| shiftable[i]).collect(),
            candidates: active.iter().map(|&i| candidates[i].as_slice()).collect(),
            base: &fixed[range.clone()],
            solar: &solar.values()[range.clone()],
            tou: &tariffs.tou[range.clone()],
            fit: &tariffs.fit[range],
            dt_hours: grid.dt_hours(),
        };
        let combos = problem
            .candidates
            .iter()
            .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64));
        let (starts, method) = match combos {
            Some(n) if n <= options.exhaustive_limit => {
                (problem.enumerate(), SolveMethod::Exhaustive)
            }
            _ => {
                let init: Vec<usize> = active
                    .iter()
                    .map(|&i| {
                        let a = shiftable[i];
                        let habit = activations.start(&a.id, day).unwrap_or(a.preferred_start);
                        a.nearest_feasible(habit)
                    })
                    .collect::<Result<_>>()?;
                (problem.coordinate_descent(init), SolveMethod::CoordinateDescent)
            }
        };
        for (&i, s) in active.iter().zip(starts) {
            schedule
                .starts
                .get_mut(&shiftable[i].id)
                .expect("activation present")[day] = Some(s);
        }
        methods.push(method);
    }

    let default_cost = cost_breakdown(&activations.consumption(household, &grid), solar, tariffs)?;
    let cost = cost_breakdown(&schedule.consumption(household, &grid), solar, tariffs)?;
    Ok(ScheduleOutcome {
        schedule,
        cost,
        default_cost,
        methods,
    })
}

struct DayProblem<'a> {
    appliances: Vec<&'a ApplianceSpec>,
    candidates: Vec<&'a [usize]>,
    base: &'a [f64],
    solar: &'a [f64],
    tou: &'a [f64],
    fit: &'a [f64],
    dt_hours: f64,
}

impl DayProblem<'_> {
    fn objective(&self, starts: &[usize], load: &mut Vec<f64>) -> f64 {
        load.clear();
        load.extend_from_slice(self.base);
        for (a, &s) in self.appliances.iter().zip(starts) {
            for v in &mut load[s..s + a.duration] {
                *v += a.rated_power_kw;
            }
        }
        let (c_tou, r_fi) = interval_costs(load, self.solar, self.tou, self.fit, self.dt_hours);
        c_tou - r_fi
    }

    /// Mixed-radix walk over the cross-product, first appliance most significant.
    fn enumerate(&self) -> Vec<usize> {
        let n = self.appliances.len();
        let mut idx = vec![0usize; n];
        let mut starts: Vec<usize> = self.candidates.iter().map(|c| c[0]).collect();
        let mut load = Vec::with_capacity(self.base.len());
        let mut best = starts.clone();
        let mut best_f = self.objective(&starts, &mut load);
        loop {
            let mut k = n;
            loop {
                if k == 0 {
                    return best;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.candidates[k].len() {
                    starts[k] = self.candidates[k][idx[k]];
                    break;
                }
                idx[k] = 0;
                starts[k] = self.candidates[k][0];
            }
            let f = self.objective(&starts, &mut load);
            if f < best_f - IMPROVEMENT_EPS {
                best_f = f;
                best.copy_from_slice(&starts);
            }
        }
    }

    fn coordinate_descent(&self, mut starts: Vec<usize>) -> Vec<usize> {
        let mut load = Vec::with_capacity(self.base.len());
        let mut current = self.objective(&starts, &mut load);
        loop {
            let mut moved = false;
            for k in 0..starts.len() {
                let keep = starts[k];
                let mut best_start = keep;
                let mut best_f = current;
                for &s in self.candidates[k] {
                    if s == keep {
                        continue;
                    }
                    starts[k] = s;
                    let f = self.objective(&starts, &mut load);
                    if f < best_f - IMPROVEMENT_EPS {
                        best_f = f;
                        best_start = s;
                    }
                }
                starts[k] = best_start;
                if best_start != keep {
                    current = best_f;
                    moved = true;
                }
            }
            if !moved {
                return starts;
            }
        }
    }
}

/// Re-draws every active shiftable start uniformly from its feasible starts. Baseline
/// sampler for dominance checks.
pub fn random_feasible_schedule<R: rand::Rng>(
    household: &HouseholdModel,
    activations: &Schedule,
    grid: &TimeGrid,
    rng: &mut R,
) -> Schedule {
    let mut out = activations.clone();
    for a in household.shiftable() {
        let cands = a.feasible_starts();
        if let Some(days) = out.starts.get_mut(&a.id) {
            for d in days.iter_mut().take(grid.num_days()) {
                if d.is_some() && !cands.is_empty() {
                    *d = Some(cands[rng.gen_range(0..cands.len())]);
                }
            }
        }
    }
    out
}
