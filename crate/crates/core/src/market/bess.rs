//! Feeder battery dispatch by dynamic programming over a state-of-charge lattice.
//!
//! The battery only ever charges from fleet surplus and the operator is a price taker, so
//! the bid in each interval is whatever surplus is not stored plus whatever is discharged.
//! The lattice is anchored at the initial state of charge and spaced by a fixed energy
//! step; SOC levels outside `[soc_min, soc_max]` are dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Tolerance (kWh or kW) when checking lattice transitions against rate and surplus limits.
const FEAS_TOL: f64 = 1e-9;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BessSpec {
    pub capacity_kwh: f64,
    pub max_charge_kw: f64,
    pub max_discharge_kw: f64,
    pub eta_c: f64,
    pub eta_d: f64,
    pub soc_min_kwh: f64,
    pub soc_max_kwh: f64,
    pub soc_init_kwh: f64,
}

impl BessSpec {
    /// Lossless battery usable over its full capacity, starting empty.
    pub fn lossless(capacity_kwh: f64, max_rate_kw: f64) -> Self {
        Self {
            capacity_kwh,
            max_charge_kw: max_rate_kw,
            max_discharge_kw: max_rate_kw,
            eta_c: 1.0,
            eta_d: 1.0,
            soc_min_kwh: 0.0,
            soc_max_kwh: capacity_kwh,
            soc_init_kwh: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InfeasibleSpec(m));
        let finite = [
            self.capacity_kwh,
            self.max_charge_kw,
            self.max_discharge_kw,
            self.eta_c,
            self.eta_d,
            self.soc_min_kwh,
            self.soc_max_kwh,
            self.soc_init_kwh,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return fail("all battery parameters must be finite".into());
        }
        if self.capacity_kwh <= 0.0 {
            return fail(format!("capacity {} must be > 0", self.capacity_kwh));
        }
        if self.max_charge_kw <= 0.0 || self.max_discharge_kw <= 0.0 {
            return fail("charge and discharge rates must be > 0".into());
        }
        for (name, eta) in [("eta_c", self.eta_c), ("eta_d", self.eta_d)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return fail(format!("{name}={eta} must lie in (0, 1]"));
            }
        }
        if !(0.0 <= self.soc_min_kwh
            && self.soc_min_kwh < self.soc_max_kwh
            && self.soc_max_kwh <= self.capacity_kwh)
        {
            return fail(format!(
                "need 0 <= soc_min ({}) < soc_max ({}) <= capacity ({})",
                self.soc_min_kwh, self.soc_max_kwh, self.capacity_kwh
            ));
        }
        if !(self.soc_min_kwh..=self.soc_max_kwh).contains(&self.soc_init_kwh) {
            return fail(format!(
                "soc_init {} outside [{}, {}]",
                self.soc_init_kwh, self.soc_min_kwh, self.soc_max_kwh
            ));
        }
        Ok(())
    }
}

/// SOC lattice resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lattice {
    /// `n` levels spanning `[soc_min, soc_max]`, i.e. a step of `(soc_max - soc_min) / (n - 1)`.
    Levels(usize),
    /// Fixed energy step in kWh.
    Step(f64),
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice::Levels(201)
    }
}

impl Lattice {
    fn step(&self, bess: &BessSpec) -> Result<f64> {
        match *self {
            Lattice::Levels(n) if n >= 2 => Ok((bess.soc_max_kwh - bess.soc_min_kwh) / (n - 1) as f64),
            Lattice::Levels(n) => Err(Error::InvalidParameter(format!(
                "SOC lattice needs at least 2 levels, got {n}"
            ))),
            Lattice::Step(s) if s.is_finite() && s > 0.0 => Ok(s),
            Lattice::Step(s) => Err(Error::InvalidParameter(format!("SOC step {s} must be > 0"))),
        }
    }

    /// Energy levels (ascending) and the index of `soc_init`.
    pub fn levels(&self, bess: &BessSpec) -> Result<(Vec<f64>, usize)> {
        let step = self.step(bess)?;
        let below = ((bess.soc_init_kwh - bess.soc_min_kwh) / step + FEAS_TOL).floor() as usize;
        let above = ((bess.soc_max_kwh - bess.soc_init_kwh) / step + FEAS_TOL).floor() as usize;
        let levels = (0..=below + above)
            .map(|i| {
                let k = i as f64 - below as f64;
                (bess.soc_init_kwh + k * step).clamp(bess.soc_min_kwh, bess.soc_max_kwh)
            })
            .collect();
        Ok((levels, below))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchPlan {
    /// kW per interval.
    pub charge: Vec<f64>,
    /// kW per interval.
    pub discharge: Vec<f64>,
    /// kWh at each interval boundary; `soc[0]` is the initial state.
    pub soc: Vec<f64>,
}

/// Quantity-only day-ahead bids, kWh per interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidSeries {
    pub quantity: Vec<f64>,
}

impl BidSeries {
    /// Bid energy straight from surplus, no storage.
    pub fn pass_through(surplus: &[f64], dt_hours: f64) -> Self {
        Self {
            quantity: surplus.iter().map(|s| s * dt_hours).collect(),
        }
    }

    pub fn revenue(&self, prices: &[f64]) -> f64 {
        self.quantity.iter().zip(prices).map(|(q, p)| q * p).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BessDispatch {
    pub plan: DispatchPlan,
    pub bids: BidSeries,
}

/// One lattice move: energy change `delta` (kWh) converted to the rates that realize it.
/// Returns `(charge_kw, discharge_kw)` or `None` if the move breaks a limit.
fn transition(delta: f64, surplus_kw: f64, bess: &BessSpec, dt: f64) -> Option<(f64, f64)> {
    if delta > 0.0 {
        let charge = delta / (bess.eta_c * dt);
        let limit = bess.max_charge_kw.min(surplus_kw);
        (charge <= limit + FEAS_TOL).then(|| (charge.min(surplus_kw), 0.0))
    } else if delta < 0.0 {
        let discharge = -delta * bess.eta_d / dt;
        (discharge <= bess.max_discharge_kw + FEAS_TOL).then_some((0.0, discharge))
    } else {
        Some((0.0, 0.0))
    }
}

/// Maximizes market revenue of the bids over the horizon.
///
/// Ties in revenue prefer the lower next-interval SOC.
pub fn optimize_bess(
    grid: &TimeGrid,
    surplus: &[f64],
    prices: &[f64],
    bess: &BessSpec,
    lattice: &Lattice,
) -> Result<BessDispatch> {
    bess.validate()?;
    grid.check_len("surplus", surplus.len())?;
    grid.check_len("market prices", prices.len())?;
    if let Some(s) = surplus.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::InvalidParameter(format!("surplus {s} must be finite and >= 0")));
    }
    let dt = grid.dt_hours();
    let (levels, init) = lattice.levels(bess)?;
    let n_levels = levels.len();
    let horizon = surplus.len();
    let step = lattice.step(bess)?;
    let max_up = ((bess.max_charge_kw * bess.eta_c * dt) / step + 1.0).ceil() as usize;
    let max_down = ((bess.max_discharge_kw * dt / bess.eta_d) / step + 1.0).ceil() as usize;

    let mut value_next = vec![0.0; n_levels];
    let mut value = vec![0.0; n_levels];
    let mut policy = vec![0u32; horizon * n_levels];
    for t in (0..horizon).rev() {
        for i in 0..n_levels {
            let lo = i.saturating_sub(max_down);
            let hi = (i + max_up).min(n_levels - 1);
            let mut best = f64::NEG_INFINITY;
            let mut best_j = i;
            for j in lo..=hi {
                let Some((c, d)) = transition(levels[j] - levels[i], surplus[t], bess, dt) else {
                    continue;
                };
                let v = prices[t] * (surplus[t] - c + d) * dt + value_next[j];
                if v > best + TIE_EPS {
                    best = v;
                    best_j = j;
                }
            }
            value[i] = best;
            policy[t * n_levels + i] = best_j as u32;
        }
        std::mem::swap(&mut value, &mut value_next);
    }

    let mut plan = DispatchPlan {
        charge: Vec::with_capacity(horizon),
        discharge: Vec::with_capacity(horizon),
        soc: Vec::with_capacity(horizon + 1),
    };
    let mut quantity = Vec::with_capacity(horizon);
    let mut i = init;
    plan.soc.push(levels[i]);
    for t in 0..horizon {
        let j = policy[t * n_levels + i] as usize;
        let (c, d) = transition(levels[j] - levels[i], surplus[t], bess, dt)
            .expect("policy only holds feasible moves");
        plan.charge.push(c);
        plan.discharge.push(d);
        plan.soc.push(levels[j]);
        quantity.push(((surplus[t] - c + d) * dt).max(0.0));
        i = j;
    }
    Ok(BessDispatch {
        plan,
        bids: BidSeries { quantity },
    })
}
