//! Autonomous building energy management: tariffs in, shifted schedule and net load out.

mod cost;
mod optimize;
mod tariff;

pub use cost::{cost_breakdown, net_load, CostBreakdown};
pub use optimize::{
    optimize_schedule, optimize_schedule_with, random_feasible_schedule, OptimizerOptions,
    ScheduleOutcome, SolveMethod,
};
pub use tariff::TariffSet;
