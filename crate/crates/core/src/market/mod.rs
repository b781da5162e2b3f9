//! Aggregator layer for market participation: pool building surplus, dispatch the
//! feeder battery, bid as a price taker and share the revenue.
//!
//! Nothing here touches appliances; the only inputs from buildings are net-load profiles.

mod aggregate;
mod bess;
mod settle;

pub use aggregate::{aggregate_surplus, Aggregate};
pub use bess::{optimize_bess, BessDispatch, BessSpec, BidSeries, DispatchPlan, Lattice};
pub use settle::{settle, Settlement};
