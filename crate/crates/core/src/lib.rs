//! Building virtual power plant simulation toolkit.
//!
//! Buildings run their own energy management ([`bems`]) and expose only net-load profiles;
//! the aggregator ([`market`]) pools surplus, dispatches a feeder battery and bids into a
//! day-ahead market. A second pipeline ([`recommend`]) clusters households and shares
//! efficient appliance timing between similar occupants. Synthetic inputs come from
//! [`profile`] and [`fleet`].

pub mod bems;
pub mod config;
pub mod error;
pub mod fleet;
pub mod grid;
pub mod io;
pub mod market;
pub mod pipeline;
pub mod profile;
pub mod recommend;
pub mod rng;
pub mod schedule;
pub mod warning;

pub use config::{Scenario, ScenarioConfig};
pub use error::{Error, Result};
pub use grid::{LoadProfile, NetLoadProfile, TimeGrid};
pub use schedule::Schedule;
pub use warning::Warning;
