//! Seeded synthetic household load profiles and solar output.

mod appliance;
mod household;
mod simulate;
mod solar;

pub use appliance::{
    canonical_name, classify_appliance, hours_curfew, night_curfew, ApplianceSpec, Category,
};
pub use household::{HouseholdModel, Lifestyle};
pub use simulate::{simulate_household, simulate_schedule};
pub use solar::{solar_profile, tile_daily};
