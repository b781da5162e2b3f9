//! Occupant knowledge sharing: cluster households on daily energy and cost, flag the
//! costly ones, and recommend timing plans borrowed from similar efficient peers.

mod fcm;
mod features;
mod flag;
mod plan;
mod similarity;

pub use fcm::{distinct_count, fcm, membership_row, objective, standardize, FcmParams, FcmResult};
pub use features::{compute_features, HouseholdFeatures};
pub use flag::{flag_inefficient, FlagMethod, FlagOutcome, MIN_GROUP_SIZE};
pub use plan::{
    campaign_savings, peer_timing, rank, recommend, transplant, CampaignSummary, HouseholdRecord,
    Recommendation, MIN_SAVING,
};
pub use similarity::{lifestyle_similarity, mean_day_profile};
