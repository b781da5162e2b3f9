//! Peer timing plans, rating and top-N selection.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bems::{cost_breakdown, TariffSet};
use crate::error::Result;
use crate::grid::{LoadProfile, TimeGrid};
use crate::profile::{canonical_name, Category, HouseholdModel};
use crate::recommend::{lifestyle_similarity, mean_day_profile};
use crate::schedule::Schedule;
use crate::warning::Warning;

/// Savings below this ($/day) count as no improvement.
pub const MIN_SAVING: f64 = 1e-9;

/// Everything the recommender needs to know about one household.
#[derive(Debug, Clone)]
pub struct HouseholdRecord<'a> {
    pub model: &'a HouseholdModel,
    pub schedule: &'a Schedule,
    /// Mean-day non-shiftable profile.
    pub lifestyle: Vec<f64>,
    /// $ per day, TOU on gross consumption.
    pub daily_cost: f64,
}

impl<'a> HouseholdRecord<'a> {
    pub fn new(
        model: &'a HouseholdModel,
        schedule: &'a Schedule,
        grid: &TimeGrid,
        tariffs: &TariffSet,
    ) -> Result<Self> {
        Ok(Self {
            model,
            schedule,
            lifestyle: mean_day_profile(model, schedule, grid, Category::NonShiftable),
            daily_cost: daily_cost(model, schedule, grid, tariffs)?,
        })
    }
}

fn daily_cost(model: &HouseholdModel, schedule: &Schedule, grid: &TimeGrid, tariffs: &TariffSet) -> Result<f64> {
    let consumption = schedule.consumption(model, grid);
    let cb = cost_breakdown(&consumption, &LoadProfile::zeros(*grid), tariffs)?;
    Ok(cb.f / grid.num_days() as f64)
}

/// A peer's habitual timing: modal start per shiftable appliance, keyed by canonical name.
pub fn peer_timing(peer: &HouseholdModel, schedule: &Schedule) -> BTreeMap<String, usize> {
    let mut plan = BTreeMap::new();
    for a in peer.shiftable() {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for s in schedule.days(&a.id).iter().flatten() {
            *counts.entry(*s).or_default() += 1;
        }
        // first maximum in ascending start order wins
        let mut best: Option<(usize, usize)> = None;
        for (start, n) in counts {
            if best.is_none_or(|(_, bn)| n > bn) {
                best = Some((start, n));
            }
        }
        if let Some((start, _)) = best {
            plan.entry(canonical_name(&a.name)).or_insert(start);
        }
    }
    plan
}

/// Re-times the target's own activations with the peer's starts, each clamped to the
/// nearest start feasible for the target's appliance. Returns the new schedule and the
/// per-appliance starts that were applied.
pub fn transplant(
    target: &HouseholdModel,
    schedule: &Schedule,
    timing: &BTreeMap<String, usize>,
) -> Result<(Schedule, BTreeMap<String, usize>)> {
    let mut out = schedule.clone();
    let mut applied = BTreeMap::new();
    for a in target.shiftable() {
        let Some(&start) = timing.get(&canonical_name(&a.name)) else {
            continue;
        };
        let start = a.nearest_feasible(start)?;
        if let Some(days) = out.starts.get_mut(&a.id) {
            for d in days.iter_mut().filter(|d| d.is_some()) {
                *d = Some(start);
            }
        }
        applied.insert(a.id.clone(), start);
    }
    Ok((out, applied))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub peer_id: String,
    /// Similarity times saving; used for ranking only.
    pub rating: f64,
    pub similarity: f64,
    /// $ per day.
    pub projected_saving: f64,
    /// Target appliance id to recommended start interval-of-day.
    pub plan: BTreeMap<String, usize>,
}

/// Ranks by rating, highest first, then by peer id.
pub fn rank(recs: &mut [Recommendation]) {
    recs.sort_by(|a, b| {
        b.rating
            .partial_cmp(&a.rating)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.peer_id.cmp(&b.peer_id))
    });
}

/// Top-`n` peer plans for a flagged target. Peers whose timing saves nothing are skipped.
pub fn recommend(
    target: &HouseholdRecord<'_>,
    peers: &[HouseholdRecord<'_>],
    grid: &TimeGrid,
    tariffs: &TariffSet,
    n: usize,
) -> Result<(Vec<Recommendation>, Option<Warning>)> {
    let mut recs = Vec::new();
    for peer in peers {
        if peer.model.id == target.model.id {
            continue;
        }
        let timing = peer_timing(peer.model, peer.schedule);
        let (retimed, plan) = transplant(target.model, target.schedule, &timing)?;
        let saving = target.daily_cost - daily_cost(target.model, &retimed, grid, tariffs)?;
        if saving <= MIN_SAVING {
            continue;
        }
        let similarity = lifestyle_similarity(&target.lifestyle, &peer.lifestyle)?;
        recs.push(Recommendation {
            peer_id: peer.model.id.clone(),
            rating: similarity * saving,
            similarity,
            projected_saving: saving,
            plan,
        });
    }
    rank(&mut recs);
    recs.truncate(n);
    let warning = recs.is_empty().then(|| Warning::NoEligiblePeers {
        target: target.model.id.clone(),
    });
    Ok((recs, warning))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    /// $ per day summed over targets that received a recommendation.
    pub total: f64,
    /// `total / recommended`, or 0 when nobody got a recommendation.
    pub mean: f64,
    pub targets: usize,
    pub recommended: usize,
    pub mean_defined: bool,
}

/// Savings if every target accepted its top-ranked plan.
pub fn campaign_savings(recommendations: &BTreeMap<String, Vec<Recommendation>>) -> CampaignSummary {
    let tops: Vec<f64> = recommendations
        .values()
        .filter_map(|r| r.first().map(|r| r.projected_saving))
        .collect();
    let total: f64 = tops.iter().sum();
    let recommended = tops.len();
    CampaignSummary {
        total,
        mean: if recommended > 0 { total / recommended as f64 } else { 0.0 },
        targets: recommendations.len(),
        recommended,
        mean_defined: recommended > 0,
    }
}
