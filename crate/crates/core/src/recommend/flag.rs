use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recommend::HouseholdFeatures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagMethod {
    /// Positive residual from the group's cost-on-energy least-squares line.
    Regression,
    /// All energies equal: cost above median plus `k` median absolute deviations.
    MedianMad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagOutcome {
    pub flagged: BTreeSet<String>,
    pub method: FlagMethod,
    /// Residual (or cost excess) above which a household is flagged.
    pub threshold: f64,
}

pub const MIN_GROUP_SIZE: usize = 4;

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Flags households whose cost sits well above what their energy use predicts within the group.
pub fn flag_inefficient(group: &[(String, HouseholdFeatures)], k: f64) -> Result<FlagOutcome> {
    if group.len() < MIN_GROUP_SIZE {
        return Err(Error::DegenerateInput(format!(
            "flagging needs at least {MIN_GROUP_SIZE} households, group has {}",
            group.len()
        )));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidParameter(format!("flag threshold k={k} must be >= 0")));
    }
    let n = group.len() as f64;
    let x: Vec<f64> = group.iter().map(|(_, f)| f.avg_daily_energy).collect();
    let y: Vec<f64> = group.iter().map(|(_, f)| f.avg_daily_cost).collect();
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mean_x).powi(2)).sum();
    // Residuals this close to zero are round-off, not inefficiency.
    let floor = 1e-9 * (1.0 + mean_y.abs());

    if sxx <= 1e-12 * n * (1.0 + mean_x * mean_x) {
        let med = median(&sorted(y.clone()));
        let mad = median(&sorted(y.iter().map(|v| (v - med).abs()).collect()));
        let threshold = k * mad;
        let flagged = group
            .iter()
            .zip(&y)
            .filter(|(_, &c)| c - med > threshold && c - med > floor)
            .map(|((id, _), _)| id.clone())
            .collect();
        return Ok(FlagOutcome {
            flagged,
            method: FlagMethod::MedianMad,
            threshold,
        });
    }

    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mean_x) * (b - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - (intercept + slope * a)).collect();
    let sigma = (residuals.iter().map(|r| r * r).sum::<f64>() / (n - 2.0)).sqrt();
    let threshold = k * sigma;
    let flagged = group
        .iter()
        .zip(&residuals)
        .filter(|(_, &r)| r > threshold && r > floor)
        .map(|((id, _), _)| id.clone())
        .collect();
    Ok(FlagOutcome {
        flagged,
        method: FlagMethod::Regression,
        threshold,
    })
}
