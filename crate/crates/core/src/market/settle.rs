use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::BidSeries;
use crate::warning::Warning;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settlement {
    pub market_revenue: f64,
    pub building_payments: BTreeMap<String, f64>,
    pub operator_profit: f64,
}

impl Settlement {
    pub fn total_payments(&self) -> f64 {
        self.building_payments.values().sum()
    }
}

/// Market revenue at forecast prices; buildings are paid the feed-in tariff on their own
/// exports and the operator keeps the rest.
pub fn settle(
    bids: &BidSeries,
    prices: &[f64],
    fit: &[f64],
    exports: &BTreeMap<String, Vec<f64>>,
) -> Result<(Settlement, Option<Warning>)> {
    let n = bids.quantity.len();
    if prices.len() != n || fit.len() != n {
        return Err(Error::GridMismatch(format!(
            "bids have {n} intervals, prices {}, fit {}",
            prices.len(),
            fit.len()
        )));
    }
    let market_revenue = bids.revenue(prices);
    let mut building_payments = BTreeMap::new();
    for (id, export) in exports {
        if export.len() != n {
            return Err(Error::GridMismatch(format!(
                "exports of '{id}' have {} intervals, bids {n}",
                export.len()
            )));
        }
        let pay: f64 = export.iter().zip(fit).map(|(e, f)| e * f).sum();
        building_payments.insert(id.clone(), pay);
    }
    let paid: f64 = building_payments.values().sum();
    let operator_profit = market_revenue - paid;
    let warning = (operator_profit < 0.0).then_some(Warning::NegativeProfit { operator_profit });
    Ok((
        Settlement {
            market_revenue,
            building_payments,
            operator_profit,
        },
        warning,
    ))
}
