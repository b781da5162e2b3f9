use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::profile::tile_daily;

/// Retail time-of-use price, feed-in tariff and day-ahead market price, all in $/kWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TariffSet {
    pub tou: Vec<f64>,
    pub fit: Vec<f64>,
    pub market_price: Vec<f64>,
}

impl TariffSet {
    pub fn new(tou: Vec<f64>, fit: Vec<f64>, market_price: Vec<f64>) -> Result<Self> {
        let t = Self {
            tou,
            fit,
            market_price,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.tou.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tou.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tou.len();
        if self.fit.len() != n || self.market_price.len() != n {
            return Err(Error::InvalidTariff(format!(
                "series lengths differ: tou={}, fit={}, market_price={}",
                n,
                self.fit.len(),
                self.market_price.len()
            )));
        }
        for (name, series) in [
            ("tou", &self.tou),
            ("fit", &self.fit),
            ("market_price", &self.market_price),
        ] {
            if let Some((i, v)) = series
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
            {
                return Err(Error::InvalidTariff(format!(
                    "{name}[{i}] = {v} must be finite and >= 0"
                )));
            }
        }
        if let Some(i) = (0..n).find(|&i| self.fit[i] >= self.market_price[i]) {
            return Err(Error::InvalidTariff(format!(
                "fit[{i}] = {} must be below market_price[{i}] = {}",
                self.fit[i], self.market_price[i]
            )));
        }
        Ok(())
    }

    /// Expands a one-day tariff to the full horizon (no-op when already full length).
    pub fn tiled(&self, grid: &TimeGrid) -> Result<Self> {
        Ok(Self {
            tou: tile_daily(&self.tou, grid)?,
            fit: tile_daily(&self.fit, grid)?,
            market_price: tile_daily(&self.market_price, grid)?,
        })
    }

    pub(crate) fn check_grid(&self, grid: &TimeGrid) -> Result<()> {
        grid.check_len("tariff set", self.len())
    }
}
