use serde::{Deserialize, Serialize};

use crate::bems::TariffSet;
use crate::error::{Error, Result};
use crate::grid::{LoadProfile, NetLoadProfile};

/// Building energy bill: grid import cost minus feed-in revenue.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub c_tou: f64,
    pub r_fi: f64,
    pub f: f64,
}

impl CostBreakdown {
    pub fn new(c_tou: f64, r_fi: f64) -> Self {
        Self {
            c_tou,
            r_fi,
            f: c_tou - r_fi,
        }
    }
}

/// Import and export are netted per interval; import is billed at `tou`, export paid at `fit`.
pub fn cost_breakdown(
    consumption: &LoadProfile,
    solar: &LoadProfile,
    tariffs: &TariffSet,
) -> Result<CostBreakdown> {
    let grid = consumption.grid();
    if solar.grid() != grid {
        return Err(Error::GridMismatch("consumption and solar grids differ".into()));
    }
    tariffs.check_grid(grid)?;
    let (c_tou, r_fi) = interval_costs(
        consumption.values(),
        solar.values(),
        &tariffs.tou,
        &tariffs.fit,
        grid.dt_hours(),
    );
    Ok(CostBreakdown::new(c_tou, r_fi))
}

/// Shared accumulation used by the full-horizon and the per-day objective.
pub(crate) fn interval_costs(
    consumption: &[f64],
    solar: &[f64],
    tou: &[f64],
    fit: &[f64],
    dt_hours: f64,
) -> (f64, f64) {
    let mut c_tou = 0.0;
    let mut r_fi = 0.0;
    for t in 0..consumption.len() {
        let diff = consumption[t] - solar[t];
        if diff > 0.0 {
            c_tou += tou[t] * diff * dt_hours;
        } else if diff < 0.0 {
            r_fi += fit[t] * -diff * dt_hours;
        }
    }
    (c_tou, r_fi)
}

/// Consumption minus solar; negative entries are surplus.
pub fn net_load(consumption: &LoadProfile, solar: &LoadProfile) -> Result<NetLoadProfile> {
    if consumption.grid() != solar.grid() {
        return Err(Error::GridMismatch("consumption and solar grids differ".into()));
    }
    NetLoadProfile::new(
        *consumption.grid(),
        consumption
            .values()
            .iter()
            .zip(solar.values())
            .map(|(c, s)| c - s)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use proptest::prelude::*;

    fn flat_tariff(n: usize, tou: f64) -> TariffSet {
        TariffSet::new(vec![tou; n], vec![0.05; n], vec![0.1; n]).unwrap()
    }

    #[test]
    fn flat_import_no_solar() {
        let g = TimeGrid::hourly(1).unwrap();
        let c = LoadProfile::new(g, vec![1.0; 24]).unwrap();
        let cb = cost_breakdown(&c, &LoadProfile::zeros(g), &flat_tariff(24, 0.30)).unwrap();
        assert!((cb.c_tou - 7.2).abs() < 1e-12);
        assert_eq!(cb.r_fi, 0.0);
        assert!((cb.f - 7.2).abs() < 1e-12);
    }

    #[test]
    fn exact_self_consumption_costs_nothing() {
        let g = TimeGrid::hourly(1).unwrap();
        let v: Vec<f64> = (0..24).map(|t| 0.3 + t as f64 * 0.1).collect();
        let c = LoadProfile::new(g, v.clone()).unwrap();
        let s = LoadProfile::new(g, v).unwrap();
        let cb = cost_breakdown(&c, &s, &flat_tariff(24, 0.3)).unwrap();
        assert_eq!((cb.c_tou, cb.r_fi, cb.f), (0.0, 0.0, 0.0));
    }

    #[test]
    fn grid_mismatch() {
        let g1 = TimeGrid::hourly(1).unwrap();
        let g2 = TimeGrid::hourly(2).unwrap();
        let c = LoadProfile::zeros(g1);
        assert!(matches!(
            cost_breakdown(&c, &LoadProfile::zeros(g2), &flat_tariff(24, 0.1)),
            Err(Error::GridMismatch(_))
        ));
        assert!(matches!(
            cost_breakdown(&c, &LoadProfile::zeros(g1), &flat_tariff(48, 0.1)),
            Err(Error::GridMismatch(_))
        ));
        assert!(net_load(&c, &LoadProfile::zeros(g2)).is_err());
    }

    #[test]
    fn net_load_sign_convention() {
        let g = TimeGrid::hourly(1).unwrap();
        let mut c = vec![0.0; 24];
        let mut s = vec![0.0; 24];
        c[12] = 1.0;
        s[12] = 3.0;
        let n = net_load(
            &LoadProfile::new(g, c.clone()).unwrap(),
            &LoadProfile::new(g, s).unwrap(),
        )
        .unwrap();
        assert_eq!(n.values()[12], -2.0);
        let n0 = net_load(&LoadProfile::new(g, c.clone()).unwrap(), &LoadProfile::zeros(g)).unwrap();
        assert_eq!(n0.values(), c.as_slice());
    }

    fn brute_force(c: &[f64], s: &[f64], t: &TariffSet, dt: f64) -> (f64, f64) {
        let mut import_cost = 0.0;
        let mut export_rev = 0.0;
        for i in 0..c.len() {
            let g = (c[i] - s[i]).max(0.0);
            let x = (s[i] - c[i]).max(0.0);
            import_cost += t.tou[i] * g * dt;
            export_rev += t.fit[i] * x * dt;
        }
        (import_cost, export_rev)
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            c in proptest::collection::vec(0.0f64..10.0, 96),
            s in proptest::collection::vec(0.0f64..10.0, 96),
            tou in proptest::collection::vec(0.0f64..1.0, 96),
            fit_frac in proptest::collection::vec(0.0f64..0.99, 96),
        ) {
            let g = TimeGrid::new(15, 1).unwrap();
            let market: Vec<f64> = tou.iter().map(|x| x + 0.01).collect();
            let fit: Vec<f64> = market.iter().zip(&fit_frac).map(|(m, f)| m * f).collect();
            let t = TariffSet::new(tou, fit, market).unwrap();
            let cb = cost_breakdown(
                &LoadProfile::new(g, c.clone()).unwrap(),
                &LoadProfile::new(g, s.clone()).unwrap(),
                &t,
            ).unwrap();
            let (ci, ri) = brute_force(&c, &s, &t, 0.25);
            prop_assert!((cb.c_tou - ci).abs() <= 1e-9);
            prop_assert!((cb.r_fi - ri).abs() <= 1e-9);
            prop_assert_eq!(cb.f, cb.c_tou - cb.r_fi);
            prop_assert!(cb.c_tou >= 0.0 && cb.r_fi >= 0.0);
        }

        #[test]
        fn net_plus_solar_reconstructs_consumption(
            c in proptest::collection::vec(0.0f64..10.0, 24),
            s in proptest::collection::vec(0.0f64..10.0, 24),
        ) {
            let g = TimeGrid::hourly(1).unwrap();
            let n = net_load(&LoadProfile::new(g, c.clone()).unwrap(), &LoadProfile::new(g, s.clone()).unwrap()).unwrap();
            for i in 0..24 {
                prop_assert!((n.values()[i] + s[i] - c[i]).abs() <= 1e-12);
            }
        }
    }
}
