//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use bvpp_core::bems::{optimize_schedule, random_feasible_schedule, TariffSet};
use bvpp_core::grid::{LoadProfile, TimeGrid};
use bvpp_core::market::{optimize_bess, BessSpec, BidSeries, Lattice};
use bvpp_core::pipeline::{self, RunManifest, RunOptions};
use bvpp_core::profile::{simulate_schedule, solar_profile, ApplianceSpec, HouseholdModel, Lifestyle};
use bvpp_core::recommend::{fcm, rank, standardize, FcmParams, Recommendation};
use bvpp_core::{Scenario, Schedule};

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("{what} took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn settlement_identity() -> Outcome {
    let start = Instant::now();
    let s = case1_scenario(50, 11);
    let profiles = pipeline::generate_profiles(&s).map_err(|e| e.to_string())?;
    let r = pipeline::case1(&s, &profiles).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let st = &r.settlement;
    let gap = (st.operator_profit + st.total_payments() - st.market_revenue).abs();
    ensure(gap <= 1e-9, || format!("identity gap {gap:e}"))?;
    ensure(st.market_revenue > 0.0, || "no surplus reached the market".into())?;
    within(elapsed, 10.0, "50-building case")?;
    Ok(format!(
        "revenue {:.4}, payments {:.4}, profit {:.4}, gap {gap:.1e}, {:.2} s",
        st.market_revenue,
        st.total_payments(),
        st.operator_profit,
        elapsed.as_secs_f64()
    ))
}

fn random_instance(rng: &mut ChaCha8Rng) -> (HouseholdModel, Schedule, Vec<f64>, TariffSet, TimeGrid) {
    let grid = TimeGrid::hourly(1).unwrap();
    let n = rng.gen_range(1..=3);
    let mut appliances = vec![ApplianceSpec::fixed("base", "lights", rng.gen_range(0.1..0.5), 4, 18)];
    let mut starts = BTreeMap::from([("base".to_string(), vec![Some(18)])]);
    for k in 0..n {
        let dur = rng.gen_range(1..=3);
        let width = rng.gen_range(0..8);
        let lo = rng.gen_range(0..=24 - dur - width);
        let id = format!("s{k}");
        let mut a = ApplianceSpec::shiftable(&id, "dish washer", rng.gen_range(0.3..2.5), dur, (lo, lo + width), lo);
        if rng.gen_bool(0.3) {
            let c = rng.gen_range(lo..=lo + width);
            a = a.with_curfew([c]);
            if !a.is_feasible_start(lo) {
                a = ApplianceSpec { curfew: BTreeSet::new(), ..a };
            }
        }
        let active = rng.gen_bool(0.85);
        starts.insert(id, vec![active.then_some(a.feasible_starts()[0])]);
        appliances.push(a);
    }
    let lifestyle = appliances.iter().map(|a| (a.id.clone(), Lifestyle::always())).collect();
    let h = HouseholdModel {
        id: "b".into(),
        appliances,
        lifestyle,
        solar_capacity_kw: 0.0,
        seed: 0,
    };
    let mut market = Vec::new();
    let mut fit = Vec::new();
    let mut tou = Vec::new();
    for _ in 0..24 {
        let m: f64 = rng.gen_range(0.05..0.4);
        market.push(m);
        fit.push(m * rng.gen_range(0.0..0.95));
        tou.push(rng.gen_range(0.05..0.6));
    }
    let cap = rng.gen_range(0.0..4.0);
    let coeffs: Vec<f64> = (0..24).map(|_| rng.gen_range(0.0..1.0)).collect();
    let solar = solar_profile(cap, &coeffs, &grid).unwrap().into_values();
    (h, Schedule { starts }, solar, TariffSet::new(tou, fit, market).unwrap(), grid)
}

fn scheduler_optimality() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (h, acts, solar, tariffs, grid) = random_instance(&mut rng);
        let solar_p = LoadProfile::new(grid, solar.clone()).unwrap();
        let (sched, cost) = optimize_schedule(&h, &acts, &solar_p, &tariffs).map_err(|e| e.to_string())?;
        let oracle = brute_force_min(&h, &acts, &solar, &tariffs, &grid);
        let recomputed = objective(&h, &sched, &solar, &tariffs, &grid);
        let err = (cost.f - oracle).abs().max((recomputed - oracle).abs());
        worst = worst.max(err);
        if err > 1e-9 {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(mismatches == 0, || format!("{mismatches} of 200 instances differ from enumeration"))?;
    within(elapsed, 30.0, "200 instances")?;
    Ok(format!("0/200 mismatches, max |diff| {worst:.1e}, {:.2} s", elapsed.as_secs_f64()))
}

fn dominance() -> Outcome {
    let scenarios: Vec<Scenario> = vec![
        case1_scenario(50, 11),
        case1_scenario(20, 12),
        scenario(&format!(
            "seed = 3\n{TARIFFS}\n{SOLAR}\n[grid]\ninterval_minutes = 30\nnum_days = 3\n[fleet]\ncount = 15\ninefficient_fraction = 0.5\nsolar_capacity_kw = [0.0, 6.0]\n"
        )),
    ];
    let mut violations = 0;
    let mut buildings = 0;
    for s in &scenarios {
        let profiles = pipeline::generate_profiles(s).map_err(|e| e.to_string())?;
        let r = pipeline::case1(s, &profiles).map_err(|e| e.to_string())?;
        for ((h, (_, p)), b) in s.households.iter().zip(&profiles).zip(&r.buildings) {
            buildings += 1;
            let solar = p.solar.values();
            let f_opt = objective(h, &b.optimized, solar, &s.tariffs, &s.grid);
            let f_default = objective(h, &b.habitual, solar, &s.tariffs, &s.grid);
            let mut rng = ChaCha8Rng::seed_from_u64(h.seed);
            let f_random = (0..100)
                .map(|_| {
                    let rs = random_feasible_schedule(h, &b.habitual, &s.grid, &mut rng);
                    objective(h, &rs, solar, &s.tariffs, &s.grid)
                })
                .fold(f64::INFINITY, f64::min);
            if f_opt > f_default + 1e-9 || f_opt > f_random + 1e-9 {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} of {buildings} buildings violate dominance"))?;
    Ok(format!("0 violations over {buildings} buildings x 100 random schedules"))
}

fn bess_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let minutes = [240, 360, 480][i % 3];
        let grid = TimeGrid::new(minutes, 1).unwrap();
        let dt = grid.dt_hours();
        let step = 1.0;
        let cap = rng.gen_range(1..=4);
        let rate = f64::from(rng.gen_range(1..=3)) / dt;
        let surplus: Vec<f64> = (0..grid.len()).map(|_| f64::from(rng.gen_range(0..=3)) / dt).collect();
        let prices: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let bess = BessSpec::lossless(cap as f64, rate);
        let dp = optimize_bess(&grid, &surplus, &prices, &bess, &Lattice::Step(step)).map_err(|e| e.to_string())?;
        let got = dp.bids.revenue(&prices);
        let oracle = brute_force_bess(&surplus, &prices, cap, step, rate, dt);
        worst = worst.max((got - oracle).abs());
        ensure((got - oracle).abs() <= 1e-9, || format!("instance {i}: DP {got} vs enumeration {oracle}"))?;
    }

    let grid = TimeGrid::hourly(1).unwrap();
    let mut surplus = vec![0.0; 24];
    surplus[..2].copy_from_slice(&[2.0, 2.0]);
    let mut prices = vec![0.01; 24];
    prices[..4].copy_from_slice(&[0.1, 0.1, 0.5, 0.5]);
    let bess = BessSpec::lossless(4.0, 2.0);
    let dp = optimize_bess(&grid, &surplus, &prices, &bess, &Lattice::default()).map_err(|e| e.to_string())?;
    let revenue = dp.bids.revenue(&prices);
    let pass = BidSeries::pass_through(&surplus, 1.0).revenue(&prices);
    ensure((revenue - 2.0).abs() <= 1e-9 && (pass - 0.4).abs() <= 1e-9, || {
        format!("worked example: revenue {revenue}, pass-through {pass}")
    })?;
    Ok(format!(
        "50/50 match enumeration (max |diff| {worst:.1e}); worked example {revenue:.1} vs {pass:.1} pass-through"
    ))
}

fn bess_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = TimeGrid::hourly(1).unwrap();
    let mut violations = 0;
    for _ in 0..20 {
        let peak: f64 = rng.gen_range(5.0..40.0);
        let surplus: Vec<f64> = (0..24)
            .map(|h| {
                let x = (std::f64::consts::PI * (h as f64 + 0.5 - 6.0) / 12.0).sin();
                (peak * x * rng.gen_range(0.6..1.0)).max(0.0)
            })
            .collect();
        let prices: Vec<f64> = (0..24).map(|_| rng.gen_range(0.02..0.4)).collect();
        let cap = rng.gen_range(10.0..80.0_f64).round();
        let rate = rng.gen_range(5.0..30.0_f64).round();
        let eta = rng.gen_range(0.85..1.0);
        let spec = |c: f64| BessSpec {
            eta_c: eta,
            eta_d: eta,
            ..BessSpec::lossless(c, rate)
        };
        // Same kWh resolution for both sizes, so the small lattice nests in the large one.
        let lattice = Lattice::Step(cap / 100.0);
        let small = optimize_bess(&grid, &surplus, &prices, &spec(cap), &lattice).map_err(|e| e.to_string())?;
        let large = optimize_bess(&grid, &surplus, &prices, &spec(2.0 * cap), &lattice).map_err(|e| e.to_string())?;
        if large.bids.revenue(&prices) < small.bids.revenue(&prices) - 1e-9 {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} of 20 scenarios lose revenue"))?;
    Ok("0 of 20 day-scenarios lose revenue when capacity doubles".into())
}

fn blobs(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let centers = [(6.0, 1.0), (12.0, 2.5), (20.0, 4.5)];
    let mut pts = Vec::new();
    let mut truth = Vec::new();
    for i in 0..300 {
        let k = i % 3;
        let (e, c) = centers[k];
        pts.push(vec![e + rng.gen_range(-1.0..1.0), c + rng.gen_range(-0.3..0.3)]);
        truth.push(k);
    }
    (pts, truth)
}

fn fcm_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut runs = Vec::new();
    let (pts, truth) = blobs(&mut rng);
    let (z, _, _) = standardize(&pts);
    let params = FcmParams { seed: 6, ..FcmParams::default() };
    let r = fcm(&z, &params).map_err(|e| e.to_string())?;
    // Labels are ordered by centroid, so blob k should map to label k.
    let hits = r.hard_labels.iter().zip(&truth).filter(|(a, b)| a == b).count();
    let recovered = hits as f64 / truth.len() as f64;
    runs.push(r);
    for seed in 0..10 {
        let n = rng.gen_range(20..120);
        let p: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..30.0), rng.gen_range(0.0..8.0)]).collect();
        let c = rng.gen_range(2..=5);
        runs.push(fcm(&p, &FcmParams { clusters: c, fuzzifier: rng.gen_range(1.5..3.0), seed, ..FcmParams::default() }).map_err(|e| e.to_string())?);
    }
    let mut row_err: f64 = 0.0;
    for (i, r) in runs.iter().enumerate() {
        row_err = row_err.max(r.max_row_sum_error);
        for w in r.objective_history.windows(2) {
            ensure(w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()), || {
                format!("run {i}: objective rose from {} to {}", w[0], w[1])
            })?;
        }
    }
    ensure(row_err <= 1e-9, || format!("membership row sum error {row_err:e}"))?;
    ensure(recovered >= 0.95, || format!("recovered {:.1}% of planted labels", 100.0 * recovered))?;
    Ok(format!(
        "{} runs, max row-sum error {row_err:.1e}, objective non-increasing, {:.1}% labels recovered",
        runs.len(),
        100.0 * recovered
    ))
}

fn flag_recovery() -> Outcome {
    let start = Instant::now();
    let s = case2_scenario(500, 30, 7);
    let profiles = pipeline::generate_profiles(&s).map_err(|e| e.to_string())?;
    let r = pipeline::case2(&s, &profiles).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let planted = &s.planted;
    let hits = r.flagged.intersection(planted).count();
    let false_pos = r.flagged.difference(planted).count();
    let recall = hits as f64 / planted.len() as f64;
    let fpr = false_pos as f64 / (s.households.len() - planted.len()) as f64;
    let detail = format!(
        "{} flagged, recall {:.1}% ({hits}/{}), FPR {:.1}%, {:.2} s",
        r.flagged.len(),
        100.0 * recall,
        planted.len(),
        100.0 * fpr,
        elapsed.as_secs_f64()
    );
    ensure(recall >= 0.8 && fpr <= 0.2, || detail.clone())?;
    within(elapsed, 60.0, "500-household case")?;
    Ok(detail)
}

fn recommendation_arithmetic() -> Outcome {
    let s = case2_scenario(200, 14, 8);
    let profiles = pipeline::generate_profiles(&s).map_err(|e| e.to_string())?;
    let r = pipeline::case2(&s, &profiles).map_err(|e| e.to_string())?;
    let c = r.campaign;
    ensure(c.recommended > 0, || "no recommendations produced".into())?;
    ensure((c.mean - c.total / c.recommended as f64).abs() <= 1e-9, || {
        format!("mean {} vs total/count {}", c.mean, c.total / c.recommended as f64)
    })?;
    let mut emitted = 0;
    for (target, recs) in &r.recommendations {
        let model = s.households.iter().find(|h| &h.id == target).unwrap();
        for rec in recs {
            emitted += 1;
            ensure(rec.projected_saving > 0.0, || format!("{target}: non-positive saving"))?;
            for (aid, &start) in &rec.plan {
                let a = model.appliance(aid).unwrap();
                ensure(a.is_feasible_start(start), || format!("{target}: {aid} at {start} infeasible"))?;
            }
        }
        for w in recs.windows(2) {
            ensure(
                w[0].rating > w[1].rating || (w[0].rating == w[1].rating && w[0].peer_id < w[1].peer_id),
                || format!("{target}: plans out of order"),
            )?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let n = rng.gen_range(1..15);
        let mut recs: Vec<Recommendation> = (0..n)
            .map(|i| {
                // quarter steps so equal products are exact ties
                let similarity = f64::from(rng.gen_range(1..=4)) / 4.0;
                let saving = f64::from(rng.gen_range(1..=8)) / 4.0;
                Recommendation {
                    peer_id: format!("p{:02}", (i * 7) % 15),
                    rating: similarity * saving,
                    similarity,
                    projected_saving: saving,
                    plan: BTreeMap::new(),
                }
            })
            .collect();
        let mut oracle: Vec<(f64, String)> = recs.iter().map(|r| (-(r.similarity * r.projected_saving), r.peer_id.clone())).collect();
        oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rank(&mut recs);
        let got: Vec<&str> = recs.iter().map(|r| r.peer_id.as_str()).collect();
        let want: Vec<&str> = oracle.iter().map(|(_, p)| p.as_str()).collect();
        ensure(got == want, || format!("rank {got:?} vs oracle {want:?}"))?;
    }
    Ok(format!(
        "mean {:.6} = {:.6}/{}; {emitted} plans positive and feasible; 50/50 rankings match oracle",
        c.mean, c.total, c.recommended
    ))
}

fn read_outputs(dir: &std::path::Path, manifest: &RunManifest) -> BTreeMap<String, Vec<u8>> {
    manifest
        .files()
        .map(|f| (f.to_string(), std::fs::read(dir.join(f)).unwrap()))
        .collect()
}

fn determinism() -> Outcome {
    let runs: Vec<(Scenario, Scenario)> = vec![
        (case1_scenario(50, 21), case2_scenario(120, 10, 21)),
        (case1_scenario(50, 21), case2_scenario(120, 10, 21)),
    ];
    let mut outputs = Vec::new();
    for (s1, s2) in &runs {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let (_, m1) = pipeline::run_case1(s1, dir.path(), &RunOptions::default()).map_err(|e| e.to_string())?;
        let out2 = dir.path().join("c2");
        let (_, m2) = pipeline::run_case2(s2, &out2, &RunOptions::default()).map_err(|e| e.to_string())?;
        let mut files = read_outputs(dir.path(), &m1);
        for (k, v) in read_outputs(&out2, &m2) {
            files.insert(format!("c2/{k}"), v);
        }
        outputs.push(files);
    }
    ensure(outputs[0].len() == outputs[1].len(), || "different file sets".into())?;
    let differing: Vec<&String> = outputs[0]
        .iter()
        .filter(|(k, v)| outputs[1].get(*k) != Some(*v))
        .map(|(k, _)| k)
        .collect();
    ensure(differing.is_empty(), || format!("files differ: {differing:?}"))?;
    Ok(format!("{} files byte-identical across two runs", outputs[0].len()))
}

fn generator_statistics() -> Outcome {
    let days = 10_000;
    let grid = TimeGrid::hourly(days).unwrap();
    let rates = [("wm", 0.2), ("dw", 0.55), ("oven", 0.85)];
    let h = HouseholdModel {
        id: "stats".into(),
        appliances: rates
            .iter()
            .map(|(id, _)| ApplianceSpec::shiftable(id, "washing machine", 1.0, 2, (0, 22), 8))
            .collect(),
        lifestyle: rates
            .iter()
            .map(|(id, p)| {
                (
                    id.to_string(),
                    Lifestyle {
                        activation_probability: *p,
                        start_jitter: 2.0,
                    },
                )
            })
            .collect(),
        solar_capacity_kw: 0.0,
        seed: 10,
    };
    let s = simulate_schedule(&h, &grid).map_err(|e| e.to_string())?;
    let chi = ChiSquared::new(1.0).unwrap();
    let mut parts = Vec::new();
    for (id, p) in rates {
        let observed = s.days(id).iter().filter(|d| d.is_some()).count() as f64;
        let expected = p * days as f64;
        let stat = (observed - expected).powi(2) / expected
            + (observed - expected).powi(2) / (days as f64 - expected);
        let p_value = 1.0 - chi.cdf(stat);
        ensure(p_value >= 0.01, || format!("{id}: {observed} activations, chi2 {stat:.3}, p {p_value:.4}"))?;
        parts.push(format!("{id} p={p_value:.3}"));
    }
    Ok(format!("chi-square over {days} days: {}", parts.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("settlement identity", settlement_identity),
        ("scheduler optimality", scheduler_optimality),
        ("cost dominance", dominance),
        ("BESS DP exactness", bess_exactness),
        ("BESS value monotonicity", bess_monotonicity),
        ("FCM correctness", fcm_correctness),
        ("flagging recovery", flag_recovery),
        ("recommendation arithmetic", recommendation_arithmetic),
        ("determinism", determinism),
        ("generator statistics", generator_statistics),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
