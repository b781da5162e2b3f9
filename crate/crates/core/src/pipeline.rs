//! End-to-end runs behind the CLI subcommands.
//!
//! Each case is split into a pure computation (`case1`, `case2`) returning an in-memory
//! report and a `run_*` wrapper that loads inputs, writes every artifact and the run
//! manifest under the output directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bems::{net_load, optimize_schedule_with, CostBreakdown, SolveMethod, TariffSet};
use crate::config::Scenario;
use crate::error::{Error, Result};
use crate::grid::{LoadProfile, NetLoadProfile, TimeGrid};
use crate::io::{self, quantize, Series};
use crate::market::{aggregate_surplus, optimize_bess, settle, Aggregate, BidSeries, DispatchPlan, Settlement};
use crate::profile::{simulate_schedule, solar_profile, HouseholdModel};
use crate::recommend::{
    campaign_savings, compute_features, distinct_count, fcm, flag_inefficient, recommend, standardize,
    CampaignSummary, FcmResult, FlagOutcome, HouseholdFeatures, HouseholdRecord, Recommendation,
    MIN_GROUP_SIZE,
};
use crate::schedule::Schedule;
use crate::warning::Warning;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One household's generated profiles, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdProfiles {
    /// kW per appliance, in the household's declaration order.
    pub appliances: Vec<(String, LoadProfile)>,
    pub solar: LoadProfile,
}

impl HouseholdProfiles {
    /// Run starts recovered from the appliance columns.
    pub fn schedule(&self, model: &HouseholdModel, grid: &TimeGrid) -> Result<Schedule> {
        let map: BTreeMap<String, LoadProfile> = self.appliances.iter().cloned().collect();
        Schedule::from_profiles(model, &map, grid)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Promote warnings to errors before any data file is written.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    /// Paths relative to the output directory.
    pub files: Vec<String>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub households: usize,
    pub stages: Vec<StageRecord>,
    pub warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub campaign: Option<CampaignSummary>,
}

impl RunManifest {
    fn new(command: &str, scenario: &Scenario) -> Self {
        Self {
            command: command.into(),
            version: VERSION.into(),
            config_hash: scenario.config_hash(),
            seed: scenario.seed,
            households: scenario.households.len(),
            stages: Vec::new(),
            warnings: Vec::new(),
            campaign: None,
        }
    }

    pub fn file_name(command: &str) -> String {
        format!("manifest-{command}.json")
    }

    /// Every data file written by the run.
    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.stages.iter().flat_map(|s| s.files.iter().map(String::as_str))
    }
}

struct StageTimer {
    name: String,
    start: Instant,
    files: Vec<String>,
}

impl StageTimer {
    fn start(name: &str) -> Self {
        info!("stage {name}: start");
        Self {
            name: name.into(),
            start: Instant::now(),
            files: Vec::new(),
        }
    }

    fn finish(self, manifest: &mut RunManifest) {
        let wall_ms = self.start.elapsed().as_millis() as u64;
        info!("stage {}: done in {wall_ms} ms, {} files", self.name, self.files.len());
        manifest.stages.push(StageRecord {
            name: self.name,
            files: self.files,
            wall_ms,
        });
    }
}

/// Writes files under an output root and remembers their relative paths.
struct Writer<'a> {
    root: &'a Path,
}

impl Writer<'_> {
    fn series(&self, stage: &mut StageTimer, rel: &str, series: &Series) -> Result<()> {
        io::write_series_file(&self.root.join(rel), series)?;
        stage.files.push(rel.into());
        Ok(())
    }

    fn json<T: Serialize>(&self, stage: &mut StageTimer, rel: &str, value: &T) -> Result<()> {
        io::write_json(&self.root.join(rel), value)?;
        stage.files.push(rel.into());
        Ok(())
    }

    fn table(&self, stage: &mut StageTimer, rel: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        io::write_atomic(&self.root.join(rel), |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
            Ok(())
        })?;
        stage.files.push(rel.into());
        Ok(())
    }

    fn profiles(&self, stage: &mut StageTimer, profiles: &[(String, HouseholdProfiles)]) -> Result<()> {
        for (id, p) in profiles {
            let rel = format!("profiles/{id}.csv");
            let cols: Vec<(String, Vec<f64>)> = p
                .appliances
                .iter()
                .map(|(a, lp)| (a.clone(), lp.values().to_vec()))
                .collect();
            io::write_atomic(&self.root.join(&rel), |buf| {
                io::write_profile_csv(buf, &cols, p.solar.values())
            })?;
            stage.files.push(rel);
        }
        Ok(())
    }

    fn manifest(&self, manifest: &RunManifest) -> Result<()> {
        io::write_json(&self.root.join(RunManifest::file_name(&manifest.command)), manifest)
    }
}

fn check_strict(options: &RunOptions, warnings: &[Warning]) -> Result<()> {
    for w in warnings {
        warn!("{w}");
    }
    if options.strict && !warnings.is_empty() {
        let all: Vec<String> = warnings.iter().map(ToString::to_string).collect();
        return Err(Error::Strict(all.join("; ")));
    }
    Ok(())
}

fn quantized(profile: LoadProfile) -> Result<LoadProfile> {
    let grid = *profile.grid();
    LoadProfile::new(grid, profile.into_values().into_iter().map(quantize).collect())
}

/// Simulated appliance profiles and solar output for every household, already rounded to
/// the precision stored on disk so in-memory and file-based runs agree.
pub fn generate_profiles(scenario: &Scenario) -> Result<Vec<(String, HouseholdProfiles)>> {
    let grid = scenario.grid;
    scenario
        .households
        .par_iter()
        .map(|h| {
            let wrap = |e: Error| Error::stage("generate", format!("household '{}': {e}", h.id));
            let schedule = simulate_schedule(h, &grid).map_err(wrap)?;
            let appliances = h
                .appliances
                .iter()
                .map(|a| Ok((a.id.clone(), quantized(schedule.appliance_profile(a, &grid))?)))
                .collect::<Result<Vec<_>>>()
                .map_err(wrap)?;
            let solar = solar_profile(h.solar_capacity_kw, &scenario.solar_coefficients, &grid)
                .and_then(quantized)
                .map_err(wrap)?;
            Ok((h.id.clone(), HouseholdProfiles { appliances, solar }))
        })
        .collect()
}

fn load_household_profiles(path: &Path, model: &HouseholdModel, grid: &TimeGrid) -> Result<HouseholdProfiles> {
    let file = std::fs::File::open(path)?;
    let (cols, solar) = io::read_profile_csv(file)?;
    let ids: Vec<&str> = cols.iter().map(|(id, _)| id.as_str()).collect();
    let expected: Vec<&str> = model.appliances.iter().map(|a| a.id.as_str()).collect();
    if ids != expected {
        return Err(Error::InvalidHousehold {
            household: model.id.clone(),
            reason: format!("profile columns {ids:?} do not match configured appliances {expected:?}"),
        });
    }
    let appliances = cols
        .into_iter()
        .map(|(id, v)| Ok((id, LoadProfile::new(*grid, v)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HouseholdProfiles {
        appliances,
        solar: LoadProfile::new(*grid, solar)?,
    })
}

/// Loads `profiles/<id>.csv` for every household. If the profiles directory does not exist
/// yet, the generate stage runs first and writes it.
fn obtain_profiles(
    scenario: &Scenario,
    out: &Path,
    manifest: &mut RunManifest,
) -> Result<Vec<(String, HouseholdProfiles)>> {
    let dir = out.join("profiles");
    if !dir.is_dir() {
        info!("no profiles under {}; generating", dir.display());
        let mut stage = StageTimer::start("generate");
        let profiles = generate_profiles(scenario)?;
        Writer { root: out }.profiles(&mut stage, &profiles)?;
        stage.finish(manifest);
        return Ok(profiles);
    }
    let stage = StageTimer::start("load_profiles");
    let profiles = scenario
        .households
        .par_iter()
        .map(|h| {
            let path = dir.join(format!("{}.csv", h.id));
            load_household_profiles(&path, h, &scenario.grid)
                .map(|p| (h.id.clone(), p))
                .map_err(|e| Error::stage("load_profiles", format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    stage.finish(manifest);
    Ok(profiles)
}

fn check_profiles(scenario: &Scenario, profiles: &[(String, HouseholdProfiles)]) -> Result<()> {
    if profiles.len() != scenario.households.len()
        || profiles.iter().zip(&scenario.households).any(|((id, _), h)| *id != h.id)
    {
        return Err(Error::InvalidParameter(
            "profiles must list the scenario's households in order".into(),
        ));
    }
    Ok(())
}

pub fn run_generate(scenario: &Scenario, out: &Path, options: &RunOptions) -> Result<RunManifest> {
    let mut manifest = RunManifest::new("generate", scenario);
    let mut stage = StageTimer::start("generate");
    let profiles = generate_profiles(scenario)?;
    check_strict(options, &[])?;
    Writer { root: out }.profiles(&mut stage, &profiles)?;
    stage.finish(&mut manifest);
    Writer { root: out }.manifest(&manifest)?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMove {
    pub appliance: String,
    pub day: usize,
    pub start: usize,
    pub moved_from: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildingResult {
    pub id: String,
    /// Habitual schedule from the generated profiles.
    pub habitual: Schedule,
    pub optimized: Schedule,
    pub cost: CostBreakdown,
    pub default_cost: CostBreakdown,
    pub methods: Vec<SolveMethod>,
    pub net_load: NetLoadProfile,
}

impl BuildingResult {
    /// Every shiftable run with its habitual and optimized start (interval of day).
    pub fn moves(&self, model: &HouseholdModel) -> Vec<RunMove> {
        let mut out = Vec::new();
        for a in model.shiftable() {
            for (day, (new, old)) in self
                .optimized
                .days(&a.id)
                .iter()
                .zip(self.habitual.days(&a.id))
                .enumerate()
            {
                if let (Some(start), Some(moved_from)) = (new, old) {
                    out.push(RunMove {
                        appliance: a.id.clone(),
                        day,
                        start: *start,
                        moved_from: *moved_from,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case1Report {
    /// Tariffs delivered to every building, full horizon.
    pub tariffs: TariffSet,
    pub buildings: Vec<BuildingResult>,
    pub aggregate: Aggregate,
    /// `None` when the scenario has no battery.
    pub dispatch: Option<DispatchPlan>,
    pub bids: BidSeries,
    /// Revenue had the surplus been sold without storage.
    pub pass_through_revenue: f64,
    pub settlement: Settlement,
    pub warnings: Vec<Warning>,
}

/// Market participation: tariffs to buildings, per-building optimization, net-load
/// collection, battery dispatch and bidding, settlement. Stages run strictly in that order.
pub fn case1(scenario: &Scenario, profiles: &[(String, HouseholdProfiles)]) -> Result<Case1Report> {
    check_profiles(scenario, profiles)?;
    let grid = scenario.grid;
    let tariffs = scenario.tariffs.clone();

    let buildings = scenario
        .households
        .par_iter()
        .zip(profiles.par_iter())
        .map(|(h, (_, p))| {
            let wrap = |e: Error| Error::stage("optimize", format!("building '{}': {e}", h.id));
            let habitual = p.schedule(h, &grid).map_err(wrap)?;
            let out = optimize_schedule_with(h, &habitual, &p.solar, &tariffs, &scenario.optimizer)
                .map_err(wrap)?;
            let consumption = out.schedule.consumption(h, &grid);
            let net = net_load(&consumption, &p.solar).map_err(wrap)?;
            Ok(BuildingResult {
                id: h.id.clone(),
                habitual,
                optimized: out.schedule,
                cost: out.cost,
                default_cost: out.default_cost,
                methods: out.methods,
                net_load: net,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let net_loads: Vec<(String, NetLoadProfile)> =
        buildings.iter().map(|b| (b.id.clone(), b.net_load.clone())).collect();
    let aggregate = aggregate_surplus(&grid, &net_loads).map_err(|e| Error::stage("aggregate", e))?;

    let prices = &tariffs.market_price;
    let pass = BidSeries::pass_through(&aggregate.surplus, grid.dt_hours());
    let pass_through_revenue = pass.revenue(prices);
    let (dispatch, bids) = match &scenario.bess {
        Some(bess) => {
            let d = optimize_bess(&grid, &aggregate.surplus, prices, bess, &scenario.lattice)
                .map_err(|e| Error::stage("bess", e))?;
            (Some(d.plan), d.bids)
        }
        None => (None, pass),
    };

    let (settlement, warning) =
        settle(&bids, prices, &tariffs.fit, &aggregate.exports).map_err(|e| Error::stage("settle", e))?;
    Ok(Case1Report {
        tariffs,
        buildings,
        aggregate,
        dispatch,
        bids,
        pass_through_revenue,
        settlement,
        warnings: warning.into_iter().collect(),
    })
}

#[derive(Serialize)]
struct ScheduleReport<'a> {
    building: &'a str,
    cost: CostBreakdown,
    default_cost: CostBreakdown,
    methods: &'a [SolveMethod],
    runs: Vec<RunMove>,
}

#[derive(Serialize)]
struct SettlementReport<'a> {
    market_revenue: f64,
    operator_profit: f64,
    total_payments: f64,
    /// Operator and building shares of market revenue (0 when revenue is 0).
    operator_share: f64,
    buildings_share: f64,
    pass_through_revenue: f64,
    building_payments: &'a BTreeMap<String, f64>,
    series: SettlementSeries<'a>,
}

#[derive(Serialize)]
struct SettlementSeries<'a> {
    surplus_kw: &'a [f64],
    market_price: &'a [f64],
    fit: &'a [f64],
    bid_kwh: &'a [f64],
}

fn case1_files(scenario: &Scenario, report: &Case1Report, w: &Writer<'_>, stage: &mut StageTimer) -> Result<()> {
    let t = &report.tariffs;
    w.series(
        stage,
        "case1/tariffs.csv",
        &Series::new()
            .with("tou", t.tou.clone())
            .with("fit", t.fit.clone())
            .with("market_price", t.market_price.clone()),
    )?;

    let mut schedules = Vec::new();
    let mut cost_rows = Vec::new();
    for (b, h) in report.buildings.iter().zip(&scenario.households) {
        w.series(
            stage,
            &format!("case1/net_load/{}.csv", b.id),
            &Series::new().with("net_kw", b.net_load.values().to_vec()),
        )?;
        schedules.push(ScheduleReport {
            building: &b.id,
            cost: b.cost,
            default_cost: b.default_cost,
            methods: &b.methods,
            runs: b.moves(h),
        });
        cost_rows.push(vec![
            b.id.clone(),
            io::format_number(b.cost.c_tou)?,
            io::format_number(b.cost.r_fi)?,
            io::format_number(b.cost.f)?,
            io::format_number(b.default_cost.f)?,
        ]);
    }
    w.json(stage, "case1/schedules.json", &schedules)?;
    let header = ["building", "c_tou", "r_fi", "f", "default_f"].map(String::from);
    w.table(stage, "case1/costs.csv", &header, &cost_rows)?;

    let prices = &t.market_price;
    let revenue: Vec<f64> = report.bids.quantity.iter().zip(prices).map(|(q, p)| q * p).collect();
    w.series(
        stage,
        "case1/bids.csv",
        &Series::new()
            .with("quantity_kwh", report.bids.quantity.clone())
            .with("price", prices.clone())
            .with("revenue", revenue),
    )?;
    if let Some(plan) = &report.dispatch {
        w.series(
            stage,
            "case1/dispatch.csv",
            &Series::new()
                .with("charge_kw", plan.charge.clone())
                .with("discharge_kw", plan.discharge.clone())
                .with("soc_kwh", plan.soc[1..].to_vec()),
        )?;
    }

    let s = &report.settlement;
    let total_payments = s.total_payments();
    let share = |v: f64| if s.market_revenue != 0.0 { v / s.market_revenue } else { 0.0 };
    w.json(
        stage,
        "case1/settlement.json",
        &SettlementReport {
            market_revenue: s.market_revenue,
            operator_profit: s.operator_profit,
            total_payments,
            operator_share: share(s.operator_profit),
            buildings_share: share(total_payments),
            pass_through_revenue: report.pass_through_revenue,
            building_payments: &s.building_payments,
            series: SettlementSeries {
                surplus_kw: &report.aggregate.surplus,
                market_price: prices,
                fit: &t.fit,
                bid_kwh: &report.bids.quantity,
            },
        },
    )
}

pub fn run_case1(scenario: &Scenario, out: &Path, options: &RunOptions) -> Result<(Case1Report, RunManifest)> {
    let mut manifest = RunManifest::new("case1", scenario);
    let profiles = obtain_profiles(scenario, out, &mut manifest)?;
    let mut stage = StageTimer::start("case1");
    let report = case1(scenario, &profiles)?;
    check_strict(options, &report.warnings)?;
    case1_files(scenario, &report, &Writer { root: out }, &mut stage)?;
    stage.finish(&mut manifest);
    manifest.warnings = report.warnings.clone();
    Writer { root: out }.manifest(&manifest)?;
    Ok((report, manifest))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case2Report {
    pub ids: Vec<String>,
    pub features: Vec<HouseholdFeatures>,
    /// `None` when there were too few distinct households to cluster.
    pub fcm: Option<FcmResult>,
    /// Hard cluster label per household.
    pub labels: Vec<usize>,
    /// `n x c` memberships.
    pub membership: Vec<Vec<f64>>,
    /// Flagging outcome per cluster that was large enough.
    pub flag_outcomes: BTreeMap<usize, FlagOutcome>,
    pub flagged: BTreeSet<String>,
    /// Every flagged household, with its (possibly empty) ranked plans.
    pub recommendations: BTreeMap<String, Vec<Recommendation>>,
    pub campaign: CampaignSummary,
    pub warnings: Vec<Warning>,
}

/// Knowledge sharing: features, clustering, flagging within clusters, peer recommendations
/// from unflagged households of the same cluster, campaign savings.
pub fn case2(scenario: &Scenario, profiles: &[(String, HouseholdProfiles)]) -> Result<Case2Report> {
    check_profiles(scenario, profiles)?;
    let grid = scenario.grid;
    let tariffs = &scenario.tariffs;
    let mut warnings = Vec::new();

    let schedules = scenario
        .households
        .par_iter()
        .zip(profiles.par_iter())
        .map(|(h, (_, p))| {
            p.schedule(h, &grid)
                .map_err(|e| Error::stage("features", format!("household '{}': {e}", h.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let features = scenario
        .households
        .iter()
        .zip(&schedules)
        .map(|(h, s)| {
            compute_features(&s.consumption(h, &grid), &tariffs.tou)
                .map_err(|e| Error::stage("features", format!("household '{}': {e}", h.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let ids: Vec<String> = scenario.households.iter().map(|h| h.id.clone()).collect();

    let c = scenario.fcm.clusters;
    let points: Vec<Vec<f64>> = features.iter().map(HouseholdFeatures::as_point).collect();
    let distinct = distinct_count(&points);
    let (fcm_result, labels, membership) = if distinct < c || points.len() <= c {
        warnings.push(Warning::TooFewDistinct { distinct, clusters: c });
        let mut row = vec![0.0; c];
        row[0] = 1.0;
        (None, vec![0; points.len()], vec![row; points.len()])
    } else {
        let (z, _, _) = standardize(&points);
        let r = fcm(&z, &scenario.fcm).map_err(|e| Error::stage("cluster", e))?;
        let labels = r.hard_labels.clone();
        let membership = r.membership.clone();
        (Some(r), labels, membership)
    };

    let mut flag_outcomes = BTreeMap::new();
    let mut flagged = BTreeSet::new();
    for k in 0..c {
        let group: Vec<(String, HouseholdFeatures)> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == k)
            .map(|(i, _)| (ids[i].clone(), features[i]))
            .collect();
        if group.len() < MIN_GROUP_SIZE {
            if !group.is_empty() || fcm_result.is_some() {
                warnings.push(Warning::SmallGroup { cluster: k, size: group.len() });
            }
            continue;
        }
        let outcome = flag_inefficient(&group, scenario.flag_k)
            .map_err(|e| Error::stage("flag", format!("cluster {k}: {e}")))?;
        flagged.extend(outcome.flagged.iter().cloned());
        flag_outcomes.insert(k, outcome);
    }

    let records = scenario
        .households
        .par_iter()
        .zip(schedules.par_iter())
        .map(|(h, s)| {
            HouseholdRecord::new(h, s, &grid, tariffs)
                .map_err(|e| Error::stage("recommend", format!("household '{}': {e}", h.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<usize> = (0..ids.len()).filter(|&i| flagged.contains(&ids[i])).collect();
    let results = targets
        .par_iter()
        .map(|&i| {
            let peers: Vec<HouseholdRecord<'_>> = (0..ids.len())
                .filter(|&j| labels[j] == labels[i] && !flagged.contains(&ids[j]))
                .map(|j| records[j].clone())
                .collect();
            recommend(&records[i], &peers, &grid, tariffs, scenario.top_n)
                .map(|r| (ids[i].clone(), r))
                .map_err(|e| Error::stage("recommend", format!("household '{}': {e}", ids[i])))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut recommendations = BTreeMap::new();
    for (id, (recs, warning)) in results {
        warnings.extend(warning);
        recommendations.insert(id, recs);
    }
    let campaign = campaign_savings(&recommendations);
    if campaign.targets > 0 && !campaign.mean_defined {
        warnings.push(Warning::UndefinedMean);
    }

    Ok(Case2Report {
        ids,
        features,
        fcm: fcm_result,
        labels,
        membership,
        flag_outcomes,
        flagged,
        recommendations,
        campaign,
        warnings,
    })
}

fn case2_files(scenario: &Scenario, report: &Case2Report, w: &Writer<'_>, stage: &mut StageTimer) -> Result<()> {
    let c = scenario.fcm.clusters;
    let mut header = vec!["household".to_string(), "cluster".to_string()];
    header.extend((0..c).map(|k| format!("membership_{k}")));
    header.push("flagged".into());
    let flag = |id: &str| if report.flagged.contains(id) { "1" } else { "0" }.to_string();
    let mut rows = Vec::new();
    let mut scatter = Vec::new();
    for (i, id) in report.ids.iter().enumerate() {
        let mut row = vec![id.clone(), report.labels[i].to_string()];
        for u in &report.membership[i] {
            row.push(io::format_number(*u)?);
        }
        row.push(flag(id));
        rows.push(row);
        scatter.push(vec![
            id.clone(),
            io::format_number(report.features[i].avg_daily_energy)?,
            io::format_number(report.features[i].avg_daily_cost)?,
            report.labels[i].to_string(),
            flag(id),
        ]);
    }
    w.table(stage, "case2/clusters.csv", &header, &rows)?;
    let header = ["household", "energy_kwh_per_day", "cost_per_day", "cluster", "flagged"].map(String::from);
    w.table(stage, "case2/scatter.csv", &header, &scatter)?;
    w.json(stage, "case2/recommendations.json", &report.recommendations)
}

pub fn run_case2(scenario: &Scenario, out: &Path, options: &RunOptions) -> Result<(Case2Report, RunManifest)> {
    let mut manifest = RunManifest::new("case2", scenario);
    let profiles = obtain_profiles(scenario, out, &mut manifest)?;
    let mut stage = StageTimer::start("case2");
    let report = case2(scenario, &profiles)?;
    check_strict(options, &report.warnings)?;
    case2_files(scenario, &report, &Writer { root: out }, &mut stage)?;
    stage.finish(&mut manifest);
    manifest.warnings = report.warnings.clone();
    manifest.campaign = Some(report.campaign);
    Writer { root: out }.manifest(&manifest)?;
    Ok((report, manifest))
}

/// Output directory: explicit override, else the config's, else `./out`.
pub fn output_dir(scenario: &Scenario, cli: Option<&Path>) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| scenario.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}
