//! Scenario configuration: TOML schema, validation and the resolved [`Scenario`].
//!
//! Every field is checked before any computation starts; errors carry the dotted path of
//! the offending field (or the TOML line and column for syntax errors).

use std::collections::{BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bems::{OptimizerOptions, TariffSet};
use crate::error::{Error, Result};
use crate::fleet::{synthetic_fleet, FleetSpec};
use crate::grid::TimeGrid;
use crate::io;
use crate::market::{BessSpec, Lattice};
use crate::profile::{
    classify_appliance, night_curfew, tile_daily, ApplianceSpec, Category, HouseholdModel,
    Lifestyle,
};
use crate::recommend::FcmParams;
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridConfig,
    pub tariffs: TariffConfig,
    #[serde(default)]
    pub solar: SolarConfig,
    #[serde(default)]
    pub bess: Option<BessConfig>,
    #[serde(default)]
    pub scheduler: SchedulerConfig,
    #[serde(default)]
    pub clustering: ClusteringConfig,
    #[serde(default)]
    pub fleet: Option<FleetSpec>,
    #[serde(default)]
    pub households: Vec<HouseholdConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_interval")]
    pub interval_minutes: u32,
    #[serde(default = "default_days")]
    pub num_days: usize,
}

fn default_interval() -> u32 {
    60
}

fn default_days() -> usize {
    1
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            interval_minutes: default_interval(),
            num_days: default_days(),
        }
    }
}

/// Either a CSV file (`interval,tou,fit,market_price`) or inline series. Series may cover
/// one day (repeated over the horizon) or the whole horizon.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TariffConfig {
    pub file: Option<PathBuf>,
    pub tou: Option<Vec<f64>>,
    pub fit: Option<Vec<f64>>,
    pub market_price: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolarConfig {
    /// Output coefficients in `[0, 1]`, one day or the whole horizon. Empty means no solar.
    #[serde(default)]
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BessConfig {
    pub capacity_kwh: f64,
    pub max_charge_kw: f64,
    pub max_discharge_kw: f64,
    #[serde(default = "one")]
    pub eta_c: f64,
    #[serde(default = "one")]
    pub eta_d: f64,
    #[serde(default)]
    pub soc_min_kwh: f64,
    pub soc_max_kwh: Option<f64>,
    #[serde(default)]
    pub soc_init_kwh: Option<f64>,
    /// SOC lattice levels spanning `[soc_min, soc_max]`.
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn one() -> f64 {
    1.0
}

fn default_levels() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulerConfig {
    #[serde(default = "default_exhaustive_limit")]
    pub exhaustive_limit: u64,
}

fn default_exhaustive_limit() -> u64 {
    1_000_000
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            exhaustive_limit: default_exhaustive_limit(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteringConfig {
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    #[serde(default = "default_fuzzifier")]
    pub fuzzifier: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "one")]
    pub flag_k: f64,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
}

fn default_clusters() -> usize {
    3
}
fn default_fuzzifier() -> f64 {
    2.0
}
fn default_tol() -> f64 {
    1e-6
}
fn default_max_iter() -> usize {
    300
}
fn default_top_n() -> usize {
    2
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            clusters: default_clusters(),
            fuzzifier: default_fuzzifier(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            flag_k: 1.0,
            top_n: default_top_n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HouseholdConfig {
    pub id: String,
    #[serde(default)]
    pub solar_capacity_kw: f64,
    pub seed: Option<u64>,
    pub appliances: Vec<ApplianceConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplianceConfig {
    pub id: String,
    pub name: String,
    /// Required only when `name` is not one of the ten known appliances.
    pub category: Option<Category>,
    pub rated_power_kw: f64,
    /// Run length in intervals.
    pub duration: usize,
    pub preferred_start: usize,
    /// `[earliest_start, latest_start]`; shiftable appliances default to the whole day.
    pub window: Option<[usize; 2]>,
    /// Applies the 23:00-06:00 curfew.
    #[serde(default)]
    pub noisy: bool,
    /// Explicit curfew intervals; overrides `noisy`.
    pub curfew: Option<Vec<usize>>,
    #[serde(default = "one")]
    pub activation_probability: f64,
    #[serde(default)]
    pub start_jitter: f64,
}

/// A validated, fully resolved scenario. Downstream stages only ever see this.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub seed: u64,
    pub grid: TimeGrid,
    /// Full-horizon tariffs.
    pub tariffs: TariffSet,
    /// Full-horizon solar coefficients.
    pub solar_coefficients: Vec<f64>,
    pub bess: Option<BessSpec>,
    pub lattice: Lattice,
    pub optimizer: OptimizerOptions,
    pub fcm: FcmParams,
    pub flag_k: f64,
    pub top_n: usize,
    pub households: Vec<HouseholdModel>,
    /// Planted-inefficient households of the synthetic fleet.
    pub planted: BTreeSet<String>,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = match e.span() {
                Some(span) => {
                    let line = text[..span.start].matches('\n').count() + 1;
                    let col = span.start - text[..span.start].rfind('\n').map_or(0, |i| i + 1) + 1;
                    format!("line {line}, column {col}")
                }
                None => "<document>".to_string(),
            };
            Error::config(field, e.message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_toml_str(&text)?, base))
    }

    /// Validates everything and resolves files and defaults. `base_dir` anchors relative paths.
    pub fn resolve(&self, base_dir: &Path) -> Result<Scenario> {
        let grid = TimeGrid::new(self.grid.interval_minutes, self.grid.num_days)
            .map_err(|e| Error::config("grid", e.to_string()))?;

        let tariffs = self.resolve_tariffs(base_dir, &grid)?;

        let solar_coefficients = if self.solar.coefficients.is_empty() {
            vec![0.0; grid.len()]
        } else {
            let c = tile_daily(&self.solar.coefficients, &grid)
                .map_err(|e| Error::config("solar.coefficients", e.to_string()))?;
            if let Some((i, v)) = c.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
                return Err(Error::config(
                    format!("solar.coefficients[{}]", i % self.solar.coefficients.len()),
                    format!("{v} outside [0, 1]"),
                ));
            }
            c
        };

        let bess = self.bess.as_ref().map(|b| b.resolve()).transpose()?;
        let lattice = Lattice::Levels(self.bess.as_ref().map_or(default_levels(), |b| b.levels));
        if let Lattice::Levels(n) = lattice {
            if n < 2 {
                return Err(Error::config("bess.levels", "need at least 2 levels"));
            }
        }

        if self.scheduler.exhaustive_limit == 0 {
            return Err(Error::config("scheduler.exhaustive_limit", "must be >= 1"));
        }
        let c = &self.clustering;
        if c.clusters < 2 {
            return Err(Error::config("clustering.clusters", "must be >= 2"));
        }
        if !(c.fuzzifier > 1.0 && c.fuzzifier.is_finite()) {
            return Err(Error::config("clustering.fuzzifier", "must be > 1"));
        }
        if !(c.tol > 0.0 && c.tol.is_finite()) {
            return Err(Error::config("clustering.tol", "must be > 0"));
        }
        if c.max_iter == 0 {
            return Err(Error::config("clustering.max_iter", "must be >= 1"));
        }
        if !(c.flag_k >= 0.0 && c.flag_k.is_finite()) {
            return Err(Error::config("clustering.flag_k", "must be >= 0"));
        }
        if c.top_n == 0 {
            return Err(Error::config("clustering.top_n", "must be >= 1"));
        }

        let mut households = Vec::new();
        for (i, h) in self.households.iter().enumerate() {
            households.push(h.resolve(&format!("households[{i}]"), &grid, self.seed)?);
        }
        let mut planted = BTreeSet::new();
        if let Some(spec) = &self.fleet {
            let fleet = synthetic_fleet(spec, &grid, self.seed).map_err(|e| match e {
                e @ Error::Config { .. } => e,
                other => Error::config("fleet", other.to_string()),
            })?;
            households.extend(fleet.households);
            planted = fleet.planted;
        }
        let mut ids = HashSet::new();
        for h in &households {
            if !ids.insert(h.id.as_str()) {
                return Err(Error::config("households", format!("duplicate household id '{}'", h.id)));
            }
            if h.id.contains(['/', '\\']) || h.id.starts_with('.') {
                return Err(Error::config(
                    "households",
                    format!("household id '{}' cannot be used as a file name", h.id),
                ));
            }
        }

        Ok(Scenario {
            seed: self.seed,
            grid,
            tariffs,
            solar_coefficients,
            bess,
            lattice,
            optimizer: OptimizerOptions {
                exhaustive_limit: self.scheduler.exhaustive_limit,
            },
            fcm: FcmParams {
                clusters: c.clusters,
                fuzzifier: c.fuzzifier,
                tol: c.tol,
                max_iter: c.max_iter,
                seed: derive_seed(self.seed, "fcm"),
            },
            flag_k: c.flag_k,
            top_n: c.top_n,
            households,
            planted,
            output_dir: self.output_dir.as_ref().map(|p| base_dir.join(p)),
        })
    }

    fn resolve_tariffs(&self, base_dir: &Path, grid: &TimeGrid) -> Result<TariffSet> {
        let t = &self.tariffs;
        let daily = match (&t.file, &t.tou, &t.fit, &t.market_price) {
            (Some(file), None, None, None) => {
                let path = base_dir.join(file);
                let f = std::fs::File::open(&path)
                    .map_err(|e| Error::config("tariffs.file", format!("{}: {e}", path.display())))?;
                io::read_tariff_csv(f).map_err(|e| Error::config("tariffs.file", e.to_string()))?
            }
            (None, Some(tou), Some(fit), Some(mp)) => TariffSet {
                tou: tou.clone(),
                fit: fit.clone(),
                market_price: mp.clone(),
            },
            _ => {
                return Err(Error::config(
                    "tariffs",
                    "give either `file` or all of `tou`, `fit`, `market_price`",
                ))
            }
        };
        daily
            .validate()
            .map_err(|e| Error::config("tariffs", e.to_string()))?;
        daily
            .tiled(grid)
            .map_err(|e| Error::config("tariffs", e.to_string()))
    }
}

impl BessConfig {
    fn resolve(&self) -> Result<BessSpec> {
        let soc_max = self.soc_max_kwh.unwrap_or(self.capacity_kwh);
        let spec = BessSpec {
            capacity_kwh: self.capacity_kwh,
            max_charge_kw: self.max_charge_kw,
            max_discharge_kw: self.max_discharge_kw,
            eta_c: self.eta_c,
            eta_d: self.eta_d,
            soc_min_kwh: self.soc_min_kwh,
            soc_max_kwh: soc_max,
            soc_init_kwh: self.soc_init_kwh.unwrap_or(self.soc_min_kwh),
        };
        spec.validate().map_err(|e| Error::config("bess", e.to_string()))?;
        Ok(spec)
    }
}

impl HouseholdConfig {
    fn resolve(&self, path: &str, grid: &TimeGrid, global_seed: u64) -> Result<HouseholdModel> {
        if self.id.is_empty() {
            return Err(Error::config(format!("{path}.id"), "must not be empty"));
        }
        let mut appliances = Vec::new();
        let mut lifestyle = std::collections::BTreeMap::new();
        for (j, a) in self.appliances.iter().enumerate() {
            let apath = format!("{path}.appliances[{j}]");
            let category = match (a.category, classify_appliance(&a.name)) {
                (Some(c), _) => c,
                (None, Ok(c)) => c,
                (None, Err(e)) => return Err(Error::config(format!("{apath}.category"), e.to_string())),
            };
            let per_day = grid.intervals_per_day();
            let [earliest, latest] = match (a.window, category) {
                (Some(w), _) => w,
                (None, Category::NonShiftable) => [a.preferred_start, a.preferred_start],
                (None, Category::Shiftable) => [0, per_day.saturating_sub(a.duration)],
            };
            let curfew = match (&a.curfew, a.noisy) {
                (Some(c), _) => c.iter().copied().collect(),
                (None, true) => night_curfew(grid),
                (None, false) => BTreeSet::new(),
            };
            let spec = ApplianceSpec {
                id: a.id.clone(),
                name: a.name.clone(),
                rated_power_kw: a.rated_power_kw,
                duration: a.duration,
                category,
                earliest_start: earliest,
                latest_start: latest,
                preferred_start: a.preferred_start,
                curfew,
            };
            spec.validate(grid).map_err(|e| Error::config(apath.clone(), e.to_string()))?;
            if spec.feasible_starts().is_empty() {
                return Err(Error::config(apath, "window lies entirely inside the curfew"));
            }
            lifestyle.insert(
                a.id.clone(),
                Lifestyle {
                    activation_probability: a.activation_probability,
                    start_jitter: a.start_jitter,
                },
            );
            appliances.push(spec);
        }
        let model = HouseholdModel {
            id: self.id.clone(),
            appliances,
            lifestyle,
            solar_capacity_kw: self.solar_capacity_kw,
            seed: self.seed.unwrap_or_else(|| derive_seed(global_seed, &self.id)),
        };
        model.validate(grid).map_err(|e| Error::config(path, e.to_string()))?;
        Ok(model)
    }
}

impl Scenario {
    /// SHA-256 over the canonical JSON of every semantically meaningful field.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn with_seed(config: &ScenarioConfig, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            seed,
            ..config.clone()
        }
    }
}
