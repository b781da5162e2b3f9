//! C ABI over `bvpp-core`.
//!
//! Every function returns a [`BvppStatus`]; on failure the message is kept per thread and
//! can be copied out with [`bvpp_last_error_message`]. Scenarios and clustering results are
//! opaque handles owned by the caller and released with the matching `_free` function.
//! Arrays are passed as pointer plus length; output arrays must be preallocated.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use bvpp_core::bems::{cost_breakdown, TariffSet};
use bvpp_core::config::ScenarioConfig;
use bvpp_core::grid::{LoadProfile, TimeGrid};
use bvpp_core::market::{optimize_bess, BessSpec, Lattice};
use bvpp_core::pipeline::{self, RunOptions};
use bvpp_core::recommend::{fcm, FcmParams, FcmResult};
use bvpp_core::{Error, Scenario};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvppStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidInput = 4,
    Infeasible = 5,
    Io = 6,
    Strict = 7,
    Stage = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> BvppStatus {
    match e {
        Error::Config { .. } => BvppStatus::Config,
        Error::InfeasibleWindow { .. } | Error::InfeasibleSpec(_) => BvppStatus::Infeasible,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => BvppStatus::Io,
        Error::Strict(_) => BvppStatus::Strict,
        Error::Stage { .. } => BvppStatus::Stage,
        _ => BvppStatus::InvalidInput,
    }
}

struct Fail(BvppStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BvppStatus::NullArgument, format!("{what} is null"))
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BvppStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BvppStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BvppStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BvppStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn grid_for(intervals: usize, interval_minutes: u32) -> Result<TimeGrid, Fail> {
    let probe = TimeGrid::new(interval_minutes, 1)?;
    let per_day = probe.intervals_per_day();
    if intervals == 0 || !intervals.is_multiple_of(per_day) {
        return Err(Fail(
            BvppStatus::InvalidInput,
            format!("{intervals} intervals is not a whole number of {per_day}-interval days"),
        ));
    }
    Ok(probe.with_days(intervals / per_day)?)
}

/// Copies the calling thread's last error message (NUL-terminated, truncated to fit) into
/// `buf` and returns the full message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bvpp_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Toolkit version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bvpp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A validated scenario.
pub struct BvppScenario {
    inner: Scenario,
}

fn seed_override(config: &mut ScenarioConfig, seed: *const u64) {
    // SAFETY: caller passes null or a valid pointer
    if let Some(s) = unsafe { seed.as_ref() } {
        config.seed = *s;
    }
}

/// Loads and validates a TOML scenario file. `seed` may be null; otherwise it overrides the
/// configured seed.
///
/// # Safety
/// `path` must be a NUL-terminated string, `seed` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bvpp_scenario_load(
    path: *const c_char,
    seed: *const u64,
    out: *mut *mut BvppScenario,
) -> BvppStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let (mut config, base) = ScenarioConfig::load(Path::new(path))?;
        seed_override(&mut config, seed);
        let inner = config.resolve(&base)?;
        *out = Box::into_raw(Box::new(BvppScenario { inner }));
        Ok(())
    })
}

/// Parses a scenario from TOML text. Relative file paths resolve against `base_dir`
/// (null means the current directory).
///
/// # Safety
/// `toml` and non-null `base_dir` must be NUL-terminated; `seed` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bvpp_scenario_from_toml(
    toml: *const c_char,
    base_dir: *const c_char,
    seed: *const u64,
    out: *mut *mut BvppScenario,
) -> BvppStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(toml, "toml")?;
        let base = if base_dir.is_null() { "." } else { str_arg(base_dir, "base_dir")? };
        let mut config = ScenarioConfig::from_toml_str(text)?;
        seed_override(&mut config, seed);
        let inner = config.resolve(Path::new(base))?;
        *out = Box::into_raw(Box::new(BvppScenario { inner }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from a `bvpp_scenario_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bvpp_scenario_free(scenario: *mut BvppScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn bvpp_scenario_household_count(scenario: *const BvppScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.households.len())
}

/// Writes the 64-hex-digit config hash plus terminator; `buf` needs 65 bytes.
///
/// # Safety
/// `scenario` live, `buf` pointing to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bvpp_scenario_config_hash(
    scenario: *const BvppScenario,
    buf: *mut c_char,
    len: usize,
) -> BvppStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let hash = s.inner.config_hash();
        let dst = out_slice(buf, len, "buf")?;
        if dst.len() <= hash.len() {
            return Err(Fail(BvppStatus::InvalidInput, format!("buffer needs {} bytes", hash.len() + 1)));
        }
        for (d, b) in dst.iter_mut().zip(hash.bytes()) {
            *d = b as c_char;
        }
        dst[hash.len()] = 0;
        Ok(())
    })
}

/// Writes the per-household profile CSVs under `out_dir`.
///
/// # Safety
/// `scenario` live, `out_dir` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bvpp_run_generate(scenario: *const BvppScenario, out_dir: *const c_char) -> BvppStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let dir = str_arg(out_dir, "out_dir")?;
        pipeline::run_generate(&s.inner, Path::new(dir), &RunOptions::default())?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BvppSettlement {
    pub market_revenue: f64,
    pub total_payments: f64,
    pub operator_profit: f64,
    pub pass_through_revenue: f64,
}

/// Runs the market-participation case and writes its artifacts under `out_dir`.
///
/// # Safety
/// `scenario` live, `out_dir` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bvpp_run_case1(
    scenario: *const BvppScenario,
    out_dir: *const c_char,
    strict: bool,
    out: *mut BvppSettlement,
) -> BvppStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let dir = str_arg(out_dir, "out_dir")?;
        let out = out_ref(out, "out")?;
        let (r, _) = pipeline::run_case1(&s.inner, Path::new(dir), &RunOptions { strict })?;
        *out = BvppSettlement {
            market_revenue: r.settlement.market_revenue,
            total_payments: r.settlement.total_payments(),
            operator_profit: r.settlement.operator_profit,
            pass_through_revenue: r.pass_through_revenue,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BvppCampaign {
    /// $ per day.
    pub total: f64,
    pub mean: f64,
    pub targets: usize,
    pub recommended: usize,
    pub mean_defined: bool,
}

/// Runs the knowledge-sharing case and writes its artifacts under `out_dir`.
///
/// # Safety
/// `scenario` live, `out_dir` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bvpp_run_case2(
    scenario: *const BvppScenario,
    out_dir: *const c_char,
    strict: bool,
    out: *mut BvppCampaign,
) -> BvppStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let dir = str_arg(out_dir, "out_dir")?;
        let out = out_ref(out, "out")?;
        let (r, _) = pipeline::run_case2(&s.inner, Path::new(dir), &RunOptions { strict })?;
        let c = r.campaign;
        *out = BvppCampaign {
            total: c.total,
            mean: c.mean,
            targets: c.targets,
            recommended: c.recommended,
            mean_defined: c.mean_defined,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BvppCost {
    pub c_tou: f64,
    pub r_fi: f64,
    pub f: f64,
}

/// Import cost, feed-in revenue and their difference for `n` intervals of
/// `interval_minutes` each (`n` must cover whole days).
///
/// # Safety
/// All input arrays must hold `n` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bvpp_cost_breakdown(
    consumption_kw: *const f64,
    solar_kw: *const f64,
    tou: *const f64,
    fit: *const f64,
    market_price: *const f64,
    n: usize,
    interval_minutes: u32,
    out: *mut BvppCost,
) -> BvppStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let grid = grid_for(n, interval_minutes)?;
        let consumption = LoadProfile::new(grid, slice_arg(consumption_kw, n, "consumption_kw")?.to_vec())?;
        let solar = LoadProfile::new(grid, slice_arg(solar_kw, n, "solar_kw")?.to_vec())?;
        let tariffs = TariffSet::new(
            slice_arg(tou, n, "tou")?.to_vec(),
            slice_arg(fit, n, "fit")?.to_vec(),
            slice_arg(market_price, n, "market_price")?.to_vec(),
        )?;
        let cb = cost_breakdown(&consumption, &solar, &tariffs)?;
        *out = BvppCost {
            c_tou: cb.c_tou,
            r_fi: cb.r_fi,
            f: cb.f,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvppBessSpec {
    pub capacity_kwh: f64,
    pub max_charge_kw: f64,
    pub max_discharge_kw: f64,
    pub eta_c: f64,
    pub eta_d: f64,
    pub soc_min_kwh: f64,
    pub soc_max_kwh: f64,
    pub soc_init_kwh: f64,
}

/// Revenue-maximizing battery dispatch over `n` intervals on a lattice of `levels` SOC
/// levels. `charge_kw`, `discharge_kw` and `bids_kwh` receive `n` values, `soc_kwh`
/// receives `n + 1` (initial state first). Any output array may be null to skip it.
///
/// # Safety
/// Inputs hold `n` values; non-null outputs have the sizes above; `spec` and `revenue` valid.
#[no_mangle]
pub unsafe extern "C" fn bvpp_optimize_bess(
    surplus_kw: *const f64,
    prices: *const f64,
    n: usize,
    interval_minutes: u32,
    spec: *const BvppBessSpec,
    levels: usize,
    charge_kw: *mut f64,
    discharge_kw: *mut f64,
    soc_kwh: *mut f64,
    bids_kwh: *mut f64,
    revenue: *mut f64,
) -> BvppStatus {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let revenue = out_ref(revenue, "revenue")?;
        let grid = grid_for(n, interval_minutes)?;
        let surplus = slice_arg(surplus_kw, n, "surplus_kw")?;
        let prices = slice_arg(prices, n, "prices")?;
        let bess = BessSpec {
            capacity_kwh: spec.capacity_kwh,
            max_charge_kw: spec.max_charge_kw,
            max_discharge_kw: spec.max_discharge_kw,
            eta_c: spec.eta_c,
            eta_d: spec.eta_d,
            soc_min_kwh: spec.soc_min_kwh,
            soc_max_kwh: spec.soc_max_kwh,
            soc_init_kwh: spec.soc_init_kwh,
        };
        let d = optimize_bess(&grid, surplus, prices, &bess, &Lattice::Levels(levels))?;
        for (dst, src, len) in [
            (charge_kw, &d.plan.charge, n),
            (discharge_kw, &d.plan.discharge, n),
            (soc_kwh, &d.plan.soc, n + 1),
            (bids_kwh, &d.bids.quantity, n),
        ] {
            if !dst.is_null() {
                out_slice(dst, len, "output")?.copy_from_slice(src);
            }
        }
        *revenue = d.bids.revenue(prices);
        Ok(())
    })
}

/// Result of a fuzzy c-means run.
pub struct BvppFcm {
    inner: FcmResult,
}

/// Clusters `n` points of dimension `dim` (row-major). Pass `tol <= 0` or `max_iter == 0`
/// for the defaults (1e-6, 300).
///
/// # Safety
/// `points` holds `n * dim` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bvpp_fcm_run(
    points: *const f64,
    n: usize,
    dim: usize,
    clusters: usize,
    fuzzifier: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
    out: *mut *mut BvppFcm,
) -> BvppStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if dim == 0 {
            return Err(Fail(BvppStatus::InvalidInput, "dim must be > 0".into()));
        }
        let flat = slice_arg(points, n * dim, "points")?;
        let rows: Vec<Vec<f64>> = flat.chunks(dim).map(<[f64]>::to_vec).collect();
        let defaults = FcmParams::default();
        let params = FcmParams {
            clusters,
            fuzzifier,
            tol: if tol > 0.0 { tol } else { defaults.tol },
            max_iter: if max_iter > 0 { max_iter } else { defaults.max_iter },
            seed,
        };
        let inner = fcm(&rows, &params)?;
        *out = Box::into_raw(Box::new(BvppFcm { inner }));
        Ok(())
    })
}

/// # Safety
/// `result` must come from [`bvpp_fcm_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bvpp_fcm_free(result: *mut BvppFcm) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` live or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn bvpp_fcm_iterations(result: *const BvppFcm) -> usize {
    result.as_ref().map_or(0, |r| r.inner.iterations)
}

/// # Safety
/// `result` live or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn bvpp_fcm_objective(result: *const BvppFcm) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.inner.objective)
}

/// Copies the `n x clusters` membership matrix, row-major.
///
/// # Safety
/// `result` live; `out` holds `len` values.
#[no_mangle]
pub unsafe extern "C" fn bvpp_fcm_membership(result: *const BvppFcm, out: *mut f64, len: usize) -> BvppStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        let flat: Vec<f64> = r.membership.iter().flatten().copied().collect();
        copy_exact(&flat, out, len)
    })
}

/// Copies the `clusters x dim` centroid matrix, row-major.
///
/// # Safety
/// `result` live; `out` holds `len` values.
#[no_mangle]
pub unsafe extern "C" fn bvpp_fcm_centroids(result: *const BvppFcm, out: *mut f64, len: usize) -> BvppStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        let flat: Vec<f64> = r.centroids.iter().flatten().copied().collect();
        copy_exact(&flat, out, len)
    })
}

/// Copies the `n` hard labels.
///
/// # Safety
/// `result` live; `out` holds `len` values.
#[no_mangle]
pub unsafe extern "C" fn bvpp_fcm_labels(result: *const BvppFcm, out: *mut usize, len: usize) -> BvppStatus {
    guard(|| {
        let r = &result.as_ref().ok_or_else(|| null("result"))?.inner;
        copy_exact(&r.hard_labels, out, len)
    })
}

unsafe fn copy_exact<T: Copy>(src: &[T], out: *mut T, len: usize) -> Result<(), Fail> {
    if len != src.len() {
        return Err(Fail(
            BvppStatus::InvalidInput,
            format!("output holds {len} values, result has {}", src.len()),
        ));
    }
    out_slice(out, len, "out")?.copy_from_slice(src);
    Ok(())
}
