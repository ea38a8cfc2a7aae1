//! C ABI for the planning engine.
//!
//! Plain computations take and return C scalars or flat `repr(C)` structs
//! and report a [`TcStatus`] code; compound state (terrain rasters, RSRP
//! maps) lives behind opaque handles with explicit `_free` functions. The
//! last error message is kept per thread and retrievable with
//! [`tc_last_error`]. The C header is generated into `include/tallcell.h`
//! at build time.

use libc::{c_char, c_double, c_int, size_t};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tallcell::antenna::{make_uniform_plan, PatternKind};
use tallcell::capacity::{
    capacity_vs_sectors, cinr_db, cnr_db, total_capacity_bps, SectorCapacityInput,
};
use tallcell::coverage::{compute_rsrp_map, coverage_area_km2, save_rsrp_asc, RsrpMap, Site};
use tallcell::error::Error;
use tallcell::link::{
    beamwidth_from_gain, evaluate_link_budget, mapl_db, noise_power_dbm, BeamwidthModel,
    LinkBudgetInput,
};
use tallcell::propagation::{
    fspl_db, knife_edge_loss_db, spm_pathloss_db, PathContext, SpmParams,
};
use tallcell::terrain::{load_grid, ElevationGrid};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    TcOk = 0,
    TcInvalidArgument = 1,
    TcDomainError = 2,
    TcDegenerateSpread = 3,
    TcNumericalError = 4,
    TcParseError = 5,
    TcIoError = 6,
    TcNullPointer = 7,
    TcInvalidUtf8 = 8,
    TcPanic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> TcStatus {
    match err {
        Error::InvalidArgument(_) => TcStatus::TcInvalidArgument,
        Error::Domain(_) => TcStatus::TcDomainError,
        Error::DegenerateSpread(_) => TcStatus::TcDegenerateSpread,
        Error::Numerical(_) => TcStatus::TcNumericalError,
        Error::Parse { .. } => TcStatus::TcParseError,
        Error::Io(_) => TcStatus::TcIoError,
    }
}

fn fail(err: Error) -> TcStatus {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

/// Runs a fallible body, translating errors and panics into status codes.
fn guarded<F: FnOnce() -> Result<(), Error>>(body: F) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TcStatus::TcOk,
        Ok(Err(err)) => fail(err),
        Err(_) => {
            set_error("internal panic");
            TcStatus::TcPanic
        }
    }
}

unsafe fn out_f64(ptr: *mut c_double, value: f64) -> Result<(), Error> {
    if ptr.is_null() {
        return Err(Error::invalid("null output pointer"));
    }
    *ptr = value;
    Ok(())
}

unsafe fn path_from(ptr: *const c_char) -> Result<&'static str, Error> {
    if ptr.is_null() {
        return Err(Error::invalid("null path"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Error::invalid("path is not valid UTF-8"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message on this thread into `buf` (truncated to
/// `len - 1` bytes, always NUL-terminated) and returns the full message
/// length in bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (the call then only
/// reports the length).
#[no_mangle]
pub unsafe extern "C" fn tc_last_error(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

// ---------------------------------------------------------------------------
// Link budget
// ---------------------------------------------------------------------------

/// Link-budget inputs; temperatures in kelvin, powers in dBm, gains in dBi.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TcLinkBudget {
    pub tx_power_dbm: c_double,
    pub tx_gain_dbi: c_double,
    pub rx_gain_dbi: c_double,
    pub pathloss_db: c_double,
    pub bandwidth_hz: c_double,
    pub noise_figure_db: c_double,
    pub temperature_k: c_double,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TcLinkBudgetResult {
    pub rx_power_dbm: c_double,
    pub noise_power_dbm: c_double,
    pub snr_db: c_double,
}

impl TcLinkBudget {
    fn to_input(self) -> LinkBudgetInput {
        LinkBudgetInput {
            tx_power_dbm: self.tx_power_dbm,
            tx_gain_dbi: self.tx_gain_dbi,
            rx_gain_dbi: self.rx_gain_dbi,
            pathloss_db: self.pathloss_db,
            bandwidth_hz: self.bandwidth_hz,
            noise_figure_db: self.noise_figure_db,
            temperature_k: self.temperature_k,
        }
    }
}

/// Thermal noise power 10*log10(kTB/1mW).
///
/// # Safety
/// `out_dbm` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_noise_power_dbm(
    bandwidth_hz: c_double,
    temperature_k: c_double,
    out_dbm: *mut c_double,
) -> TcStatus {
    guarded(|| out_f64(out_dbm, noise_power_dbm(bandwidth_hz, temperature_k)?))
}

/// Evaluates a link budget.
///
/// # Safety
/// `input` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tc_evaluate_link_budget(
    input: *const TcLinkBudget,
    out: *mut TcLinkBudgetResult,
) -> TcStatus {
    guarded(|| {
        if input.is_null() || out.is_null() {
            return Err(Error::invalid("null pointer"));
        }
        let result = evaluate_link_budget(&(*input).to_input())?;
        *out = TcLinkBudgetResult {
            rx_power_dbm: result.rx_power_dbm,
            noise_power_dbm: result.noise_power_dbm,
            snr_db: result.snr_db,
        };
        Ok(())
    })
}

/// Maximum allowable pathloss at the given minimum SNR.
///
/// # Safety
/// `input` and `out_db` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tc_mapl_db(
    input: *const TcLinkBudget,
    snr_min_db: c_double,
    out_db: *mut c_double,
) -> TcStatus {
    guarded(|| {
        if input.is_null() {
            return Err(Error::invalid("null pointer"));
        }
        out_f64(out_db, mapl_db(&(*input).to_input(), snr_min_db)?)
    })
}

/// 3-dB beamwidth in degrees for a peak gain; pass `x_eta_deg2 <= 0` for the
/// built-in default constant.
///
/// # Safety
/// `out_deg` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_beamwidth_from_gain(
    gain_dbi: c_double,
    x_eta_deg2: c_double,
    out_deg: *mut c_double,
) -> TcStatus {
    guarded(|| {
        let model = if x_eta_deg2 > 0.0 {
            BeamwidthModel::new(x_eta_deg2)?
        } else {
            BeamwidthModel::default()
        };
        out_f64(out_deg, beamwidth_from_gain(gain_dbi, &model))
    })
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

/// Empirical pathloss coefficients (see the library documentation for the
/// model form).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TcSpmParams {
    pub k1_los: c_double,
    pub k2_los: c_double,
    pub k1_nlos: c_double,
    pub k2_nlos: c_double,
    pub k3: c_double,
    pub k4: c_double,
    pub k5: c_double,
    pub k6: c_double,
    pub k7: c_double,
    pub k_clutter: c_double,
    pub f_clutter: c_double,
    pub k_hill_los: c_double,
}

impl From<SpmParams> for TcSpmParams {
    fn from(p: SpmParams) -> Self {
        TcSpmParams {
            k1_los: p.k1_los,
            k2_los: p.k2_los,
            k1_nlos: p.k1_nlos,
            k2_nlos: p.k2_nlos,
            k3: p.k3,
            k4: p.k4,
            k5: p.k5,
            k6: p.k6,
            k7: p.k7,
            k_clutter: p.k_clutter,
            f_clutter: p.f_clutter,
            k_hill_los: p.k_hill_los,
        }
    }
}

impl TcSpmParams {
    fn to_params(self) -> SpmParams {
        SpmParams {
            k1_los: self.k1_los,
            k2_los: self.k2_los,
            k1_nlos: self.k1_nlos,
            k2_nlos: self.k2_nlos,
            k3: self.k3,
            k4: self.k4,
            k5: self.k5,
            k6: self.k6,
            k7: self.k7,
            k_clutter: self.k_clutter,
            f_clutter: self.f_clutter,
            k_hill_los: self.k_hill_los,
        }
    }
}

/// Fills `out` with the tuned coefficient set for 728 or 2500 MHz.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_spm_tuned(band_mhz: c_double, out: *mut TcSpmParams) -> TcStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Error::invalid("null pointer"));
        }
        let params = if band_mhz == 728.0 {
            SpmParams::tuned_728_mhz()
        } else if band_mhz == 2500.0 {
            SpmParams::tuned_2500_mhz()
        } else {
            return Err(Error::invalid(format!(
                "no tuned coefficients for band {band_mhz} MHz"
            )));
        };
        *out = params.into();
        Ok(())
    })
}

/// Friis free-space pathloss in dB.
///
/// # Safety
/// `out_db` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_fspl_db(
    d_m: c_double,
    f_mhz: c_double,
    out_db: *mut c_double,
) -> TcStatus {
    guarded(|| out_f64(out_db, fspl_db(d_m, f_mhz)?))
}

/// Evaluates the empirical pathloss model for one path.
///
/// # Safety
/// `params` and `out_db` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tc_spm_pathloss_db(
    params: *const TcSpmParams,
    d_m: c_double,
    h_tx_m: c_double,
    h_rx_m: c_double,
    is_los: c_int,
    l_diff_db: c_double,
    out_db: *mut c_double,
) -> TcStatus {
    guarded(|| {
        if params.is_null() {
            return Err(Error::invalid("null pointer"));
        }
        let ctx = PathContext {
            d_m,
            h_tx_m,
            h_rx_m,
            is_los: is_los != 0,
            l_diff_db,
        };
        out_f64(out_db, spm_pathloss_db(&(*params).to_params(), &ctx)?)
    })
}

/// Single knife-edge loss J(nu) in dB; total function, no error cases.
#[no_mangle]
pub extern "C" fn tc_knife_edge_loss_db(nu: c_double) -> c_double {
    knife_edge_loss_db(nu)
}

// ---------------------------------------------------------------------------
// Capacity
// ---------------------------------------------------------------------------

/// Per-sector CINR in dB for a uniform N-sector plan.
///
/// # Safety
/// `out_db` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_cinr_db(
    n_sectors: size_t,
    sigma_deg: c_double,
    total_cnr_db: c_double,
    out_db: *mut c_double,
) -> TcStatus {
    guarded(|| {
        let input = SectorCapacityInput::new(n_sectors, 20e6, sigma_deg, total_cnr_db);
        out_f64(out_db, cinr_db(&input)?)
    })
}

/// Per-sector CNR in dB (interference removed).
///
/// # Safety
/// `out_db` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_cnr_db(
    n_sectors: size_t,
    sigma_deg: c_double,
    total_cnr_db: c_double,
    out_db: *mut c_double,
) -> TcStatus {
    guarded(|| {
        let input = SectorCapacityInput::new(n_sectors, 20e6, sigma_deg, total_cnr_db);
        out_f64(out_db, cnr_db(&input)?)
    })
}

/// Shannon total capacity in bit/s across all sectors.
///
/// # Safety
/// `out_bps` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_total_capacity_bps(
    n_sectors: size_t,
    bandwidth_hz: c_double,
    sigma_deg: c_double,
    total_cnr_db: c_double,
    out_bps: *mut c_double,
) -> TcStatus {
    guarded(|| {
        let input = SectorCapacityInput::new(n_sectors, bandwidth_hz, sigma_deg, total_cnr_db);
        out_f64(out_bps, total_capacity_bps(&input)?)
    })
}

/// Fills caller-allocated arrays of length `n_max` with the capacity curve
/// for N = 1..=n_max. Any of the output arrays may be null to skip it.
///
/// # Safety
/// Non-null output arrays must hold at least `n_max` doubles.
#[no_mangle]
pub unsafe extern "C" fn tc_capacity_curve(
    sigma_deg: c_double,
    bandwidth_hz: c_double,
    total_cnr_db: c_double,
    n_max: size_t,
    out_cinr_db: *mut c_double,
    out_cnr_db: *mut c_double,
    out_c_tot_bps: *mut c_double,
) -> TcStatus {
    guarded(|| {
        let curve = capacity_vs_sectors(sigma_deg, bandwidth_hz, total_cnr_db, n_max)?;
        for (i, row) in curve.rows.iter().enumerate() {
            if !out_cinr_db.is_null() {
                *out_cinr_db.add(i) = row.cinr_db;
            }
            if !out_cnr_db.is_null() {
                *out_cnr_db.add(i) = row.cnr_db;
            }
            if !out_c_tot_bps.is_null() {
                *out_c_tot_bps.add(i) = row.c_tot_bps;
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Terrain and heatmaps (opaque handles)
// ---------------------------------------------------------------------------

/// Opaque terrain raster handle.
pub struct TcGrid(ElevationGrid);

/// Opaque RSRP raster handle.
pub struct TcRsrpMap(RsrpMap);

/// Site description for heatmap generation over a grid. `pattern_kind` is
/// 0 for rectangular sectors, 1 for gaussian.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TcSite {
    pub x_m: c_double,
    pub y_m: c_double,
    pub tower_height_m: c_double,
    pub n_sectors: size_t,
    pub peak_gain_dbi: c_double,
    pub pattern_kind: c_int,
    pub tx_power_dbm: c_double,
    pub f_mhz: c_double,
    pub rx_height_m: c_double,
    pub spm: TcSpmParams,
}

/// Loads an ESRI ASCII grid; returns null on failure (see [`tc_last_error`]).
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tc_grid_load(path: *const c_char) -> *mut TcGrid {
    let mut handle: *mut TcGrid = ptr::null_mut();
    let status = guarded(|| {
        let path = path_from(path)?;
        let file = std::fs::File::open(path)?;
        handle = Box::into_raw(Box::new(TcGrid(load_grid(file)?)));
        Ok(())
    });
    if status == TcStatus::TcOk {
        handle
    } else {
        ptr::null_mut()
    }
}

/// Releases a grid handle; null is ignored.
///
/// # Safety
/// `grid` must have come from [`tc_grid_load`] and not been freed already.
#[no_mangle]
pub unsafe extern "C" fn tc_grid_free(grid: *mut TcGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Reports the raster dimensions; null outputs are skipped.
///
/// # Safety
/// `grid` must be a live handle; non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tc_grid_dims(
    grid: *const TcGrid,
    out_cols: *mut size_t,
    out_rows: *mut size_t,
    out_cell_size_m: *mut c_double,
) -> TcStatus {
    guarded(|| {
        if grid.is_null() {
            return Err(Error::invalid("null grid handle"));
        }
        let g = &(*grid).0;
        if !out_cols.is_null() {
            *out_cols = g.n_cols;
        }
        if !out_rows.is_null() {
            *out_rows = g.n_rows;
        }
        if !out_cell_size_m.is_null() {
            *out_cell_size_m = g.cell_size_m;
        }
        Ok(())
    })
}

/// Computes an RSRP map for `site` over `grid`; returns null on failure.
///
/// # Safety
/// `grid` must be a live handle and `site` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_rsrp_map_compute(
    grid: *const TcGrid,
    site: *const TcSite,
) -> *mut TcRsrpMap {
    let mut handle: *mut TcRsrpMap = ptr::null_mut();
    let status = guarded(|| {
        if grid.is_null() || site.is_null() {
            return Err(Error::invalid("null pointer"));
        }
        let s = &*site;
        let kind = match s.pattern_kind {
            0 => PatternKind::Rectangular,
            1 => PatternKind::Gaussian,
            other => return Err(Error::invalid(format!("unknown pattern kind {other}"))),
        };
        let site = Site {
            x: s.x_m,
            y: s.y_m,
            tower_height_m: s.tower_height_m,
            plan: make_uniform_plan(s.n_sectors, s.peak_gain_dbi, kind)?,
            tx_power_dbm: s.tx_power_dbm,
            f_mhz: s.f_mhz,
            rx_height_m: s.rx_height_m,
            spm: s.spm.to_params(),
        };
        let map = compute_rsrp_map(&(*grid).0, &site)?;
        handle = Box::into_raw(Box::new(TcRsrpMap(map)));
        Ok(())
    });
    if status == TcStatus::TcOk {
        handle
    } else {
        ptr::null_mut()
    }
}

/// Releases an RSRP map handle; null is ignored.
///
/// # Safety
/// `map` must have come from [`tc_rsrp_map_compute`] and not been freed.
#[no_mangle]
pub unsafe extern "C" fn tc_rsrp_map_free(map: *mut TcRsrpMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Covered area at a threshold, in square kilometres.
///
/// # Safety
/// `map` must be a live handle and `out_km2` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_rsrp_map_coverage_area_km2(
    map: *const TcRsrpMap,
    threshold_dbm: c_double,
    out_km2: *mut c_double,
) -> TcStatus {
    guarded(|| {
        if map.is_null() {
            return Err(Error::invalid("null map handle"));
        }
        out_f64(out_km2, coverage_area_km2(&(*map).0, threshold_dbm))
    })
}

/// Minimum and maximum RSRP over valid cells.
///
/// # Safety
/// `map` must be a live handle; non-null outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tc_rsrp_map_range(
    map: *const TcRsrpMap,
    out_min_dbm: *mut c_double,
    out_max_dbm: *mut c_double,
) -> TcStatus {
    guarded(|| {
        if map.is_null() {
            return Err(Error::invalid("null map handle"));
        }
        let (lo, hi) = (*map)
            .0
            .finite_range()
            .ok_or_else(|| Error::invalid("map has no valid cells"))?;
        if !out_min_dbm.is_null() {
            *out_min_dbm = lo;
        }
        if !out_max_dbm.is_null() {
            *out_max_dbm = hi;
        }
        Ok(())
    })
}

/// Writes the map as an ESRI ASCII raster (RSRP in dBm, one decimal).
///
/// # Safety
/// `map` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tc_rsrp_map_save_asc(
    map: *const TcRsrpMap,
    path: *const c_char,
) -> TcStatus {
    guarded(|| {
        if map.is_null() {
            return Err(Error::invalid("null map handle"));
        }
        let path = path_from(path)?;
        let file = std::fs::File::create(path)?;
        save_rsrp_asc(&(*map).0, std::io::BufWriter::new(file))
    })
}
