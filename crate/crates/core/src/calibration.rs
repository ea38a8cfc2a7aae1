//! Least-squares tuning of the empirical pathloss coefficients from drive
//! measurements, error statistics, and the exponential spread-vs-pathloss
//! fit.
//!
//! The pathloss model is linear in its coefficients, so tuning is ordinary
//! least squares over per-record regressors, with separate intercept/slope
//! columns for the LOS and NLOS classes and a mask selecting which
//! coefficients are free.

use crate::error::{Error, Result};
use crate::propagation::{
    profile_diffraction_db, profile_los, spm_pathloss_db, PathContext, SpmParams,
};
use crate::terrain::ElevationGrid;
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

/// Number of tunable coefficients.
pub const N_COEFFS: usize = 12;

/// Coefficient names in canonical order.
pub const COEFF_NAMES: [&str; N_COEFFS] = [
    "k1_los",
    "k2_los",
    "k1_nlos",
    "k2_nlos",
    "k3",
    "k4",
    "k5",
    "k6",
    "k7",
    "k_clutter",
    "f_clutter",
    "k_hill_los",
];

fn coeff_value(p: &SpmParams, i: usize) -> f64 {
    match i {
        0 => p.k1_los,
        1 => p.k2_los,
        2 => p.k1_nlos,
        3 => p.k2_nlos,
        4 => p.k3,
        5 => p.k4,
        6 => p.k5,
        7 => p.k6,
        8 => p.k7,
        9 => p.k_clutter,
        10 => p.f_clutter,
        11 => p.k_hill_los,
        _ => unreachable!(),
    }
}

fn set_coeff(p: &mut SpmParams, i: usize, v: f64) {
    match i {
        0 => p.k1_los = v,
        1 => p.k2_los = v,
        2 => p.k1_nlos = v,
        3 => p.k2_nlos = v,
        4 => p.k3 = v,
        5 => p.k4 = v,
        6 => p.k5 = v,
        7 => p.k6 = v,
        8 => p.k7 = v,
        9 => p.k_clutter = v,
        10 => p.f_clutter = v,
        11 => p.k_hill_los = v,
        _ => unreachable!(),
    }
}

/// Which coefficients the fit may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeMask {
    free: [bool; N_COEFFS],
}

impl FreeMask {
    pub fn none() -> Self {
        FreeMask {
            free: [false; N_COEFFS],
        }
    }

    /// The usual tuning set: both intercept/slope pairs plus the height and
    /// receiver terms. The diffraction and clutter multipliers stay fixed;
    /// without diffraction-rich, clutter-varied data they are
    /// ill-conditioned.
    pub fn default_tuning() -> Self {
        FreeMask::none()
            .with("k1_los")
            .and_then(|m| m.with("k2_los"))
            .and_then(|m| m.with("k1_nlos"))
            .and_then(|m| m.with("k2_nlos"))
            .and_then(|m| m.with("k3"))
            .and_then(|m| m.with("k5"))
            .and_then(|m| m.with("k6"))
            .and_then(|m| m.with("k7"))
            .expect("built-in names are valid")
    }

    pub fn with(mut self, name: &str) -> Result<Self> {
        let idx = COEFF_NAMES
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| Error::invalid(format!("unknown coefficient: {name}")))?;
        self.free[idx] = true;
        Ok(self)
    }

    pub fn from_names(names: &[&str]) -> Result<Self> {
        let mut mask = FreeMask::none();
        for name in names {
            mask = mask.with(name)?;
        }
        Ok(mask)
    }

    pub fn is_free(&self, i: usize) -> bool {
        self.free[i]
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..N_COEFFS).filter(|&i| self.free[i]).collect()
    }
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

/// One raw drive-test sample as ingested from CSV; optional fields are
/// resolved before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasurementRecord {
    pub x_m: Option<f64>,
    pub y_m: Option<f64>,
    pub d_m: Option<f64>,
    pub rx_power_dbm: Option<f64>,
    pub measured_pl_db: Option<f64>,
    pub h_tx_m: f64,
    pub h_rx_m: f64,
    pub f_mhz: f64,
    pub los: Option<bool>,
    pub l_diff_db: Option<f64>,
}

/// A fully resolved sample ready for regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedRecord {
    pub d_m: f64,
    pub measured_pl_db: f64,
    pub h_tx_m: f64,
    pub h_rx_m: f64,
    pub is_los: bool,
    pub l_diff_db: f64,
}

impl ResolvedRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_m > 0.0) {
            return Err(Error::invalid("record distance must be positive"));
        }
        if !self.measured_pl_db.is_finite() {
            return Err(Error::invalid("measured pathloss must be finite"));
        }
        if !(self.h_tx_m > 0.0 && self.h_rx_m > 0.0) {
            return Err(Error::invalid("record heights must be positive"));
        }
        Ok(())
    }
}

/// Regressor vector for one record, ordered like [`COEFF_NAMES`]. The
/// clutter pair is mutually coupled: each one's regressor is the other's
/// current value from `baseline`.
pub fn feature_vector(record: &ResolvedRecord, baseline: &SpmParams) -> Result<[f64; N_COEFFS]> {
    record.validate()?;
    let ld = record.d_m.log10();
    let lh = record.h_tx_m.log10();
    let (los, nlos) = if record.is_los { (1.0, 0.0) } else { (0.0, 1.0) };
    Ok([
        los,
        los * ld,
        nlos,
        nlos * ld,
        lh,
        record.l_diff_db,
        ld * lh,
        record.h_rx_m,
        record.h_rx_m.log10(),
        baseline.f_clutter,
        baseline.k_clutter,
        los,
    ])
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

/// Residual statistics of a fit or a model-vs-measurement comparison.
/// `std_db` uses the population (1/n) convention, so
/// `rms^2 = mean^2 + std^2` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub mean_db: f64,
    pub std_db: f64,
    pub rms_db: f64,
}

/// Mean, population standard deviation and RMS of `measured - predicted`.
pub fn error_stats(predicted: &[f64], measured: &[f64]) -> Result<ErrorStats> {
    if predicted.len() != measured.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} predicted vs {} measured",
            predicted.len(),
            measured.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::invalid("need at least one residual"));
    }
    let n = predicted.len() as f64;
    let residuals: Vec<f64> = measured
        .iter()
        .zip(predicted)
        .map(|(m, p)| m - p)
        .collect();
    let mean = residuals.iter().sum::<f64>() / n;
    let var = residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    Ok(ErrorStats {
        mean_db: mean,
        std_db: var.sqrt(),
        rms_db: rms,
    })
}

/// Outcome of a coefficient fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fixed coefficients carried from the baseline, free ones replaced by
    /// their estimates.
    pub params: SpmParams,
    pub free: FreeMask,
    pub stats: ErrorStats,
    pub n_points: usize,
    /// Names of columns sharing a null-space direction when the design was
    /// rank deficient (the minimum-norm solution was returned).
    pub collinear: Vec<String>,
}

/// Fits the free coefficients to the records by least squares; fixed
/// coefficients keep their `baseline` values and their contribution is
/// subtracted from the target before solving.
pub fn fit_spm(
    records: &[ResolvedRecord],
    mask: &FreeMask,
    baseline: &SpmParams,
) -> Result<FitResult> {
    let free = mask.free_indices();
    if free.is_empty() {
        return Err(Error::invalid("no free coefficients to fit"));
    }
    if mask.is_free(9) && mask.is_free(10) {
        return Err(Error::invalid(
            "k_clutter and f_clutter cannot both be free: only their product is identifiable",
        ));
    }
    if records.len() < free.len() {
        return Err(Error::invalid(format!(
            "{} records cannot determine {} coefficients",
            records.len(),
            free.len()
        )));
    }
    let needs_los = mask.is_free(0) || mask.is_free(1);
    let needs_nlos = mask.is_free(2) || mask.is_free(3);
    if needs_los && !records.iter().any(|r| r.is_los) {
        return Err(Error::invalid("LOS coefficients are free but no LOS records given"));
    }
    if needs_nlos && !records.iter().any(|r| !r.is_los) {
        return Err(Error::invalid(
            "NLOS coefficients are free but no NLOS records given",
        ));
    }

    let n = records.len();
    let p = free.len();
    let mut design = DMatrix::zeros(n, p);
    let mut target = DVector::zeros(n);
    for (row, rec) in records.iter().enumerate() {
        let x = feature_vector(rec, baseline)?;
        let mut y = rec.measured_pl_db;
        for (i, &xi) in x.iter().enumerate() {
            if mask.is_free(i) {
                continue;
            }
            // The clutter product k_clutter*f_clutter is one model term with
            // two aliases; subtract it exactly once, through index 9 unless
            // f_clutter is the free side.
            if i == 10 || (i == 9 && mask.is_free(10)) {
                continue;
            }
            y -= coeff_value(baseline, i) * xi;
        }
        target[row] = y;
        for (col, &i) in free.iter().enumerate() {
            design[(row, col)] = x[i];
        }
    }

    let svd = design
        .clone()
        .try_svd(true, true, f64::EPSILON, 1000)
        .ok_or_else(|| Error::numerical("SVD of the design matrix did not converge"))?;
    let sigma_max = svd.singular_values.max();
    let eps = sigma_max * 1e-12;
    let beta = svd
        .solve(&target, eps)
        .map_err(Error::numerical)?;

    // Identify any null-space directions so callers can see what was
    // unidentifiable under the minimum-norm fallback.
    let mut collinear = Vec::new();
    if let Some(v_t) = &svd.v_t {
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s <= eps {
                for (col, &coeff_idx) in free.iter().enumerate() {
                    if v_t[(i, col)].abs() > 0.3 {
                        let name = COEFF_NAMES[coeff_idx].to_string();
                        if !collinear.contains(&name) {
                            collinear.push(name);
                        }
                    }
                }
            }
        }
    }

    let mut params = *baseline;
    for (col, &i) in free.iter().enumerate() {
        set_coeff(&mut params, i, beta[col]);
    }

    let mut predicted = Vec::with_capacity(n);
    let mut measured = Vec::with_capacity(n);
    for rec in records {
        let ctx = PathContext {
            d_m: rec.d_m,
            h_tx_m: rec.h_tx_m,
            h_rx_m: rec.h_rx_m,
            is_los: rec.is_los,
            l_diff_db: if rec.is_los { 0.0 } else { rec.l_diff_db },
        };
        predicted.push(spm_pathloss_db(&params, &ctx)?);
        measured.push(rec.measured_pl_db);
    }
    let stats = error_stats(&predicted, &measured)?;

    Ok(FitResult {
        params,
        free: *mask,
        stats,
        n_points: n,
        collinear,
    })
}

/// Log-linear least squares of `y = a * exp(b * x)`; all ys must be
/// positive.
pub fn fit_exponential(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("xs and ys lengths differ"));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("need at least two points"));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::invalid("exponential fit requires positive y values"));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let lny: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mean_lny = lny.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, l) in xs.iter().zip(&lny) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (l - mean_lny);
    }
    if sxx == 0.0 {
        return Err(Error::invalid("x values are all identical"));
    }
    let b = sxy / sxx;
    let a = (mean_lny - b * mean_x).exp();
    Ok((a, b))
}

// ---------------------------------------------------------------------------
// Measurement CSV ingestion
// ---------------------------------------------------------------------------

/// Link-budget constants folded into measured pathloss when the CSV carries
/// raw received power.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkConstants {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
}

/// Everything needed to resolve raw records: the site position for distance
/// computation, link constants for pathloss, and a terrain grid plus tower
/// height for LOS/diffraction derivation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ResolutionContext<'a> {
    pub site: Option<(f64, f64)>,
    pub link: Option<LinkConstants>,
    pub terrain: Option<&'a ElevationGrid>,
    pub tower_height_m: Option<f64>,
}

/// Reads a measurement CSV. Leading `# key = value` comment lines become
/// header constants (recognized keys: `tx_power_dbm`, `tx_gain_dbi`,
/// `rx_gain_dbi`); the first non-comment line must be the column header.
///
/// Required columns: `h_tx_m`, `h_rx_m`, `f_mhz`, and one of
/// `rx_power_dbm` / `measured_pl_db`. Optional: `x_m`, `y_m`, `d_m`,
/// `los` (0/1), `l_diff_db`. Empty fields in optional columns are allowed.
pub fn read_measurements<R: Read>(
    reader: R,
) -> Result<(Vec<MeasurementRecord>, HashMap<String, f64>)> {
    let mut buf = BufReader::new(reader);
    let mut constants = HashMap::new();
    let mut line = String::new();
    let mut line_no = 0usize;

    // Leading comment lines.
    let header_line = loop {
        line.clear();
        if buf.read_line(&mut line)? == 0 {
            return Err(Error::parse(line_no, "missing CSV header"));
        }
        line_no += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                if let Ok(value) = v.trim().parse::<f64>() {
                    constants.insert(k.trim().to_string(), value);
                }
            }
            continue;
        }
        break trimmed.to_string();
    };

    let columns: Vec<String> = header_line
        .split(',')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    let col = |name: &str| columns.iter().position(|c| c == name);
    let required = ["h_tx_m", "h_rx_m", "f_mhz"];
    for name in required {
        if col(name).is_none() {
            return Err(Error::parse(line_no, format!("missing required column {name}")));
        }
    }
    if col("rx_power_dbm").is_none() && col("measured_pl_db").is_none() {
        return Err(Error::parse(
            line_no,
            "need a rx_power_dbm or measured_pl_db column",
        ));
    }

    let idx_x = col("x_m");
    let idx_y = col("y_m");
    let idx_d = col("d_m");
    let idx_rx = col("rx_power_dbm");
    let idx_pl = col("measured_pl_db");
    let idx_htx = col("h_tx_m").unwrap();
    let idx_hrx = col("h_rx_m").unwrap();
    let idx_f = col("f_mhz").unwrap();
    let idx_los = col("los");
    let idx_ld = col("l_diff_db");

    let mut records = Vec::new();
    loop {
        line.clear();
        if buf.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::parse(
                line_no,
                format!("expected {} fields, got {}", columns.len(), fields.len()),
            ));
        }
        let opt = |idx: Option<usize>| -> Result<Option<f64>> {
            match idx {
                Some(i) if !fields[i].is_empty() => fields[i]
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| Error::parse(line_no, format!("bad number: {}", fields[i]))),
                _ => Ok(None),
            }
        };
        let req = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("bad number: {}", fields[i])))
        };
        let los = match idx_los {
            Some(i) if !fields[i].is_empty() => match fields[i] {
                "0" => Some(false),
                "1" => Some(true),
                other => {
                    return Err(Error::parse(line_no, format!("los must be 0 or 1, got {other}")))
                }
            },
            _ => None,
        };
        records.push(MeasurementRecord {
            x_m: opt(idx_x)?,
            y_m: opt(idx_y)?,
            d_m: opt(idx_d)?,
            rx_power_dbm: opt(idx_rx)?,
            measured_pl_db: opt(idx_pl)?,
            h_tx_m: req(idx_htx)?,
            h_rx_m: req(idx_hrx)?,
            f_mhz: req(idx_f)?,
            los,
            l_diff_db: opt(idx_ld)?,
        });
    }
    Ok((records, constants))
}

/// Resolves raw records into regression-ready form, deriving whatever is
/// missing from the context or failing with a description of what is needed.
pub fn resolve_records(
    records: &[MeasurementRecord],
    ctx: &ResolutionContext,
) -> Result<Vec<ResolvedRecord>> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let d_m = match (r.d_m, r.x_m, r.y_m, ctx.site) {
                (Some(d), ..) => d,
                (None, Some(x), Some(y), Some((sx, sy))) => ((x - sx).powi(2) + (y - sy).powi(2)).sqrt(),
                (None, Some(_), Some(_), None) => {
                    return Err(Error::invalid(format!(
                        "record {i}: distance needs the site position"
                    )))
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "record {i}: no d_m and no (x_m, y_m) position"
                    )))
                }
            };
            let measured_pl_db = match (r.measured_pl_db, r.rx_power_dbm, ctx.link) {
                (Some(pl), ..) => pl,
                (None, Some(rx), Some(link)) => {
                    link.tx_power_dbm + link.tx_gain_dbi + link.rx_gain_dbi - rx
                }
                (None, Some(_), None) => {
                    return Err(Error::invalid(format!(
                        "record {i}: rx_power_dbm needs link constants to form pathloss"
                    )))
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "record {i}: no measured_pl_db or rx_power_dbm"
                    )))
                }
            };
            let (is_los, l_diff_db) = match (r.los, r.l_diff_db) {
                (Some(true), _) => (true, 0.0),
                (Some(false), Some(ld)) => (false, ld),
                (los, l_diff) => {
                    // Derive from terrain when available.
                    let (grid, tower, (sx, sy), (x, y)) =
                        match (ctx.terrain, ctx.tower_height_m, ctx.site, r.x_m.zip(r.y_m)) {
                            (Some(g), Some(t), Some(s), Some(p)) => (g, t, s, p),
                            _ => {
                                return Err(Error::invalid(format!(
                                    "record {i}: los/l_diff_db missing and no terrain context to derive them"
                                )))
                            }
                        };
                    let step = (d_m / 512.0).max(grid.cell_size_m);
                    let profile = crate::terrain::extract_profile(
                        grid,
                        (sx, sy),
                        (x, y),
                        step,
                        tower,
                        r.h_rx_m,
                    )?;
                    let derived_los = los.unwrap_or_else(|| profile_los(&profile));
                    if derived_los {
                        (true, 0.0)
                    } else {
                        let ld = match l_diff {
                            Some(v) => v,
                            None => profile_diffraction_db(&profile, r.f_mhz)?,
                        };
                        (false, ld)
                    }
                }
            };
            let resolved = ResolvedRecord {
                d_m,
                measured_pl_db,
                h_tx_m: r.h_tx_m,
                h_rx_m: r.h_rx_m,
                is_los,
                l_diff_db,
            };
            resolved.validate()?;
            Ok(resolved)
        })
        .collect()
}
