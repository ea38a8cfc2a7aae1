//! RSRP heatmap generation over terrain rasters, coverage-area statistics,
//! and site-versus-site comparison tables.
//!
//! Per cell, the map combines the serving sector's pattern gain with the
//! tuned pathloss model, deriving the line-of-sight flag and diffraction
//! loss from a terrain profile between the site and the cell centre.

use crate::antenna::SectorPlan;
use crate::error::{Error, Result};
use crate::propagation::{
    profile_diffraction_db, profile_los, spm_pathloss_db, PathContext, SpmParams,
};
use crate::terrain::{extract_profile, ElevationGrid};
use rayon::prelude::*;
use std::io::Write;

/// Number of profile samples a full-length path is divided into; the
/// sampling step never drops below one cell size.
pub const PROFILE_MAX_SAMPLES: f64 = 512.0;

/// Fraction of the tower height used as the floor for the effective
/// transmitter height in valleys.
pub const MIN_EFFECTIVE_HEIGHT_FRACTION: f64 = 0.1;

/// A transmitter site placed on a terrain grid.
#[derive(Debug, Clone)]
pub struct Site {
    /// Projected position in the grid frame, metres.
    pub x: f64,
    pub y: f64,
    /// Antenna height above local ground, metres.
    pub tower_height_m: f64,
    pub plan: SectorPlan,
    /// Per-sector reference-signal EIRP basis in dBm; pattern gain is added
    /// on top.
    pub tx_power_dbm: f64,
    pub f_mhz: f64,
    /// Receiver height above ground, metres.
    pub rx_height_m: f64,
    pub spm: SpmParams,
}

/// An RSRP raster mirroring an [`ElevationGrid`]'s geometry. No-data cells
/// carry NaN and a serving-sector index of -1.
#[derive(Debug, Clone, PartialEq)]
pub struct RsrpMap {
    pub n_cols: usize,
    pub n_rows: usize,
    pub cell_size_m: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub nodata_value: f64,
    rsrp_dbm: Vec<f64>,
    serving_sector: Vec<i32>,
}

impl RsrpMap {
    pub fn rsrp(&self, col: usize, row: usize) -> f64 {
        self.rsrp_dbm[row * self.n_cols + col]
    }

    pub fn serving(&self, col: usize, row: usize) -> i32 {
        self.serving_sector[row * self.n_cols + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.rsrp_dbm
    }

    pub fn cell_area_km2(&self) -> f64 {
        (self.cell_size_m / 1000.0).powi(2)
    }

    /// Minimum and maximum RSRP over valid cells; None when the map is all
    /// no-data.
    pub fn finite_range(&self) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        for &v in &self.rsrp_dbm {
            if v.is_nan() {
                continue;
            }
            range = Some(match range {
                None => (v, v),
                Some((lo, hi)) => (lo.min(v), hi.max(v)),
            });
        }
        range
    }

    pub fn same_geometry(&self, other: &RsrpMap) -> bool {
        self.n_cols == other.n_cols
            && self.n_rows == other.n_rows
            && self.cell_size_m == other.cell_size_m
            && self.origin_x == other.origin_x
            && self.origin_y == other.origin_y
    }

    /// Reinterprets a loaded raster as an RSRP map (serving sectors unknown).
    pub fn from_grid(grid: &ElevationGrid) -> RsrpMap {
        let rsrp: Vec<f64> = grid
            .values()
            .iter()
            .map(|&v| if grid.is_nodata(v) { f64::NAN } else { v })
            .collect();
        RsrpMap {
            n_cols: grid.n_cols,
            n_rows: grid.n_rows,
            cell_size_m: grid.cell_size_m,
            origin_x: grid.origin_x,
            origin_y: grid.origin_y,
            nodata_value: grid.nodata_value,
            serving_sector: vec![-1; rsrp.len()],
            rsrp_dbm: rsrp,
        }
    }
}

/// Coverage area per threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageStats {
    pub rows: Vec<(f64, f64)>,
}

impl CoverageStats {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold_dbm,area_km2\n");
        for &(t, a) in &self.rows {
            out.push_str(&format!(
                "{},{}\n",
                crate::format::sig6(t),
                crate::format::sig6(a)
            ));
        }
        out
    }
}

/// One row of a two-site coverage comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRatioRow {
    pub threshold_dbm: f64,
    pub area_sc_km2: f64,
    pub area_mc_km2: f64,
    /// `f64::INFINITY` when the baseline area is zero.
    pub ratio: f64,
}

/// Renders comparison rows as CSV in the canonical column order.
pub fn ratio_table_csv(rows: &[CoverageRatioRow]) -> String {
    let mut out = String::from("threshold_dbm,area_sc_km2,area_mc_km2,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::format::sig6(r.threshold_dbm),
            crate::format::sig6(r.area_sc_km2),
            crate::format::sig6(r.area_mc_km2),
            crate::format::sig6(r.ratio),
        ));
    }
    out
}

/// Computes the RSRP raster for one site over the grid.
///
/// Work is partitioned by rows across threads; every cell is an independent
/// pure computation so the output is identical for any partitioning.
pub fn compute_rsrp_map(grid: &ElevationGrid, site: &Site) -> Result<RsrpMap> {
    site.spm.validate()?;
    if !(site.tower_height_m > 0.0) {
        return Err(Error::invalid("tower height must be positive"));
    }
    if !(site.rx_height_m > 0.0) {
        return Err(Error::invalid("receiver height must be positive"));
    }
    if !(site.f_mhz > 0.0) {
        return Err(Error::invalid("carrier frequency must be positive"));
    }
    if !grid.contains(site.x, site.y) {
        return Err(Error::invalid("site lies outside the terrain grid"));
    }
    let site_ground = grid
        .sample(site.x, site.y)
        .flatten()
        .ok_or_else(|| Error::invalid("site lies on no-data terrain"))?;

    let n_cols = grid.n_cols;
    let mut rsrp = vec![f64::NAN; n_cols * grid.n_rows];
    let mut serving = vec![-1i32; n_cols * grid.n_rows];

    let row_results: Result<Vec<()>> = rsrp
        .par_chunks_mut(n_cols)
        .zip(serving.par_chunks_mut(n_cols))
        .enumerate()
        .map(|(row, (rsrp_row, serving_row))| {
            for col in 0..n_cols {
                let ground = grid.value(col, row);
                if grid.is_nodata(ground) {
                    continue;
                }
                let (cx, cy) = grid.cell_center(col, row);
                let dx = cx - site.x;
                let dy = cy - site.y;
                let d_geom = (dx * dx + dy * dy).sqrt();

                let bearing = if d_geom > 0.0 {
                    crate::antenna::wrap_0_360(dy.atan2(dx).to_degrees())
                } else {
                    0.0
                };
                let sector = site.plan.serving_sector(bearing);
                let gain = crate::antenna::sector_gain_db(
                    &site.plan.patterns()[sector],
                    bearing,
                );

                // The model is not trusted below one cell of range.
                let d_model = d_geom.max(grid.cell_size_m);

                let (is_los, l_diff) = if d_geom > 0.0 {
                    let step = (d_geom / PROFILE_MAX_SAMPLES).max(grid.cell_size_m);
                    let profile = extract_profile(
                        grid,
                        (site.x, site.y),
                        (cx, cy),
                        step,
                        site.tower_height_m,
                        site.rx_height_m,
                    )?;
                    let los = profile_los(&profile);
                    let diff = profile_diffraction_db(&profile, site.f_mhz)?;
                    (los, diff)
                } else {
                    (true, 0.0)
                };

                let h_tx_eff = (site.tower_height_m + site_ground - ground)
                    .max(MIN_EFFECTIVE_HEIGHT_FRACTION * site.tower_height_m);
                let ctx = PathContext {
                    d_m: d_model,
                    h_tx_m: h_tx_eff,
                    h_rx_m: site.rx_height_m,
                    is_los,
                    l_diff_db: l_diff,
                };
                let pl = spm_pathloss_db(&site.spm, &ctx)?;
                rsrp_row[col] = site.tx_power_dbm + gain - pl;
                serving_row[col] = sector as i32;
            }
            Ok(())
        })
        .collect();
    row_results?;

    Ok(RsrpMap {
        n_cols,
        n_rows: grid.n_rows,
        cell_size_m: grid.cell_size_m,
        origin_x: grid.origin_x,
        origin_y: grid.origin_y,
        nodata_value: grid.nodata_value,
        rsrp_dbm: rsrp,
        serving_sector: serving,
    })
}

/// Area, in km^2, of valid cells at or above the threshold.
pub fn coverage_area_km2(map: &RsrpMap, threshold_dbm: f64) -> f64 {
    let cells = map
        .values()
        .iter()
        .filter(|v| !v.is_nan() && **v >= threshold_dbm)
        .count();
    cells as f64 * map.cell_area_km2()
}

/// Coverage areas over a threshold sweep.
pub fn coverage_stats(map: &RsrpMap, thresholds_dbm: &[f64]) -> CoverageStats {
    CoverageStats {
        rows: thresholds_dbm
            .iter()
            .map(|&t| (t, coverage_area_km2(map, t)))
            .collect(),
    }
}

/// Compares two maps threshold by threshold. The maps must share geometry.
pub fn coverage_ratio_table(
    map_sc: &RsrpMap,
    map_mc: &RsrpMap,
    thresholds_dbm: &[f64],
) -> Result<Vec<CoverageRatioRow>> {
    if !map_sc.same_geometry(map_mc) {
        return Err(Error::invalid("maps have different geometries"));
    }
    Ok(thresholds_dbm
        .iter()
        .map(|&t| {
            let area_sc = coverage_area_km2(map_sc, t);
            let area_mc = coverage_area_km2(map_mc, t);
            let ratio = if area_mc == 0.0 {
                f64::INFINITY
            } else {
                area_sc / area_mc
            };
            CoverageRatioRow {
                threshold_dbm: t,
                area_sc_km2: area_sc,
                area_mc_km2: area_mc,
                ratio,
            }
        })
        .collect())
}

/// Writes the map as an ESRI ASCII grid with RSRP in dBm at one decimal;
/// no-data cells carry the sentinel.
pub fn save_rsrp_asc<W: Write>(map: &RsrpMap, mut writer: W) -> Result<()> {
    writeln!(writer, "ncols {}", map.n_cols)?;
    writeln!(writer, "nrows {}", map.n_rows)?;
    writeln!(writer, "xllcorner {}", map.origin_x)?;
    writeln!(writer, "yllcorner {}", map.origin_y)?;
    writeln!(writer, "cellsize {}", map.cell_size_m)?;
    writeln!(writer, "NODATA_value {}", map.nodata_value)?;
    for row in 0..map.n_rows {
        let mut line = String::new();
        for col in 0..map.n_cols {
            if col > 0 {
                line.push(' ');
            }
            let v = map.rsrp(col, row);
            if v.is_nan() {
                line.push_str(&format!("{}", map.nodata_value));
            } else {
                line.push_str(&format!("{v:.1}"));
            }
        }
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Writes an 8-bit binary PGM rendering.
///
/// Valid cells map linearly from [min, max] dBm onto gray 1..=255; no-data
/// cells are gray 0. The mapping bounds are recorded in the comment line.
pub fn save_rsrp_pgm<W: Write>(map: &RsrpMap, mut writer: W) -> Result<()> {
    let (lo, hi) = map.finite_range().unwrap_or((0.0, 0.0));
    writeln!(writer, "P5")?;
    writeln!(
        writer,
        "# rsrp_dbm gray=1+round(254*(v-min)/(max-min)) min={lo} max={hi} nodata=0"
    )?;
    writeln!(writer, "{} {}", map.n_cols, map.n_rows)?;
    writeln!(writer, "255")?;
    let span = hi - lo;
    let mut bytes = Vec::with_capacity(map.n_cols * map.n_rows);
    for &v in map.values() {
        if v.is_nan() {
            bytes.push(0u8);
        } else if span == 0.0 {
            bytes.push(255u8);
        } else {
            bytes.push(1 + (254.0 * (v - lo) / span).round() as u8);
        }
    }
    writer.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::{make_uniform_plan, PatternKind};
    use crate::terrain::load_grid;

    fn flat_site(n_sectors: usize, gain: f64, tower: f64, grid: &ElevationGrid) -> Site {
        let half = grid.n_cols as f64 * grid.cell_size_m / 2.0;
        Site {
            x: half,
            y: half,
            tower_height_m: tower,
            plan: make_uniform_plan(n_sectors, gain, PatternKind::Rectangular).unwrap(),
            tx_power_dbm: 0.0,
            f_mhz: 2500.0,
            rx_height_m: 2.0,
            spm: SpmParams::tuned_2500_mhz(),
        }
    }

    #[test]
    fn omni_map_is_radially_symmetric_on_flat_terrain() {
        let grid = ElevationGrid::flat(41, 41, 100.0, 0.0).unwrap();
        let site = flat_site(1, 18.0, 250.0, &grid);
        let map = compute_rsrp_map(&grid, &site).unwrap();
        // Four-fold symmetry about the centre cell.
        for (col, row) in [(0usize, 20usize), (5, 7), (13, 2)] {
            let v = map.rsrp(col, row);
            assert!((v - map.rsrp(40 - col, row)).abs() < 1e-9);
            assert!((v - map.rsrp(col, 40 - row)).abs() < 1e-9);
            assert!((v - map.rsrp(40 - col, 40 - row)).abs() < 1e-9);
        }
        // RSRP decreases with distance ring by ring along an axis.
        for col in 21..40 {
            assert!(map.rsrp(col, 20) > map.rsrp(col + 1, 20));
        }
    }

    #[test]
    fn uniform_rectangular_plan_matches_omni_map() {
        let grid = ElevationGrid::flat(31, 31, 100.0, 0.0).unwrap();
        let omni = compute_rsrp_map(&grid, &flat_site(1, 18.0, 250.0, &grid)).unwrap();
        let sectored = compute_rsrp_map(&grid, &flat_site(36, 18.0, 250.0, &grid)).unwrap();
        for (a, b) in omni.values().iter().zip(sectored.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_terrain_is_all_los() {
        let grid = ElevationGrid::flat(21, 21, 100.0, 0.0).unwrap();
        let site = flat_site(1, 18.0, 100.0, &grid);
        let map = compute_rsrp_map(&grid, &site).unwrap();
        // Equivalent NLOS evaluation would shift every cell by the class
        // change; verify via a direct pathloss recomputation on one cell.
        let (cx, cy) = grid.cell_center(0, 0);
        let d = ((cx - site.x).powi(2) + (cy - site.y).powi(2)).sqrt();
        let ctx = PathContext {
            d_m: d,
            h_tx_m: 100.0,
            h_rx_m: 2.0,
            is_los: true,
            l_diff_db: 0.0,
        };
        let expected = site.tx_power_dbm + 18.0 - spm_pathloss_db(&site.spm, &ctx).unwrap();
        assert!((map.rsrp(0, 0) - expected).abs() < 1e-9);
    }

    #[test]
    fn gaussian_plan_rolls_off_between_boresights() {
        let grid = ElevationGrid::flat(41, 41, 100.0, 0.0).unwrap();
        let mut site = flat_site(6, 20.0, 150.0, &grid);
        site.plan = make_uniform_plan(6, 20.0, PatternKind::Gaussian).unwrap();
        let map = compute_rsrp_map(&grid, &site).unwrap();
        // Same radius, on-boresight vs mid-crossover: the crossover sits a
        // full half-width off boresight, 3 dB down by construction.
        let on = map.rsrp(40, 20); // due east, boresight of sector 0
        let r = 20.0 * 100.0;
        let az = 30f64.to_radians(); // halfway to the next boresight at 60
        let col = (20.0 + (r * az.cos() / 100.0)).round() as usize;
        let row = (20.0 - (r * az.sin() / 100.0)).round() as usize;
        let off = map.rsrp(col, row);
        let d_on = 2000.0f64;
        let (cx, cy) = grid.cell_center(col, row);
        let d_off = ((cx - site.x).powi(2) + (cy - site.y).powi(2)).sqrt();
        // Remove the distance term before comparing the pattern roll-off.
        let slope = site.spm.k2_los;
        let gain_delta = (on + slope * d_on.log10()) - (off + slope * d_off.log10());
        assert!(
            (gain_delta - 3.0).abs() < 0.2,
            "expected ~3 dB crossover, got {gain_delta}"
        );
    }

    #[test]
    fn taller_tower_never_reduces_rsrp_on_flat_terrain() {
        let grid = ElevationGrid::flat(25, 25, 100.0, 0.0).unwrap();
        let low = compute_rsrp_map(&grid, &flat_site(1, 18.0, 30.0, &grid)).unwrap();
        let high = compute_rsrp_map(&grid, &flat_site(1, 18.0, 250.0, &grid)).unwrap();
        for (l, h) in low.values().iter().zip(high.values()) {
            assert!(h >= l, "taller tower lost coverage: {h} < {l}");
        }
    }

    #[test]
    fn blocking_ridge_costs_k4_times_knife_edge_loss() {
        // Params with equal LOS/NLOS intercepts and slopes isolate the
        // diffraction term when the ridge flips the class.
        let mut spm = SpmParams::tuned_2500_mhz();
        spm.k1_nlos = spm.k1_los;
        spm.k2_nlos = spm.k2_los;

        let flat = ElevationGrid::flat(61, 61, 100.0, 0.0).unwrap();
        let mut ridged = flat.clone();
        // North-south wall two columns east of the site column.
        for row in 0..61 {
            ridged.set_value(40, row, 60.0);
        }

        let mut site = flat_site(1, 18.0, 50.0, &flat);
        site.spm = spm;
        let base = compute_rsrp_map(&flat, &site).unwrap();
        let shadowed = compute_rsrp_map(&ridged, &site).unwrap();

        // A far cell due east of the site, well behind the wall.
        let (col, row) = (55usize, 30usize);
        let (cx, cy) = flat.cell_center(col, row);
        let d = ((cx - site.x).powi(2) + (cy - site.y).powi(2)).sqrt();
        let profile = extract_profile(
            &ridged,
            (site.x, site.y),
            (cx, cy),
            (d / PROFILE_MAX_SAMPLES).max(flat.cell_size_m),
            site.tower_height_m,
            site.rx_height_m,
        )
        .unwrap();
        assert!(!profile_los(&profile));
        let l_diff = profile_diffraction_db(&profile, site.f_mhz).unwrap();
        assert!(l_diff > 6.0);

        let delta = base.rsrp(col, row) - shadowed.rsrp(col, row);
        assert!(
            (delta - site.spm.k4 * l_diff).abs() < 1e-9,
            "delta={delta}, k4*l={}",
            site.spm.k4 * l_diff
        );
    }

    #[test]
    fn area_non_increasing_in_threshold() {
        let grid = ElevationGrid::flat(31, 31, 100.0, 0.0).unwrap();
        let map = compute_rsrp_map(&grid, &flat_site(1, 18.0, 250.0, &grid)).unwrap();
        let (lo, hi) = map.finite_range().unwrap();
        let mut last = f64::MAX;
        let mut t = lo - 1.0;
        while t <= hi + 1.0 {
            let a = coverage_area_km2(&map, t);
            assert!(a <= last);
            last = a;
            t += 0.5;
        }
        assert_eq!(
            coverage_area_km2(&map, lo - 10.0),
            31.0 * 31.0 * map.cell_area_km2()
        );
        assert_eq!(coverage_area_km2(&map, hi + 10.0), 0.0);
    }

    #[test]
    fn nodata_cells_excluded_from_map_and_area() {
        let mut grid = ElevationGrid::flat(11, 11, 100.0, 0.0).unwrap();
        grid.set_value(0, 0, grid.nodata_value);
        grid.set_value(7, 3, grid.nodata_value);
        let map = compute_rsrp_map(&grid, &flat_site(1, 18.0, 100.0, &grid)).unwrap();
        assert!(map.rsrp(0, 0).is_nan());
        assert_eq!(map.serving(7, 3), -1);
        let all = coverage_area_km2(&map, -1e9);
        assert_eq!(all, (121.0 - 2.0) * map.cell_area_km2());
    }

    #[test]
    fn site_outside_grid_is_rejected() {
        let grid = ElevationGrid::flat(11, 11, 100.0, 0.0).unwrap();
        let mut site = flat_site(1, 18.0, 100.0, &grid);
        site.x = -50.0;
        assert!(compute_rsrp_map(&grid, &site).is_err());
    }

    #[test]
    fn identical_maps_give_unit_ratio() {
        let grid = ElevationGrid::flat(21, 21, 100.0, 0.0).unwrap();
        let map = compute_rsrp_map(&grid, &flat_site(1, 18.0, 100.0, &grid)).unwrap();
        let rows = coverage_ratio_table(&map, &map, &[-120.0, -100.0, -80.0]).unwrap();
        for r in rows {
            if r.area_mc_km2 > 0.0 {
                assert_eq!(r.ratio, 1.0);
            }
        }
    }

    #[test]
    fn ratio_table_rejects_geometry_mismatch() {
        let a = ElevationGrid::flat(21, 21, 100.0, 0.0).unwrap();
        let b = ElevationGrid::flat(22, 21, 100.0, 0.0).unwrap();
        let ma = compute_rsrp_map(&a, &flat_site(1, 18.0, 100.0, &a)).unwrap();
        let mb = compute_rsrp_map(&b, &flat_site(1, 18.0, 100.0, &b)).unwrap();
        assert!(coverage_ratio_table(&ma, &mb, &[-100.0]).is_err());
    }

    #[test]
    fn rsrp_asc_round_trips_at_one_decimal() {
        let grid = ElevationGrid::flat(9, 9, 50.0, 0.0).unwrap();
        let map = compute_rsrp_map(&grid, &flat_site(3, 12.0, 80.0, &grid)).unwrap();
        let mut buf = Vec::new();
        save_rsrp_asc(&map, &mut buf).unwrap();
        let reloaded = RsrpMap::from_grid(&load_grid(buf.as_slice()).unwrap());
        assert!(map.same_geometry(&reloaded));
        for (a, b) in map.values().iter().zip(reloaded.values()) {
            assert!((a - b).abs() <= 0.05 + 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn pgm_has_header_and_expected_size() {
        let grid = ElevationGrid::flat(9, 7, 50.0, 0.0).unwrap();
        let map = compute_rsrp_map(&grid, &flat_site(1, 12.0, 80.0, &grid)).unwrap();
        let mut buf = Vec::new();
        save_rsrp_pgm(&map, &mut buf).unwrap();
        let text = String::from_utf8_lossy(&buf);
        assert!(text.starts_with("P5\n# rsrp_dbm"));
        assert!(text.contains("min="));
        assert!(buf.ends_with(&[]) || buf.len() > 9 * 7);
        let header_end = buf
            .windows(4)
            .position(|w| w == b"255\n")
            .map(|p| p + 4)
            .unwrap();
        assert_eq!(buf.len() - header_end, 9 * 7);
    }

    #[test]
    fn map_deterministic_across_thread_counts() {
        let grid = ElevationGrid::flat(31, 31, 100.0, 0.0).unwrap();
        let site = flat_site(6, 20.0, 150.0, &grid);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| compute_rsrp_map(&grid, &site))
            .unwrap();
        let parallel = compute_rsrp_map(&grid, &site).unwrap();
        assert_eq!(serial, parallel);
    }
}
