//! Terrain rasters: ESRI ASCII grid input/output and extraction of ground
//! profiles along straight paths by bilinear interpolation.

use crate::error::{Error, Result};
use crate::propagation::{ProfileSample, TerrainProfile};
use std::io::{BufRead, BufReader, Read, Write};

/// Default no-data sentinel when the header omits `NODATA_value`.
pub const DEFAULT_NODATA: f64 = -9999.0;

/// A planar elevation raster in projected coordinates.
///
/// Rows are stored top-down as in the ASCII grid format: row 0 is the
/// northernmost. `origin_x`/`origin_y` are the lower-left corner of the
/// lower-left cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationGrid {
    pub n_cols: usize,
    pub n_rows: usize,
    pub cell_size_m: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub nodata_value: f64,
    elevations: Vec<f64>,
}

impl ElevationGrid {
    pub fn new(
        n_cols: usize,
        n_rows: usize,
        cell_size_m: f64,
        origin_x: f64,
        origin_y: f64,
        nodata_value: f64,
        elevations: Vec<f64>,
    ) -> Result<Self> {
        if n_cols == 0 || n_rows == 0 {
            return Err(Error::invalid("grid dimensions must be positive"));
        }
        if !(cell_size_m > 0.0) {
            return Err(Error::invalid("cell size must be positive"));
        }
        if elevations.len() != n_cols * n_rows {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                n_cols * n_rows,
                elevations.len()
            )));
        }
        Ok(ElevationGrid {
            n_cols,
            n_rows,
            cell_size_m,
            origin_x,
            origin_y,
            nodata_value,
            elevations,
        })
    }

    /// Uniform grid of constant elevation; handy for synthetic scenarios.
    pub fn flat(n_cols: usize, n_rows: usize, cell_size_m: f64, elevation_m: f64) -> Result<Self> {
        ElevationGrid::new(
            n_cols,
            n_rows,
            cell_size_m,
            0.0,
            0.0,
            DEFAULT_NODATA,
            vec![elevation_m; n_cols * n_rows],
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.elevations
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.elevations
    }

    /// Raw stored value at (col, row); row 0 is the top (north) row.
    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.elevations[row * self.n_cols + col]
    }

    pub fn set_value(&mut self, col: usize, row: usize, v: f64) {
        self.elevations[row * self.n_cols + col] = v;
    }

    pub fn is_nodata(&self, v: f64) -> bool {
        v == self.nodata_value
    }

    /// Projected centre coordinates of cell (col, row).
    pub fn cell_center(&self, col: usize, row: usize) -> (f64, f64) {
        (
            self.origin_x + (col as f64 + 0.5) * self.cell_size_m,
            self.origin_y + (self.n_rows as f64 - row as f64 - 0.5) * self.cell_size_m,
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.origin_x
            && x <= self.origin_x + self.n_cols as f64 * self.cell_size_m
            && y >= self.origin_y
            && y <= self.origin_y + self.n_rows as f64 * self.cell_size_m
    }

    /// Bilinearly interpolated elevation at projected (x, y).
    ///
    /// Interpolates between the four surrounding cell centres, clamping to
    /// the centre lattice near the border. Returns `None` when the point
    /// falls outside the grid or any contributing cell is no-data.
    pub fn sample(&self, x: f64, y: f64) -> Option<Option<f64>> {
        if !self.contains(x, y) {
            return None;
        }
        // Continuous cell-centre coordinates: u along columns, v along rows
        // counted from the top row.
        let u = ((x - self.origin_x) / self.cell_size_m - 0.5)
            .clamp(0.0, (self.n_cols - 1) as f64);
        let v = (self.n_rows as f64 - 0.5 - (y - self.origin_y) / self.cell_size_m)
            .clamp(0.0, (self.n_rows - 1) as f64);
        let c0 = u.floor() as usize;
        let r0 = v.floor() as usize;
        let c1 = (c0 + 1).min(self.n_cols - 1);
        let r1 = (r0 + 1).min(self.n_rows - 1);
        let fu = u - c0 as f64;
        let fv = v - r0 as f64;

        let corners = [
            self.value(c0, r0),
            self.value(c1, r0),
            self.value(c0, r1),
            self.value(c1, r1),
        ];
        let weights = [
            (1.0 - fu) * (1.0 - fv),
            fu * (1.0 - fv),
            (1.0 - fu) * fv,
            fu * fv,
        ];
        // Only corners that actually contribute can poison the sample; an
        // exact cell centre depends on its own cell alone.
        let mut acc = 0.0;
        for (c, w) in corners.iter().zip(weights) {
            if w > 0.0 {
                if self.is_nodata(*c) {
                    return Some(None);
                }
                acc += c * w;
            }
        }
        Some(Some(acc))
    }
}

// ---------------------------------------------------------------------------
// ESRI ASCII grid I/O
// ---------------------------------------------------------------------------

/// Parses an ESRI ASCII grid. Header keys are case-insensitive; the
/// `NODATA_value` entry is optional and defaults to -9999.
pub fn load_grid<R: Read>(reader: R) -> Result<ElevationGrid> {
    let mut lines = BufReader::new(reader).lines();
    let mut line_no = 0usize;

    let mut n_cols: Option<usize> = None;
    let mut n_rows: Option<usize> = None;
    let mut xll: Option<f64> = None;
    let mut yll: Option<f64> = None;
    let mut cell: Option<f64> = None;
    let mut nodata = DEFAULT_NODATA;

    let mut pending_values: Option<String> = None;
    for line in lines.by_ref() {
        line_no += 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let key = parts.next().unwrap_or("").to_ascii_lowercase();
        let is_header = matches!(
            key.as_str(),
            "ncols" | "nrows" | "xllcorner" | "yllcorner" | "cellsize" | "nodata_value"
        );
        if !is_header {
            pending_values = Some(line);
            break;
        }
        let value = parts
            .next()
            .ok_or_else(|| Error::parse(line_no, format!("missing value for header key {key}")))?;
        if parts.next().is_some() {
            return Err(Error::parse(line_no, "unexpected extra token in header line"));
        }
        match key.as_str() {
            "ncols" => {
                n_cols = Some(value.parse().map_err(|_| {
                    Error::parse(line_no, format!("ncols is not a positive integer: {value}"))
                })?)
            }
            "nrows" => {
                n_rows = Some(value.parse().map_err(|_| {
                    Error::parse(line_no, format!("nrows is not a positive integer: {value}"))
                })?)
            }
            "xllcorner" => {
                xll = Some(value.parse().map_err(|_| {
                    Error::parse(line_no, format!("xllcorner is not a number: {value}"))
                })?)
            }
            "yllcorner" => {
                yll = Some(value.parse().map_err(|_| {
                    Error::parse(line_no, format!("yllcorner is not a number: {value}"))
                })?)
            }
            "cellsize" => {
                cell = Some(value.parse().map_err(|_| {
                    Error::parse(line_no, format!("cellsize is not a number: {value}"))
                })?)
            }
            "nodata_value" => {
                nodata = value.parse().map_err(|_| {
                    Error::parse(line_no, format!("NODATA_value is not a number: {value}"))
                })?
            }
            _ => unreachable!(),
        }
    }

    let n_cols = n_cols.ok_or_else(|| Error::parse(line_no, "missing ncols header"))?;
    let n_rows = n_rows.ok_or_else(|| Error::parse(line_no, "missing nrows header"))?;
    let xll = xll.ok_or_else(|| Error::parse(line_no, "missing xllcorner header"))?;
    let yll = yll.ok_or_else(|| Error::parse(line_no, "missing yllcorner header"))?;
    let cell = cell.ok_or_else(|| Error::parse(line_no, "missing cellsize header"))?;

    let mut elevations = Vec::with_capacity(n_cols * n_rows);
    let mut parse_row = |line: &str, line_no: usize| -> Result<()> {
        let before = elevations.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad elevation value: {tok}")))?;
            elevations.push(v);
        }
        let added = elevations.len() - before;
        if added != n_cols {
            return Err(Error::parse(
                line_no,
                format!("expected {n_cols} values in row, got {added}"),
            ));
        }
        Ok(())
    };

    if let Some(first) = pending_values {
        parse_row(&first, line_no)?;
    }
    for line in lines {
        line_no += 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        parse_row(&line, line_no)?;
    }
    if elevations.len() != n_cols * n_rows {
        return Err(Error::parse(
            line_no,
            format!(
                "expected {} rows of data, got {}",
                n_rows,
                elevations.len() / n_cols
            ),
        ));
    }
    ElevationGrid::new(n_cols, n_rows, cell, xll, yll, nodata, elevations)
}

/// Writes the grid in canonical ESRI ASCII form: six header lines, one data
/// row per line, single spaces, and shortest-round-trip number formatting so
/// that load(save(g)) reproduces `g` bit-exactly.
pub fn save_grid<W: Write>(grid: &ElevationGrid, mut writer: W) -> Result<()> {
    writeln!(writer, "ncols {}", grid.n_cols)?;
    writeln!(writer, "nrows {}", grid.n_rows)?;
    writeln!(writer, "xllcorner {}", grid.origin_x)?;
    writeln!(writer, "yllcorner {}", grid.origin_y)?;
    writeln!(writer, "cellsize {}", grid.cell_size_m)?;
    writeln!(writer, "NODATA_value {}", grid.nodata_value)?;
    for row in 0..grid.n_rows {
        let mut line = String::new();
        for col in 0..grid.n_cols {
            if col > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{}", grid.value(col, row)));
        }
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Profile extraction
// ---------------------------------------------------------------------------

/// Extracts a ground profile along the straight segment between two
/// projected points at uniform steps no longer than `step_m`, endpoints
/// included. Samples on no-data cells are carried through marked; the
/// endpoints themselves must be valid. Antenna heights above ground at the
/// two endpoints are stored in the profile.
pub fn extract_profile(
    grid: &ElevationGrid,
    from: (f64, f64),
    to: (f64, f64),
    step_m: f64,
    tx_height_m: f64,
    rx_height_m: f64,
) -> Result<TerrainProfile> {
    if !(step_m > 0.0) {
        return Err(Error::invalid("step must be positive"));
    }
    if !grid.contains(from.0, from.1) || !grid.contains(to.0, to.1) {
        return Err(Error::invalid("profile endpoints must lie inside the grid"));
    }
    let length = ((to.0 - from.0).powi(2) + (to.1 - from.1).powi(2)).sqrt();
    if !(length > 0.0) {
        return Err(Error::invalid("profile endpoints coincide"));
    }
    let n_steps = (length / step_m).ceil().max(1.0) as usize;
    let mut samples = Vec::with_capacity(n_steps + 1);
    for i in 0..=n_steps {
        let t = i as f64 / n_steps as f64;
        let x = from.0 + (to.0 - from.0) * t;
        let y = from.1 + (to.1 - from.1) * t;
        let value = grid
            .sample(x, y)
            .ok_or_else(|| Error::invalid("profile leaves the grid"))?;
        samples.push(match value {
            Some(elev) => ProfileSample {
                distance_m: t * length,
                elevation_m: elev,
                is_nodata: false,
            },
            None => ProfileSample {
                distance_m: t * length,
                elevation_m: 0.0,
                is_nodata: true,
            },
        });
    }
    TerrainProfile::new(samples, tx_height_m, rx_height_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ElevationGrid> {
        load_grid(text.as_bytes())
    }

    #[test]
    fn parses_minimal_grid() {
        let g = parse("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n0 0\n0 0\n").unwrap();
        assert_eq!(g.n_cols, 2);
        assert_eq!(g.n_rows, 2);
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn header_keys_are_case_insensitive_and_nodata_optional() {
        let g = parse("NCOLS 1\nNROWS 1\nXLLCORNER 5\nYLLCORNER 6\nCELLSIZE 2.5\n42\n").unwrap();
        assert_eq!(g.nodata_value, DEFAULT_NODATA);
        assert_eq!(g.value(0, 0), 42.0);
        assert_eq!(g.origin_x, 5.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 x\n")
            .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other:?}"),
        }

        let err = parse("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_header_is_an_error() {
        assert!(parse("ncols 2\nnrows 1\nxllcorner 0\ncellsize 1\n1 2\n").is_err());
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let mut g = ElevationGrid::flat(3, 2, 7.5, 0.0).unwrap();
        g.set_value(0, 0, 1.25);
        g.set_value(1, 0, -3.0000001);
        g.set_value(2, 1, 1.0 / 3.0);
        g.set_value(0, 1, g.nodata_value);

        let mut buf = Vec::new();
        save_grid(&g, &mut buf).unwrap();
        let reloaded = load_grid(buf.as_slice()).unwrap();
        assert_eq!(g, reloaded);

        // Saving again yields byte-identical output.
        let mut buf2 = Vec::new();
        save_grid(&reloaded, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn cell_centers_follow_grid_orientation() {
        let g = ElevationGrid::flat(4, 3, 10.0, 0.0).unwrap();
        // Top-left cell centre sits at the highest y.
        assert_eq!(g.cell_center(0, 0), (5.0, 25.0));
        assert_eq!(g.cell_center(3, 2), (35.0, 5.0));
    }

    #[test]
    fn bilinear_sampling_is_exact_on_planes() {
        // elevation = 2x + 3y + 7 sampled at cell centres.
        let (n_cols, n_rows, cell) = (20usize, 16usize, 5.0);
        let mut g = ElevationGrid::flat(n_cols, n_rows, cell, 0.0).unwrap();
        for row in 0..n_rows {
            for col in 0..n_cols {
                let (x, y) = g.cell_center(col, row);
                g.set_value(col, row, 2.0 * x + 3.0 * y + 7.0);
            }
        }
        // Interior points reproduce the plane exactly.
        for &(x, y) in &[(12.3, 17.9), (50.0, 50.0), (7.5, 61.1), (93.2, 13.7)] {
            let v = g.sample(x, y).unwrap().unwrap();
            assert!((v - (2.0 * x + 3.0 * y + 7.0)).abs() < 1e-9, "at ({x},{y})");
        }
    }

    #[test]
    fn sampling_flags_nodata_and_outside() {
        let mut g = ElevationGrid::flat(3, 3, 10.0, 1.0).unwrap();
        g.set_value(1, 1, g.nodata_value);
        assert_eq!(g.sample(15.0, 15.0), Some(None)); // centre cell is no-data
        assert_eq!(g.sample(-1.0, 5.0), None); // outside
        assert_eq!(g.sample(5.0, 5.0), Some(Some(1.0)));
    }

    #[test]
    fn profile_on_flat_grid_is_constant() {
        let g = ElevationGrid::flat(50, 50, 10.0, 12.0).unwrap();
        let p = extract_profile(&g, (25.0, 25.0), (475.0, 475.0), 25.0, 30.0, 2.0).unwrap();
        assert!(p.samples().iter().all(|s| (s.elevation_m - 12.0).abs() < 1e-12));
        assert_eq!(p.samples()[0].distance_m, 0.0);
        let expected_len = ((450.0f64).powi(2) * 2.0).sqrt();
        assert!((p.path_length_m() - expected_len).abs() < 1e-9);
    }

    #[test]
    fn profile_on_ramp_is_linear() {
        let (n, cell) = (30usize, 10.0);
        let mut g = ElevationGrid::flat(n, n, cell, 0.0).unwrap();
        for row in 0..n {
            for col in 0..n {
                let (x, y) = g.cell_center(col, row);
                g.set_value(col, row, 0.5 * x + 0.25 * y);
            }
        }
        let from = (20.0, 30.0);
        let to = (280.0, 250.0);
        let p = extract_profile(&g, from, to, 7.0, 10.0, 2.0).unwrap();
        let len = p.path_length_m();
        for s in p.samples() {
            let t = s.distance_m / len;
            let x = from.0 + (to.0 - from.0) * t;
            let y = from.1 + (to.1 - from.1) * t;
            assert!((s.elevation_m - (0.5 * x + 0.25 * y)).abs() < 1e-9);
        }
    }

    #[test]
    fn oversize_step_clamps_to_endpoints() {
        let g = ElevationGrid::flat(10, 10, 10.0, 3.0).unwrap();
        let p = extract_profile(&g, (15.0, 15.0), (85.0, 15.0), 1000.0, 30.0, 2.0).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.path_length_m(), 70.0);
    }

    #[test]
    fn profile_marks_nodata_cells() {
        let mut g = ElevationGrid::flat(10, 1, 10.0, 5.0).unwrap();
        g.set_value(5, 0, g.nodata_value);
        let p = extract_profile(&g, (5.0, 5.0), (95.0, 5.0), 5.0, 10.0, 2.0).unwrap();
        assert!(p.has_nodata());
        // Endpoints stay valid.
        assert!(!p.samples()[0].is_nodata);
        assert!(!p.samples()[p.len() - 1].is_nodata);
    }

    #[test]
    fn profile_rejects_outside_points() {
        let g = ElevationGrid::flat(10, 10, 10.0, 0.0).unwrap();
        assert!(extract_profile(&g, (-5.0, 5.0), (50.0, 50.0), 5.0, 10.0, 2.0).is_err());
        assert!(extract_profile(&g, (5.0, 5.0), (500.0, 50.0), 5.0, 10.0, 2.0).is_err());
    }
}
