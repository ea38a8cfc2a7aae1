//! Antenna subsystem models: gradient-index spherical lens permittivity and
//! gain-vs-diameter, flat-panel array gain and element sizing, and idealized
//! azimuth sector patterns used by the capacity and coverage modules.

use crate::error::{Error, Result};

/// Gain floor, in dB, standing in for "no radiation" outside a rectangular
/// sector pattern.
pub const GAIN_FLOOR_DB: f64 = -300.0;

/// Rounding slack, in dB, accepted by [`panel_elements_for_gain`] between the
/// requested gain label and the exact array gain.
pub const PANEL_GAIN_SLACK_DB: f64 = 0.75;

/// Default panel element gain at 2500 MHz in dBi.
pub const DEFAULT_ELEMENT_GAIN_DBI: f64 = 5.0;

// ---------------------------------------------------------------------------
// Gradient-index spherical lens
// ---------------------------------------------------------------------------

/// A spherical gradient-index lens: physical radius plus a tabulated
/// gain-vs-diameter curve with the diameter in wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct LensModel {
    radius_m: f64,
    gain_curve: Vec<(f64, f64)>,
}

impl LensModel {
    pub fn new(radius_m: f64, gain_curve: Vec<(f64, f64)>) -> Result<Self> {
        if !(radius_m > 0.0) {
            return Err(Error::invalid("lens radius must be positive"));
        }
        if gain_curve.len() < 2 {
            return Err(Error::invalid("gain curve needs at least two knots"));
        }
        for pair in gain_curve.windows(2) {
            if !(pair[1].0 > pair[0].0 && pair[1].1 > pair[0].1) {
                return Err(Error::invalid(
                    "gain curve must be strictly increasing in both coordinates",
                ));
            }
        }
        Ok(LensModel {
            radius_m,
            gain_curve,
        })
    }

    /// Lens with the default measured gain curve and a 1.251/2 m radius.
    ///
    /// The reference unit behind these numbers is a six-shell sphere of
    /// 1.251 m outer diameter fed by a pyramidal horn at its focal point:
    /// 28.8 dBi at 2600 MHz and 26.31 dBi at 1800 MHz, with sidelobes
    /// 23.85 dB and 18.13 dB below the main beam respectively. Those are
    /// recorded here as measured constants; shell layout and feed are not
    /// modelled.
    pub fn standard() -> Self {
        LensModel::new(1.251 / 2.0, Self::default_curve()).expect("default curve is valid")
    }

    /// Default (diameter-in-wavelengths, gain-dBi) knots.
    pub fn default_curve() -> Vec<(f64, f64)> {
        vec![(4.0, 20.0), (5.0, 23.0), (7.0, 25.0), (10.0, 28.0), (15.0, 30.0)]
    }

    /// Parses a two-column text table of `D_lambda gain_dbi` pairs, one pair
    /// per line; `#` starts a comment, blank lines are skipped.
    pub fn curve_from_str(text: &str) -> Result<Vec<(f64, f64)>> {
        let mut curve = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let d: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(i + 1, "expected diameter in wavelengths"))?;
            let g: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(i + 1, "expected gain in dBi"))?;
            if it.next().is_some() {
                return Err(Error::parse(i + 1, "expected exactly two columns"));
            }
            curve.push((d, g));
        }
        Ok(curve)
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    pub fn gain_curve(&self) -> &[(f64, f64)] {
        &self.gain_curve
    }

    pub fn diameter_domain(&self) -> (f64, f64) {
        (
            self.gain_curve[0].0,
            self.gain_curve[self.gain_curve.len() - 1].0,
        )
    }
}

/// Relative permittivity of the lens material at radial distance `r_m` from
/// the centre: `2 - (r/R)^2`, falling from 2 at the core to 1 (air) at the
/// surface.
pub fn lens_permittivity(r_m: f64, radius_m: f64) -> Result<f64> {
    if !(radius_m > 0.0) {
        return Err(Error::invalid("lens radius must be positive"));
    }
    if !(0.0..=radius_m).contains(&r_m) {
        return Err(Error::invalid(format!(
            "radial distance {r_m} m outside [0, {radius_m}] m"
        )));
    }
    let x = r_m / radius_m;
    Ok(2.0 - x * x)
}

/// Lens gain in dBi at a diameter of `d_lambda` wavelengths, by piecewise
/// linear interpolation over the model's curve. No extrapolation.
pub fn lens_gain_dbi(d_lambda: f64, model: &LensModel) -> Result<f64> {
    let (lo, hi) = model.diameter_domain();
    if !(d_lambda >= lo && d_lambda <= hi) {
        return Err(Error::domain(format!(
            "diameter {d_lambda} wavelengths outside curve domain [{lo}, {hi}]"
        )));
    }
    Ok(interp(model.gain_curve(), d_lambda, |p| p.0, |p| p.1))
}

/// Inverse of [`lens_gain_dbi`]: the interpolated diameter, in wavelengths,
/// achieving `gain_dbi`. The curve is strictly increasing so the inverse is
/// unique.
pub fn lens_diameter_for_gain(gain_dbi: f64, model: &LensModel) -> Result<f64> {
    let curve = model.gain_curve();
    let (glo, ghi) = (curve[0].1, curve[curve.len() - 1].1);
    if !(gain_dbi >= glo && gain_dbi <= ghi) {
        return Err(Error::domain(format!(
            "gain {gain_dbi} dBi outside curve range [{glo}, {ghi}]"
        )));
    }
    Ok(interp(curve, gain_dbi, |p| p.1, |p| p.0))
}

fn interp<F, G>(curve: &[(f64, f64)], x: f64, key: F, val: G) -> f64
where
    F: Fn(&(f64, f64)) -> f64,
    G: Fn(&(f64, f64)) -> f64,
{
    for pair in curve.windows(2) {
        let (x0, x1) = (key(&pair[0]), key(&pair[1]));
        if x <= x1 {
            let t = (x - x0) / (x1 - x0);
            return val(&pair[0]) + t * (val(&pair[1]) - val(&pair[0]));
        }
    }
    val(&curve[curve.len() - 1])
}

// ---------------------------------------------------------------------------
// Flat-panel arrays
// ---------------------------------------------------------------------------

/// Mounting orientation of a flat-panel array around the mast.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// A rectangular array of `n_v` by `n_h` radiating elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelArray {
    pub n_v: u32,
    pub n_h: u32,
    pub element_gain_dbi: f64,
    pub orientation: Orientation,
}

impl PanelArray {
    pub fn new(n_v: u32, n_h: u32, element_gain_dbi: f64, orientation: Orientation) -> Result<Self> {
        if n_v < 1 || n_h < 1 {
            return Err(Error::invalid("element counts must be at least 1"));
        }
        Ok(PanelArray {
            n_v,
            n_h,
            element_gain_dbi,
            orientation,
        })
    }
}

/// Array gain `E_g + 10*log10(N_h * N_v)` in dBi.
pub fn panel_gain_dbi(array: &PanelArray) -> f64 {
    array.element_gain_dbi + 10.0 * f64::from(array.n_v * array.n_h).log10()
}

/// Smallest element pair whose row/column ratio tracks `aspect` and whose
/// array gain reaches `target_dbi` within [`PANEL_GAIN_SLACK_DB`].
///
/// Candidates are the single element plus the family
/// `(round(aspect * n_h), n_h)` for increasing `n_h`; the winner minimizes
/// total element count, then the aspect mismatch, then prefers larger `n_v`.
pub fn panel_elements_for_gain(
    target_dbi: f64,
    element_gain_dbi: f64,
    aspect: f64,
) -> Result<(u32, u32)> {
    if target_dbi < element_gain_dbi {
        return Err(Error::invalid(format!(
            "target gain {target_dbi} dBi below element gain {element_gain_dbi} dBi"
        )));
    }
    if !(aspect > 0.0) {
        return Err(Error::invalid("aspect ratio must be positive"));
    }
    let needed = 10f64.powf((target_dbi - PANEL_GAIN_SLACK_DB - element_gain_dbi) / 10.0);

    let mut candidates: Vec<(u32, u32)> = vec![(1, 1)];
    let mut n_h = 1u32;
    loop {
        let n_v = (aspect * f64::from(n_h)).round().max(1.0) as u32;
        candidates.push((n_v, n_h));
        if f64::from(n_v) * f64::from(n_h) >= needed || n_h > 4096 {
            break;
        }
        n_h += 1;
    }

    candidates
        .into_iter()
        .filter(|&(v, h)| f64::from(v) * f64::from(h) >= needed)
        .min_by(|&(av, ah), &(bv, bh)| {
            let count = (av * ah).cmp(&(bv * bh));
            let aspect_miss = |v: u32, h: u32| (f64::from(v) / f64::from(h) - aspect).abs();
            count
                .then(aspect_miss(av, ah).total_cmp(&aspect_miss(bv, bh)))
                .then(bv.cmp(&av))
        })
        .ok_or_else(|| Error::numerical("no element pair reaches the target gain"))
}

// ---------------------------------------------------------------------------
// Sector patterns and plans
// ---------------------------------------------------------------------------

/// Pattern shape of one azimuth sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    /// Ideal saw-tooth: full gain inside the passband, nothing outside.
    Rectangular,
    /// Smooth roll-off, 3 dB down at the half-width.
    Gaussian,
}

/// One azimuth sector: boresight, half-width of the passband, peak gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPattern {
    pub boresight_deg: f64,
    pub half_width_deg: f64,
    pub peak_gain_dbi: f64,
    pub kind: PatternKind,
}

impl SectorPattern {
    pub fn new(
        boresight_deg: f64,
        half_width_deg: f64,
        peak_gain_dbi: f64,
        kind: PatternKind,
    ) -> Result<Self> {
        if !(half_width_deg > 0.0 && half_width_deg <= 180.0) {
            return Err(Error::invalid("half width must be in (0, 180] degrees"));
        }
        Ok(SectorPattern {
            boresight_deg: wrap_0_360(boresight_deg),
            half_width_deg,
            peak_gain_dbi,
            kind,
        })
    }
}

/// Wraps an angle to [0, 360).
pub fn wrap_0_360(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r == 360.0 {
        0.0
    } else {
        r
    }
}

/// Wraps an angle to (-180, 180].
pub fn wrap_pm180(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Pattern gain in dBi toward `azimuth_deg`.
///
/// Rectangular patterns radiate the peak gain for relative azimuths in
/// `(-half_width, +half_width]` (upper boundary inclusive, lower exclusive,
/// so uniform plans tile azimuth exactly) and [`GAIN_FLOOR_DB`] elsewhere.
/// Gaussian patterns roll off as `peak - 3*(rel/half_width)^2` dB.
pub fn sector_gain_db(pattern: &SectorPattern, azimuth_deg: f64) -> f64 {
    let rel = wrap_pm180(azimuth_deg - pattern.boresight_deg);
    match pattern.kind {
        PatternKind::Rectangular => {
            let w = pattern.half_width_deg;
            if rel > -w && rel <= w {
                pattern.peak_gain_dbi
            } else {
                GAIN_FLOOR_DB
            }
        }
        PatternKind::Gaussian => {
            let x = rel / pattern.half_width_deg;
            pattern.peak_gain_dbi - 3.0 * x * x
        }
    }
}

/// N uniform sectors with boresights k*360/N and half-width 180/N.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorPlan {
    patterns: Vec<SectorPattern>,
}

impl SectorPlan {
    pub fn n_sectors(&self) -> usize {
        self.patterns.len()
    }

    pub fn patterns(&self) -> &[SectorPattern] {
        &self.patterns
    }

    /// Index of the sector serving `azimuth_deg`: argmax of pattern gain,
    /// ties resolved to the lowest sector index.
    pub fn serving_sector(&self, azimuth_deg: f64) -> usize {
        let mut best = 0;
        let mut best_gain = f64::NEG_INFINITY;
        for (i, p) in self.patterns.iter().enumerate() {
            let g = sector_gain_db(p, azimuth_deg);
            if g > best_gain {
                best = i;
                best_gain = g;
            }
        }
        best
    }

    /// Gain of the serving sector toward `azimuth_deg`.
    pub fn gain_toward(&self, azimuth_deg: f64) -> f64 {
        sector_gain_db(&self.patterns[self.serving_sector(azimuth_deg)], azimuth_deg)
    }
}

/// Builds a uniform plan of `n` sectors (1..=72) with equal peak gains.
pub fn make_uniform_plan(n: usize, peak_gain_dbi: f64, kind: PatternKind) -> Result<SectorPlan> {
    if !(1..=72).contains(&n) {
        return Err(Error::invalid(format!("sector count {n} outside 1..=72")));
    }
    let half_width = 180.0 / n as f64;
    let patterns = (0..n)
        .map(|k| {
            SectorPattern::new(k as f64 * 360.0 / n as f64, half_width, peak_gain_dbi, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SectorPlan { patterns })
}
