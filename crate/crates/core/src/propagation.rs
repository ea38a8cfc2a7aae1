//! Pathloss models: free space, the tuned K-coefficient empirical model,
//! knife-edge diffraction over a terrain profile, optical line-of-sight
//! testing, and the two-ray reflection fade margin.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Mean Earth radius in metres, used for the optical (k = 1) bulge term.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Fresnel parameter below which single knife-edge loss is taken as zero.
pub const KNIFE_EDGE_NU_MIN: f64 = -0.78;

/// Maximum number of knife edges combined over one obstructed profile.
pub const MAX_DIFFRACTION_EDGES: usize = 3;

/// Wavelength in metres for a carrier in MHz.
pub fn wavelength_m(f_mhz: f64) -> f64 {
    SPEED_OF_LIGHT_M_S / (f_mhz * 1e6)
}

// ---------------------------------------------------------------------------
// K-coefficient empirical pathloss model
// ---------------------------------------------------------------------------

/// Coefficient set of the empirical pathloss model
///
/// ```text
/// PL = K1 + K2*log10(d) + K3*log10(Htx) + K4*Ldiff + K5*log10(d)*log10(Htx)
///      + K6*Hrx + K7*log10(Hrx) + Kclutter*fclutter + Khill(LOS only)
/// ```
///
/// with d in metres, heights in metres, and distinct (K1, K2) pairs for the
/// LOS and NLOS classes. Tuned per-band values for a drive-tested flat
/// crop-land market are available via [`SpmParams::tuned_728_mhz`] and
/// [`SpmParams::tuned_2500_mhz`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpmParams {
    pub k1_los: f64,
    pub k2_los: f64,
    pub k1_nlos: f64,
    pub k2_nlos: f64,
    /// Coefficient of log10(Htx).
    pub k3: f64,
    /// Diffraction-loss multiplier.
    pub k4: f64,
    /// Coefficient of log10(d)*log10(Htx).
    pub k5: f64,
    /// Coefficient of Hrx (dB per metre).
    pub k6: f64,
    /// Coefficient of log10(Hrx).
    pub k7: f64,
    /// Clutter-loss multiplier.
    pub k_clutter: f64,
    /// Average weighted clutter loss in dB.
    pub f_clutter: f64,
    /// Additive corrective term applied only on LOS paths in hilly areas.
    pub k_hill_los: f64,
}

impl SpmParams {
    /// Tuned low-band (728 MHz) coefficients.
    pub fn tuned_728_mhz() -> Self {
        SpmParams {
            k1_los: 6.35,
            k2_los: 37.13,
            k1_nlos: 0.0,
            k2_nlos: 32.87,
            k3: 8.2,
            k4: 0.48,
            k5: -3.88,
            k6: -0.12,
            k7: -1.18,
            k_clutter: 1.0,
            f_clutter: 3.0,
            k_hill_los: 0.0,
        }
    }

    /// Tuned high-band (2500 MHz) coefficients.
    pub fn tuned_2500_mhz() -> Self {
        SpmParams {
            k1_los: 4.89,
            k2_los: 32.4,
            k1_nlos: 0.0,
            k2_nlos: 33.67,
            k3: -9.02,
            k4: 0.4,
            k5: 0.0,
            k6: -0.09,
            k7: -1.14,
            k_clutter: 1.0,
            f_clutter: 3.0,
            k_hill_los: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k2_los > 0.0 && self.k2_nlos > 0.0) {
            return Err(Error::invalid(
                "distance slopes k2_los and k2_nlos must be positive",
            ));
        }
        if !(self.f_clutter >= 0.0) {
            return Err(Error::invalid("f_clutter must be non-negative"));
        }
        Ok(())
    }
}

/// Geometry and link-state inputs to one pathloss evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathContext {
    /// Transmitter-receiver distance in metres.
    pub d_m: f64,
    /// Effective transmitter height in metres.
    pub h_tx_m: f64,
    /// Receiver height in metres.
    pub h_rx_m: f64,
    pub is_los: bool,
    /// Diffraction loss in dB; must be 0 on LOS paths.
    pub l_diff_db: f64,
}

impl PathContext {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_m > 0.0) {
            return Err(Error::invalid(format!(
                "distance must be positive, got {} m",
                self.d_m
            )));
        }
        if !(self.h_tx_m > 0.0) || !(self.h_rx_m > 0.0) {
            return Err(Error::invalid("antenna heights must be positive"));
        }
        if !(self.l_diff_db >= 0.0) {
            return Err(Error::invalid("diffraction loss must be non-negative"));
        }
        if self.is_los && self.l_diff_db != 0.0 {
            return Err(Error::invalid("LOS context must carry zero diffraction loss"));
        }
        Ok(())
    }
}

/// Friis free-space pathloss: 20*log10(d_km) + 20*log10(f_mhz) + 32.4478 dB.
pub fn fspl_db(d_m: f64, f_mhz: f64) -> Result<f64> {
    if !(d_m > 0.0) {
        return Err(Error::invalid(format!("distance must be positive, got {d_m} m")));
    }
    if !(f_mhz > 0.0) {
        return Err(Error::invalid(format!(
            "frequency must be positive, got {f_mhz} MHz"
        )));
    }
    let coeff = 20.0 * (4.0 * std::f64::consts::PI * 1e9 / SPEED_OF_LIGHT_M_S).log10();
    Ok(20.0 * (d_m / 1000.0).log10() + 20.0 * f_mhz.log10() + coeff)
}

/// Evaluates the K-coefficient pathloss model for one path.
pub fn spm_pathloss_db(params: &SpmParams, ctx: &PathContext) -> Result<f64> {
    params.validate()?;
    ctx.validate()?;
    let (k1, k2) = if ctx.is_los {
        (params.k1_los, params.k2_los)
    } else {
        (params.k1_nlos, params.k2_nlos)
    };
    let log_d = ctx.d_m.log10();
    let log_htx = ctx.h_tx_m.log10();
    let hill = if ctx.is_los { params.k_hill_los } else { 0.0 };
    Ok(k1
        + k2 * log_d
        + params.k3 * log_htx
        + params.k4 * ctx.l_diff_db
        + params.k5 * log_d * log_htx
        + params.k6 * ctx.h_rx_m
        + params.k7 * ctx.h_rx_m.log10()
        + params.k_clutter * params.f_clutter
        + hill)
}

// ---------------------------------------------------------------------------
// Terrain profiles
// ---------------------------------------------------------------------------

/// One ground sample along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    /// Along-path distance from the transmitter in metres.
    pub distance_m: f64,
    /// Ground elevation in metres; meaningless when `is_nodata` is set.
    pub elevation_m: f64,
    /// Set when the sample fell on a no-data raster cell.
    pub is_nodata: bool,
}

/// An ordered ground-elevation profile between two antennas.
///
/// Distances are strictly increasing, the first sample is at 0 and the last
/// at the path length. Antenna heights are above local ground at the two
/// endpoints. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainProfile {
    samples: Vec<ProfileSample>,
    tx_height_m: f64,
    rx_height_m: f64,
}

impl TerrainProfile {
    pub fn new(samples: Vec<ProfileSample>, tx_height_m: f64, rx_height_m: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("profile needs at least two samples"));
        }
        if samples[0].distance_m != 0.0 {
            return Err(Error::invalid("first profile sample must be at distance 0"));
        }
        for pair in samples.windows(2) {
            if !(pair[1].distance_m > pair[0].distance_m) {
                return Err(Error::invalid("profile distances must be strictly increasing"));
            }
        }
        if samples[0].is_nodata || samples[samples.len() - 1].is_nodata {
            return Err(Error::invalid("profile endpoints must not be no-data"));
        }
        Ok(TerrainProfile {
            samples,
            tx_height_m,
            rx_height_m,
        })
    }

    /// Convenience constructor from parallel distance / elevation slices.
    pub fn from_points(
        distances_m: &[f64],
        elevations_m: &[f64],
        tx_height_m: f64,
        rx_height_m: f64,
    ) -> Result<Self> {
        if distances_m.len() != elevations_m.len() {
            return Err(Error::invalid("distance and elevation lengths differ"));
        }
        let samples = distances_m
            .iter()
            .zip(elevations_m)
            .map(|(&d, &e)| ProfileSample {
                distance_m: d,
                elevation_m: e,
                is_nodata: false,
            })
            .collect();
        TerrainProfile::new(samples, tx_height_m, rx_height_m)
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least two samples
    }

    pub fn path_length_m(&self) -> f64 {
        self.samples[self.samples.len() - 1].distance_m
    }

    pub fn tx_height_m(&self) -> f64 {
        self.tx_height_m
    }

    pub fn rx_height_m(&self) -> f64 {
        self.rx_height_m
    }

    pub fn has_nodata(&self) -> bool {
        self.samples.iter().any(|s| s.is_nodata)
    }

    /// Antenna tip elevations (ground + antenna height) at both ends.
    fn tip_elevations(&self) -> (f64, f64) {
        let first = &self.samples[0];
        let last = &self.samples[self.samples.len() - 1];
        (
            first.elevation_m + self.tx_height_m,
            last.elevation_m + self.rx_height_m,
        )
    }

    /// Height of the direct ray above datum at along-path distance `d`.
    fn ray_elevation_at(&self, d: f64) -> f64 {
        let (tip_tx, tip_rx) = self.tip_elevations();
        let total = self.path_length_m();
        tip_tx + (tip_rx - tip_tx) * d / total
    }

    /// Earth-bulge correction d1*d2/(2*Re) at along-path distance `d`.
    fn bulge_at(&self, d: f64) -> f64 {
        let d2 = self.path_length_m() - d;
        d * d2 / (2.0 * EARTH_RADIUS_M)
    }
}

// ---------------------------------------------------------------------------
// Knife-edge diffraction
// ---------------------------------------------------------------------------

/// Fresnel parameter of an interior profile sample treated as a knife edge.
///
/// `nu = h * sqrt(2*(d1+d2) / (lambda*d1*d2))` where `h` is the edge height
/// relative to the straight ray between the antenna tips, signed positive
/// when obstructing. Pure straight-line geometry; the Earth bulge enters only
/// the profile-level operations.
pub fn fresnel_nu(profile: &TerrainProfile, edge_index: usize, f_mhz: f64) -> Result<f64> {
    if edge_index == 0 || edge_index >= profile.len() - 1 {
        return Err(Error::invalid(format!(
            "edge index {edge_index} must be strictly between the endpoints"
        )));
    }
    if !(f_mhz > 0.0) {
        return Err(Error::invalid("frequency must be positive"));
    }
    let s = &profile.samples()[edge_index];
    let d1 = s.distance_m;
    let d2 = profile.path_length_m() - s.distance_m;
    if d1 <= 0.0 || d2 <= 0.0 {
        return Err(Error::invalid("degenerate knife-edge geometry"));
    }
    let h = s.elevation_m - profile.ray_elevation_at(d1);
    let lambda = wavelength_m(f_mhz);
    Ok(h * (2.0 * (d1 + d2) / (lambda * d1 * d2)).sqrt())
}

/// Single knife-edge loss J(nu) in dB.
///
/// Uses the standard approximation
/// `J(nu) = 6.9 + 20*log10(sqrt((nu-0.1)^2 + 1) + nu - 0.1)` for
/// `nu > -0.78` and 0 below; monotone non-decreasing.
pub fn knife_edge_loss_db(nu: f64) -> f64 {
    if nu <= KNIFE_EDGE_NU_MIN {
        return 0.0;
    }
    let t = nu - 0.1;
    let loss = 6.9 + 20.0 * ((t * t + 1.0).sqrt() + t).log10();
    loss.max(0.0)
}

/// True when the direct ray between the antenna tips clears every interior
/// sample, with the optical (k = 1) Earth bulge added to the terrain.
/// Exact grazing counts as line of sight; no-data samples are skipped.
pub fn profile_los(profile: &TerrainProfile) -> bool {
    let n = profile.len();
    for s in &profile.samples()[1..n - 1] {
        if s.is_nodata {
            continue;
        }
        let obstacle = s.elevation_m + profile.bulge_at(s.distance_m);
        if obstacle > profile.ray_elevation_at(s.distance_m) {
            return false;
        }
    }
    true
}

/// Sub-profile Fresnel parameter between two anchor points (antenna tips or
/// previously selected edge tops).
fn nu_between(
    profile: &TerrainProfile,
    (d_a, z_a): (f64, f64),
    (d_b, z_b): (f64, f64),
    edge_index: usize,
    lambda: f64,
) -> f64 {
    let s = &profile.samples()[edge_index];
    let d1 = s.distance_m - d_a;
    let d2 = d_b - s.distance_m;
    let ray = z_a + (z_b - z_a) * d1 / (d_b - d_a);
    // Bulge relative to the sub-path endpoints.
    let bulge = d1 * d2 / (2.0 * EARTH_RADIUS_M);
    let h = s.elevation_m + bulge - ray;
    h * (2.0 * (d1 + d2) / (lambda * d1 * d2)).sqrt()
}

/// Index of the interior sample with the largest Fresnel parameter between
/// the anchors, ignoring no-data samples. Ties resolve to the lowest index.
fn principal_edge(
    profile: &TerrainProfile,
    a: (f64, f64),
    b: (f64, f64),
    range: std::ops::Range<usize>,
    lambda: f64,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for i in range {
        if profile.samples()[i].is_nodata {
            continue;
        }
        let nu = nu_between(profile, a, b, i, lambda);
        match best {
            Some((_, bn)) if nu <= bn => {}
            _ => best = Some((i, nu)),
        }
    }
    best
}

/// Diffraction loss over a profile: 0 on LOS paths, otherwise the
/// Epstein-Peterson sum of up to [`MAX_DIFFRACTION_EDGES`] knife edges.
///
/// The principal edge is the interior sample of maximum Fresnel parameter;
/// one secondary edge per side is added when it obstructs the sub-ray to the
/// principal edge top. Each retained edge is then scored against its
/// neighbouring edge tops (or the antenna tips) and the J(nu) losses summed.
pub fn profile_diffraction_db(profile: &TerrainProfile, f_mhz: f64) -> Result<f64> {
    if !(f_mhz > 0.0) {
        return Err(Error::invalid("frequency must be positive"));
    }
    if profile_los(profile) {
        return Ok(0.0);
    }
    let lambda = wavelength_m(f_mhz);
    let (tip_tx, tip_rx) = profile.tip_elevations();
    let tx = (0.0, tip_tx);
    let rx = (profile.path_length_m(), tip_rx);
    let n = profile.len();

    let (main_idx, _) = match principal_edge(profile, tx, rx, 1..n - 1, lambda) {
        Some(e) => e,
        None => return Ok(0.0), // every interior sample is no-data
    };
    let main = &profile.samples()[main_idx];
    let main_top = (main.distance_m, main.elevation_m);

    let mut edges = vec![main_idx];
    if let Some((i, nu)) = principal_edge(profile, tx, main_top, 1..main_idx, lambda) {
        if nu > 0.0 {
            edges.insert(0, i);
        }
    }
    if let Some((i, nu)) = principal_edge(profile, main_top, rx, main_idx + 1..n - 1, lambda) {
        if nu > 0.0 {
            edges.push(i);
        }
    }
    debug_assert!(edges.len() <= MAX_DIFFRACTION_EDGES);

    let anchor = |i: usize| {
        let s = &profile.samples()[i];
        (s.distance_m, s.elevation_m)
    };
    let mut total = 0.0;
    for (pos, &edge) in edges.iter().enumerate() {
        let a = if pos == 0 { tx } else { anchor(edges[pos - 1]) };
        let b = if pos + 1 == edges.len() {
            rx
        } else {
            anchor(edges[pos + 1])
        };
        total += knife_edge_loss_db(nu_between(profile, a, b, edge, lambda));
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Two-ray reflection fade margin
// ---------------------------------------------------------------------------

/// Ground-reflection geometry for the two-ray fade margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRayParams {
    /// Complex ground reflection coefficient, |gamma| <= 1.
    pub reflection_coefficient: Complex64,
    pub h_tx_m: f64,
    pub h_rx_m: f64,
    pub f_mhz: f64,
}

impl TwoRayParams {
    /// Flat-earth grazing-incidence default: gamma = -1 (magnitude 1, 180 deg).
    pub fn new(h_tx_m: f64, h_rx_m: f64, f_mhz: f64) -> Self {
        TwoRayParams {
            reflection_coefficient: Complex64::new(-1.0, 0.0),
            h_tx_m,
            h_rx_m,
            f_mhz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reflection_coefficient.norm() > 1.0 + 1e-12 {
            return Err(Error::invalid("|reflection coefficient| must not exceed 1"));
        }
        if !(self.h_tx_m > 0.0 && self.h_rx_m > 0.0) {
            return Err(Error::invalid("antenna heights must be positive"));
        }
        if !(self.f_mhz > 0.0) {
            return Err(Error::invalid("frequency must be positive"));
        }
        Ok(())
    }
}

/// Signed fade margin of the two-ray composite relative to the direct ray:
/// `20*log10(|1 + gamma * exp(-j*k*dd) * (d_direct/d_reflected)|)` with `dd`
/// the reflected-minus-direct path-length difference. Bounded above by
/// +6.02 dB; unboundedly negative in deep nulls.
pub fn two_ray_fade_margin_db(p: &TwoRayParams, d_m: f64) -> Result<f64> {
    p.validate()?;
    if !(d_m > p.h_tx_m.max(p.h_rx_m)) {
        return Err(Error::invalid(format!(
            "distance {d_m} m must exceed the larger antenna height"
        )));
    }
    let dh = p.h_tx_m - p.h_rx_m;
    let sh = p.h_tx_m + p.h_rx_m;
    let d_direct = (d_m * d_m + dh * dh).sqrt();
    let d_reflected = (d_m * d_m + sh * sh).sqrt();
    let delta = d_reflected - d_direct;
    let k = 2.0 * std::f64::consts::PI / wavelength_m(p.f_mhz);
    let phasor = Complex64::from_polar(d_direct / d_reflected, -k * delta);
    let composite = Complex64::new(1.0, 0.0) + p.reflection_coefficient * phasor;
    Ok(20.0 * composite.norm().log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fspl_reference_values() {
        assert!((fspl_db(23_000.0, 2500.0).unwrap() - 127.64).abs() < 0.01);
        assert!((fspl_db(1000.0, 1000.0).unwrap() - 92.45).abs() < 0.01);
    }

    #[test]
    fn fspl_doubling_distance_adds_6db() {
        let a = fspl_db(1500.0, 2500.0).unwrap();
        let b = fspl_db(3000.0, 2500.0).unwrap();
        assert!((b - a - 20.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn fspl_rejects_nonpositive() {
        assert!(fspl_db(0.0, 2500.0).is_err());
        assert!(fspl_db(1000.0, -1.0).is_err());
    }

    #[test]
    fn spm_highband_nlos_reference() {
        let ctx = PathContext {
            d_m: 10_000.0,
            h_tx_m: 250.0,
            h_rx_m: 2.0,
            is_los: false,
            l_diff_db: 0.0,
        };
        let pl = spm_pathloss_db(&SpmParams::tuned_2500_mhz(), &ctx).unwrap();
        assert!((pl - 115.53).abs() < 0.05, "pl={pl}");
    }

    #[test]
    fn spm_lowband_los_reference() {
        let ctx = PathContext {
            d_m: 23_000.0,
            h_tx_m: 30.0,
            h_rx_m: 2.0,
            is_los: true,
            l_diff_db: 0.0,
        };
        let pl = spm_pathloss_db(&SpmParams::tuned_728_mhz(), &ctx).unwrap();
        assert!((pl - 157.81).abs() < 0.05, "pl={pl}");
    }

    #[test]
    fn spm_constant_only_model() {
        let params = SpmParams {
            k1_los: 100.0,
            k2_los: 1e-30, // slopes must stay positive per invariant
            k1_nlos: 0.0,
            k2_nlos: 1e-30,
            k3: 0.0,
            k4: 0.0,
            k5: 0.0,
            k6: 0.0,
            k7: 0.0,
            k_clutter: 0.0,
            f_clutter: 0.0,
            k_hill_los: 0.0,
        };
        for d in [1.0, 500.0, 30_000.0] {
            let ctx = PathContext {
                d_m: d,
                h_tx_m: 50.0,
                h_rx_m: 2.0,
                is_los: true,
                l_diff_db: 0.0,
            };
            let pl = spm_pathloss_db(&params, &ctx).unwrap();
            assert!((pl - 100.0).abs() < 1e-9, "pl={pl}");
        }
    }

    #[test]
    fn spm_increasing_in_distance_both_bands() {
        for params in [SpmParams::tuned_728_mhz(), SpmParams::tuned_2500_mhz()] {
            for h_tx in [30.0, 120.0, 300.0] {
                for los in [true, false] {
                    let mut last = f64::MIN;
                    for d in [200.0, 1000.0, 5000.0, 20_000.0, 40_000.0] {
                        let ctx = PathContext {
                            d_m: d,
                            h_tx_m: h_tx,
                            h_rx_m: 2.0,
                            is_los: los,
                            l_diff_db: 0.0,
                        };
                        let pl = spm_pathloss_db(&params, &ctx).unwrap();
                        assert!(pl > last, "pl not increasing at d={d} h={h_tx} los={los}");
                        last = pl;
                    }
                }
            }
        }
    }

    #[test]
    fn spm_highband_taller_tower_means_less_loss() {
        let params = SpmParams::tuned_2500_mhz();
        for d in [1000.0, 10_000.0, 40_000.0] {
            let mut last = f64::MAX;
            for h_tx in [30.0, 60.0, 120.0, 250.0] {
                let ctx = PathContext {
                    d_m: d,
                    h_tx_m: h_tx,
                    h_rx_m: 2.0,
                    is_los: true,
                    l_diff_db: 0.0,
                };
                let pl = spm_pathloss_db(&params, &ctx).unwrap();
                assert!(pl < last, "loss should fall with height at d={d}");
                last = pl;
            }
        }
    }

    #[test]
    fn spm_lowband_height_slope_negative_beyond_130m() {
        // d(PL)/d(log10 Htx) = K3 + K5*log10(d) < 0 for d > 130 m.
        let params = SpmParams::tuned_728_mhz();
        for d_km in [1.0f64, 5.0, 20.0, 40.0] {
            let d = d_km * 1000.0;
            let slope = params.k3 + params.k5 * d.log10();
            assert!(slope < 0.0, "slope {slope} at {d_km} km");
            let ctx_low = PathContext {
                d_m: d,
                h_tx_m: 30.0,
                h_rx_m: 2.0,
                is_los: true,
                l_diff_db: 0.0,
            };
            let ctx_high = PathContext { h_tx_m: 250.0, ..ctx_low };
            let pl_low = spm_pathloss_db(&params, &ctx_low).unwrap();
            let pl_high = spm_pathloss_db(&params, &ctx_high).unwrap();
            assert!(pl_high < pl_low);
        }
    }

    #[test]
    fn spm_rejects_invalid_context() {
        let params = SpmParams::tuned_2500_mhz();
        let bad = PathContext {
            d_m: -5.0,
            h_tx_m: 30.0,
            h_rx_m: 2.0,
            is_los: true,
            l_diff_db: 0.0,
        };
        assert!(spm_pathloss_db(&params, &bad).is_err());
        let bad_los = PathContext {
            d_m: 100.0,
            h_tx_m: 30.0,
            h_rx_m: 2.0,
            is_los: true,
            l_diff_db: 3.0,
        };
        assert!(spm_pathloss_db(&params, &bad_los).is_err());
    }

    fn symmetric_edge_profile(h_edge: f64) -> TerrainProfile {
        // 10 km path, flat ground at 0 m, single interior sample at midpoint.
        TerrainProfile::from_points(
            &[0.0, 5000.0, 10_000.0],
            &[0.0, h_edge, 0.0],
            10.0,
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn fresnel_nu_reference_value() {
        // Tips at 10 m, edge 10 m above the straight ray at the midpoint of
        // a 10 km path, 2500 MHz.
        let profile = symmetric_edge_profile(20.0);
        let nu = fresnel_nu(&profile, 1, 2500.0).unwrap();
        assert!((nu - 0.8168).abs() < 0.001, "nu={nu}");
    }

    #[test]
    fn fresnel_nu_zero_on_ray_and_sign_symmetric() {
        let on_ray = symmetric_edge_profile(10.0);
        assert!(fresnel_nu(&on_ray, 1, 2500.0).unwrap().abs() < 1e-12);

        let above = symmetric_edge_profile(15.0);
        let below = symmetric_edge_profile(5.0);
        let nu_up = fresnel_nu(&above, 1, 2500.0).unwrap();
        let nu_dn = fresnel_nu(&below, 1, 2500.0).unwrap();
        assert!((nu_up + nu_dn).abs() < 1e-12, "{nu_up} vs {nu_dn}");
    }

    #[test]
    fn fresnel_nu_rejects_endpoint_indices() {
        let profile = symmetric_edge_profile(0.0);
        assert!(fresnel_nu(&profile, 0, 2500.0).is_err());
        assert!(fresnel_nu(&profile, 2, 2500.0).is_err());
    }

    #[test]
    fn knife_edge_reference_values() {
        assert!((knife_edge_loss_db(0.0) - 6.03).abs() < 0.02);
        assert_eq!(knife_edge_loss_db(-1.0), 0.0);
        assert!((knife_edge_loss_db(2.4) - 20.54).abs() < 0.05);
    }

    #[test]
    fn knife_edge_continuous_and_monotone() {
        // Seam at nu = -0.78 within 0.3 dB, monotone over a dense grid.
        assert!(knife_edge_loss_db(KNIFE_EDGE_NU_MIN + 1e-9) < 0.3);
        let mut nu = KNIFE_EDGE_NU_MIN;
        let mut last = -1.0;
        while nu <= 5.0 {
            let j = knife_edge_loss_db(nu);
            assert!(j >= last, "not monotone at nu={nu}");
            assert!(j >= 0.0);
            last = j;
            nu += 1e-3;
        }
    }

    #[test]
    fn los_flat_terrain() {
        let profile =
            TerrainProfile::from_points(&[0.0, 2500.0, 5000.0, 7500.0, 10_000.0],
                                        &[0.0; 5], 50.0, 2.0)
                .unwrap();
        assert!(profile_los(&profile));
    }

    #[test]
    fn los_blocked_by_midpath_hill() {
        // 100 m hill at the midpoint of a 10 km path; tips at 50 m and 2 m.
        let profile = TerrainProfile::from_points(
            &[0.0, 5000.0, 10_000.0],
            &[0.0, 100.0, 0.0],
            50.0,
            2.0,
        )
        .unwrap();
        assert!(!profile_los(&profile));

        // Raising the transmitter tip to 250 m restores line of sight.
        let raised = TerrainProfile::from_points(
            &[0.0, 5000.0, 10_000.0],
            &[0.0, 100.0, 0.0],
            250.0,
            2.0,
        )
        .unwrap();
        assert!(profile_los(&raised));
    }

    #[test]
    fn los_boundary_resolves_toward_clear() {
        // Obstruction is strict: a sample a hair below the bulge-corrected
        // ray is LOS, a hair above is not.
        let bulge = 5000.0 * 5000.0 / (2.0 * EARTH_RADIUS_M);
        let make = |eps: f64| {
            TerrainProfile::from_points(
                &[0.0, 5000.0, 10_000.0],
                &[0.0, 10.0 - bulge + eps, 0.0],
                10.0,
                10.0,
            )
            .unwrap()
        };
        assert!(profile_los(&make(-1e-6)));
        assert!(!profile_los(&make(1e-6)));
    }

    #[test]
    fn diffraction_zero_iff_los() {
        let clear = TerrainProfile::from_points(
            &[0.0, 3000.0, 6000.0],
            &[0.0, 1.0, 0.0],
            30.0,
            2.0,
        )
        .unwrap();
        assert!(profile_los(&clear));
        assert_eq!(profile_diffraction_db(&clear, 2500.0).unwrap(), 0.0);

        let blocked = TerrainProfile::from_points(
            &[0.0, 3000.0, 6000.0],
            &[0.0, 80.0, 0.0],
            30.0,
            2.0,
        )
        .unwrap();
        assert!(!profile_los(&blocked));
        assert!(profile_diffraction_db(&blocked, 2500.0).unwrap() > 0.0);
    }

    #[test]
    fn diffraction_single_edge_at_grazing_is_6db() {
        // Edge sits a hair above the bulge-corrected ray: nu ~ 0+.
        let bulge = 5000.0 * 5000.0 / (2.0 * EARTH_RADIUS_M);
        let profile = TerrainProfile::from_points(
            &[0.0, 5000.0, 10_000.0],
            &[0.0, 10.0 - bulge + 1e-9, 0.0],
            10.0,
            10.0,
        )
        .unwrap();
        assert!(!profile_los(&profile));
        let loss = profile_diffraction_db(&profile, 2500.0).unwrap();
        assert!((loss - 6.03).abs() < 0.02, "loss={loss}");
    }

    #[test]
    fn diffraction_two_grazing_edges_sum_to_12db() {
        // Tips and both edge tops at equal effective elevation, so each edge
        // grazes the sub-ray to its neighbour: twice J(0).
        let d = [0.0, 10_000.0, 20_000.0, 30_000.0];
        let bulge_1 = 10_000.0 * 20_000.0 / (2.0 * EARTH_RADIUS_M);
        let elev = [0.0, 50.0 - bulge_1 + 1e-9, 50.0 - bulge_1 + 1e-9, 0.0];
        let profile = TerrainProfile::from_points(&d, &elev, 50.0, 50.0).unwrap();
        assert!(!profile_los(&profile));
        let loss = profile_diffraction_db(&profile, 2500.0).unwrap();
        // Each edge is scored against its neighbour edge top over a sub-path
        // whose own bulge slightly lowers the effective edge height; the sum
        // stays within a tenth of a dB of 2*J(0).
        assert!((loss - 12.06).abs() < 0.1, "loss={loss}");
    }

    #[test]
    fn diffraction_asymmetric_profiles_match_independent_oracle() {
        // Frozen from an independent implementation of the same published
        // method (principal-edge selection plus neighbour-to-neighbour
        // scoring with the sub-path bulge).
        let rough = TerrainProfile::from_points(
            &[0.0, 2000.0, 4500.0, 7000.0, 9500.0, 12_000.0, 14_500.0, 18_000.0],
            &[12.0, 25.0, 140.0, 30.0, 55.0, 95.0, 20.0, 8.0],
            45.0,
            3.0,
        )
        .unwrap();
        assert!(!profile_los(&rough));
        let loss = profile_diffraction_db(&rough, 2500.0).unwrap();
        assert!((loss - 47.2175).abs() < 1e-3, "loss={loss}");

        let off_centre = TerrainProfile::from_points(
            &[0.0, 3000.0, 11_000.0],
            &[5.0, 85.0, 0.0],
            40.0,
            2.0,
        )
        .unwrap();
        let loss = profile_diffraction_db(&off_centre, 728.0).unwrap();
        assert!((loss - 20.9770).abs() < 1e-3, "loss={loss}");
    }

    #[test]
    fn two_ray_zero_gamma_is_flat() {
        let mut p = TwoRayParams::new(50.0, 2.0, 2500.0);
        p.reflection_coefficient = Complex64::new(0.0, 0.0);
        for d in [100.0, 1000.0, 10_000.0] {
            assert_eq!(two_ray_fade_margin_db(&p, d).unwrap(), 0.0);
        }
    }

    #[test]
    fn two_ray_constructive_limit_is_6db() {
        // gamma = +1: at very large d the phase difference vanishes and the
        // amplitudes add, doubling the field.
        let mut p = TwoRayParams::new(50.0, 2.0, 2500.0);
        p.reflection_coefficient = Complex64::new(1.0, 0.0);
        let margin = two_ray_fade_margin_db(&p, 1e9).unwrap();
        assert!((margin - 6.02).abs() < 0.01, "margin={margin}");
    }

    #[test]
    fn two_ray_first_null_is_deep() {
        // gamma = -1: the outermost null sits where the path difference is
        // one wavelength. Find it by scanning, then assert depth.
        let p = TwoRayParams::new(50.0, 2.0, 2500.0);
        let lambda = wavelength_m(2500.0);
        let d_guess = 2.0 * 50.0 * 2.0 / lambda;
        let mut best = (0.0, f64::MAX);
        let mut d = d_guess * 0.8;
        while d < d_guess * 1.2 {
            let m = two_ray_fade_margin_db(&p, d).unwrap();
            if m < best.1 {
                best = (d, m);
            }
            d += d_guess * 1e-5;
        }
        assert!(best.1 <= -20.0, "null depth {} at {} m", best.1, best.0);
    }

    #[test]
    fn two_ray_settles_to_far_field_limit() {
        // With |gamma| < 1 the margin approaches 20*log10(1 - |gamma|) from
        // above beyond the last extremum, with shrinking deviation.
        let mut p = TwoRayParams::new(50.0, 2.0, 2500.0);
        p.reflection_coefficient = Complex64::new(-0.5, 0.0);
        let limit = 20.0 * 0.5f64.log10();
        let lambda = wavelength_m(2500.0);
        let d_last_max = 4.0 * 50.0 * 2.0 / lambda; // path difference lambda/2
        let mut last_dev = f64::MAX;
        for mult in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
            let m = two_ray_fade_margin_db(&p, d_last_max * mult).unwrap();
            let dev = (m - limit).abs();
            assert!(dev < last_dev, "deviation should shrink, {dev} vs {last_dev}");
            last_dev = dev;
        }
        assert!(last_dev < 0.02);
    }

    #[test]
    fn two_ray_rejects_bad_geometry() {
        let p = TwoRayParams::new(50.0, 2.0, 2500.0);
        assert!(two_ray_fade_margin_db(&p, 40.0).is_err());
        let mut over = p;
        over.reflection_coefficient = Complex64::new(1.5, 0.0);
        assert!(two_ray_fade_margin_db(&over, 1000.0).is_err());
    }

    #[test]
    fn profile_validation() {
        assert!(TerrainProfile::from_points(&[0.0], &[0.0], 10.0, 2.0).is_err());
        assert!(TerrainProfile::from_points(&[1.0, 2.0], &[0.0, 0.0], 10.0, 2.0).is_err());
        assert!(TerrainProfile::from_points(&[0.0, 5.0, 5.0], &[0.0; 3], 10.0, 2.0).is_err());
    }
}
