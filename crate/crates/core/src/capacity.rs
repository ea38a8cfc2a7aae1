//! High-order sectorization capacity model: Laplacian power azimuth spectrum
//! (PAS), desired and inter-sector interference powers in closed form and by
//! adaptive quadrature, CINR/CNR, Shannon total capacity versus sector count,
//! and sector-count selection.
//!
//! A uniform plan of N sectors has passband half-width `W = 180/N` degrees;
//! the serving sector spans `(-W, W]` and the remaining sectors tile the rest
//! of the circle. The closed forms follow from the Laplacian integral
//!
//! ```text
//! int_{-W}^{+W} L0*exp(-sqrt(2)|t|/s) dt = 2*L0 * (s/sqrt(2)) * (1 - e^(-sqrt(2)W/s))
//!                                       = sqrt(2)*s*L0 * (1 - e^(-sqrt(2)W/s))
//! ```
//!
//! so the served power carries the `sqrt(2)*sigma*lambda0` prefactor and the
//! power leaking into the other N-1 sectors telescopes to
//! `sqrt(2)*s*L0 * (e^(-sqrt(2)W/s) - e^(-sqrt(2)NW/s))`, the mass between
//! the sector edge and +/-180 degrees. All integrals run over the +/-180
//! degree line without wrapping.

use crate::antenna::{sector_gain_db, PatternKind, SectorPattern, SectorPlan};
use crate::error::{Error, Result};
use crate::link::{noise_power_dbm, REFERENCE_TEMPERATURE_K};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Azimuth spreads below this many degrees use the exact zero-spread limits
/// instead of evaluating the exponentials.
pub const SIGMA_LIMIT_THRESHOLD_DEG: f64 = 1e-6;

/// Relative tolerance of the quadrature oracle.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// Spatial stream count in the Shannon total-capacity formula (2x2 MIMO).
pub const DEFAULT_STREAMS: f64 = 2.0;

// ---------------------------------------------------------------------------
// Laplacian PAS
// ---------------------------------------------------------------------------

/// Laplacian power azimuth spectrum with spread `sigma_deg` and peak linear
/// density `lambda0` (power per degree).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianPas {
    pub sigma_deg: f64,
    pub lambda0: f64,
}

impl LaplacianPas {
    pub fn new(sigma_deg: f64, lambda0: f64) -> Result<Self> {
        if !(sigma_deg >= 0.0) {
            return Err(Error::invalid("sigma must be non-negative"));
        }
        if !(lambda0 > 0.0) {
            return Err(Error::invalid("lambda0 must be positive"));
        }
        Ok(LaplacianPas { sigma_deg, lambda0 })
    }

    fn require_spread(&self) -> Result<()> {
        if self.sigma_deg <= 0.0 {
            return Err(Error::DegenerateSpread(
                "sigma = 0 has no density; use the zero-spread limits".into(),
            ));
        }
        Ok(())
    }
}

/// PAS density `lambda0 * exp(-sqrt(2)*|theta|/sigma)` at offset `theta_deg`.
pub fn pas_density(theta_deg: f64, pas: &LaplacianPas) -> Result<f64> {
    pas.require_spread()?;
    Ok(pas.lambda0 * (-SQRT2 * theta_deg.abs() / pas.sigma_deg).exp())
}

/// Closed-form integral of the PAS over `[-half_span, +half_span]` degrees.
pub fn pas_power_within(pas: &LaplacianPas, half_span_deg: f64) -> Result<f64> {
    pas.require_spread()?;
    if !(half_span_deg >= 0.0) {
        return Err(Error::invalid("span must be non-negative"));
    }
    Ok(SQRT2 * pas.sigma_deg * pas.lambda0 * (1.0 - (-SQRT2 * half_span_deg / pas.sigma_deg).exp()))
}

/// Total PAS power over the +/-180 degree circle.
pub fn pas_total_power(pas: &LaplacianPas) -> Result<f64> {
    pas_power_within(pas, 180.0)
}

/// Fixes `lambda0` so that the +/-180 degree PAS integral equals
/// `total_power_linear`.
pub fn normalize_pas(total_power_linear: f64, sigma_deg: f64) -> Result<LaplacianPas> {
    if !(total_power_linear > 0.0) {
        return Err(Error::invalid("total power must be positive"));
    }
    if sigma_deg <= 0.0 {
        return Err(Error::DegenerateSpread(
            "cannot normalize a zero-spread PAS".into(),
        ));
    }
    let lambda0 =
        total_power_linear / (SQRT2 * sigma_deg * (1.0 - (-SQRT2 * 180.0 / sigma_deg).exp()));
    LaplacianPas::new(sigma_deg, lambda0)
}

// ---------------------------------------------------------------------------
// Closed-form sector powers
// ---------------------------------------------------------------------------

/// Desired power captured by a sector of half-width `w_pass_deg` centred on
/// the PAS peak: `sqrt(2)*sigma*lambda0*(1 - exp(-sqrt(2)*W/sigma))`.
pub fn desired_power_closed(pas: &LaplacianPas, w_pass_deg: f64) -> Result<f64> {
    if !(w_pass_deg > 0.0 && w_pass_deg <= 180.0) {
        return Err(Error::invalid("passband half-width must be in (0, 180]"));
    }
    pas_power_within(pas, w_pass_deg)
}

/// Power leaking into the other `n_sectors - 1` sectors of a uniform plan
/// with `w_pass_deg = 180/N`:
/// `sqrt(2)*sigma*lambda0*(exp(-sqrt(2)*W/sigma) - exp(-sqrt(2)*N*W/sigma))`.
pub fn interference_power_closed(
    pas: &LaplacianPas,
    w_pass_deg: f64,
    n_sectors: usize,
) -> Result<f64> {
    if !(w_pass_deg > 0.0 && w_pass_deg <= 180.0) {
        return Err(Error::invalid("passband half-width must be in (0, 180]"));
    }
    if n_sectors < 1 {
        return Err(Error::invalid("sector count must be at least 1"));
    }
    pas.require_spread()?;
    let a = SQRT2 * pas.sigma_deg * pas.lambda0;
    let e_w = (-SQRT2 * w_pass_deg / pas.sigma_deg).exp();
    let e_nw = (-SQRT2 * n_sectors as f64 * w_pass_deg / pas.sigma_deg).exp();
    Ok(a * (e_w - e_nw))
}

// ---------------------------------------------------------------------------
// Quadrature oracle
// ---------------------------------------------------------------------------

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64> {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        // Accept at the requested tolerance, at the floating-point noise
        // floor of the local contribution, or when the interval has shrunk
        // to adjacent floats.
        let noise = 1e-15 * (left.abs() + right.abs());
        if delta.abs() <= (15.0 * eps).max(noise) || m <= a || m >= b {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::numerical(
                "quadrature did not converge to the requested tolerance",
            ));
        }
        let half = recurse(f, a, fa, m, fm, left, lm, flm, eps / 2.0, depth - 1)?;
        let other = recurse(f, m, fm, b, fb, right, rm, frm, eps / 2.0, depth - 1)?;
        Ok(half + other)
    }

    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let eps = rel_tol * whole.abs().max(1e-300);
    recurse(f, a, fa, b, fb, whole, m, fm, eps, 48)
}

/// Integrates the PAS density over `[lo, hi]`, splitting at the |theta| kink.
fn integrate_pas(pas: &LaplacianPas, lo: f64, hi: f64) -> Result<f64> {
    let f = |theta: f64| pas.lambda0 * (-SQRT2 * theta.abs() / pas.sigma_deg).exp();
    if lo < 0.0 && hi > 0.0 {
        Ok(adaptive_simpson(&f, lo, 0.0, QUADRATURE_REL_TOL)?
            + adaptive_simpson(&f, 0.0, hi, QUADRATURE_REL_TOL)?)
    } else {
        adaptive_simpson(&f, lo, hi, QUADRATURE_REL_TOL)
    }
}

/// Angular support of a rectangular pattern on the (-180, 180] line, split
/// into at most two intervals when it wraps.
fn rectangular_support(pattern: &SectorPattern) -> Vec<(f64, f64)> {
    let w = pattern.half_width_deg;
    if w >= 180.0 {
        return vec![(-180.0, 180.0)];
    }
    let lo = crate::antenna::wrap_pm180(pattern.boresight_deg - w);
    let hi = crate::antenna::wrap_pm180(pattern.boresight_deg + w);
    if lo < hi {
        vec![(lo, hi)]
    } else {
        vec![(lo, 180.0), (-180.0, hi)]
    }
}

/// Numerically integrates the PAS against a rectangular sector plan and
/// returns `(desired, interference)` linear powers: the PAS mass inside the
/// sector containing the peak, and the mass inside every other sector. This
/// is the independent oracle for the closed forms.
pub fn sector_powers_numeric(pas: &LaplacianPas, plan: &SectorPlan) -> Result<(f64, f64)> {
    pas.require_spread()?;
    for p in plan.patterns() {
        if p.kind != PatternKind::Rectangular {
            return Err(Error::invalid("numeric sector powers require a rectangular plan"));
        }
    }
    let serving = plan.serving_sector(0.0);
    let mut desired = 0.0;
    let mut interference = 0.0;
    for (i, p) in plan.patterns().iter().enumerate() {
        let mut mass = 0.0;
        for (lo, hi) in rectangular_support(p) {
            mass += integrate_pas(pas, lo, hi)?;
        }
        if i == serving {
            desired = mass;
        } else {
            interference += mass;
        }
    }
    Ok((desired, interference))
}

// ---------------------------------------------------------------------------
// General carrier-to-interference ratio
// ---------------------------------------------------------------------------

/// One interfering transmitter: azimuth offset from the serving boresight,
/// transmit power, and its own PAS (centred on the interferer).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    pub offset_deg: f64,
    pub tx_power_dbm: f64,
    pub pas: LaplacianPas,
}

/// A set of interferers with offsets in (-180, 180].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterfererSet {
    pub entries: Vec<Interferer>,
}

impl InterfererSet {
    pub fn validate(&self) -> Result<()> {
        for e in &self.entries {
            if !(e.offset_deg > -180.0 && e.offset_deg <= 180.0) {
                return Err(Error::invalid("interferer offsets must lie in (-180, 180]"));
            }
        }
        Ok(())
    }
}

/// Carrier-to-interference ratio in dB for an arbitrary interferer set seen
/// through one receiving pattern, by quadrature over (-180, 180].
///
/// Each PAS is evaluated on the unwrapped line (matching the closed forms).
/// Returns `f64::INFINITY` when the interference power is zero.
pub fn general_ci_ratio(
    desired_pas: &LaplacianPas,
    interferers: &InterfererSet,
    pattern: &SectorPattern,
) -> Result<f64> {
    desired_pas.require_spread()?;
    interferers.validate()?;

    // Rectangular patterns are a constant gain over their support, so the
    // weighted integral reduces to a density integral; evaluating the gain
    // inside the quadrature would plant step discontinuities at the support
    // boundaries. Gaussian patterns are smooth and integrate directly.
    let integrate_weighted = |pas: &LaplacianPas, centre: f64| -> Result<f64> {
        let split_integrate = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> Result<f64> {
            if lo < centre && centre < hi {
                Ok(adaptive_simpson(&f, lo, centre, QUADRATURE_REL_TOL)?
                    + adaptive_simpson(&f, centre, hi, QUADRATURE_REL_TOL)?)
            } else {
                adaptive_simpson(&f, lo, hi, QUADRATURE_REL_TOL)
            }
        };
        match pattern.kind {
            PatternKind::Rectangular => {
                let density = |theta: f64| {
                    pas.lambda0 * (-SQRT2 * (theta - centre).abs() / pas.sigma_deg).exp()
                };
                let peak_lin = 10f64.powf(pattern.peak_gain_dbi / 10.0);
                let mut total = 0.0;
                for (lo, hi) in rectangular_support(pattern) {
                    total += split_integrate(&density, lo, hi)?;
                }
                Ok(total * peak_lin)
            }
            PatternKind::Gaussian => {
                let f = |theta: f64| {
                    let density =
                        pas.lambda0 * (-SQRT2 * (theta - centre).abs() / pas.sigma_deg).exp();
                    density * 10f64.powf(sector_gain_db(pattern, theta) / 10.0)
                };
                split_integrate(&f, -180.0, 180.0)
            }
        }
    };

    let desired = integrate_weighted(desired_pas, 0.0)?;
    let mut interference = 0.0;
    for e in &interferers.entries {
        e.pas.require_spread()?;
        let power_scale = 10f64.powf(e.tx_power_dbm / 10.0);
        interference += power_scale * integrate_weighted(&e.pas, e.offset_deg)?;
    }
    if interference == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (desired / interference).log10())
}

// ---------------------------------------------------------------------------
// CINR, CNR, capacity
// ---------------------------------------------------------------------------

/// Inputs to the uniform-sectorization capacity evaluation.
///
/// `total_cnr_db` is the ratio of the full +/-180 degree PAS-integrated
/// carrier power to the thermal noise power; the PAS is normalized to unit
/// total power internally, making the model bandwidth-scale free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCapacityInput {
    pub n_sectors: usize,
    pub bandwidth_hz: f64,
    pub sigma_deg: f64,
    pub total_cnr_db: f64,
    pub temperature_k: f64,
}

impl SectorCapacityInput {
    pub fn new(n_sectors: usize, bandwidth_hz: f64, sigma_deg: f64, total_cnr_db: f64) -> Self {
        SectorCapacityInput {
            n_sectors,
            bandwidth_hz,
            sigma_deg,
            total_cnr_db,
            temperature_k: REFERENCE_TEMPERATURE_K,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sectors < 1 {
            return Err(Error::invalid("sector count must be at least 1"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth must be positive"));
        }
        if !(self.sigma_deg >= 0.0) {
            return Err(Error::invalid("sigma must be non-negative"));
        }
        Ok(())
    }

    pub fn w_pass_deg(&self) -> f64 {
        180.0 / self.n_sectors as f64
    }

    /// Desired and interference fractions of the unit-power PAS.
    fn power_split(&self) -> Result<(f64, f64)> {
        if self.sigma_deg < SIGMA_LIMIT_THRESHOLD_DEG {
            // Zero-spread limit: all power lands in the serving sector.
            return Ok((1.0, 0.0));
        }
        let pas = normalize_pas(1.0, self.sigma_deg)?;
        let w = self.w_pass_deg();
        let d = desired_power_closed(&pas, w)?;
        let i = interference_power_closed(&pas, w, self.n_sectors)?;
        Ok((d, i))
    }

    fn noise_linear(&self) -> f64 {
        10f64.powf(-self.total_cnr_db / 10.0)
    }
}

/// Per-sector carrier-to-interference-plus-noise ratio in dB.
pub fn cinr_db(input: &SectorCapacityInput) -> Result<f64> {
    input.validate()?;
    let (d, i) = input.power_split()?;
    Ok(10.0 * (d / (i + input.noise_linear())).log10())
}

/// Per-sector carrier-to-noise ratio in dB (interference removed).
pub fn cnr_db(input: &SectorCapacityInput) -> Result<f64> {
    input.validate()?;
    let (d, _) = input.power_split()?;
    Ok(10.0 * (d / input.noise_linear()).log10())
}

/// Shannon total capacity across all sectors,
/// `streams * N * B * log2(1 + CINR)`, with the default two spatial streams.
pub fn total_capacity_bps(input: &SectorCapacityInput) -> Result<f64> {
    total_capacity_bps_with_streams(input, DEFAULT_STREAMS)
}

pub fn total_capacity_bps_with_streams(input: &SectorCapacityInput, streams: f64) -> Result<f64> {
    input.validate()?;
    let (d, i) = input.power_split()?;
    let cinr = d / (i + input.noise_linear());
    Ok(streams * input.n_sectors as f64 * input.bandwidth_hz * (1.0 + cinr).log2())
}

// ---------------------------------------------------------------------------
// Capacity curves
// ---------------------------------------------------------------------------

/// One row of a capacity-versus-sector-count curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityRow {
    pub n_sectors: usize,
    pub w_pass_deg: f64,
    pub cinr_db: f64,
    pub cnr_db: f64,
    pub c_tot_bps: f64,
}

/// Capacity rows for N = 1..=n_max at fixed spread and baseline CNR.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    pub sigma_deg: f64,
    pub bandwidth_hz: f64,
    pub total_cnr_db: f64,
    pub rows: Vec<CapacityRow>,
}

impl CapacityCurve {
    /// CSV with the canonical column order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_sectors,w_pass_deg,cinr_db,cnr_db,c_tot_bps\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n_sectors,
                crate::format::sig6(r.w_pass_deg),
                crate::format::sig6(r.cinr_db),
                crate::format::sig6(r.cnr_db),
                crate::format::sig6(r.c_tot_bps),
            ));
        }
        out
    }
}

/// Sweeps N = 1..=n_max (n_max <= 72).
pub fn capacity_vs_sectors(
    sigma_deg: f64,
    bandwidth_hz: f64,
    total_cnr_db: f64,
    n_max: usize,
) -> Result<CapacityCurve> {
    if !(1..=72).contains(&n_max) {
        return Err(Error::invalid(format!("n_max {n_max} outside 1..=72")));
    }
    if !(sigma_deg >= 0.0) {
        return Err(Error::invalid("sigma must be non-negative"));
    }
    let rows = (1..=n_max)
        .map(|n| {
            let input = SectorCapacityInput::new(n, bandwidth_hz, sigma_deg, total_cnr_db);
            Ok(CapacityRow {
                n_sectors: n,
                w_pass_deg: input.w_pass_deg(),
                cinr_db: cinr_db(&input)?,
                cnr_db: cnr_db(&input)?,
                c_tot_bps: total_capacity_bps(&input)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityCurve {
        sigma_deg,
        bandwidth_hz,
        total_cnr_db,
        rows,
    })
}

/// First N whose marginal capacity gain `(C(N+1) - C(N)) / C(1)` falls below
/// `marginal_threshold`; the last N of the curve when it never does. The
/// single-sector capacity is the yardstick: a zero-spread curve gains one
/// C(1) per added sector forever and so never saturates.
pub fn optimal_sector_count(curve: &CapacityCurve, marginal_threshold: f64) -> Result<usize> {
    if curve.rows.is_empty() {
        return Err(Error::invalid("curve is empty"));
    }
    if !(marginal_threshold > 0.0 && marginal_threshold < 1.0) {
        return Err(Error::invalid("threshold must be in (0, 1)"));
    }
    let base = curve.rows[0].c_tot_bps;
    for pair in curve.rows.windows(2) {
        let gain = (pair[1].c_tot_bps - pair[0].c_tot_bps) / base;
        if gain < marginal_threshold {
            return Ok(pair[0].n_sectors);
        }
    }
    Ok(curve.rows[curve.rows.len() - 1].n_sectors)
}

/// Exponential spread-vs-pathloss law `sigma = a * exp(b * PL)`.
pub fn sigma_from_pathloss(a: f64, b: f64, pl_db: f64) -> f64 {
    a * (b * pl_db).exp()
}

/// Thermal noise power in dBm for a capacity input's bandwidth/temperature;
/// exposed for callers converting an absolute carrier power into the
/// `total_cnr_db` convention.
pub fn thermal_noise_dbm(input: &SectorCapacityInput) -> Result<f64> {
    noise_power_dbm(input.bandwidth_hz, input.temperature_k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::make_uniform_plan;

    const SIGMAS: [f64; 5] = [0.1, 0.35, 2.0, 10.0, 30.0];
    const SECTOR_COUNTS: [usize; 6] = [1, 3, 6, 12, 24, 36];

    #[test]
    fn density_peak_and_half_point() {
        let pas = LaplacianPas::new(10.0, 3.5).unwrap();
        assert_eq!(pas_density(0.0, &pas).unwrap(), 3.5);
        let theta_half = 10.0 * 2f64.ln() / SQRT2;
        assert!((pas_density(theta_half, &pas).unwrap() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn density_closed_integral_reference() {
        let pas = LaplacianPas::new(10.0, 1.0).unwrap();
        let total = pas_total_power(&pas).unwrap();
        assert!((total - 14.142).abs() < 1e-3);
        // Cross-checked by quadrature.
        let numeric = integrate_pas(&pas, -180.0, 180.0).unwrap();
        assert!(((numeric - total) / total).abs() < 1e-9);
    }

    #[test]
    fn density_rejects_zero_spread() {
        let pas = LaplacianPas::new(0.0, 1.0).unwrap();
        assert!(matches!(
            pas_density(1.0, &pas),
            Err(Error::DegenerateSpread(_))
        ));
    }

    #[test]
    fn normalization_reference_and_linearity() {
        let pas = normalize_pas(1.0, 10.0).unwrap();
        assert!((pas.lambda0 - 0.070711).abs() < 1e-6);
        let doubled = normalize_pas(2.0, 10.0).unwrap();
        assert!((doubled.lambda0 - 2.0 * pas.lambda0).abs() < 1e-15);
        // Round trip: the integral of the normalized PAS recovers the power.
        for sigma in SIGMAS {
            let p = normalize_pas(3.25, sigma).unwrap();
            let total = pas_total_power(&p).unwrap();
            assert!(((total - 3.25) / 3.25).abs() < 1e-9);
        }
    }

    #[test]
    fn desired_power_reference_value() {
        let pas = normalize_pas(1.0, 2.0).unwrap();
        let d = desired_power_closed(&pas, 5.0).unwrap();
        assert!((d - 0.97085).abs() < 1e-5, "d={d}");
        // Full circle captures everything; the formula telescopes.
        let full = desired_power_closed(&pas, 180.0).unwrap();
        assert!((full - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interference_power_reference_value() {
        let pas = normalize_pas(1.0, 2.0).unwrap();
        let i = interference_power_closed(&pas, 5.0, 36).unwrap();
        assert!((i - 0.029148).abs() < 1e-5, "i={i}");
        // One sector leaves nothing to interfere with.
        let none = interference_power_closed(&pas, 180.0, 1).unwrap();
        assert!(none.abs() < 1e-15);
    }

    #[test]
    fn conservation_over_sigma_and_sector_grid() {
        for sigma in SIGMAS {
            let pas = normalize_pas(1.0, sigma).unwrap();
            let total = pas_total_power(&pas).unwrap();
            for n in SECTOR_COUNTS {
                let w = 180.0 / n as f64;
                let d = desired_power_closed(&pas, w).unwrap();
                let i = interference_power_closed(&pas, w, n).unwrap();
                assert!(
                    ((d + i - total) / total).abs() < 1e-9,
                    "sigma={sigma} n={n}"
                );
            }
        }
    }

    #[test]
    fn quadrature_oracle_matches_closed_forms() {
        for sigma in SIGMAS {
            let pas = normalize_pas(1.0, sigma).unwrap();
            for n in SECTOR_COUNTS {
                let plan = make_uniform_plan(n, 0.0, PatternKind::Rectangular).unwrap();
                let (d_num, i_num) = sector_powers_numeric(&pas, &plan).unwrap();
                let w = 180.0 / n as f64;
                let d = desired_power_closed(&pas, w).unwrap();
                let i = interference_power_closed(&pas, w, n).unwrap();
                assert!(((d_num - d) / d).abs() < 1e-8, "sigma={sigma} n={n}");
                if n > 1 {
                    assert!(((i_num - i) / i.max(1e-300)).abs() < 1e-8, "sigma={sigma} n={n}");
                } else {
                    assert_eq!(i_num, 0.0);
                }
            }
        }
    }

    #[test]
    fn quadrature_reference_case() {
        let pas = normalize_pas(1.0, 2.0).unwrap();
        let plan = make_uniform_plan(36, 0.0, PatternKind::Rectangular).unwrap();
        let (d, i) = sector_powers_numeric(&pas, &plan).unwrap();
        assert!((d - 0.97085).abs() < 1e-5);
        assert!((i - 0.029148).abs() < 1e-5);
    }

    #[test]
    fn general_ci_empty_set_is_infinite() {
        let pas = normalize_pas(1.0, 5.0).unwrap();
        let pattern = SectorPattern::new(0.0, 5.0, 0.0, PatternKind::Rectangular).unwrap();
        let ci = general_ci_ratio(&pas, &InterfererSet::default(), &pattern).unwrap();
        assert!(ci.is_infinite() && ci > 0.0);
    }

    #[test]
    fn general_ci_colocated_equal_interferer_is_zero_db() {
        let pas = normalize_pas(1.0, 5.0).unwrap();
        let pattern = SectorPattern::new(0.0, 10.0, 0.0, PatternKind::Rectangular).unwrap();
        let set = InterfererSet {
            entries: vec![Interferer {
                offset_deg: 0.0,
                tx_power_dbm: 0.0,
                pas,
            }],
        };
        let ci = general_ci_ratio(&pas, &set, &pattern).unwrap();
        assert!(ci.abs() < 1e-9, "ci={ci}");
    }

    #[test]
    fn general_ci_gaussian_pattern() {
        let pas = normalize_pas(1.0, 6.0).unwrap();
        let pattern = SectorPattern::new(0.0, 12.0, 14.0, PatternKind::Gaussian).unwrap();
        // Co-located equal interferer: perfect symmetry regardless of the
        // pattern shape.
        let set = InterfererSet {
            entries: vec![Interferer {
                offset_deg: 0.0,
                tx_power_dbm: 0.0,
                pas,
            }],
        };
        let ci = general_ci_ratio(&pas, &set, &pattern).unwrap();
        assert!(ci.abs() < 1e-9, "ci={ci}");

        // An interferer pushed off boresight is attenuated by the roll-off:
        // positive C/I that grows with offset.
        let at = |offset: f64| {
            let set = InterfererSet {
                entries: vec![Interferer {
                    offset_deg: offset,
                    tx_power_dbm: 0.0,
                    pas,
                }],
            };
            general_ci_ratio(&pas, &set, &pattern).unwrap()
        };
        let near = at(20.0);
        let far = at(60.0);
        assert!(near > 0.0);
        assert!(far > near, "{far} vs {near}");
    }

    #[test]
    fn general_ci_uniform_interferers_match_closed_form() {
        // Odd sector counts keep every sector away from the +/-180 seam,
        // where the unwrapped-line convention would split a sector.
        for n in [3usize, 9, 15] {
            let sigma = 4.0;
            let pas = normalize_pas(1.0, sigma).unwrap();
            let w = 180.0 / n as f64;
            let pattern = SectorPattern::new(0.0, w, 0.0, PatternKind::Rectangular).unwrap();
            let entries = (1..n)
                .map(|k| Interferer {
                    offset_deg: crate::antenna::wrap_pm180(k as f64 * 2.0 * w),
                    tx_power_dbm: 0.0,
                    pas,
                })
                .collect();
            let ci = general_ci_ratio(&pas, &InterfererSet { entries }, &pattern).unwrap();

            let d = desired_power_closed(&pas, w).unwrap();
            let i = interference_power_closed(&pas, w, n).unwrap();
            let expected = 10.0 * (d / i).log10();
            assert!((ci - expected).abs() < 1e-8, "n={n}: {ci} vs {expected}");
        }
    }

    #[test]
    fn cinr_reference_value() {
        let input = SectorCapacityInput::new(36, 20e6, 2.0, 20.0);
        let c = cinr_db(&input).unwrap();
        assert!((c - 13.95).abs() < 0.02, "cinr={c}");
    }

    #[test]
    fn cnr_reference_value_and_full_capture() {
        let input = SectorCapacityInput::new(36, 20e6, 2.0, 20.0);
        let c = cnr_db(&input).unwrap();
        assert!((c - 19.87).abs() < 0.02, "cnr={c}");

        let single = SectorCapacityInput::new(1, 20e6, 2.0, 20.0);
        assert!((cnr_db(&single).unwrap() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn cinr_never_exceeds_cnr() {
        for sigma in SIGMAS {
            for n in SECTOR_COUNTS {
                let input = SectorCapacityInput::new(n, 20e6, sigma, 20.0);
                assert!(cinr_db(&input).unwrap() <= cnr_db(&input).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn cinr_zero_spread_equals_total_cnr() {
        for n in [1, 7, 36] {
            let input = SectorCapacityInput::new(n, 20e6, 0.0, 20.0);
            assert_eq!(cinr_db(&input).unwrap(), 20.0);
        }
    }

    #[test]
    fn cinr_tiny_spread_limit() {
        for n in SECTOR_COUNTS {
            let input = SectorCapacityInput::new(n, 20e6, 1e-4, 20.0);
            assert!((cinr_db(&input).unwrap() - 20.0).abs() < 0.01, "n={n}");
        }
    }

    #[test]
    fn cinr_noise_dominated_floor() {
        // As the baseline CNR collapses, CINR tracks D/Np toward zero linear.
        let input = SectorCapacityInput::new(12, 20e6, 2.0, -80.0);
        let cinr = cinr_db(&input).unwrap();
        let d = desired_power_closed(&normalize_pas(1.0, 2.0).unwrap(), 15.0).unwrap();
        let expected = 10.0 * (d / 1e8).log10();
        assert!((cinr - expected).abs() < 1e-6);
    }

    #[test]
    fn cinr_monotone_in_sigma_and_sector_count() {
        // Grids chosen so the interference term stays above the f64 noise
        // floor; narrower sectors or wider spreads than about exp(-40)
        // saturate CINR at the noise-only value and tie.
        for n in [12, 36] {
            let mut last = f64::MAX;
            for sigma in [0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
                let c = cinr_db(&SectorCapacityInput::new(n, 20e6, sigma, 20.0)).unwrap();
                assert!(c < last, "CINR should fall with sigma at N={n}");
                last = c;
            }
        }
        for sigma in [5.0, 10.0, 30.0] {
            let mut last = f64::MAX;
            for n in SECTOR_COUNTS {
                let c = cinr_db(&SectorCapacityInput::new(n, 20e6, sigma, 20.0)).unwrap();
                assert!(c < last, "CINR should fall with N at sigma={sigma}");
                last = c;
            }
        }
    }

    #[test]
    fn capacity_reference_value() {
        let input = SectorCapacityInput::new(36, 20e6, 2.0, 20.0);
        let c = total_capacity_bps(&input).unwrap();
        assert!(((c - 6.76e9) / 6.76e9).abs() < 0.01, "c={c}");
    }

    #[test]
    fn capacity_trivial_cases() {
        let input = SectorCapacityInput::new(1, 1.0, 0.0, 0.0);
        assert!((total_capacity_bps(&input).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_zero_spread_is_linear_in_n() {
        let base = total_capacity_bps(&SectorCapacityInput::new(1, 20e6, 0.0, 20.0)).unwrap();
        for n in 2..=36 {
            let c = total_capacity_bps(&SectorCapacityInput::new(n, 20e6, 0.0, 20.0)).unwrap();
            assert!(((c - n as f64 * base) / (n as f64 * base)).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_increasing_but_sublinear_for_positive_spread() {
        let curve = capacity_vs_sectors(5.0, 20e6, 20.0, 36).unwrap();
        for pair in curve.rows.windows(2) {
            assert!(pair[1].c_tot_bps > pair[0].c_tot_bps, "capacity never decreases");
        }
        for pair in curve.rows.windows(2) {
            let per_sector_prev = pair[0].c_tot_bps / pair[0].n_sectors as f64;
            let per_sector_next = pair[1].c_tot_bps / pair[1].n_sectors as f64;
            assert!(per_sector_next < per_sector_prev, "per-sector capacity falls");
        }
        let c1 = curve.rows[0].c_tot_bps;
        let c36 = curve.rows[35].c_tot_bps;
        assert!(c36 < 36.0 * c1);
    }

    #[test]
    fn curve_near_linear_at_measured_low_spread() {
        let curve = capacity_vs_sectors(0.1, 20e6, 20.0, 36).unwrap();
        let c1 = curve.rows[0].c_tot_bps;
        for row in &curve.rows {
            let ratio = row.c_tot_bps / (row.n_sectors as f64 * c1);
            assert!(ratio >= 0.99, "N={}: ratio={ratio}", row.n_sectors);
        }
    }

    #[test]
    fn curve_rows_carry_w_pass() {
        let curve = capacity_vs_sectors(2.0, 20e6, 20.0, 12).unwrap();
        for row in &curve.rows {
            assert_eq!(row.w_pass_deg, 180.0 / row.n_sectors as f64);
        }
    }

    #[test]
    fn optimal_count_zero_spread_never_saturates() {
        let curve = capacity_vs_sectors(0.0, 20e6, 20.0, 36).unwrap();
        assert_eq!(optimal_sector_count(&curve, 0.05).unwrap(), 36);
    }

    #[test]
    fn optimal_count_wide_spread_saturates_early() {
        // Frozen from the quadrature-checked curve: sigma = 20 deg, CNR 20 dB.
        let curve = capacity_vs_sectors(20.0, 20e6, 20.0, 36).unwrap();
        let n = optimal_sector_count(&curve, 0.05).unwrap();
        assert_eq!(n, 5);
        assert!(n < 12);
    }

    #[test]
    fn optimal_count_threshold_near_one_returns_first() {
        // Wide spread makes the very first marginal gain clearly sublinear.
        let curve = capacity_vs_sectors(20.0, 20e6, 20.0, 36).unwrap();
        assert_eq!(optimal_sector_count(&curve, 0.999_999).unwrap(), 1);
    }

    #[test]
    fn sigma_pathloss_law() {
        assert_eq!(sigma_from_pathloss(0.7, 0.0, 140.0), 0.7);
        let mut last = 0.0;
        for pl in [100.0, 120.0, 140.0, 160.0] {
            let s = sigma_from_pathloss(0.05, 0.02, pl);
            assert!(s > last);
            last = s;
        }
    }

    #[test]
    fn capacity_guards() {
        assert!(capacity_vs_sectors(-1.0, 20e6, 20.0, 36).is_err());
        assert!(capacity_vs_sectors(2.0, 20e6, 20.0, 73).is_err());
        let curve = capacity_vs_sectors(2.0, 20e6, 20.0, 4).unwrap();
        assert!(optimal_sector_count(&curve, 0.0).is_err());
        assert!(optimal_sector_count(&curve, 1.0).is_err());
    }
}
