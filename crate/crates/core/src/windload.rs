//! Effective projected area (EPA) of antenna installations and checking
//! against a tower wind-load budget.
//!
//! Three-sphere lens clusters follow `EPA = 4.71 * D^2` with D the physical
//! diameter in metres (drag coefficient 0.5 for a sphere); panel arrays
//! follow `2.35 * Nv * Nh * lambda^2` when mounted horizontally (flat-plate
//! drag) and `1.2 * Nv * Nh * lambda^2` when mounted vertically (long
//! cylinder). Wake shielding and interference drag are not modelled.

use crate::antenna::{
    lens_diameter_for_gain, panel_elements_for_gain, LensModel, Orientation,
    PanelArray,
};
use crate::error::{Error, Result};
use crate::propagation::wavelength_m;

/// Square feet per square metre.
pub const FT2_PER_M2: f64 = 10.7639104;

/// Lens EPA coefficient (three spheres, drag coefficient 0.5).
pub const LENS_EPA_COEFF: f64 = 4.71;

/// Horizontal panel EPA coefficient (flat-plate drag).
pub const PANEL_EPA_COEFF_HORIZONTAL: f64 = 2.35;

/// Vertical panel EPA coefficient (two-dimensional cylinder drag, 1.2).
pub const PANEL_EPA_COEFF_VERTICAL: f64 = 1.2;

/// An effective projected area in both unit systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpaResult {
    pub area_m2: f64,
    pub area_ft2: f64,
}

impl EpaResult {
    fn from_m2(area_m2: f64) -> Self {
        EpaResult {
            area_m2,
            area_ft2: area_m2 * FT2_PER_M2,
        }
    }
}

/// Tower wind-load budget in square feet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpaBudget {
    pub limit_ft2: f64,
}

impl EpaBudget {
    pub fn new(limit_ft2: f64) -> Result<Self> {
        if !(limit_ft2 > 0.0) {
            return Err(Error::invalid("EPA budget must be positive"));
        }
        Ok(EpaBudget { limit_ft2 })
    }
}

impl Default for EpaBudget {
    /// The 90 sq-ft budget typical of the target tower class.
    fn default() -> Self {
        EpaBudget { limit_ft2: 90.0 }
    }
}

/// EPA of a three-sphere lens cluster of physical diameter `diameter_m`.
pub fn epa_lens(diameter_m: f64) -> Result<EpaResult> {
    if !(diameter_m > 0.0) {
        return Err(Error::invalid(format!(
            "lens diameter must be positive, got {diameter_m} m"
        )));
    }
    Ok(EpaResult::from_m2(LENS_EPA_COEFF * diameter_m * diameter_m))
}

/// EPA of a panel array at carrier `f_mhz`, orientation-dependent.
pub fn epa_panel(array: &PanelArray, f_mhz: f64) -> Result<EpaResult> {
    if !(f_mhz > 0.0) {
        return Err(Error::invalid(format!(
            "frequency must be positive, got {f_mhz} MHz"
        )));
    }
    let lambda = wavelength_m(f_mhz);
    let coeff = match array.orientation {
        Orientation::Horizontal => PANEL_EPA_COEFF_HORIZONTAL,
        Orientation::Vertical => PANEL_EPA_COEFF_VERTICAL,
    };
    let n = f64::from(array.n_v) * f64::from(array.n_h);
    Ok(EpaResult::from_m2(coeff * n * lambda * lambda))
}

/// One row of the gain-vs-EPA comparison across antenna technologies.
///
/// Lens columns are `None` where the requested gain falls outside the lens
/// gain-curve domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpaTableRow {
    pub gain_dbi: f64,
    pub n_v: u32,
    pub n_h: u32,
    pub epa_vertical_ft2: f64,
    pub epa_horizontal_ft2: f64,
    pub lens_d_lambda: Option<f64>,
    pub epa_lens_ft2: Option<f64>,
}

/// Builds the technology comparison: for each requested gain, a panel array
/// sized by [`panel_elements_for_gain`] (EPA in both orientations, the
/// horizontal mount transposing the element grid) and the interpolated lens
/// diameter with its EPA.
pub fn epa_comparison_table(
    gains_dbi: &[f64],
    f_mhz: f64,
    element_gain_dbi: f64,
    aspect: f64,
    lens: &LensModel,
) -> Result<Vec<EpaTableRow>> {
    let lambda = wavelength_m(f_mhz);
    gains_dbi
        .iter()
        .map(|&gain| {
            let (n_v, n_h) = panel_elements_for_gain(gain, element_gain_dbi, aspect)?;
            let vertical = PanelArray::new(n_v, n_h, element_gain_dbi, Orientation::Vertical)?;
            let horizontal =
                PanelArray::new(n_h, n_v, element_gain_dbi, Orientation::Horizontal)?;
            let lens_d = lens_diameter_for_gain(gain, lens).ok();
            let lens_epa = match lens_d {
                Some(d) => Some(epa_lens(d * lambda)?.area_ft2),
                None => None,
            };
            Ok(EpaTableRow {
                gain_dbi: gain,
                n_v,
                n_h,
                epa_vertical_ft2: epa_panel(&vertical, f_mhz)?.area_ft2,
                epa_horizontal_ft2: epa_panel(&horizontal, f_mhz)?.area_ft2,
                lens_d_lambda: lens_d,
                epa_lens_ft2: lens_epa,
            })
        })
        .collect()
}

/// Renders the comparison table as CSV in the reference column order.
pub fn epa_table_csv(rows: &[EpaTableRow]) -> String {
    let mut out = String::from(
        "gain_dbi,n_v_vertical,n_h_vertical,epa_vertical_ft2,\
         n_v_horizontal,n_h_horizontal,epa_horizontal_ft2,lens_d_lambda,epa_lens_ft2\n",
    );
    for r in rows {
        let lens_d = r.lens_d_lambda.map(crate::format::sig6).unwrap_or_default();
        let lens_a = r.epa_lens_ft2.map(crate::format::sig6).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            crate::format::sig6(r.gain_dbi),
            r.n_v,
            r.n_h,
            crate::format::sig6(r.epa_vertical_ft2),
            r.n_h,
            r.n_v,
            crate::format::sig6(r.epa_horizontal_ft2),
            lens_d,
            lens_a,
        ));
    }
    out
}

/// Checks an EPA against a budget. Returns pass/fail and the remaining
/// margin in square feet (negative when over budget).
pub fn check_epa(result: &EpaResult, budget: &EpaBudget) -> (bool, f64) {
    let margin = budget.limit_ft2 - result.area_ft2;
    (result.area_ft2 <= budget.limit_ft2, margin)
}
