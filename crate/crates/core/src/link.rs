//! Link-budget arithmetic: received power, thermal noise, SNR, maximum
//! allowable pathloss (MAPL), and the beamwidth-gain relation.
//!
//! All powers are referenced to 1 mW (dBm) and all dB arithmetic uses
//! base-10 logarithms.

use crate::error::{Error, Result};

/// Boltzmann constant in J/K (2019 SI exact value).
pub const BOLTZMANN_J_PER_K: f64 = 1.380649e-23;

/// Default receiver reference temperature in kelvin.
pub const REFERENCE_TEMPERATURE_K: f64 = 290.0;

/// Default beamwidth-gain constant X*eta in deg^2.
///
/// Anchored so that a 28 dBi circularly symmetric antenna has a 6 degree
/// 3-dB beamwidth. The constant depends on the antenna type; callers with a
/// different aperture family should supply their own.
pub const DEFAULT_X_ETA_DEG2: f64 = 22_716.0;

/// Inputs to a one-way link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetInput {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub pathloss_db: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub temperature_k: f64,
}

impl LinkBudgetInput {
    /// Builds an input with the default 290 K noise temperature.
    pub fn new(
        tx_power_dbm: f64,
        tx_gain_dbi: f64,
        rx_gain_dbi: f64,
        pathloss_db: f64,
        bandwidth_hz: f64,
        noise_figure_db: f64,
    ) -> Self {
        LinkBudgetInput {
            tx_power_dbm,
            tx_gain_dbi,
            rx_gain_dbi,
            pathloss_db,
            bandwidth_hz,
            noise_figure_db,
            temperature_k: REFERENCE_TEMPERATURE_K,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::invalid(format!(
                "bandwidth must be positive, got {} Hz",
                self.bandwidth_hz
            )));
        }
        if !(self.temperature_k > 0.0) {
            return Err(Error::invalid(format!(
                "temperature must be positive, got {} K",
                self.temperature_k
            )));
        }
        if !(self.noise_figure_db >= 0.0) {
            return Err(Error::invalid(format!(
                "noise figure must be non-negative, got {} dB",
                self.noise_figure_db
            )));
        }
        Ok(())
    }
}

/// Outputs of a link-budget evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetResult {
    pub rx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub snr_db: f64,
}

/// Beamwidth-gain relation BW = sqrt(X*eta / G) with G in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamwidthModel {
    x_eta_deg2: f64,
}

impl BeamwidthModel {
    pub fn new(x_eta_deg2: f64) -> Result<Self> {
        if !(x_eta_deg2 > 0.0) {
            return Err(Error::invalid(format!(
                "X*eta must be positive, got {x_eta_deg2}"
            )));
        }
        Ok(BeamwidthModel { x_eta_deg2 })
    }

    pub fn x_eta_deg2(&self) -> f64 {
        self.x_eta_deg2
    }
}

impl Default for BeamwidthModel {
    fn default() -> Self {
        BeamwidthModel {
            x_eta_deg2: DEFAULT_X_ETA_DEG2,
        }
    }
}

/// Thermal noise power 10*log10(k*T*B / 1 mW) in dBm.
///
/// At 290 K this is the familiar -174 dBm/Hz + 10*log10(B).
pub fn noise_power_dbm(bandwidth_hz: f64, temperature_k: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::invalid(format!(
            "bandwidth must be positive, got {bandwidth_hz} Hz"
        )));
    }
    if !(temperature_k > 0.0) {
        return Err(Error::invalid(format!(
            "temperature must be positive, got {temperature_k} K"
        )));
    }
    let watts = BOLTZMANN_J_PER_K * temperature_k * bandwidth_hz;
    Ok(10.0 * (watts * 1e3).log10())
}

/// Evaluates the link budget: received power, noise power and SNR.
pub fn evaluate_link_budget(input: &LinkBudgetInput) -> Result<LinkBudgetResult> {
    input.validate()?;
    let rx_power_dbm =
        input.tx_power_dbm + input.tx_gain_dbi - input.pathloss_db + input.rx_gain_dbi;
    let noise_power_dbm = noise_power_dbm(input.bandwidth_hz, input.temperature_k)?;
    let snr_db = rx_power_dbm - noise_power_dbm - input.noise_figure_db;
    Ok(LinkBudgetResult {
        rx_power_dbm,
        noise_power_dbm,
        snr_db,
    })
}

/// Maximum allowable pathloss: the pathloss at which the link meets
/// `snr_min_db` exactly. Algebraic inversion of [`evaluate_link_budget`];
/// the `pathloss_db` field of the input is ignored.
pub fn mapl_db(input: &LinkBudgetInput, snr_min_db: f64) -> Result<f64> {
    input.validate()?;
    let noise = noise_power_dbm(input.bandwidth_hz, input.temperature_k)?;
    Ok(input.tx_power_dbm + input.tx_gain_dbi + input.rx_gain_dbi
        - noise
        - input.noise_figure_db
        - snr_min_db)
}

/// 3-dB beamwidth in degrees for a given peak gain in dBi.
///
/// Strictly decreasing in gain: +6.02 dB of gain halves the beamwidth.
pub fn beamwidth_from_gain(gain_dbi: f64, model: &BeamwidthModel) -> f64 {
    let gain_linear = 10f64.powf(gain_dbi / 10.0);
    (model.x_eta_deg2 / gain_linear).sqrt()
}
