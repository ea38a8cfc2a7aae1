//! Run configuration: a TOML document with sections mirroring the module
//! parameter sets. Unknown keys are rejected and every value is validated
//! against the owning type before any computation runs.

use crate::antenna::{make_uniform_plan, PatternKind, SectorPlan};
use crate::coverage::Site;
use crate::error::{Error, Result};
use crate::propagation::SpmParams;
use crate::windload::EpaBudget;
use serde::Deserialize;

/// Top-level configuration document.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spm: Option<SpmConfig>,
    pub site: Option<SiteConfig>,
    pub plan: Option<PlanConfig>,
    pub capacity: Option<CapacityConfig>,
    pub budget: Option<BudgetConfig>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    /// Builds the full site description needed for heatmap generation.
    pub fn build_site(&self) -> Result<Site> {
        let site = self
            .site
            .as_ref()
            .ok_or_else(|| Error::invalid("config: missing [site] section"))?;
        let plan = self
            .plan
            .as_ref()
            .ok_or_else(|| Error::invalid("config: missing [plan] section"))?;
        let spm = self
            .spm
            .as_ref()
            .ok_or_else(|| Error::invalid("config: missing [spm] section"))?;
        Ok(Site {
            x: site.x_m,
            y: site.y_m,
            tower_height_m: site.tower_height_m,
            plan: plan.build()?,
            tx_power_dbm: site.tx_power_dbm,
            f_mhz: site.f_mhz,
            rx_height_m: site.rx_height_m,
            spm: spm.to_params()?,
        })
    }
}

/// Pathloss coefficients: either a tuned band preset (`band_mhz` = 728 or
/// 2500) optionally overridden per coefficient, or the full explicit set.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpmConfig {
    pub band_mhz: Option<f64>,
    pub k1_los: Option<f64>,
    pub k2_los: Option<f64>,
    pub k1_nlos: Option<f64>,
    pub k2_nlos: Option<f64>,
    pub k3: Option<f64>,
    pub k4: Option<f64>,
    pub k5: Option<f64>,
    pub k6: Option<f64>,
    pub k7: Option<f64>,
    pub k_clutter: Option<f64>,
    pub f_clutter: Option<f64>,
    pub k_hill_los: Option<f64>,
}

impl SpmConfig {
    pub fn to_params(&self) -> Result<SpmParams> {
        let mut params = match self.band_mhz {
            Some(b) => {
                if b == 728.0 {
                    SpmParams::tuned_728_mhz()
                } else if b == 2500.0 {
                    SpmParams::tuned_2500_mhz()
                } else {
                    return Err(Error::invalid(format!(
                        "config: no tuned preset for band {b} MHz (have 728 and 2500)"
                    )));
                }
            }
            None => {
                let missing: Vec<&str> = [
                    ("k1_los", self.k1_los),
                    ("k2_los", self.k2_los),
                    ("k1_nlos", self.k1_nlos),
                    ("k2_nlos", self.k2_nlos),
                    ("k3", self.k3),
                    ("k4", self.k4),
                    ("k5", self.k5),
                    ("k6", self.k6),
                    ("k7", self.k7),
                    ("k_clutter", self.k_clutter),
                    ("f_clutter", self.f_clutter),
                    ("k_hill_los", self.k_hill_los),
                ]
                .iter()
                .filter(|(_, v)| v.is_none())
                .map(|(n, _)| *n)
                .collect();
                if !missing.is_empty() {
                    return Err(Error::invalid(format!(
                        "config: [spm] without band_mhz must list every coefficient; missing {}",
                        missing.join(", ")
                    )));
                }
                SpmParams {
                    k1_los: 0.0,
                    k2_los: 1.0,
                    k1_nlos: 0.0,
                    k2_nlos: 1.0,
                    k3: 0.0,
                    k4: 0.0,
                    k5: 0.0,
                    k6: 0.0,
                    k7: 0.0,
                    k_clutter: 0.0,
                    f_clutter: 0.0,
                    k_hill_los: 0.0,
                }
            }
        };
        if let Some(v) = self.k1_los {
            params.k1_los = v;
        }
        if let Some(v) = self.k2_los {
            params.k2_los = v;
        }
        if let Some(v) = self.k1_nlos {
            params.k1_nlos = v;
        }
        if let Some(v) = self.k2_nlos {
            params.k2_nlos = v;
        }
        if let Some(v) = self.k3 {
            params.k3 = v;
        }
        if let Some(v) = self.k4 {
            params.k4 = v;
        }
        if let Some(v) = self.k5 {
            params.k5 = v;
        }
        if let Some(v) = self.k6 {
            params.k6 = v;
        }
        if let Some(v) = self.k7 {
            params.k7 = v;
        }
        if let Some(v) = self.k_clutter {
            params.k_clutter = v;
        }
        if let Some(v) = self.f_clutter {
            params.f_clutter = v;
        }
        if let Some(v) = self.k_hill_los {
            params.k_hill_los = v;
        }
        params.validate()?;
        Ok(params)
    }
}

/// Site geometry and radio basis.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub x_m: f64,
    pub y_m: f64,
    pub tower_height_m: f64,
    pub tx_power_dbm: f64,
    pub f_mhz: f64,
    pub rx_height_m: f64,
}

/// Uniform sector plan.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub n_sectors: usize,
    pub peak_gain_dbi: f64,
    /// "rectangular" (default) or "gaussian".
    pub kind: Option<String>,
}

impl PlanConfig {
    pub fn build(&self) -> Result<SectorPlan> {
        let kind = match self.kind.as_deref() {
            None | Some("rectangular") => PatternKind::Rectangular,
            Some("gaussian") => PatternKind::Gaussian,
            Some(other) => {
                return Err(Error::invalid(format!(
                    "config: unknown pattern kind {other:?} (rectangular or gaussian)"
                )))
            }
        };
        make_uniform_plan(self.n_sectors, self.peak_gain_dbi, kind)
    }
}

/// Capacity sweep parameters.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityConfig {
    pub sigma_deg: f64,
    pub bandwidth_hz: f64,
    pub total_cnr_db: f64,
    pub n_max: usize,
}

/// Tower wind-load budget.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub limit_ft2: f64,
}

impl BudgetConfig {
    pub fn build(&self) -> Result<EpaBudget> {
        EpaBudget::new(self.limit_ft2)
    }
}
