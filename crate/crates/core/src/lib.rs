//! Coverage and capacity planning engine for tall-tower, high-order
//! sectorized cellular sites.
//!
//! The crate models the full planning chain for rural wide-area deployments
//! built around very tall (200 m+) towers carrying high-gain antennas with
//! dense azimuth sectorization:
//!
//! - [`link`]: link budgets, thermal noise, MAPL and the beamwidth-gain
//!   relation;
//! - [`propagation`]: free-space and tuned empirical pathloss, knife-edge
//!   diffraction over terrain, optical line-of-sight, two-ray fade margins;
//! - [`antenna`]: gradient-index lens and flat-panel gain models plus
//!   idealized sector patterns;
//! - [`windload`]: effective projected area of antenna installations against
//!   a tower budget;
//! - [`capacity`]: Laplacian power-azimuth-spectrum sectorization capacity,
//!   CINR/CNR and capacity-vs-sector-count curves;
//! - [`terrain`]: ESRI ASCII grid rasters and path profile extraction;
//! - [`coverage`]: RSRP heatmaps, coverage areas and site comparison tables;
//! - [`calibration`]: least-squares tuning of the pathloss model from drive
//!   measurements and error statistics.
//!
//! All numeric operations are pure functions of their arguments and safe to
//! call concurrently; heatmap generation parallelizes internally with
//! deterministic output.

// Validation deliberately uses `!(x > 0.0)` forms: they reject NaN, which
// `x <= 0.0` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod calibration;
pub mod capacity;
pub mod config;
pub mod coverage;
pub mod error;
pub mod format;
pub mod link;
pub mod propagation;
pub mod terrain;
pub mod windload;

pub use error::{Error, Result};
