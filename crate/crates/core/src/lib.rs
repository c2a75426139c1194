//! Toolkit for 3D-printed soft thermoplastic-elastomer membranes.
//!
//! Four subsystems:
//! - [`material`]: hyperelastic constitutive models and fitting them to
//!   uniaxial engineering stress-strain data,
//! - [`inflation`]: quasi-static inflation of a clamped circular membrane
//!   (spherical-cap kinematics), ballooning limit-point search, and a lumped
//!   source-coupled transient simulation,
//! - [`toolpath`]: membrane/dogbone toolpath planning, extrusion calibration,
//!   G-code emission/parsing, and bead-coverage verification,
//! - [`analysis`]: derived quantities from recorded experiment logs
//!   (inflation phases, stretch from tracked boundaries, cyclic statistics,
//!   curvature, plateau/peak forces, sensor hysteresis).
//!
//! Units are fixed across the crate: stress MPa, pressure kPa, length mm,
//! force N, time s. Angles are radians internally and degrees in reports.

pub mod analysis;
pub mod error;
pub mod formats;
pub mod inflation;
pub mod material;
pub mod numeric;
pub mod toolpath;

pub use error::{Error, Result};
pub use inflation::{BallooningResult, InflationState, Infill, MembraneSpec};
pub use material::{FitResult, HyperelasticModel, ModelFamily, StressStrainCurve};
pub use toolpath::{CalibrationTable, GCodeProgram, MembranePrintSpec, PrinterProfile, Toolpath};
