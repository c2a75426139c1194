//! Toolpath planning for circular membranes and extruded polygons
//! (dogbones), extrusion calibration, G-code emission/parsing, and
//! bead-coverage verification.
//!
//! Plans are printer-independent: coordinates are centred on the region
//! centroid and shifted to the bed centre only at G-code emission.

mod coverage;
mod gcode;
mod plan;

pub use coverage::{verify_coverage, CoverageRegion, CoverageReport};
pub use gcode::{emit_gcode, parse_gcode, GCodeCommand, GCodeProgram};
pub use plan::{plan_concentric, plan_dogbone, plan_lines, plan_membrane};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inflation::Infill;
use crate::numeric;

/// Chordal tolerance for circle-to-polyline conversion, mm.
pub const DEFAULT_CHORDAL_TOL: f64 = 0.01;

/// Print parameters for a circular membrane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembranePrintSpec {
    pub diameter: f64,
    pub layers: u32,
    pub layer_height: f64,
    pub line_width: f64,
    pub infill: Infill,
    pub perimeter_loops: u32,
    pub extrusion_multiplier: f64,
    pub tool: u8,
    pub nozzle_temp_c: f64,
    pub print_speed: f64,
    pub travel_speed: f64,
}

impl MembranePrintSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.diameter > 0.0) {
            return Err(Error::invalid("diameter must be > 0"));
        }
        if !(self.layer_height > 0.0) {
            return Err(Error::invalid("layer_height must be > 0"));
        }
        if !(self.line_width > 0.0) {
            return Err(Error::invalid("line_width must be > 0"));
        }
        if !(self.extrusion_multiplier > 0.0) {
            return Err(Error::invalid("extrusion_multiplier must be > 0"));
        }
        if self.layers < 1 {
            return Err(Error::invalid("layers must be >= 1"));
        }
        Ok(())
    }
}

impl Default for MembranePrintSpec {
    fn default() -> Self {
        // 42 mm membrane, 0.4 mm nozzle, 0.2 mm layers.
        MembranePrintSpec {
            diameter: 42.0,
            layers: 3,
            layer_height: 0.2,
            line_width: 0.4,
            infill: Infill::Lines,
            perimeter_loops: 1,
            extrusion_multiplier: 1.0,
            tool: 0,
            nozzle_temp_c: 230.0,
            print_speed: 20.0,
            travel_speed: 80.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    Travel,
    Extrude,
}

/// One planned move. Coordinates in mm, feedrate in mm/s.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub start: [f64; 3],
    pub end: [f64; 3],
    /// Bead width for Extrude moves, 0 for travels.
    pub width: f64,
    pub feedrate: f64,
    pub tool: u8,
}

impl Move {
    pub fn length(&self) -> f64 {
        let dx = self.end[0] - self.start[0];
        let dy = self.end[1] - self.start[1];
        let dz = self.end[2] - self.start[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Ordered, chained extrusion/travel moves plus the layer parameters needed
/// to turn lengths into deposited volume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Toolpath {
    pub moves: Vec<Move>,
    pub layer_height: f64,
    pub extrusion_multiplier: f64,
}

impl Toolpath {
    pub fn new(layer_height: f64, extrusion_multiplier: f64) -> Self {
        Toolpath {
            moves: Vec::new(),
            layer_height,
            extrusion_multiplier,
        }
    }

    fn current_position(&self) -> Option<[f64; 3]> {
        self.moves.last().map(|m| m.end)
    }

    /// Append a travel to `to` if the head is not already there.
    pub fn travel_to(&mut self, to: [f64; 3], feedrate: f64, tool: u8) {
        match self.current_position() {
            Some(pos) if dist3(pos, to) <= 1e-9 => {}
            Some(pos) => self.moves.push(Move {
                kind: MoveKind::Travel,
                start: pos,
                end: to,
                width: 0.0,
                feedrate,
                tool,
            }),
            None => {
                // Path starts here; no predecessor to chain from.
                self.moves.push(Move {
                    kind: MoveKind::Travel,
                    start: to,
                    end: to,
                    width: 0.0,
                    feedrate,
                    tool,
                });
            }
        }
    }

    /// Append an extruded polyline. The head must already be at the first
    /// point (use [`Toolpath::travel_to`]).
    pub fn extrude_polyline(&mut self, points: &[[f64; 3]], width: f64, feedrate: f64, tool: u8) {
        for w in points.windows(2) {
            self.moves.push(Move {
                kind: MoveKind::Extrude,
                start: w[0],
                end: w[1],
                width,
                feedrate,
                tool,
            });
        }
        if points.len() == 1 {
            // Stationary "dot" deposit (used to seal the centre of
            // concentric layers).
            self.moves.push(Move {
                kind: MoveKind::Extrude,
                start: points[0],
                end: points[0],
                width,
                feedrate,
                tool,
            });
        }
    }

    /// Check the chaining invariant and per-move validity.
    pub fn validate(&self) -> Result<()> {
        for (i, m) in self.moves.iter().enumerate() {
            if m.kind == MoveKind::Extrude && !(m.width > 0.0) {
                return Err(Error::invalid(format!("extrude move {i} has width <= 0")));
            }
            if !(m.feedrate > 0.0) {
                return Err(Error::invalid(format!("move {i} has feedrate <= 0")));
            }
        }
        for (i, w) in self.moves.windows(2).enumerate() {
            if dist3(w[0].end, w[1].start) > 1e-9 {
                return Err(Error::invalid(format!(
                    "moves {i} and {} are not chained",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Total deposited volume in mm³ under the given calibration table.
    pub fn extruded_volume(&self, calibration: &CalibrationTable) -> Result<f64> {
        let mut total = 0.0;
        for m in &self.moves {
            if m.kind == MoveKind::Extrude {
                total += extrusion_amount(
                    m.length(),
                    m.width,
                    self.layer_height,
                    self.extrusion_multiplier,
                    calibration,
                    m.feedrate,
                )?;
            }
        }
        Ok(total)
    }

    /// Distinct extrude z-heights, ascending (one per layer).
    pub fn layer_heights(&self) -> Vec<f64> {
        let mut zs: Vec<f64> = Vec::new();
        for m in &self.moves {
            if m.kind == MoveKind::Extrude && !zs.iter().any(|&z| (z - m.end[2]).abs() < 1e-9) {
                zs.push(m.end[2]);
            }
        }
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        zs
    }
}

pub(crate) fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Empirical feedrate-to-flow map compensating the pellet screw's nonlinear
/// output. Contents are machine-specific and user-supplied; the identity
/// table is the documented default.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationTable {
    /// (feedrate mm/s, flow multiplier), feedrates strictly increasing.
    pub entries: Vec<(f64, f64)>,
}

impl CalibrationTable {
    pub fn identity() -> Self {
        CalibrationTable {
            entries: vec![(1.0, 1.0), (1000.0, 1.0)],
        }
    }

    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        let t = CalibrationTable { entries };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Config("calibration table is empty".into()));
        }
        for w in self.entries.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Config("calibration feedrates must be strictly increasing".into()));
            }
        }
        if self.entries.iter().any(|&(_, m)| !(m > 0.0)) {
            return Err(Error::Config("calibration multipliers must be > 0".into()));
        }
        Ok(())
    }

    /// Piecewise-linear flow multiplier, clamped at the table ends.
    pub fn flow_multiplier(&self, feedrate: f64) -> f64 {
        numeric::interp_clamped(&self.entries, feedrate)
    }
}

/// Deposited volume (mm³) for one move: geometric bead volume times the
/// extrusion multiplier and the calibrated flow factor at this feedrate.
pub fn extrusion_amount(
    move_length: f64,
    width: f64,
    layer_height: f64,
    multiplier: f64,
    calibration: &CalibrationTable,
    feedrate: f64,
) -> Result<f64> {
    calibration.validate()?;
    if move_length < 0.0 || !(width > 0.0) || !(layer_height > 0.0) || !(multiplier > 0.0) {
        return Err(Error::invalid("extrusion_amount arguments must be positive"));
    }
    Ok(move_length * width * layer_height * multiplier * calibration.flow_multiplier(feedrate))
}

/// Printer profile applied at G-code emission.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrinterProfile {
    pub bed_center_x_mm: f64,
    pub bed_center_y_mm: f64,
    #[serde(default)]
    pub steps_note: String,
    pub tools: Vec<ToolConfig>,
    #[serde(default)]
    pub prime_e_mm3: f64,
    #[serde(default)]
    pub retract_e_mm3: f64,
    #[serde(default = "default_chordal_tol")]
    pub chordal_tol_mm: f64,
}

fn default_chordal_tol() -> f64 {
    DEFAULT_CHORDAL_TOL
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolConfig {
    pub index: u8,
    pub nozzle_temp_c: f64,
}

impl Default for PrinterProfile {
    fn default() -> Self {
        PrinterProfile {
            bed_center_x_mm: 150.0,
            bed_center_y_mm: 150.0,
            steps_note: String::new(),
            tools: vec![ToolConfig {
                index: 0,
                nozzle_temp_c: 230.0,
            }],
            prime_e_mm3: 0.0,
            retract_e_mm3: 0.0,
            chordal_tol_mm: DEFAULT_CHORDAL_TOL,
        }
    }
}

/// Approximate a circle by a closed polyline within the chordal tolerance.
/// Starts and ends at angle 0 (positive x axis).
pub fn circle_polyline(cx: f64, cy: f64, r: f64, z: f64, chordal_tol: f64) -> Vec<[f64; 3]> {
    if r <= 0.0 {
        return vec![[cx, cy, z]];
    }
    let phi = (1.0 - (chordal_tol / r).min(1.0)).acos().max(1e-3);
    let n = ((std::f64::consts::PI / phi).ceil() as usize).max(8);
    let mut pts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        pts.push([cx + r * a.cos(), cy + r * a.sin(), z]);
    }
    // Close exactly.
    let first = pts[0];
    *pts.last_mut().unwrap() = first;
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn extrusion_amount_examples() {
        let id = CalibrationTable::identity();
        assert_relative_eq!(
            extrusion_amount(10.0, 0.4, 0.2, 1.0, &id, 20.0).unwrap(),
            0.8,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            extrusion_amount(10.0, 0.4, 0.2, 1.5, &id, 20.0).unwrap(),
            1.2,
            epsilon = 1e-12
        );
        let t = CalibrationTable::new(vec![(10.0, 0.9), (30.0, 1.1)]).unwrap();
        assert_relative_eq!(
            extrusion_amount(10.0, 0.4, 0.2, 1.0, &t, 20.0).unwrap(),
            0.8,
            epsilon = 1e-12
        );
        // Clamped at table ends.
        assert_relative_eq!(t.flow_multiplier(5.0), 0.9);
        assert_relative_eq!(t.flow_multiplier(60.0), 1.1);
    }

    #[test]
    fn empty_calibration_is_config_error() {
        let t = CalibrationTable { entries: vec![] };
        assert!(matches!(
            extrusion_amount(10.0, 0.4, 0.2, 1.0, &t, 20.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn circle_polyline_within_tolerance() {
        let pts = circle_polyline(0.0, 0.0, 20.0, 0.0, 0.01);
        assert_eq!(pts[0], *pts.last().unwrap());
        for w in pts.windows(2) {
            let mx = 0.5 * (w[0][0] + w[1][0]);
            let my = 0.5 * (w[0][1] + w[1][1]);
            let sagitta = 20.0 - (mx * mx + my * my).sqrt();
            assert!(sagitta <= 0.0100001, "sagitta {sagitta}");
        }
    }
}
