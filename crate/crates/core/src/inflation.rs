//! Quasi-static inflation of a clamped circular membrane into a spherical
//! cap, ballooning (limit-point) search, and a lumped source-coupled
//! transient simulation.
//!
//! The kinematic ansatz is a uniform-stretch spherical cap with a single
//! degree of freedom, the cap half-angle `θ`. The membrane stretch is the
//! meridian arc over the clamped diameter, `λ = θ / sin θ`, and the wall
//! thins as `t = t0 / λ²` (incompressibility).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{equibiaxial_cauchy_stress, HyperelasticModel};
use crate::numeric;

pub const THETA_MAX: f64 = std::f64::consts::PI - 1e-6;

/// Infill pattern of a printed membrane. Metadata for the solver: the
/// one-DOF cap model cannot attribute infill effects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infill {
    Lines,
    Concentric,
}

/// Geometry and material of a clamped circular membrane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembraneSpec {
    /// Clamped aperture radius, mm.
    pub radius_a: f64,
    /// Undeformed thickness, mm.
    pub thickness_t0: f64,
    pub layers: u32,
    pub infill: Infill,
    pub material: HyperelasticModel,
}

impl MembraneSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius_a > 0.0) {
            return Err(Error::invalid("radius_a must be > 0"));
        }
        if !(self.thickness_t0 > 0.0) {
            return Err(Error::invalid("thickness_t0 must be > 0"));
        }
        if self.layers < 1 {
            return Err(Error::invalid("layers must be >= 1"));
        }
        self.material.validate()
    }
}

/// One quasi-static state along the inflation path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InflationState {
    /// Cap half-angle, rad.
    pub theta: f64,
    pub stretch: f64,
    pub pressure_kpa: f64,
    pub cap_radius_r: f64,
    pub apex_height: f64,
    pub current_thickness: f64,
    pub enclosed_volume: f64,
}

/// Cap geometry at half-angle `θ` for aperture radius `a` (no material).
#[derive(Debug, Clone, Copy)]
pub struct CapGeometry {
    pub stretch: f64,
    pub cap_radius_r: f64,
    pub apex_height: f64,
    pub enclosed_volume: f64,
}

/// Stretch `λ = θ / sin θ`, with a series fallback below `θ = 1e-4`.
pub fn cap_stretch(theta: f64) -> f64 {
    if theta < 1e-4 {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        theta / theta.sin()
    }
}

/// Spherical-cap kinematics at half-angle `θ`.
pub fn cap_kinematics(theta: f64, radius_a: f64) -> Result<CapGeometry> {
    if !(theta > 0.0 && theta <= THETA_MAX) {
        return Err(Error::domain(format!(
            "theta {theta} outside (0, pi - 1e-6]"
        )));
    }
    if !(radius_a > 0.0) {
        return Err(Error::invalid("radius_a must be > 0"));
    }
    let stretch = cap_stretch(theta);
    let cap_radius_r = radius_a / theta.sin();
    // h = R(1 - cos θ) written as a·tan(θ/2) for stability at small θ.
    let apex_height = radius_a * (theta / 2.0).tan();
    let enclosed_volume =
        std::f64::consts::PI * apex_height * apex_height * (3.0 * cap_radius_r - apex_height) / 3.0;
    Ok(CapGeometry {
        stretch,
        cap_radius_r,
        apex_height,
        enclosed_volume,
    })
}

/// Quasi-static cap pressure, kPa: `P = 2 t(λ) σ_biax(λ) sin θ / a` with
/// `t(λ) = t0/λ²`, converted MPa·mm/mm → kPa.
pub fn cap_pressure(spec: &MembraneSpec, theta: f64) -> Result<f64> {
    let geom = cap_kinematics(theta, spec.radius_a)?;
    let l = geom.stretch;
    let sigma = equibiaxial_cauchy_stress(&spec.material, l)?;
    let t = spec.thickness_t0 / (l * l);
    Ok(2.0 * t * sigma * theta.sin() / spec.radius_a * 1000.0)
}

/// Full state at half-angle `θ`.
pub fn cap_state(spec: &MembraneSpec, theta: f64) -> Result<InflationState> {
    let geom = cap_kinematics(theta, spec.radius_a)?;
    let pressure = cap_pressure(spec, theta)?;
    Ok(InflationState {
        theta,
        stretch: geom.stretch,
        pressure_kpa: pressure,
        cap_radius_r: geom.cap_radius_r,
        apex_height: geom.apex_height,
        current_thickness: spec.thickness_t0 / (geom.stretch * geom.stretch),
        enclosed_volume: geom.enclosed_volume,
    })
}

/// Quasi-static pressure-stretch path sampled at `n_points` half-angles from
/// ~0 up to `theta_max`.
pub fn pressure_stretch_curve(
    spec: &MembraneSpec,
    theta_max: f64,
    n_points: usize,
) -> Result<Vec<InflationState>> {
    spec.validate()?;
    if n_points < 2 {
        return Err(Error::invalid("n_points must be >= 2"));
    }
    if !(theta_max > 0.0 && theta_max <= THETA_MAX) {
        return Err(Error::domain("theta_max outside (0, pi - 1e-6]"));
    }
    let mut states = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let theta = (theta_max * i as f64 / (n_points - 1) as f64).max(1e-9);
        match cap_state(spec, theta) {
            Ok(s) => states.push(s),
            // A Gent membrane locks before flat-disc geometry runs out;
            // the sweep simply ends at the last evaluable state.
            Err(Error::GentLocking { .. }) if states.len() >= 2 => break,
            Err(e) => return Err(e),
        }
    }
    Ok(states)
}

/// Limit-point (ballooning) search result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallooningResult {
    pub p_balloon_kpa: f64,
    pub stretch_at_limit: f64,
    pub theta_at_limit: f64,
    pub found: bool,
}

const SCAN_POINTS: usize = 2048;

/// First interior local maximum of `f` over a dense scan of `(lo, hi)`,
/// refined by golden section. Evaluation errors (e.g. Gent locking)
/// truncate the scan range.
fn first_interior_max<F>(f: F, lo: f64, hi: f64) -> Option<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut xs = Vec::with_capacity(SCAN_POINTS);
    let mut ys = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        let x = lo + (hi - lo) * (i as f64 + 0.5) / SCAN_POINTS as f64;
        match f(x) {
            Ok(y) if y.is_finite() => {
                xs.push(x);
                ys.push(y);
            }
            _ => break,
        }
    }
    for k in 1..ys.len().saturating_sub(1) {
        if ys[k] > ys[k - 1] && ys[k] > ys[k + 1] {
            let x = numeric::golden_section_max(
                |x| f(x).unwrap_or(f64::NEG_INFINITY),
                xs[k - 1],
                xs[k + 1],
                1e-9,
            );
            let y = f(x).ok()?;
            return Some((x, y));
        }
    }
    None
}

/// Locate the ballooning limit point of the cap model: the first interior
/// local maximum of pressure over `θ ∈ (0, π - 1e-6)`. `found = false` when
/// the pressure is monotone over the evaluable range.
pub fn find_ballooning(spec: &MembraneSpec) -> Result<BallooningResult> {
    spec.validate()?;
    match first_interior_max(|theta| cap_pressure(spec, theta), 0.0, THETA_MAX) {
        Some((theta, p)) => Ok(BallooningResult {
            p_balloon_kpa: p,
            stretch_at_limit: cap_stretch(theta),
            theta_at_limit: theta,
            found: true,
        }),
        None => Ok(BallooningResult {
            p_balloon_kpa: f64::NAN,
            stretch_at_limit: f64::NAN,
            theta_at_limit: f64::NAN,
            found: false,
        }),
    }
}

/// Ideal thin-walled spherical balloon pressure, kPa:
/// `P = 2 t σ_biax(λ) / r` with `t = t0/λ²`, `r = r0 λ`, i.e.
/// `P = 2 (t0/r0) σ_biax(λ) / λ³`. Independent analytic reference for the
/// limit-point logic (Neo-Hookean reduces to `P ∝ λ⁻¹ − λ⁻⁷` with a
/// stationary point at `λ = 7^(1/6)`).
pub fn sphere_pressure(model: &HyperelasticModel, t0: f64, r0: f64, stretch: f64) -> Result<f64> {
    if !(t0 > 0.0 && r0 > 0.0) {
        return Err(Error::invalid("t0 and r0 must be > 0"));
    }
    let sigma = equibiaxial_cauchy_stress(model, stretch)?;
    Ok(2.0 * (t0 / r0) * sigma / stretch.powi(3) * 1000.0)
}

/// Limit point of the spherical-balloon reference over `λ ∈ (1, stretch_max)`.
pub fn sphere_ballooning(
    model: &HyperelasticModel,
    t0: f64,
    r0: f64,
    stretch_max: f64,
) -> Result<BallooningResult> {
    model.validate()?;
    match first_interior_max(|l| sphere_pressure(model, t0, r0, l), 1.0, stretch_max) {
        Some((l, p)) => Ok(BallooningResult {
            p_balloon_kpa: p,
            stretch_at_limit: l,
            theta_at_limit: f64::NAN,
            found: true,
        }),
        None => Ok(BallooningResult {
            p_balloon_kpa: f64::NAN,
            stretch_at_limit: f64::NAN,
            theta_at_limit: f64::NAN,
            found: false,
        }),
    }
}

/// Output of [`simulate_source_coupled`].
#[derive(Debug, Clone)]
pub struct SourceCoupledTrace {
    /// (time s, membrane pressure kPa) at every output step.
    pub samples: Vec<(f64, f64)>,
    pub states: Vec<InflationState>,
    /// True when the volume ran past the cap model's evaluable range.
    pub rupture_range_reached: bool,
}

/// Invert `enclosed_volume(θ)` by bisection (the volume is strictly
/// increasing in `θ`).
fn theta_from_volume(spec: &MembraneSpec, volume: f64) -> Result<f64> {
    let v_max = cap_kinematics(THETA_MAX, spec.radius_a)?.enclosed_volume;
    if volume >= v_max {
        return Err(Error::domain("volume beyond cap range"));
    }
    if volume <= 0.0 {
        return Ok(1e-9);
    }
    Ok(numeric::bisect(
        |theta| cap_kinematics(theta.max(1e-9), spec.radius_a).map(|g| g.enclosed_volume).unwrap_or(f64::MAX) - volume,
        1e-9,
        THETA_MAX,
        1e-13,
    ))
}

/// Inflate the membrane from a pressure source through a linear flow
/// restriction: `dV/dt = C (P_supply - P_mem(V))`, forward Euler with
/// sub-stepping so that no step changes the volume by more than 1%.
pub fn simulate_source_coupled(
    spec: &MembraneSpec,
    supply_pressure_kpa: f64,
    flow_coefficient: f64,
    duration_s: f64,
    dt_s: f64,
) -> Result<SourceCoupledTrace> {
    spec.validate()?;
    if !(supply_pressure_kpa >= 0.0) {
        return Err(Error::invalid("supply pressure must be >= 0"));
    }
    if !(dt_s > 0.0) || !(duration_s >= dt_s) {
        return Err(Error::invalid("need dt > 0 and duration >= dt"));
    }

    // Volume scale used to bound the relative step size near V = 0.
    let v_ref = cap_kinematics(0.05, spec.radius_a)?.enclosed_volume;
    let n_out = (duration_s / dt_s).round() as usize;
    let mut volume = 0.0_f64;
    let mut samples = Vec::with_capacity(n_out + 1);
    let mut states = Vec::with_capacity(n_out + 1);
    let mut rupture = false;

    let record = |samples: &mut Vec<(f64, f64)>, states: &mut Vec<InflationState>, t: f64, spec: &MembraneSpec, volume: f64| -> Result<f64> {
        let theta = theta_from_volume(spec, volume)?;
        let state = cap_state(spec, theta)?;
        let p = state.pressure_kpa;
        samples.push((t, p));
        states.push(state);
        Ok(p)
    };

    record(&mut samples, &mut states, 0.0, spec, volume)?;

    'outer: for step in 0..n_out {
        let t0 = step as f64 * dt_s;
        let mut remaining = dt_s;
        while remaining > 0.0 {
            let theta = match theta_from_volume(spec, volume) {
                Ok(th) => th,
                Err(_) => {
                    rupture = true;
                    break 'outer;
                }
            };
            let p_mem = match cap_pressure(spec, theta) {
                Ok(p) => p,
                Err(_) => {
                    rupture = true;
                    break 'outer;
                }
            };
            let dvdt = flow_coefficient * (supply_pressure_kpa - p_mem);
            let mut h = remaining;
            let v_lim = 0.01 * volume.max(v_ref);
            if dvdt.abs() * h > v_lim {
                h = v_lim / dvdt.abs();
            }
            volume = (volume + dvdt * h).max(0.0);
            remaining -= h;
        }
        let t = t0 + dt_s;
        if record(&mut samples, &mut states, t, spec, volume).is_err() {
            rupture = true;
            break;
        }
    }

    Ok(SourceCoupledTrace {
        samples,
        states,
        rupture_range_reached: rupture,
    })
}
