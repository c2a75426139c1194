//! Python bindings for the membrane-kit core library.
//!
//! The module exposes the main operations: hyperelastic stress evaluation and
//! fitting, the spherical-cap inflation solver, toolpath planning with G-code
//! emission, and the experiment-analysis routines.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use membrane_kit::analysis::{self, MembraneProfile, PhaseDetection, PressureTrace};
use membrane_kit::inflation::{self, Infill, MembraneSpec};
use membrane_kit::material::{self, HyperelasticModel, ModelFamily, StressStrainCurve};
use membrane_kit::toolpath::{self, CalibrationTable, MembranePrintSpec, PrinterProfile};

fn err(e: membrane_kit::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Incompressible hyperelastic material, stress unit MPa.
#[pyclass(from_py_object)]
#[derive(Clone)]
pub struct Material {
    inner: HyperelasticModel,
}

#[pymethods]
impl Material {
    #[staticmethod]
    fn neo_hookean(mu: f64) -> PyResult<Self> {
        Self::wrap(HyperelasticModel::NeoHookean { mu })
    }

    #[staticmethod]
    fn mooney_rivlin(c10: f64, c01: f64) -> PyResult<Self> {
        Self::wrap(HyperelasticModel::MooneyRivlin { c10, c01 })
    }

    #[staticmethod]
    fn ogden(terms: Vec<(f64, f64)>) -> PyResult<Self> {
        Self::wrap(HyperelasticModel::Ogden { terms })
    }

    #[staticmethod]
    fn gent(mu: f64, jm: f64) -> PyResult<Self> {
        Self::wrap(HyperelasticModel::Gent { mu, jm })
    }

    /// Uniaxial engineering stress at the given stretch, MPa.
    fn uniaxial_stress(&self, stretch: f64) -> PyResult<f64> {
        material::uniaxial_eng_stress(&self.inner, stretch).map_err(err)
    }

    /// Equibiaxial Cauchy stress at the given stretch, MPa.
    fn equibiaxial_stress(&self, stretch: f64) -> PyResult<f64> {
        material::equibiaxial_cauchy_stress(&self.inner, stretch).map_err(err)
    }

    /// Shear modulus in the undeformed state, MPa.
    fn ground_shear_modulus(&self) -> f64 {
        self.inner.ground_shear_modulus()
    }

    /// JSON form of the model (family tag plus parameters).
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Material({:?})", self.inner)
    }
}

impl Material {
    fn wrap(inner: HyperelasticModel) -> PyResult<Self> {
        inner.validate().map_err(err)?;
        Ok(Material { inner })
    }
}

/// Nonlinear least-squares fit outcome.
#[pyclass]
pub struct FitOutcome {
    #[pyo3(get)]
    pub material: Material,
    #[pyo3(get)]
    pub rms_residual: f64,
    #[pyo3(get)]
    pub max_residual: f64,
    #[pyo3(get)]
    pub iterations: usize,
    #[pyo3(get)]
    pub converged: bool,
}

/// Fit a hyperelastic model to (strain, stress MPa) sample points.
///
/// `family` is one of "neohookean", "mooney-rivlin", "ogden1".."ogden3",
/// "gent".
#[pyfunction]
fn fit_model(points: Vec<(f64, f64)>, family: &str) -> PyResult<FitOutcome> {
    let curve = StressStrainCurve::new(points, "python", "python").map_err(err)?;
    let family: ModelFamily = ModelFamily::parse(family).map_err(err)?;
    let fit = material::fit_model(&curve, family, None).map_err(err)?;
    Ok(FitOutcome {
        material: Material { inner: fit.model },
        rms_residual: fit.rms_residual,
        max_residual: fit.max_residual,
        iterations: fit.iterations,
        converged: fit.converged,
    })
}

fn spec_of(material: &Material, radius_a: f64, thickness_t0: f64) -> MembraneSpec {
    MembraneSpec {
        radius_a,
        thickness_t0,
        layers: 1,
        infill: Infill::Lines,
        material: material.inner.clone(),
    }
}

/// Limit-point search result for an inflating membrane.
#[pyclass]
pub struct Ballooning {
    #[pyo3(get)]
    pub p_balloon_kpa: f64,
    #[pyo3(get)]
    pub stretch_at_limit: f64,
    #[pyo3(get)]
    pub theta_at_limit: f64,
    #[pyo3(get)]
    pub found: bool,
}

impl From<inflation::BallooningResult> for Ballooning {
    fn from(r: inflation::BallooningResult) -> Self {
        Ballooning {
            p_balloon_kpa: r.p_balloon_kpa,
            stretch_at_limit: r.stretch_at_limit,
            theta_at_limit: r.theta_at_limit,
            found: r.found,
        }
    }
}

/// Ballooning pressure of a clamped circular membrane (spherical-cap model).
#[pyfunction]
fn find_ballooning(material: &Material, radius_a: f64, thickness_t0: f64) -> PyResult<Ballooning> {
    inflation::find_ballooning(&spec_of(material, radius_a, thickness_t0))
        .map(Ballooning::from)
        .map_err(err)
}

/// Limit point of an ideal thin-walled spherical balloon.
#[pyfunction]
fn sphere_ballooning(
    material: &Material,
    thickness_t0: f64,
    radius_r0: f64,
    stretch_max: f64,
) -> PyResult<Ballooning> {
    inflation::sphere_ballooning(&material.inner, thickness_t0, radius_r0, stretch_max)
        .map(Ballooning::from)
        .map_err(err)
}

/// Quasi-static sweep: list of (theta, stretch, pressure_kpa, thickness_mm,
/// volume_mm3) states up to `theta_max`.
#[pyfunction]
fn pressure_stretch_curve(
    material: &Material,
    radius_a: f64,
    thickness_t0: f64,
    theta_max: f64,
    n_points: usize,
) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    let states =
        inflation::pressure_stretch_curve(&spec_of(material, radius_a, thickness_t0), theta_max, n_points)
            .map_err(err)?;
    Ok(states
        .iter()
        .map(|s| (s.theta, s.stretch, s.pressure_kpa, s.current_thickness, s.enclosed_volume))
        .collect())
}

/// Inflation from a constant-pressure source through a linear flow
/// restriction. Returns ((time_s, pressure_kpa) samples, rupture_flag).
#[pyfunction]
fn simulate_source_coupled(
    material: &Material,
    radius_a: f64,
    thickness_t0: f64,
    supply_pressure_kpa: f64,
    flow_coefficient: f64,
    duration_s: f64,
    dt_s: f64,
) -> PyResult<(Vec<(f64, f64)>, bool)> {
    let trace = inflation::simulate_source_coupled(
        &spec_of(material, radius_a, thickness_t0),
        supply_pressure_kpa,
        flow_coefficient,
        duration_s,
        dt_s,
    )
    .map_err(err)?;
    Ok((trace.samples, trace.rupture_range_reached))
}

/// Indices of the four inflation phases in a pressure trace, or None when the
/// trace has no ballooning signature.
#[pyfunction]
fn detect_inflation_phases(
    samples: Vec<(f64, f64)>,
) -> PyResult<Option<(usize, usize, usize, usize)>> {
    let trace = PressureTrace::new(samples).map_err(err)?;
    match analysis::detect_inflation_phases(&trace).map_err(err)? {
        PhaseDetection::Marks(m) => Ok(Some((m.i_open, m.ii_peak, m.iii_trough, m.iv_recover))),
        PhaseDetection::NoBallooningSignature => Ok(None),
    }
}

/// Cycle count and failure cycle (1-based, None when none) of a cyclic
/// pressure trace.
#[pyfunction]
fn segment_cycles(
    samples: Vec<(f64, f64)>,
    period_hint_s: f64,
) -> PyResult<(usize, Option<usize>)> {
    let trace = PressureTrace::new(samples).map_err(err)?;
    let stats = analysis::segment_cycles(&trace, period_hint_s).map_err(err)?;
    Ok((stats.cycles.len(), stats.failure_cycle))
}

/// Meridian stretch from a side-view profile: fitted-ellipse arc length over
/// the clamped base diameter.
#[pyfunction]
fn stretch_from_profile(points: Vec<(f64, f64)>, base_diameter_l0: f64) -> PyResult<f64> {
    let profile = MembraneProfile::new(points, base_diameter_l0).map_err(err)?;
    Ok(analysis::stretch_from_profile(&profile).map_err(err)?.stretch)
}

/// Circle fit through marker points: (radius_mm, curvature_per_mm,
/// bend_angle_deg).
#[pyfunction]
fn curvature_from_markers(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let est = analysis::curvature_from_markers(&points).map_err(err)?;
    Ok((est.radius_mm, est.curvature_per_mm, est.bend_angle_deg))
}

/// G-code for a circular membrane with default print settings, overridable
/// diameter and layer count.
#[pyfunction]
#[pyo3(signature = (diameter=42.0, layers=3))]
fn membrane_gcode(diameter: f64, layers: u32) -> PyResult<String> {
    let spec = MembranePrintSpec { diameter, layers, ..MembranePrintSpec::default() };
    let path = toolpath::plan_membrane(&spec).map_err(err)?;
    let profile = PrinterProfile::default();
    let calibration = CalibrationTable::new(vec![(30.0, 1.0)]).map_err(err)?;
    let (_, text) = toolpath::emit_gcode(&path, &profile, &calibration).map_err(err)?;
    Ok(text)
}

/// Round-trip check helper: parse G-code text and re-emit it.
#[pyfunction]
fn reemit_gcode(text: &str) -> PyResult<String> {
    Ok(toolpath::parse_gcode(text).map_err(err)?.to_text())
}

#[pymodule]
fn membrane_kit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Material>()?;
    m.add_class::<FitOutcome>()?;
    m.add_class::<Ballooning>()?;
    m.add_function(wrap_pyfunction!(fit_model, m)?)?;
    m.add_function(wrap_pyfunction!(find_ballooning, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_ballooning, m)?)?;
    m.add_function(wrap_pyfunction!(pressure_stretch_curve, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_source_coupled, m)?)?;
    m.add_function(wrap_pyfunction!(detect_inflation_phases, m)?)?;
    m.add_function(wrap_pyfunction!(segment_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(stretch_from_profile, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_from_markers, m)?)?;
    m.add_function(wrap_pyfunction!(membrane_gcode, m)?)?;
    m.add_function(wrap_pyfunction!(reemit_gcode, m)?)?;
    Ok(())
}
