//! Text file formats: two-column CSV readers/writers and JSON report
//! builders. All writers emit `\n` newlines and fixed formatting so repeated
//! runs are byte-identical.

use serde_json::{json, Value};

use crate::analysis::{ForceAbscissa, ForceTrace, MembraneProfile, PressureTrace};
use crate::error::{Error, Result};
use crate::inflation::{InflationState, SourceCoupledTrace};
use crate::material::{FitResult, HyperelasticModel, StressStrainCurve};
use crate::toolpath::CalibrationTable;

/// Parse a two-column numeric CSV. `#`-prefixed and blank lines are skipped;
/// the first data-bearing line must equal `expected_header`.
fn parse_two_col(text: &str, expected_header: &str) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != expected_header {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected header '{expected_header}', found '{line}'"),
                });
            }
            header_seen = true;
            continue;
        }
        let mut cols = line.split(',');
        let a = cols.next().unwrap_or("").trim();
        let b = cols.next().unwrap_or("").trim();
        if cols.next().is_some() {
            return Err(Error::Parse { line: idx + 1, message: "expected 2 columns".into() });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("invalid number '{s}'"),
            })
        };
        rows.push((parse(a)?, parse(b)?));
    }
    if !header_seen {
        return Err(Error::Parse { line: 1, message: format!("missing header '{expected_header}'") });
    }
    Ok(rows)
}

fn two_col_csv(header: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (a, b) in rows {
        out.push_str(&format!("{a:.9},{b:.9}\n"));
    }
    out
}

/// Read an engineering stress-strain curve (`strain,stress_mpa`).
pub fn read_stress_strain_csv(text: &str, label: &str) -> Result<StressStrainCurve> {
    let rows = parse_two_col(text, "strain,stress_mpa")?;
    StressStrainCurve::new(rows, label, "csv")
}

/// Write a stress-strain curve in the same format [`read_stress_strain_csv`]
/// accepts.
pub fn write_stress_strain_csv(curve: &StressStrainCurve) -> String {
    two_col_csv("strain,stress_mpa", curve.points.iter().copied())
}

/// Write a quasi-static inflation sweep
/// (`theta_rad,stretch,pressure_kpa,thickness_mm,volume_mm3`).
pub fn write_pressure_stretch_csv(states: &[InflationState]) -> String {
    let mut out = String::from("theta_rad,stretch,pressure_kpa,thickness_mm,volume_mm3\n");
    for s in states {
        out.push_str(&format!(
            "{:.9},{:.9},{:.9},{:.9},{:.9}\n",
            s.theta, s.stretch, s.pressure_kpa, s.current_thickness, s.enclosed_volume
        ));
    }
    out
}

/// Write a source-coupled simulation trace (`time_s,pressure_kpa,stretch`).
pub fn write_simulation_trace_csv(trace: &SourceCoupledTrace) -> String {
    let mut out = String::from("time_s,pressure_kpa,stretch\n");
    for (sample, state) in trace.samples.iter().zip(&trace.states) {
        out.push_str(&format!("{:.9},{:.9},{:.9}\n", sample.0, sample.1, state.stretch));
    }
    out
}

/// Read a pressure log (`time_s,pressure_kpa`).
pub fn read_pressure_trace_csv(text: &str) -> Result<PressureTrace> {
    PressureTrace::new(parse_two_col(text, "time_s,pressure_kpa")?)
}

pub fn write_pressure_trace_csv(trace: &PressureTrace) -> String {
    two_col_csv("time_s,pressure_kpa", trace.samples.iter().copied())
}

/// Read a force log; the header selects the abscissa
/// (`time_s,force_n` or `displacement_mm,force_n`).
pub fn read_force_trace_csv(text: &str) -> Result<ForceTrace> {
    match parse_two_col(text, "time_s,force_n") {
        Ok(rows) => ForceTrace::new(rows, ForceAbscissa::TimeS),
        Err(_) => {
            let rows = parse_two_col(text, "displacement_mm,force_n")?;
            ForceTrace::new(rows, ForceAbscissa::DisplacementMm)
        }
    }
}

/// Read a side-view membrane boundary (`x_mm,y_mm` plus a `# L0_mm=<v>`
/// metadata comment).
pub fn read_profile_csv(text: &str) -> Result<MembraneProfile> {
    let mut l0 = None;
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("L0_mm=") {
                l0 = Some(v.trim().parse::<f64>().map_err(|_| {
                    Error::Parse { line: 0, message: format!("invalid L0_mm value '{v}'") }
                })?);
            }
        }
    }
    let l0 = l0.ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing '# L0_mm=<v>' metadata line".into(),
    })?;
    MembraneProfile::new(parse_two_col(text, "x_mm,y_mm")?, l0)
}

pub fn write_profile_csv(profile: &MembraneProfile) -> String {
    let mut out = format!("# L0_mm={}\n", profile.base_diameter_l0);
    out.push_str(&two_col_csv("x_mm,y_mm", profile.points.iter().copied()));
    out
}

/// Read a closed polygon outline (`x_mm,y_mm`, no metadata required).
pub fn read_outline_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    parse_two_col(text, "x_mm,y_mm")
}

/// Read an extrusion calibration table (`feedrate_mm_s,flow_multiplier`).
pub fn read_calibration_csv(text: &str) -> Result<CalibrationTable> {
    CalibrationTable::new(parse_two_col(text, "feedrate_mm_s,flow_multiplier")?)
}

pub fn write_calibration_csv(table: &CalibrationTable) -> String {
    two_col_csv("feedrate_mm_s,flow_multiplier", table.entries.iter().copied())
}

fn named_parameters(model: &HyperelasticModel) -> Value {
    match model {
        HyperelasticModel::NeoHookean { mu } => json!({ "mu_mpa": mu }),
        HyperelasticModel::MooneyRivlin { c10, c01 } => {
            json!({ "c10_mpa": c10, "c01_mpa": c01 })
        }
        HyperelasticModel::Ogden { terms } => {
            let mut map = serde_json::Map::new();
            for (i, (mu, alpha)) in terms.iter().enumerate() {
                map.insert(format!("mu{}_mpa", i + 1), json!(mu));
                map.insert(format!("alpha{}", i + 1), json!(alpha));
            }
            Value::Object(map)
        }
        HyperelasticModel::Gent { mu, jm } => json!({ "mu_mpa": mu, "jm": jm }),
    }
}

fn family_name(model: &HyperelasticModel) -> String {
    match model {
        HyperelasticModel::NeoHookean { .. } => "neohookean".into(),
        HyperelasticModel::MooneyRivlin { .. } => "mooney-rivlin".into(),
        HyperelasticModel::Ogden { terms } => format!("ogden{}", terms.len()),
        HyperelasticModel::Gent { .. } => "gent".into(),
    }
}

/// Fit report JSON:
/// `{family, parameters, rms_residual_mpa, max_residual_mpa, iterations, converged}`.
pub fn fit_report_json(fit: &FitResult) -> Value {
    json!({
        "family": family_name(&fit.model),
        "parameters": named_parameters(&fit.model),
        "rms_residual_mpa": fit.rms_residual,
        "max_residual_mpa": fit.max_residual,
        "iterations": fit.iterations,
        "converged": fit.converged,
    })
}

/// Deterministic pretty JSON text with a trailing newline.
pub fn json_to_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Event summary table as CSV, one row per (thickness, infill) group.
pub fn write_event_report_csv(report: &crate::analysis::EventReport) -> String {
    let mut out = String::from(
        "thickness_mm,infill,n_ballooned,n_ruptured,ballooning_peak_mean_kpa,ballooning_peak_sd_kpa,ballooning_trough_mean_kpa,ballooning_trough_sd_kpa,rupture_mean_kpa,rupture_sd_kpa,margin_kpa\n",
    );
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for g in &report.groups {
        out.push_str(&format!(
            "{:.6},{},{},{},{},{},{},{},{},{},{}\n",
            g.thickness_mm,
            g.infill,
            g.n_ballooned,
            g.n_ruptured,
            fmt(g.ballooning_peak_mean_kpa),
            fmt(g.ballooning_peak_sd_kpa),
            fmt(g.ballooning_trough_mean_kpa),
            fmt(g.ballooning_trough_sd_kpa),
            fmt(g.rupture_mean_kpa),
            fmt(g.rupture_sd_kpa),
            fmt(g.margin_kpa),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stress_strain_round_trip() {
        let text = "# sample comment\nstrain,stress_mpa\n0.1,0.052\n0.5,0.26\n1.0,0.6\n";
        let curve = read_stress_strain_csv(text, "demo").unwrap();
        assert_eq!(curve.points.len(), 3);
        assert_relative_eq!(curve.points[1].1, 0.26);
        let back = read_stress_strain_csv(&write_stress_strain_csv(&curve), "demo").unwrap();
        assert_eq!(back.points, curve.points);
    }

    #[test]
    fn bad_header_reports_line() {
        let err = read_stress_strain_csv("stress,strain\n1,2\n", "x").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_number_reports_line() {
        let err = read_pressure_trace_csv("time_s,pressure_kpa\n0,1\n0.1,oops\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("oops"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn force_trace_header_selects_abscissa() {
        let t = read_force_trace_csv("time_s,force_n\n0,1\n1,2\n").unwrap();
        assert_eq!(t.abscissa, ForceAbscissa::TimeS);
        let d = read_force_trace_csv("displacement_mm,force_n\n0,1\n1,2\n").unwrap();
        assert_eq!(d.abscissa, ForceAbscissa::DisplacementMm);
    }

    #[test]
    fn profile_requires_l0() {
        let ok = read_profile_csv(
            "# L0_mm=42\nx_mm,y_mm\n-21,0\n-10,5\n0,8\n5,7\n10,5\n21,0\n",
        )
        .unwrap();
        assert_relative_eq!(ok.base_diameter_l0, 42.0);
        assert_eq!(ok.points.len(), 6);
        assert!(read_profile_csv("x_mm,y_mm\n0,0\n1,1\n2,2\n3,3\n4,4\n5,5\n").is_err());
    }

    #[test]
    fn calibration_round_trip() {
        let table = read_calibration_csv("feedrate_mm_s,flow_multiplier\n10,0.9\n30,1.1\n").unwrap();
        assert_relative_eq!(table.flow_multiplier(20.0), 1.0, epsilon = 1e-12);
        let back = read_calibration_csv(&write_calibration_csv(&table)).unwrap();
        assert_eq!(back.entries, table.entries);
    }

    #[test]
    fn fit_report_schema() {
        let fit = FitResult {
            model: HyperelasticModel::Gent { mu: 0.3, jm: 40.0 },
            rms_residual: 1e-4,
            max_residual: 3e-4,
            iterations: 12,
            converged: true,
        };
        let v = fit_report_json(&fit);
        assert_eq!(v["family"], "gent");
        assert_eq!(v["parameters"]["mu_mpa"], 0.3);
        assert_eq!(v["parameters"]["jm"], 40.0);
        assert_eq!(v["converged"], true);
        assert!(v["rms_residual_mpa"].is_number());
    }

    #[test]
    fn simulation_trace_csv_header() {
        let trace = SourceCoupledTrace { samples: vec![], states: vec![], rupture_range_reached: false };
        assert_eq!(write_simulation_trace_csv(&trace), "time_s,pressure_kpa,stretch\n");
    }
}
