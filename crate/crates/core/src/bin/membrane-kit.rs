//! Command-line front end: file-in/file-out workflows over the library.
//!
//! Exit codes: 0 success, 1 input/validation error, 2 solver/analysis
//! non-convergence. All outputs are deterministic for identical inputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use membrane_kit::analysis::{self, LabeledTrace, MembraneEvent, PhaseDetection};
use membrane_kit::inflation::{self, Infill, MembraneSpec};
use membrane_kit::material::{self, HyperelasticModel, ModelFamily};
use membrane_kit::toolpath::{
    self, CalibrationTable, CoverageRegion, MembranePrintSpec, PrinterProfile,
};
use membrane_kit::{formats, Error};

#[derive(Parser)]
#[command(name = "membrane-kit", version, about = "Design and analysis toolkit for printed soft membranes")]
struct Cli {
    /// JSON run configuration; flags override config keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (fixed filenames per command).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Concurrent per-file analysis tasks.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed echoed into reports; the pipeline itself is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a hyperelastic model to a stress-strain CSV.
    Fit(FitArgs),
    /// Quasi-static inflation sweep, ballooning search and source-coupled trace.
    Simulate(SimulateArgs),
    /// Plan a toolpath and emit G-code plus a coverage report.
    Slice(SliceArgs),
    /// Analyze a recorded experiment log.
    Analyze(AnalyzeArgs),
    /// Summarize ballooning/rupture event traces from a manifest.
    Report(ReportArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Stress-strain CSV (header `strain,stress_mpa`).
    #[arg(long)]
    input: PathBuf,
    /// neohookean | mooney-rivlin | ogden1..ogden3 | gent
    #[arg(long)]
    family: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Run the ideal spherical-balloon reference instead of the cap model.
    #[arg(long)]
    sphere: bool,
    /// Also run the source-coupled simulation at this multiple of p_balloon.
    #[arg(long)]
    supply_frac: Option<f64>,
    /// Thickness override, mm.
    #[arg(long)]
    thickness: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SliceTarget {
    Membrane,
    Dogbone,
    Sucker,
}

#[derive(Args)]
struct SliceArgs {
    #[arg(long, value_enum, default_value_t = SliceTarget::Membrane)]
    target: SliceTarget,
    /// Outline CSV (`x_mm,y_mm`) for dogbone targets; default ISO37-style.
    #[arg(long)]
    outline: Option<PathBuf>,
    /// Warn (non-fatally) when layer coverage has gaps.
    #[arg(long)]
    check_airtight: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalyzeKind {
    Inflation,
    Cyclic,
    Curvature,
    Force,
    Hysteresis,
    Stretch,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, value_enum)]
    kind: AnalyzeKind,
    /// Primary input file (kind-specific CSV).
    #[arg(long)]
    input: PathBuf,
    /// Second input (hysteresis unloading branch).
    #[arg(long)]
    input2: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON manifest: [{path, thickness_mm, infill, event}].
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MembraneGeomConfig {
    radius_a: f64,
    thickness_t0: f64,
    layers: u32,
    infill: Infill,
}

impl Default for MembraneGeomConfig {
    fn default() -> Self {
        MembraneGeomConfig { radius_a: 21.0, thickness_t0: 0.6, layers: 3, infill: Infill::Lines }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SimConfig {
    flow_coefficient: f64,
    duration_s: f64,
    dt_s: f64,
    theta_max: f64,
    n_points: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            flow_coefficient: 300.0,
            duration_s: 12.0,
            dt_s: 1e-3,
            theta_max: 3.0,
            n_points: 512,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct AnalysisConfig {
    noise_window_s: f64,
    period_hint_s: f64,
    plateau_window_s: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { noise_window_s: 0.5, period_hint_s: 8.0, plateau_window_s: 25.0 }
    }
}

/// Shared run configuration; every key has a default matching the library
/// defaults, and CLI flags override config values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    units: String,
    material: HyperelasticModel,
    membrane: MembraneGeomConfig,
    print: MembranePrintSpec,
    printer_profile_path: Option<PathBuf>,
    calibration_path: Option<PathBuf>,
    sim: SimConfig,
    analysis: AnalysisConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            units: "mm, MPa, kPa, s, N".into(),
            material: HyperelasticModel::Gent { mu: 0.1, jm: 100.0 },
            membrane: MembraneGeomConfig::default(),
            print: MembranePrintSpec::default(),
            printer_profile_path: None,
            calibration_path: None,
            sim: SimConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }
}

impl RunConfig {
    fn load(path: Option<&Path>) -> Result<Self, Error> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = fs::read_to_string(p)?;
                let cfg: RunConfig = serde_json::from_str(&text)?;
                cfg.material.validate()?;
                cfg.membrane_spec().validate()?;
                cfg.print.validate()?;
                for file in [&cfg.printer_profile_path, &cfg.calibration_path].into_iter().flatten() {
                    let file = if file.is_relative() {
                        p.parent().unwrap_or(Path::new(".")).join(file)
                    } else {
                        file.clone()
                    };
                    if !file.exists() {
                        return Err(Error::Config(format!("referenced file not found: {}", file.display())));
                    }
                }
                Ok(cfg)
            }
        }
    }

    fn membrane_spec(&self) -> MembraneSpec {
        MembraneSpec {
            radius_a: self.membrane.radius_a,
            thickness_t0: self.membrane.thickness_t0,
            layers: self.membrane.layers,
            infill: self.membrane.infill,
            material: self.material.clone(),
        }
    }

    fn printer_profile(&self, config_path: Option<&Path>) -> Result<PrinterProfile, Error> {
        match &self.printer_profile_path {
            None => Ok(PrinterProfile::default()),
            Some(p) => {
                let p = resolve(config_path, p);
                Ok(serde_json::from_str(&fs::read_to_string(p)?)?)
            }
        }
    }

    fn calibration(&self, config_path: Option<&Path>) -> Result<CalibrationTable, Error> {
        match &self.calibration_path {
            None => Ok(CalibrationTable::identity()),
            Some(p) => {
                let p = resolve(config_path, p);
                formats::read_calibration_csv(&fs::read_to_string(p)?)
            }
        }
    }
}

fn resolve(config_path: Option<&Path>, file: &Path) -> PathBuf {
    if file.is_relative() {
        if let Some(cfg) = config_path {
            return cfg.parent().unwrap_or(Path::new(".")).join(file);
        }
    }
    file.to_path_buf()
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Fit(args) => cmd_fit(cli, &cfg, args),
        Command::Simulate(args) => cmd_simulate(cli, &cfg, args),
        Command::Slice(args) => cmd_slice(cli, &cfg, args),
        Command::Analyze(args) => cmd_analyze(cli, &cfg, args),
        Command::Report(args) => cmd_report(cli, &cfg, args),
    }
}

fn cmd_fit(cli: &Cli, _cfg: &RunConfig, args: &FitArgs) -> Result<ExitCode, Error> {
    let family = ModelFamily::parse(&args.family)?;
    let text = fs::read_to_string(&args.input)?;
    let label = args.input.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
    let curve = formats::read_stress_strain_csv(&text, label)?;
    let fit = material::fit_model(&curve, family, None)?;
    let report = formats::fit_report_json(&fit);
    let path = write_out(&cli.out, "fit_report.json", &formats::json_to_string(&report))?;
    println!(
        "fit family={} converged={} rms_mpa={:.6e} out={}",
        args.family, fit.converged, fit.rms_residual, path.display()
    );
    Ok(if fit.converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_simulate(cli: &Cli, cfg: &RunConfig, args: &SimulateArgs) -> Result<ExitCode, Error> {
    let mut spec = cfg.membrane_spec();
    if let Some(t) = args.thickness {
        spec.thickness_t0 = t;
    }

    if args.sphere {
        let result = inflation::sphere_ballooning(&spec.material, spec.thickness_t0, spec.radius_a, 20.0)?;
        let json = serde_json::to_value(&result)?;
        let path = write_out(&cli.out, "ballooning.json", &formats::json_to_string(&json))?;
        println!(
            "simulate mode=sphere found={} lambda_limit={:.6} out={}",
            result.found, result.stretch_at_limit, path.display()
        );
        return Ok(ExitCode::SUCCESS);
    }

    spec.validate()?;
    let states = inflation::pressure_stretch_curve(&spec, cfg.sim.theta_max, cfg.sim.n_points)?;
    write_out(&cli.out, "pressure_stretch.csv", &formats::write_pressure_stretch_csv(&states))?;
    let balloon = inflation::find_ballooning(&spec)?;
    let json = serde_json::to_value(&balloon)?;
    write_out(&cli.out, "ballooning.json", &formats::json_to_string(&json))?;

    let mut trace_note = String::new();
    if let Some(frac) = args.supply_frac {
        if !balloon.found {
            return Err(Error::Analysis("no limit point: supply_frac has no reference pressure".into()));
        }
        let trace = inflation::simulate_source_coupled(
            &spec,
            frac * balloon.p_balloon_kpa,
            cfg.sim.flow_coefficient,
            cfg.sim.duration_s,
            cfg.sim.dt_s,
        )?;
        write_out(&cli.out, "trace.csv", &formats::write_simulation_trace_csv(&trace))?;
        trace_note = format!(" trace_samples={}", trace.samples.len());
    }
    println!(
        "simulate found={} p_balloon_kpa={:.6} lambda_limit={:.6}{} out={}",
        balloon.found, balloon.p_balloon_kpa, balloon.stretch_at_limit, trace_note,
        cli.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Built-in ISO37-type-2-style dogbone outline (overall 75 x 12.5 mm with a
/// 4 mm-wide gauge), counterclockwise.
fn default_dogbone() -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    // Right grip, gauge neck and left grip approximated with straight tapers.
    let xs = [
        (-37.5, 6.25),
        (-17.5, 6.25),
        (-12.5, 2.0),
        (12.5, 2.0),
        (17.5, 6.25),
        (37.5, 6.25),
    ];
    for &(x, y) in &xs {
        pts.push((x, y));
    }
    for &(x, y) in xs.iter().rev() {
        pts.push((x, -y));
    }
    pts
}

/// Dual-tool sucker plan: soft membrane disc (tool 0) with rigid stiffening
/// rings (tool 1) on top.
fn plan_sucker(spec: &MembranePrintSpec) -> Result<toolpath::Toolpath, Error> {
    let mut soft = spec.clone();
    soft.infill = Infill::Concentric;
    soft.tool = 0;
    let mut path = toolpath::plan_membrane(&soft)?;
    let radius = spec.diameter / 2.0;
    let z_top = (spec.layers as f64 + 1.0) * spec.layer_height;
    for k in 0..3u32 {
        let r = radius - spec.line_width * (0.5 + k as f64);
        let loop_pts =
            toolpath::circle_polyline(0.0, 0.0, r, z_top, toolpath::DEFAULT_CHORDAL_TOL);
        path.travel_to(loop_pts[0], spec.travel_speed, 1);
        path.extrude_polyline(&loop_pts, spec.line_width, spec.print_speed, 1);
    }
    Ok(path)
}

fn cmd_slice(cli: &Cli, cfg: &RunConfig, args: &SliceArgs) -> Result<ExitCode, Error> {
    let profile = cfg.printer_profile(cli.config.as_deref())?;
    let calibration = cfg.calibration(cli.config.as_deref())?;
    let spec = &cfg.print;

    let (path, region, name) = match args.target {
        SliceTarget::Membrane => (
            toolpath::plan_membrane(spec)?,
            Some(CoverageRegion::Circle { cx: 0.0, cy: 0.0, radius: spec.diameter / 2.0 }),
            "membrane",
        ),
        SliceTarget::Dogbone => {
            let outline = match &args.outline {
                Some(p) => formats::read_outline_csv(&fs::read_to_string(p)?)?,
                None => default_dogbone(),
            };
            let plan = toolpath::plan_dogbone(
                &outline,
                spec.layers,
                spec.layer_height,
                spec.line_width,
                0.0,
            )?;
            (plan, Some(CoverageRegion::Polygon { vertices: outline }), "dogbone")
        }
        SliceTarget::Sucker => (plan_sucker(spec)?, None, "sucker"),
    };

    let (program, text) = toolpath::emit_gcode(&path, &profile, &calibration)?;
    program.validate()?;
    write_out(&cli.out, &format!("{name}.gcode"), &text)?;

    let mut gap_note = String::new();
    if let Some(region) = region {
        let mut reports = Vec::new();
        let n_layers = path.layer_heights().len();
        for layer in 0..n_layers {
            reports.push(toolpath::verify_coverage(&path, layer, &region, 0.0)?);
        }
        let any_gaps = reports.iter().any(|r| !r.airtight_candidate());
        let json = serde_json::to_value(&reports)?;
        write_out(&cli.out, "coverage.json", &formats::json_to_string(&json))?;
        if args.check_airtight && any_gaps {
            let worst = reports.iter().map(|r| r.max_opening_mm).fold(0.0, f64::max);
            eprintln!("warning: coverage gaps up to {worst:.3} mm opening; layer may not be airtight");
            gap_note = " airtight=false".into();
        } else if args.check_airtight {
            gap_note = " airtight=true".into();
        }
    }
    println!(
        "slice target={name} moves={} commands={}{gap_note} out={}",
        path.moves.len(),
        program.commands.len(),
        cli.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(cli: &Cli, cfg: &RunConfig, args: &AnalyzeArgs) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(&args.input)?;
    let (summary, json) = match args.kind {
        AnalyzeKind::Inflation => {
            let trace = formats::read_pressure_trace_csv(&text)?;
            let detection = analysis::detect_inflation_phases(&trace)?;
            let summary = match &detection {
                PhaseDetection::Marks(m) => format!(
                    "analyze kind=inflation marks={},{},{},{}",
                    m.i_open, m.ii_peak, m.iii_trough, m.iv_recover
                ),
                PhaseDetection::NoBallooningSignature => {
                    "analyze kind=inflation no_ballooning_signature".into()
                }
            };
            (summary, serde_json::to_value(&detection)?)
        }
        AnalyzeKind::Cyclic => {
            let trace = formats::read_pressure_trace_csv(&text)?;
            let mut stats = analysis::segment_cycles(&trace, cfg.analysis.period_hint_s)?;
            stats.decay = analysis::fit_peak_decay(&stats).ok();
            let summary = format!(
                "analyze kind=cyclic cycles={} failure_cycle={}",
                stats.cycles.len(),
                stats.failure_cycle.map(|c| c.to_string()).unwrap_or_else(|| "none".into())
            );
            (summary, serde_json::to_value(&stats)?)
        }
        AnalyzeKind::Curvature => {
            let markers = formats::read_outline_csv(&text)?;
            let est = analysis::curvature_from_markers(&markers)?;
            (
                format!(
                    "analyze kind=curvature curvature_per_mm={:.6} bend_deg={:.3}",
                    est.curvature_per_mm, est.bend_angle_deg
                ),
                serde_json::to_value(est)?,
            )
        }
        AnalyzeKind::Force => {
            let trace = formats::read_force_trace_csv(&text)?;
            let plateau = analysis::plateau_force(&trace, cfg.analysis.plateau_window_s).ok();
            let peak = analysis::adhesion_peak(&trace)?;
            let json = serde_json::json!({
                "plateau_force_n": plateau,
                "peak_force_n": peak.pull_off_force_n,
                "peak_at": peak.at,
            });
            (
                format!(
                    "analyze kind=force plateau_n={} peak_n={:.4}",
                    plateau.map(|p| format!("{p:.4}")).unwrap_or_else(|| "none".into()),
                    peak.pull_off_force_n
                ),
                json,
            )
        }
        AnalyzeKind::Hysteresis => {
            let input2 = args.input2.as_ref().ok_or_else(|| {
                Error::invalid("hysteresis needs --input (loading) and --input2 (unloading)")
            })?;
            let load = formats::read_force_trace_csv(&text)?;
            let unload = formats::read_force_trace_csv(&fs::read_to_string(input2)?)?;
            let h = analysis::sensor_hysteresis(&load.samples, &unload.samples)?;
            (
                format!(
                    "analyze kind=hysteresis max_gap_kpa={:.6} normalized={:.6}",
                    h.max_gap_kpa, h.normalized
                ),
                serde_json::to_value(h)?,
            )
        }
        AnalyzeKind::Stretch => {
            let profile = formats::read_profile_csv(&text)?;
            let est = analysis::stretch_from_profile(&profile)?;
            (
                format!("analyze kind=stretch lambda={:.6}", est.stretch),
                serde_json::to_value(&est)?,
            )
        }
    };
    let path = write_out(&cli.out, "analysis.json", &formats::json_to_string(&json))?;
    println!("{summary} out={}", path.display());
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Deserialize)]
struct ManifestEntry {
    path: PathBuf,
    thickness_mm: f64,
    infill: String,
    event: MembraneEvent,
}

fn cmd_report(cli: &Cli, _cfg: &RunConfig, args: &ReportArgs) -> Result<ExitCode, Error> {
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(&fs::read_to_string(&args.manifest)?)?;
    let base = args.manifest.parent().unwrap_or(Path::new(".")).to_path_buf();

    // Load traces, optionally in parallel; order is preserved by index.
    let jobs = cli.jobs.max(1).min(entries.len().max(1));
    let mut traces: Vec<Option<LabeledTrace>> = (0..entries.len()).map(|_| None).collect();
    let errors = std::sync::Mutex::new(Vec::<Error>::new());
    std::thread::scope(|scope| {
        for (chunk_entries, chunk_out) in entries
            .chunks(entries.len().div_ceil(jobs))
            .zip(traces.chunks_mut(entries.len().div_ceil(jobs)))
        {
            let base = &base;
            let errors = &errors;
            scope.spawn(move || {
                for (entry, slot) in chunk_entries.iter().zip(chunk_out) {
                    let path = if entry.path.is_relative() { base.join(&entry.path) } else { entry.path.clone() };
                    match fs::read_to_string(&path)
                        .map_err(Error::from)
                        .and_then(|t| formats::read_pressure_trace_csv(&t))
                    {
                        Ok(trace) => {
                            *slot = Some(LabeledTrace {
                                thickness_mm: entry.thickness_mm,
                                infill: entry.infill.clone(),
                                event: entry.event,
                                trace,
                            })
                        }
                        Err(e) => errors.lock().unwrap().push(e),
                    }
                }
            });
        }
    });
    if let Some(e) = errors.into_inner().unwrap().into_iter().next() {
        return Err(e);
    }
    let traces: Vec<LabeledTrace> = traces.into_iter().flatten().collect();

    let report = analysis::ballooning_rupture_report(&traces)?;
    let json = serde_json::to_value(&report)?;
    write_out(&cli.out, "event_report.json", &formats::json_to_string(&json))?;
    write_out(&cli.out, "event_report.csv", &formats::write_event_report_csv(&report))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "report groups={} monotone_in_thickness={} out={}",
        report.groups.len(),
        report.monotone_in_thickness,
        cli.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
