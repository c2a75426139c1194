//! Analysis of recorded experiment logs: pressure traces, force traces and
//! tracked membrane geometry.

mod ellipse;

pub use ellipse::{fit_ellipse, Ellipse};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

/// Pressure log: (time s, pressure kPa) samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PressureTrace {
    pub samples: Vec<(f64, f64)>,
    pub sample_rate_hint_hz: Option<f64>,
}

impl PressureTrace {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        let trace = Self { samples, sample_rate_hint_hz: None };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid("trace times must be strictly increasing"));
            }
        }
        if self.samples.iter().any(|s| !s.0.is_finite() || !s.1.is_finite()) {
            return Err(Error::invalid("trace samples must be finite"));
        }
        Ok(())
    }

    /// Standard deviation of the first `window_s` seconds, used as the noise
    /// floor for event detection.
    pub fn noise_floor(&self, window_s: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let t0 = self.samples[0].0;
        let head: Vec<f64> = self
            .samples
            .iter()
            .take_while(|s| s.0 <= t0 + window_s)
            .map(|s| s.1)
            .collect();
        if head.len() < 2 {
            return 0.0;
        }
        let mean = head.iter().sum::<f64>() / head.len() as f64;
        let var = head.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / head.len() as f64;
        var.sqrt()
    }
}

/// Force log with either a time or a displacement abscissa.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForceTrace {
    /// (abscissa, force N); abscissa strictly increasing.
    pub samples: Vec<(f64, f64)>,
    pub abscissa: ForceAbscissa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceAbscissa {
    TimeS,
    DisplacementMm,
}

impl ForceTrace {
    pub fn new(samples: Vec<(f64, f64)>, abscissa: ForceAbscissa) -> Result<Self> {
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid("force trace abscissa must be strictly increasing"));
            }
        }
        Ok(Self { samples, abscissa })
    }
}

/// Side-view membrane boundary points plus the reference base diameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembraneProfile {
    pub points: Vec<(f64, f64)>,
    pub base_diameter_l0: f64,
}

impl MembraneProfile {
    pub fn new(points: Vec<(f64, f64)>, base_diameter_l0: f64) -> Result<Self> {
        if points.len() < 6 {
            return Err(Error::invalid("profile needs at least 6 points"));
        }
        if base_diameter_l0 <= 0.0 {
            return Err(Error::invalid("base diameter must be positive"));
        }
        Ok(Self { points, base_diameter_l0 })
    }
}

/// Indices of the four inflation phases on a pressure trace.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhaseMarks {
    pub i_open: usize,
    pub ii_peak: usize,
    pub iii_trough: usize,
    pub iv_recover: usize,
}

/// Phase detection distinguishes a genuine no-dip trace from an error.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum PhaseDetection {
    Marks(PhaseMarks),
    NoBallooningSignature,
}

impl PhaseDetection {
    pub fn marks(&self) -> Option<PhaseMarks> {
        match self {
            PhaseDetection::Marks(m) => Some(*m),
            PhaseDetection::NoBallooningSignature => None,
        }
    }
}

/// Locate the four-phase inflation signature: valve opening, pressure peak,
/// post-ballooning trough and recovery. A monotone trace yields
/// `NoBallooningSignature`.
pub fn detect_inflation_phases(trace: &PressureTrace) -> Result<PhaseDetection> {
    trace.validate()?;
    let p: Vec<f64> = trace.samples.iter().map(|s| s.1).collect();
    if p.len() < 7 {
        return Err(Error::Analysis("trace too short for phase detection".into()));
    }
    let sigma = trace.noise_floor(0.5);
    // 10 sigma keeps sensor noise from faking events while staying far below
    // any genuine ballooning drop.
    let slope_thr = (10.0 * sigma).max(1e-9);

    // (i): first index whose centered 5-sample rise exceeds the noise band.
    let mut i_open = None;
    for k in 2..p.len() - 2 {
        if p[k + 2] - p[k - 2] > slope_thr {
            i_open = Some(k);
            break;
        }
    }
    let i_open = match i_open {
        Some(k) => k,
        None => return Ok(PhaseDetection::NoBallooningSignature),
    };

    // (ii): first local max after (i), detected as a drop below the running
    // maximum by more than the noise band.
    let drop_thr = (10.0 * sigma).max(1e-9);
    let mut run_max = p[i_open];
    let mut run_max_idx = i_open;
    let mut ii_peak = None;
    for k in i_open + 1..p.len() {
        if p[k] > run_max {
            run_max = p[k];
            run_max_idx = k;
        } else if run_max - p[k] > drop_thr {
            ii_peak = Some(run_max_idx);
            break;
        }
    }
    let ii_peak = match ii_peak {
        Some(k) => k,
        None => return Ok(PhaseDetection::NoBallooningSignature),
    };

    // (iii): global min between (ii) and the end of the drop (first return to
    // the peak level, or end of trace).
    let end_of_drop = (ii_peak + 1..p.len())
        .find(|&k| p[k] >= p[ii_peak])
        .unwrap_or(p.len() - 1);
    let iii_trough = (ii_peak + 1..=end_of_drop)
        .min_by(|&a, &b| p[a].total_cmp(&p[b]))
        .unwrap();
    let dip = p[ii_peak] - p[iii_trough];
    if dip <= drop_thr {
        return Ok(PhaseDetection::NoBallooningSignature);
    }

    // (iv): first recovery to within 10% of the dip below the peak.
    let target = p[ii_peak] - 0.1 * dip;
    let iv_recover = match (iii_trough + 1..p.len()).find(|&k| p[k] >= target) {
        Some(k) => k,
        None => return Ok(PhaseDetection::NoBallooningSignature),
    };

    Ok(PhaseDetection::Marks(PhaseMarks { i_open, ii_peak, iii_trough, iv_recover }))
}

/// Stretch from a fitted ellipse arc length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StretchEstimate {
    pub stretch: f64,
    /// λ·100, one of the two percentage conventions.
    pub stretch_pct: f64,
    /// (λ−1)·100, the engineering-strain percentage.
    pub strain_pct: f64,
    pub arc_length_mm: f64,
    pub ellipse: Ellipse,
}

/// Fit an ellipse to the side-view boundary and report λ = L / L0.
///
/// L is the fitted-ellipse arc length between the first and last profile
/// points, so partial boundary arcs measure their own extent; a closed-loop
/// sample (a complete boundary sweep) uses the half-perimeter, the side-view
/// meridian length. Flat profiles degrade gracefully to λ = span/L0.
pub fn stretch_from_profile(profile: &MembraneProfile) -> Result<StretchEstimate> {
    let ellipse = fit_ellipse(&profile.points)?;
    let arc = if ellipse.semi_minor == 0.0 {
        2.0 * ellipse.semi_major
    } else {
        // Unwrap the sampled parameter angles to measure angular extent.
        let mut prev = ellipse.parameter_of(profile.points[0]);
        let t_first = prev;
        for &pt in &profile.points[1..] {
            let mut t = ellipse.parameter_of(pt);
            while t - prev > std::f64::consts::PI {
                t -= 2.0 * std::f64::consts::PI;
            }
            while t - prev < -std::f64::consts::PI {
                t += 2.0 * std::f64::consts::PI;
            }
            prev = t;
        }
        let extent = (prev - t_first).abs();
        if extent > 2.0 * std::f64::consts::PI - 0.2 {
            ellipse.half_perimeter(1e-9)
        } else {
            ellipse.arc_length(t_first, prev, 1e-9)
        }
    };
    let stretch = arc / profile.base_diameter_l0;
    Ok(StretchEstimate {
        stretch,
        stretch_pct: stretch * 100.0,
        strain_pct: (stretch - 1.0) * 100.0,
        arc_length_mm: arc,
        ellipse,
    })
}

/// One detected inflation cycle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CycleRecord {
    /// 1-based cycle index.
    pub index: usize,
    pub start_t: f64,
    pub peak_p: f64,
    pub baseline_p: f64,
}

/// Exponential peak-decay fit peak(k) = offset + amplitude·exp(−rate·k).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayFit {
    pub amplitude_kpa: f64,
    pub rate_per_cycle: f64,
    pub offset_kpa: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleStats {
    pub cycles: Vec<CycleRecord>,
    pub failure_cycle: Option<usize>,
    pub decay: Option<DecayFit>,
}

fn rising_crossings(samples: &[(f64, f64)], threshold: f64, min_gap_s: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for k in 1..samples.len() {
        if samples[k - 1].1 < threshold && samples[k].1 >= threshold {
            if let Some(&last) = out.last() {
                if samples[k].0 - samples[last].0 < min_gap_s {
                    continue;
                }
            }
            out.push(k);
        }
    }
    out
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Segment a cyclic pressurization log into cycles by threshold crossing.
///
/// The threshold sits at baseline + 50% of the median peak amplitude, found
/// in two passes so the amplitude estimate does not depend on outlier peaks.
/// Crossings closer than 75% of `period_hint` are merged. A failure cycle is
/// the first cycle whose peak amplitude falls below 50% of the median peak
/// of the first 10 cycles; a trace that keeps running for more than a period
/// beyond the last detected cycle is also counted as failed on the following
/// cycle.
pub fn segment_cycles(trace: &PressureTrace, period_hint: f64) -> Result<CycleStats> {
    trace.validate()?;
    if period_hint <= 0.0 {
        return Err(Error::invalid("period hint must be positive"));
    }
    let samples = &trace.samples;
    if samples.len() < 4 {
        return Err(Error::Analysis("fewer than 2 cycles detected".into()));
    }
    let p_min = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let p_max = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    if p_max - p_min <= 0.0 {
        return Err(Error::Analysis("flat trace, no cycles".into()));
    }
    let min_gap = 0.75 * period_hint;

    // Pass 1: crude half-range threshold to estimate the median amplitude.
    let crude_thr = p_min + 0.5 * (p_max - p_min);
    let crude = rising_crossings(samples, crude_thr, min_gap);
    if crude.len() < 2 {
        return Err(Error::Analysis("fewer than 2 cycles detected".into()));
    }
    let mut amplitudes: Vec<f64> = Vec::new();
    for w in crude.windows(2) {
        let peak = samples[w[0]..w[1]].iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        amplitudes.push(peak - p_min);
    }
    let med_amp = median(&mut amplitudes);

    // Pass 2: final threshold from the median amplitude.
    let threshold = p_min + 0.5 * med_amp;
    let starts = rising_crossings(samples, threshold, min_gap);
    if starts.len() < 2 {
        return Err(Error::Analysis("fewer than 2 cycles detected".into()));
    }

    let mut cycles: Vec<CycleRecord> = Vec::new();
    for (c, w) in starts.windows(2).enumerate() {
        let seg = &samples[w[0]..w[1]];
        cycles.push(CycleRecord {
            index: c + 1,
            start_t: samples[w[0]].0,
            peak_p: seg.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
            baseline_p: seg.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        });
    }
    // Trailing cycle: from the last crossing to at most one period onward.
    let last = *starts.last().unwrap();
    let t_end = samples[last].0 + period_hint;
    let seg: Vec<&(f64, f64)> = samples[last..].iter().take_while(|s| s.0 <= t_end).collect();
    if seg.len() >= 2 {
        cycles.push(CycleRecord {
            index: cycles.len() + 1,
            start_t: samples[last].0,
            peak_p: seg.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
            baseline_p: seg.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        });
    }
    if cycles.len() < 2 {
        return Err(Error::Analysis("fewer than 2 cycles detected".into()));
    }

    // Failure: amplitude collapse relative to the first 10 cycles.
    let n_ref = cycles.len().min(10);
    let mut ref_peaks: Vec<f64> = cycles[..n_ref].iter().map(|c| c.peak_p - p_min).collect();
    let ref_amp = median(&mut ref_peaks);
    let mut failure_cycle = cycles
        .iter()
        .find(|c| c.peak_p - p_min < 0.5 * ref_amp)
        .map(|c| c.index);
    // Silence after the last cycle longer than a period counts as failure of
    // the next cycle.
    if failure_cycle.is_none() {
        let trace_end = samples.last().unwrap().0;
        let last_cycle_end = cycles.last().unwrap().start_t + period_hint;
        if trace_end - last_cycle_end > 1.25 * period_hint {
            failure_cycle = Some(cycles.len() + 1);
        }
    }

    Ok(CycleStats { cycles, failure_cycle, decay: None })
}

/// Fit peak(k) = offset + amplitude·exp(−rate·k) over the pre-failure cycles.
pub fn fit_peak_decay(stats: &CycleStats) -> Result<DecayFit> {
    let n_use = match stats.failure_cycle {
        Some(f) => stats.cycles.iter().filter(|c| c.index < f).count(),
        None => stats.cycles.len(),
    };
    if n_use < 10 {
        return Err(Error::Analysis("need at least 10 pre-failure cycles".into()));
    }
    let peaks: Vec<(f64, f64)> = stats.cycles[..n_use]
        .iter()
        .map(|c| (c.index as f64, c.peak_p))
        .collect();
    let lo = peaks.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = peaks.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Ok(DecayFit {
            amplitude_kpa: 0.0,
            rate_per_cycle: 0.0,
            offset_kpa: peaks.iter().map(|p| p.1).sum::<f64>() / peaks.len() as f64,
            converged: true,
        });
    }
    let k_span = peaks.last().unwrap().0 - peaks[0].0;
    let initial = [lo, hi - lo, 1.0 / k_span.max(1.0)];
    let outcome = numeric::damped_least_squares(
        &initial,
        |p| {
            peaks
                .iter()
                .map(|&(k, y)| p[0] + p[1] * (-p[2] * k).exp() - y)
                .collect()
        },
        |p| {
            p[2] = p[2].max(0.0);
        },
    );
    Ok(DecayFit {
        amplitude_kpa: outcome.params[1],
        rate_per_cycle: outcome.params[2],
        offset_kpa: outcome.params[0],
        converged: outcome.converged,
    })
}

/// Bending curvature from tracked markers.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurvatureEstimate {
    pub radius_mm: f64,
    pub curvature_per_mm: f64,
    pub bend_angle_deg: f64,
    pub center: (f64, f64),
}

/// Algebraic (linear least-squares) circle fit through marker points; the
/// bend angle is the arc swept between the first and last markers around the
/// fitted center. Collinear markers report zero curvature with an infinite
/// radius.
pub fn curvature_from_markers(points: &[(f64, f64)]) -> Result<CurvatureEstimate> {
    if points.len() < 3 {
        return Err(Error::invalid("need at least 3 marker points"));
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
    let scale = points
        .iter()
        .map(|&(x, y)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt())
        .fold(0.0, f64::max)
        .max(1e-300);

    // Collinearity test against the principal line.
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - cx) * (x - cx);
        sxy += (x - cx) * (y - cy);
        syy += (y - cy) * (y - cy);
    }
    let cov = nalgebra::Matrix2::new(sxx, sxy, sxy, syy);
    let eig = nalgebra::SymmetricEigen::new(cov);
    let lmin = eig.eigenvalues[0].min(eig.eigenvalues[1]);
    let lmax = eig.eigenvalues[0].max(eig.eigenvalues[1]);
    if lmin <= 1e-18 * lmax.max(1e-300) {
        return Ok(CurvatureEstimate {
            radius_mm: f64::INFINITY,
            curvature_per_mm: 0.0,
            bend_angle_deg: 0.0,
            center: (f64::NAN, f64::NAN),
        });
    }

    // Kåsa fit on centered coordinates: x² + y² = a·x + b·y + c.
    let mut a_mat = nalgebra::DMatrix::<f64>::zeros(points.len(), 3);
    let mut rhs = nalgebra::DVector::<f64>::zeros(points.len());
    for (i, &(x, y)) in points.iter().enumerate() {
        let (u, v) = ((x - cx) / scale, (y - cy) / scale);
        a_mat[(i, 0)] = u;
        a_mat[(i, 1)] = v;
        a_mat[(i, 2)] = 1.0;
        rhs[i] = u * u + v * v;
    }
    let sol = (a_mat.transpose() * &a_mat)
        .cholesky()
        .ok_or_else(|| Error::Geometry("circle fit is singular".into()))?
        .solve(&(a_mat.transpose() * rhs));
    let (uc, vc) = (sol[0] / 2.0, sol[1] / 2.0);
    let r = (sol[2] + uc * uc + vc * vc).max(0.0).sqrt() * scale;
    let center = (cx + uc * scale, cy + vc * scale);

    let ang = |p: (f64, f64)| (p.1 - center.1).atan2(p.0 - center.0);
    // Unwrap marker angles along the ordered chain for a continuous sweep.
    let mut prev = ang(points[0]);
    let mut total = 0.0;
    for &pt in &points[1..] {
        let mut a = ang(pt);
        while a - prev > std::f64::consts::PI {
            a -= 2.0 * std::f64::consts::PI;
        }
        while a - prev < -std::f64::consts::PI {
            a += 2.0 * std::f64::consts::PI;
        }
        total += a - prev;
        prev = a;
    }
    Ok(CurvatureEstimate {
        radius_mm: r,
        curvature_per_mm: 1.0 / r,
        bend_angle_deg: total.abs().to_degrees(),
        center,
    })
}

/// Mean force over the most stable (minimum-variance) sliding window of the
/// given duration.
pub fn plateau_force(trace: &ForceTrace, window: f64) -> Result<f64> {
    if trace.samples.len() < 2 {
        return Err(Error::invalid("force trace too short"));
    }
    if window <= 0.0 {
        return Err(Error::invalid("window must be positive"));
    }
    let s = &trace.samples;
    let span = s.last().unwrap().0 - s[0].0;
    if span < window {
        return Err(Error::invalid("trace shorter than the averaging window"));
    }
    let mut best = (f64::INFINITY, 0.0);
    let mut j = 0usize;
    for i in 0..s.len() {
        while j < s.len() && s[j].0 - s[i].0 <= window {
            j += 1;
        }
        let seg = &s[i..j];
        if seg.len() < 2 || seg.last().unwrap().0 - seg[0].0 < 0.95 * window {
            continue;
        }
        let mean = seg.iter().map(|p| p.1).sum::<f64>() / seg.len() as f64;
        let var = seg.iter().map(|p| (p.1 - mean) * (p.1 - mean)).sum::<f64>() / seg.len() as f64;
        if var < best.0 {
            best = (var, mean);
        }
    }
    if best.0.is_infinite() {
        return Err(Error::Analysis("no full-width window in trace".into()));
    }
    Ok(best.1)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdhesionPeak {
    pub pull_off_force_n: f64,
    pub at: f64,
}

/// Maximum tensile force and its abscissa.
pub fn adhesion_peak(trace: &ForceTrace) -> Result<AdhesionPeak> {
    let best = trace
        .samples
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::invalid("empty force trace"))?;
    Ok(AdhesionPeak { pull_off_force_n: best.1, at: best.0 })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Hysteresis {
    pub max_gap_kpa: f64,
    /// max gap over the larger of the two branch pressure spans.
    pub normalized: f64,
}

/// Maximum pressure gap between loading and unloading branches, resampled on
/// a common force grid.
pub fn sensor_hysteresis(loading: &[(f64, f64)], unloading: &[(f64, f64)]) -> Result<Hysteresis> {
    if loading.len() < 2 || unloading.len() < 2 {
        return Err(Error::invalid("each branch needs at least 2 samples"));
    }
    let mut load = loading.to_vec();
    let mut unload = unloading.to_vec();
    load.sort_by(|a, b| a.0.total_cmp(&b.0));
    unload.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lo = load[0].0.max(unload[0].0);
    let hi = load.last().unwrap().0.min(unload.last().unwrap().0);
    if hi <= lo {
        return Err(Error::Range("branches do not overlap in force".into()));
    }
    let span_of = |b: &[(f64, f64)]| {
        let mn = b.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let mx = b.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        mx - mn
    };
    let span = span_of(&load).max(span_of(&unload));
    let n = 256;
    let mut max_gap = 0.0_f64;
    for k in 0..n {
        let f = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        let pl = numeric::interp_clamped(&load, f);
        let pu = numeric::interp_clamped(&unload, f);
        max_gap = max_gap.max((pl - pu).abs());
    }
    Ok(Hysteresis {
        max_gap_kpa: max_gap,
        normalized: if span > 0.0 { max_gap / span } else { 0.0 },
    })
}

/// Kind of terminal event recorded for a labeled trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembraneEvent {
    Ballooned,
    Ruptured,
}

/// A pressure trace with experiment metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledTrace {
    pub thickness_mm: f64,
    pub infill: String,
    pub event: MembraneEvent,
    pub trace: PressureTrace,
}

/// Per-(thickness, infill) event summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventGroup {
    pub thickness_mm: f64,
    pub infill: String,
    pub n_ballooned: usize,
    pub n_ruptured: usize,
    /// Event pressure read at the pre-drop peak.
    pub ballooning_peak_mean_kpa: Option<f64>,
    pub ballooning_peak_sd_kpa: Option<f64>,
    /// Event pressure read at the post-drop trough, the alternate convention.
    pub ballooning_trough_mean_kpa: Option<f64>,
    pub ballooning_trough_sd_kpa: Option<f64>,
    pub rupture_mean_kpa: Option<f64>,
    pub rupture_sd_kpa: Option<f64>,
    /// mean rupture − mean ballooning (peak convention).
    pub margin_kpa: Option<f64>,
    pub positive_margin: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventReport {
    pub groups: Vec<EventGroup>,
    /// Ballooning means strictly increase with thickness within each infill
    /// family (requires at least two groups with ballooning data).
    pub monotone_in_thickness: bool,
    pub warnings: Vec<String>,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Summarize ballooning/rupture event pressures per (thickness, infill).
///
/// Ballooning pressure is reported under both conventions (pre-drop peak and
/// post-drop trough); a ballooned trace without a four-phase signature falls
/// back to its maximum pressure for both.
pub fn ballooning_rupture_report(traces: &[LabeledTrace]) -> Result<EventReport> {
    if traces.is_empty() {
        return Err(Error::invalid("no traces supplied"));
    }
    let mut keys: Vec<(u64, String)> = Vec::new();
    let key_of = |t: &LabeledTrace| (t.thickness_mm.to_bits(), t.infill.clone());
    for t in traces {
        let k = key_of(t);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.sort_by(|a, b| {
        f64::from_bits(a.0)
            .total_cmp(&f64::from_bits(b.0))
            .then_with(|| a.1.cmp(&b.1))
    });

    let mut groups = Vec::new();
    let mut warnings = Vec::new();
    for key in &keys {
        let members: Vec<&LabeledTrace> = traces.iter().filter(|t| key_of(t) == *key).collect();
        let mut peak_ball = Vec::new();
        let mut trough_ball = Vec::new();
        let mut rupture = Vec::new();
        for t in &members {
            let p_max = t
                .trace
                .samples
                .iter()
                .map(|s| s.1)
                .fold(f64::NEG_INFINITY, f64::max);
            match t.event {
                MembraneEvent::Ruptured => rupture.push(p_max),
                MembraneEvent::Ballooned => match detect_inflation_phases(&t.trace)? {
                    PhaseDetection::Marks(m) => {
                        peak_ball.push(t.trace.samples[m.ii_peak].1);
                        trough_ball.push(t.trace.samples[m.iii_trough].1);
                    }
                    PhaseDetection::NoBallooningSignature => {
                        peak_ball.push(p_max);
                        trough_ball.push(p_max);
                    }
                },
            }
        }
        if peak_ball.is_empty() && rupture.is_empty() {
            warnings.push(format!(
                "group thickness={} infill={} has no samples, omitted",
                f64::from_bits(key.0),
                key.1
            ));
            continue;
        }
        let (bp, bps) = if peak_ball.is_empty() { (None, None) } else {
            let (m, s) = mean_sd(&peak_ball);
            (Some(m), Some(s))
        };
        let (bt, bts) = if trough_ball.is_empty() { (None, None) } else {
            let (m, s) = mean_sd(&trough_ball);
            (Some(m), Some(s))
        };
        let (rm, rs) = if rupture.is_empty() { (None, None) } else {
            let (m, s) = mean_sd(&rupture);
            (Some(m), Some(s))
        };
        let margin = match (rm, bp) {
            (Some(r), Some(b)) => Some(r - b),
            _ => None,
        };
        groups.push(EventGroup {
            thickness_mm: f64::from_bits(key.0),
            infill: key.1.clone(),
            n_ballooned: peak_ball.len(),
            n_ruptured: rupture.len(),
            ballooning_peak_mean_kpa: bp,
            ballooning_peak_sd_kpa: bps,
            ballooning_trough_mean_kpa: bt,
            ballooning_trough_sd_kpa: bts,
            rupture_mean_kpa: rm,
            rupture_sd_kpa: rs,
            margin_kpa: margin,
            positive_margin: margin.map(|m| m > 0.0),
        });
    }

    // Monotone-in-thickness check per infill family.
    let mut monotone = false;
    let infills: Vec<String> = {
        let mut v: Vec<String> = groups.iter().map(|g| g.infill.clone()).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    };
    for infill in &infills {
        let series: Vec<f64> = groups
            .iter()
            .filter(|g| &g.infill == infill)
            .filter_map(|g| g.ballooning_peak_mean_kpa)
            .collect();
        if series.len() >= 2 && series.windows(2).all(|w| w[1] > w[0]) {
            monotone = true;
        } else if series.len() >= 2 {
            monotone = false;
            break;
        }
    }

    Ok(EventReport { groups, monotone_in_thickness: monotone, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn trace_from(p: Vec<f64>, dt: f64) -> PressureTrace {
        PressureTrace::new(
            p.into_iter()
                .enumerate()
                .map(|(i, v)| (i as f64 * dt, v))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn phases_on_piecewise_trace() {
        // 2 s flat baseline, rise to 40, dip to 25, recover to 39.
        let dt = 0.01;
        let mut p = vec![0.0; 200];
        let rise_start = p.len();
        for k in 0..300 {
            p.push(40.0 * (k + 1) as f64 / 300.0);
        }
        let peak_idx = p.len() - 1;
        for k in 0..150 {
            p.push(40.0 - 15.0 * (k + 1) as f64 / 150.0);
        }
        let trough_idx = p.len() - 1;
        for k in 0..200 {
            p.push(25.0 + 14.0 * (k + 1) as f64 / 200.0);
        }
        let trace = trace_from(p.clone(), dt);
        let marks = detect_inflation_phases(&trace).unwrap().marks().unwrap();
        assert!((marks.i_open as i64 - rise_start as i64).abs() <= 2);
        assert!((marks.ii_peak as i64 - peak_idx as i64).abs() <= 1);
        assert!((marks.iii_trough as i64 - trough_idx as i64).abs() <= 1);
        assert!(marks.iv_recover > marks.iii_trough);
        assert!(p[marks.iv_recover] >= 40.0 - 0.1 * 15.0 - 1e-9);
        assert!(marks.i_open < marks.ii_peak && marks.ii_peak < marks.iii_trough);
    }

    #[test]
    fn monotone_ramp_has_no_signature() {
        let p: Vec<f64> = (0..500).map(|k| 40.0 * k as f64 / 499.0).collect();
        let trace = trace_from(p, 0.01);
        assert!(matches!(
            detect_inflation_phases(&trace).unwrap(),
            PhaseDetection::NoBallooningSignature
        ));
    }

    #[test]
    fn phases_on_simulated_ballooning() {
        use crate::inflation::{self, Infill, MembraneSpec};
        use crate::material::HyperelasticModel;
        let spec = MembraneSpec {
            radius_a: 21.0,
            thickness_t0: 0.6,
            layers: 3,
            infill: Infill::Lines,
            material: HyperelasticModel::Gent { mu: 0.1, jm: 100.0 },
        };
        let balloon = inflation::find_ballooning(&spec).unwrap();
        assert!(balloon.found);
        let trace = inflation::simulate_source_coupled(
            &spec,
            1.5 * balloon.p_balloon_kpa,
            2.0e5,
            10.0,
            1e-3,
        )
        .unwrap();
        // A quiet second before the valve opens gives the detector its
        // pre-inflation noise baseline, as in a recorded experiment.
        let mut samples: Vec<(f64, f64)> = (0..1000).map(|k| (k as f64 * 1e-3, 0.0)).collect();
        samples.extend(trace.samples.iter().map(|&(t, p)| (t + 1.0, p)));
        let ptrace = PressureTrace::new(samples).unwrap();
        let marks = detect_inflation_phases(&ptrace).unwrap().marks().unwrap();
        let p: Vec<f64> = ptrace.samples.iter().map(|s| s.1).collect();
        assert!(marks.i_open < marks.ii_peak);
        assert!(marks.ii_peak < marks.iii_trough);
        assert!(marks.iii_trough < marks.iv_recover);
        assert!(p[marks.iii_trough] < p[marks.ii_peak]);
        assert!(p[marks.iv_recover] >= p[marks.iii_trough]);
    }

    #[test]
    fn stretch_semicircle() {
        let pts: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / 49.0;
                (21.0 * a.cos(), 21.0 * a.sin())
            })
            .collect();
        let profile = MembraneProfile::new(pts, 42.0).unwrap();
        let est = stretch_from_profile(&profile).unwrap();
        assert_relative_eq!(est.stretch, std::f64::consts::FRAC_PI_2, epsilon = 1e-3);
        assert_relative_eq!(est.strain_pct, (est.stretch - 1.0) * 100.0);
    }

    #[test]
    fn stretch_flat_profile_is_one() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| (-21.0 + 42.0 * i as f64 / 19.0, 0.0)).collect();
        let profile = MembraneProfile::new(pts, 42.0).unwrap();
        let est = stretch_from_profile(&profile).unwrap();
        assert_relative_eq!(est.stretch, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn stretch_matches_quadrature_oracle() {
        let (a, b) = (30.0, 15.0);
        let pts: Vec<(f64, f64)> = (0..100)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 100.0;
                (a * t.cos(), b * t.sin())
            })
            .collect();
        let profile = MembraneProfile::new(pts, 60.0).unwrap();
        let est = stretch_from_profile(&profile).unwrap();
        // Oracle: composite Simpson at 10x resolution of the same integral.
        let n = 20000;
        let h = std::f64::consts::PI / n as f64;
        let f = |t: f64| {
            let (s, c) = t.sin_cos();
            (a * a * s * s + b * b * c * c).sqrt()
        };
        let mut oracle = f(0.0) + f(std::f64::consts::PI);
        for k in 1..n {
            oracle += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        oracle *= h / 3.0;
        assert_relative_eq!(est.stretch, oracle / 60.0, max_relative = 1e-6);
    }

    #[test]
    fn stretch_arc_over_chord_property() {
        // Circle arcs with L0 = chord reproduce arc/chord within 1e-3.
        for &half_angle in &[0.4_f64, 0.9, 1.4] {
            let r = 25.0;
            let pts: Vec<(f64, f64)> = (0..40)
                .map(|i| {
                    let a = -half_angle + 2.0 * half_angle * i as f64 / 39.0;
                    (r * a.sin(), r * a.cos())
                })
                .collect();
            let chord = 2.0 * r * half_angle.sin();
            let arc = 2.0 * r * half_angle;
            let profile = MembraneProfile::new(pts, chord).unwrap();
            let est = stretch_from_profile(&profile).unwrap();
            assert_relative_eq!(est.ellipse.semi_major, r, epsilon = 1e-6 * r);
            assert_relative_eq!(est.stretch, arc / chord, epsilon = 1e-3);
        }
    }

    fn cyclic_trace(n_cycles: usize, period: f64, amplitude: f64, fail_from: Option<usize>) -> PressureTrace {
        // 20 samples per cycle: 1.5 s up at amplitude, 6.5 s at baseline.
        let per_cycle = 20usize;
        let dt = period / per_cycle as f64;
        let mut samples = Vec::new();
        for c in 0..n_cycles {
            let dead = fail_from.map(|f| c + 1 >= f).unwrap_or(false);
            for k in 0..per_cycle {
                let t = (c * per_cycle + k) as f64 * dt;
                let phase = k as f64 * dt;
                let p = if !dead && (1.0..2.5).contains(&phase) { amplitude } else { 0.0 };
                samples.push((t, p));
            }
        }
        PressureTrace::new(samples).unwrap()
    }

    #[test]
    fn thousand_cycles_no_failure() {
        let trace = cyclic_trace(1000, 8.0, 5.7, None);
        let stats = segment_cycles(&trace, 8.0).unwrap();
        assert_eq!(stats.cycles.len(), 1000);
        assert_eq!(stats.failure_cycle, None);
        assert_relative_eq!(stats.cycles[499].peak_p, 5.7);
    }

    #[test]
    fn failure_detected_at_681() {
        let trace = cyclic_trace(1000, 8.0, 4.75, Some(681));
        let stats = segment_cycles(&trace, 8.0).unwrap();
        assert_eq!(stats.failure_cycle, Some(681));
    }

    #[test]
    fn two_clean_cycles() {
        let trace = cyclic_trace(2, 8.0, 5.0, None);
        let stats = segment_cycles(&trace, 8.0).unwrap();
        assert_eq!(stats.cycles.len(), 2);
        assert_relative_eq!(stats.cycles[0].peak_p, 5.0);
        assert_relative_eq!(stats.cycles[1].peak_p, 5.0);
        assert_relative_eq!(stats.cycles[0].baseline_p, 0.0);
    }

    #[test]
    fn cycle_count_invariant_under_shift_and_offset() {
        let base = cyclic_trace(50, 8.0, 5.7, None);
        let n0 = segment_cycles(&base, 8.0).unwrap().cycles.len();
        let shifted = PressureTrace::new(
            base.samples.iter().map(|&(t, p)| (t + 123.4, p + 2.5)).collect(),
        )
        .unwrap();
        let n1 = segment_cycles(&shifted, 8.0).unwrap().cycles.len();
        assert_eq!(n0, n1);
    }

    #[test]
    fn single_cycle_errors() {
        let trace = cyclic_trace(1, 8.0, 5.0, None);
        assert!(segment_cycles(&trace, 8.0).is_err());
    }

    fn stats_from_peaks(peaks: &[f64]) -> CycleStats {
        CycleStats {
            cycles: peaks
                .iter()
                .enumerate()
                .map(|(i, &p)| CycleRecord {
                    index: i + 1,
                    start_t: i as f64 * 8.0,
                    peak_p: p,
                    baseline_p: 0.0,
                })
                .collect(),
            failure_cycle: None,
            decay: None,
        }
    }

    #[test]
    fn decay_constant_peaks() {
        let stats = stats_from_peaks(&vec![5.7; 50]);
        let fit = fit_peak_decay(&stats).unwrap();
        assert_relative_eq!(fit.rate_per_cycle, 0.0);
        assert!(fit.amplitude_kpa.abs() < 1e-9);
        assert_relative_eq!(fit.offset_kpa, 5.7, epsilon = 1e-9);
    }

    #[test]
    fn decay_recovers_exponential() {
        let peaks: Vec<f64> = (1..=700)
            .map(|k| 80.0 * (-(k as f64) / 300.0).exp() + 10.0)
            .collect();
        let fit = fit_peak_decay(&stats_from_peaks(&peaks)).unwrap();
        assert!(fit.converged);
        assert_relative_eq!(fit.offset_kpa, 10.0, max_relative = 0.01);
        assert_relative_eq!(fit.amplitude_kpa, 80.0, max_relative = 0.01);
        assert_relative_eq!(fit.rate_per_cycle, 1.0 / 300.0, max_relative = 0.01);
    }

    #[test]
    fn decay_recovers_noisy_exponential() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let peaks: Vec<f64> = (1..=700)
            .map(|k| {
                80.0 * (-(k as f64) / 300.0).exp() + 10.0 + rng.gen_range(-1.0..1.0)
            })
            .collect();
        let fit = fit_peak_decay(&stats_from_peaks(&peaks)).unwrap();
        assert_relative_eq!(fit.offset_kpa, 10.0, max_relative = 0.10);
        assert_relative_eq!(fit.amplitude_kpa, 80.0, max_relative = 0.10);
        assert_relative_eq!(fit.rate_per_cycle, 1.0 / 300.0, max_relative = 0.10);
    }

    #[test]
    fn too_few_cycles_for_decay() {
        let stats = stats_from_peaks(&[1.0; 5]);
        assert!(fit_peak_decay(&stats).is_err());
    }

    #[test]
    fn curvature_unit_circle() {
        let pts = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)];
        let est = curvature_from_markers(&pts).unwrap();
        assert_relative_eq!(est.curvature_per_mm, 1.0, epsilon = 1e-9);
        assert_relative_eq!(est.radius_mm, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn semicircle_bend_angle_is_180() {
        // Actuator of arc length 60 mm bent into a semicircle: r = 60/pi.
        let r = 60.0 / std::f64::consts::PI;
        let pts: Vec<(f64, f64)> = (0..9)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / 8.0;
                (r * a.cos(), r * a.sin())
            })
            .collect();
        let est = curvature_from_markers(&pts).unwrap();
        assert_relative_eq!(est.bend_angle_deg, 180.0, epsilon = 0.5);
        assert_relative_eq!(est.radius_mm, r, max_relative = 1e-6);
    }

    #[test]
    fn collinear_markers_zero_curvature() {
        let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)];
        let est = curvature_from_markers(&pts).unwrap();
        assert_eq!(est.curvature_per_mm, 0.0);
        assert!(est.radius_mm.is_infinite());
        assert_eq!(est.bend_angle_deg, 0.0);
    }

    #[test]
    fn curvature_rigid_motion_invariant() {
        let r = 38.2;
        let pts: Vec<(f64, f64)> = (0..7)
            .map(|i| {
                let a = 1.2 * i as f64 / 6.0;
                (r * a.cos(), r * a.sin())
            })
            .collect();
        let base = curvature_from_markers(&pts).unwrap();
        let rot = 0.77_f64;
        let moved: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(x, y)| {
                (
                    5.0 + x * rot.cos() - y * rot.sin(),
                    -3.0 + x * rot.sin() + y * rot.cos(),
                )
            })
            .collect();
        let m = curvature_from_markers(&moved).unwrap();
        assert_relative_eq!(m.curvature_per_mm, base.curvature_per_mm, max_relative = 1e-9);
        assert_relative_eq!(m.bend_angle_deg, base.bend_angle_deg, max_relative = 1e-9);
    }

    #[test]
    fn plateau_constant_trace() {
        let samples: Vec<(f64, f64)> = (0..300).map(|k| (k as f64 * 0.1, 13.33)).collect();
        let trace = ForceTrace::new(samples, ForceAbscissa::TimeS).unwrap();
        assert_relative_eq!(plateau_force(&trace, 25.0).unwrap(), 13.33, epsilon = 1e-9);
    }

    #[test]
    fn plateau_after_ramp() {
        let mut samples = Vec::new();
        for k in 0..100 {
            samples.push((k as f64 * 0.1, 6.34 * k as f64 / 100.0));
        }
        for k in 100..500 {
            samples.push((k as f64 * 0.1, 6.34));
        }
        let trace = ForceTrace::new(samples, ForceAbscissa::TimeS).unwrap();
        let f = plateau_force(&trace, 25.0).unwrap();
        assert_relative_eq!(f, 6.34, epsilon = 0.01);
    }

    #[test]
    fn plateau_noise_near_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<(f64, f64)> = (0..400)
            .map(|k| (k as f64 * 0.1, rng.gen_range(-0.05..0.05)))
            .collect();
        let trace = ForceTrace::new(samples, ForceAbscissa::TimeS).unwrap();
        assert!(plateau_force(&trace, 25.0).unwrap().abs() < 0.05);
    }

    #[test]
    fn adhesion_constructed_pull_off() {
        let samples: Vec<(f64, f64)> = (0..100)
            .map(|k| {
                let d = k as f64 * 0.1;
                (d, 12.0 * (-(d - 5.0) * (d - 5.0)).exp())
            })
            .collect();
        let trace = ForceTrace::new(samples, ForceAbscissa::DisplacementMm).unwrap();
        let peak = adhesion_peak(&trace).unwrap();
        assert_relative_eq!(peak.pull_off_force_n, 12.0, epsilon = 1e-6);
        assert_relative_eq!(peak.at, 5.0, epsilon = 0.1);
    }

    #[test]
    fn adhesion_ordering_gel_vs_dry() {
        let gel: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, 11.0 * ((k as f64) / 49.0))).collect();
        let dry: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, 0.6 * ((k as f64) / 49.0))).collect();
        let pg = adhesion_peak(&ForceTrace::new(gel, ForceAbscissa::TimeS).unwrap()).unwrap();
        let pd = adhesion_peak(&ForceTrace::new(dry, ForceAbscissa::TimeS).unwrap()).unwrap();
        assert!(pg.pull_off_force_n > 10.0);
        assert!(pd.pull_off_force_n < 1.0);
    }

    #[test]
    fn adhesion_monotone_decreasing_takes_first() {
        let samples: Vec<(f64, f64)> = (0..20).map(|k| (k as f64, 10.0 - k as f64)).collect();
        let peak = adhesion_peak(&ForceTrace::new(samples, ForceAbscissa::TimeS).unwrap()).unwrap();
        assert_relative_eq!(peak.at, 0.0);
        assert_relative_eq!(peak.pull_off_force_n, 10.0);
    }

    #[test]
    fn hysteresis_identical_branches() {
        let branch: Vec<(f64, f64)> = (0..30).map(|k| (k as f64 * 0.1, k as f64 * 0.05)).collect();
        let h = sensor_hysteresis(&branch, &branch).unwrap();
        assert_relative_eq!(h.max_gap_kpa, 0.0);
        assert_relative_eq!(h.normalized, 0.0);
    }

    #[test]
    fn hysteresis_offset_branches() {
        // Each branch spans 2 kPa; unloading offset by 0.2 kPa.
        let load: Vec<(f64, f64)> = (0..=20).map(|k| (k as f64 * 0.5, k as f64 * 0.1)).collect();
        let unload: Vec<(f64, f64)> = (0..=20).map(|k| (k as f64 * 0.5, k as f64 * 0.1 + 0.2)).collect();
        let h = sensor_hysteresis(&load, &unload).unwrap();
        assert_relative_eq!(h.max_gap_kpa, 0.2, epsilon = 1e-12);
        assert_relative_eq!(h.normalized, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn hysteresis_order_and_swap_insensitive() {
        let load: Vec<(f64, f64)> = (0..=20).map(|k| (k as f64 * 0.5, (k as f64 * 0.1).powf(1.1))).collect();
        let unload: Vec<(f64, f64)> = (0..=20).map(|k| (k as f64 * 0.5, k as f64 * 0.1 + 0.15)).collect();
        let reversed: Vec<(f64, f64)> = unload.iter().rev().copied().collect();
        let a = sensor_hysteresis(&load, &unload).unwrap();
        let b = sensor_hysteresis(&load, &reversed).unwrap();
        let c = sensor_hysteresis(&unload, &load).unwrap();
        assert_relative_eq!(a.max_gap_kpa, b.max_gap_kpa);
        assert_relative_eq!(a.max_gap_kpa, c.max_gap_kpa);
    }

    #[test]
    fn hysteresis_no_overlap_errors() {
        let load = vec![(0.0, 0.0), (1.0, 1.0)];
        let unload = vec![(2.0, 0.0), (3.0, 1.0)];
        assert!(matches!(
            sensor_hysteresis(&load, &unload),
            Err(Error::Range(_))
        ));
    }

    fn ramp_to(peak: f64) -> PressureTrace {
        let mut samples = Vec::new();
        for k in 0..100 {
            samples.push((k as f64 * 0.05, 0.0));
        }
        for k in 0..400 {
            samples.push((5.0 + k as f64 * 0.05, peak * (k + 1) as f64 / 400.0));
        }
        PressureTrace::new(samples).unwrap()
    }

    #[test]
    fn report_identical_traces() {
        let t = LabeledTrace {
            thickness_mm: 0.6,
            infill: "lines".into(),
            event: MembraneEvent::Ballooned,
            trace: ramp_to(35.0),
        };
        let report = ballooning_rupture_report(&[t.clone(), t.clone(), t]).unwrap();
        assert_eq!(report.groups.len(), 1);
        let g = &report.groups[0];
        assert_relative_eq!(g.ballooning_peak_mean_kpa.unwrap(), 35.0, epsilon = 1e-9);
        assert_relative_eq!(g.ballooning_peak_sd_kpa.unwrap(), 0.0);
    }

    #[test]
    fn report_positive_margin_and_monotone() {
        let mut traces = Vec::new();
        for (thick, ball, rupt) in [(0.2, 10.0, 20.0), (0.6, 35.0, 50.0), (1.2, 60.0, 80.0)] {
            traces.push(LabeledTrace {
                thickness_mm: thick,
                infill: "lines".into(),
                event: MembraneEvent::Ballooned,
                trace: ramp_to(ball),
            });
            traces.push(LabeledTrace {
                thickness_mm: thick,
                infill: "lines".into(),
                event: MembraneEvent::Ruptured,
                trace: ramp_to(rupt),
            });
        }
        let report = ballooning_rupture_report(&traces).unwrap();
        assert_eq!(report.groups.len(), 3);
        assert!(report.groups.iter().all(|g| g.positive_margin == Some(true)));
        assert!(report.monotone_in_thickness);
        assert!(report.warnings.is_empty());
    }
}
