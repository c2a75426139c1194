//! Hyperelastic constitutive models, uniaxial/equibiaxial stress evaluation,
//! and fitting model parameters to measured engineering stress-strain curves.
//!
//! All models are incompressible. Stretches are `λ = 1 + ε`; compression
//! (`λ < 1`) is rejected everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

/// Incompressible hyperelastic material model. Stress unit MPa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HyperelasticModel {
    NeoHookean { mu: f64 },
    MooneyRivlin { c10: f64, c01: f64 },
    /// Up to three (mu_i, alpha_i) terms.
    Ogden { terms: Vec<(f64, f64)> },
    Gent { mu: f64, jm: f64 },
}

/// Model family tag used to select what [`fit_model`] fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    NeoHookean,
    MooneyRivlin,
    /// Number of Ogden terms (1..=3).
    Ogden(usize),
    Gent,
}

impl ModelFamily {
    pub fn parameter_count(&self) -> usize {
        match self {
            ModelFamily::NeoHookean => 1,
            ModelFamily::MooneyRivlin => 2,
            ModelFamily::Ogden(k) => 2 * k,
            ModelFamily::Gent => 2,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neohookean" | "neo-hookean" | "neo_hookean" => Ok(ModelFamily::NeoHookean),
            "mooneyrivlin" | "mooney-rivlin" | "mooney_rivlin" => Ok(ModelFamily::MooneyRivlin),
            "ogden" | "ogden1" => Ok(ModelFamily::Ogden(1)),
            "ogden2" => Ok(ModelFamily::Ogden(2)),
            "ogden3" => Ok(ModelFamily::Ogden(3)),
            "gent" => Ok(ModelFamily::Gent),
            other => Err(Error::invalid(format!("unknown model family '{other}'"))),
        }
    }
}

impl HyperelasticModel {
    pub fn family(&self) -> ModelFamily {
        match self {
            HyperelasticModel::NeoHookean { .. } => ModelFamily::NeoHookean,
            HyperelasticModel::MooneyRivlin { .. } => ModelFamily::MooneyRivlin,
            HyperelasticModel::Ogden { terms } => ModelFamily::Ogden(terms.len()),
            HyperelasticModel::Gent { .. } => ModelFamily::Gent,
        }
    }

    /// Ground-state shear modulus, MPa.
    pub fn ground_shear_modulus(&self) -> f64 {
        match self {
            HyperelasticModel::NeoHookean { mu } => *mu,
            HyperelasticModel::MooneyRivlin { c10, c01 } => 2.0 * (c10 + c01),
            HyperelasticModel::Ogden { terms } => {
                0.5 * terms.iter().map(|(m, a)| m * a).sum::<f64>()
            }
            HyperelasticModel::Gent { mu, .. } => *mu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            HyperelasticModel::NeoHookean { mu } => {
                if !(*mu > 0.0) {
                    return Err(Error::invalid("NeoHookean requires mu > 0"));
                }
            }
            HyperelasticModel::MooneyRivlin { .. } => {
                if !(self.ground_shear_modulus() > 0.0) {
                    return Err(Error::invalid("MooneyRivlin requires 2(C10 + C01) > 0"));
                }
            }
            HyperelasticModel::Ogden { terms } => {
                if terms.is_empty() || terms.len() > 3 {
                    return Err(Error::invalid("Ogden requires 1..=3 terms"));
                }
                if !(terms.iter().map(|(m, a)| m * a).sum::<f64>() > 0.0) {
                    return Err(Error::invalid("Ogden requires sum(mu_i * alpha_i) > 0"));
                }
            }
            HyperelasticModel::Gent { mu, jm } => {
                if !(*mu > 0.0) {
                    return Err(Error::invalid("Gent requires mu > 0"));
                }
                if !(*jm > 0.0) {
                    return Err(Error::invalid("Gent requires Jm > 0"));
                }
            }
        }
        Ok(())
    }
}

fn check_tension(stretch: f64) -> Result<()> {
    if !(stretch >= 1.0) {
        return Err(Error::domain(format!(
            "stretch {stretch} < 1: compression is not modeled"
        )));
    }
    Ok(())
}

/// Uniaxial engineering stress at stretch `λ`, MPa.
pub fn uniaxial_eng_stress(model: &HyperelasticModel, stretch: f64) -> Result<f64> {
    check_tension(stretch)?;
    let l = stretch;
    let base = l - l.powi(-2);
    match model {
        HyperelasticModel::NeoHookean { mu } => Ok(mu * base),
        HyperelasticModel::MooneyRivlin { c10, c01 } => Ok(2.0 * base * (c10 + c01 / l)),
        HyperelasticModel::Ogden { terms } => Ok(terms
            .iter()
            .map(|(mu, a)| mu * (l.powf(a - 1.0) - l.powf(-a / 2.0 - 1.0)))
            .sum()),
        HyperelasticModel::Gent { mu, jm } => {
            let i1m3 = l * l + 2.0 / l - 3.0;
            if i1m3 >= *jm {
                return Err(Error::GentLocking {
                    stretch: l,
                    i1m3,
                    jm: *jm,
                });
            }
            Ok(mu * base / (1.0 - i1m3 / jm))
        }
    }
}

/// Equibiaxial Cauchy stress at in-plane stretch `λ` (thickness stretch
/// `λ⁻²`), MPa.
pub fn equibiaxial_cauchy_stress(model: &HyperelasticModel, stretch: f64) -> Result<f64> {
    check_tension(stretch)?;
    let l = stretch;
    let base = l * l - l.powi(-4);
    match model {
        HyperelasticModel::NeoHookean { mu } => Ok(mu * base),
        HyperelasticModel::MooneyRivlin { c10, c01 } => Ok(2.0 * base * (c10 + c01 * l * l)),
        HyperelasticModel::Ogden { terms } => Ok(terms
            .iter()
            .map(|(mu, a)| mu * (l.powf(*a) - l.powf(-2.0 * a)))
            .sum()),
        HyperelasticModel::Gent { mu, jm } => {
            let i1m3 = 2.0 * l * l + l.powi(-4) - 3.0;
            if i1m3 >= *jm {
                return Err(Error::GentLocking {
                    stretch: l,
                    i1m3,
                    jm: *jm,
                });
            }
            Ok(mu * base / (1.0 - i1m3 / jm))
        }
    }
}

/// Ordered engineering strain/stress samples from a tensile test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressStrainCurve {
    /// (strain ε dimensionless, engineering stress MPa), strains strictly increasing.
    pub points: Vec<(f64, f64)>,
    pub label: String,
    pub source: String,
}

impl StressStrainCurve {
    pub fn new(points: Vec<(f64, f64)>, label: impl Into<String>, source: impl Into<String>) -> Result<Self> {
        let curve = StressStrainCurve {
            points,
            label: label.into(),
            source: source.into(),
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::invalid("stress-strain curve has no points"));
        }
        if self.points[0].0 < 0.0 {
            return Err(Error::invalid("first strain must be >= 0"));
        }
        for w in self.points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid("strains must be strictly increasing"));
            }
        }
        for &(e, s) in &self.points {
            if !s.is_finite() || !e.is_finite() {
                return Err(Error::invalid("non-finite sample in curve"));
            }
            if e == 0.0 && s.abs() > 1e-9 {
                return Err(Error::invalid("stress at zero strain must be 0"));
            }
        }
        Ok(())
    }

    /// Linear interpolation of stress at the given strain.
    fn stress_at(&self, strain: f64) -> Result<f64> {
        let first = self.points[0].0;
        let last = self.points[self.points.len() - 1].0;
        if strain < first || strain > last {
            return Err(Error::Range(format!(
                "strain {strain} outside curve range [{first}, {last}]"
            )));
        }
        Ok(numeric::interp_clamped(&self.points, strain))
    }
}

/// Secant modulus σ(ε)/ε at the given strain, MPa.
pub fn secant_modulus(curve: &StressStrainCurve, at_strain: f64) -> Result<f64> {
    if curve.points.len() < 2 {
        return Err(Error::invalid("secant modulus needs at least 2 points"));
    }
    if at_strain <= 0.0 {
        return Err(Error::Range("secant modulus requires strain > 0".into()));
    }
    Ok(curve.stress_at(at_strain)? / at_strain)
}

/// Maximum stress sample and final strain sample of the curve.
pub fn curve_extremes(curve: &StressStrainCurve) -> Result<(f64, f64)> {
    if curve.points.is_empty() {
        return Err(Error::invalid("empty curve"));
    }
    let max_stress = curve.points.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
    let max_strain = curve.points[curve.points.len() - 1].0;
    Ok((max_stress, max_strain))
}

/// Result of fitting a model family to a curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub model: HyperelasticModel,
    pub rms_residual: f64,
    pub max_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn params_of(model: &HyperelasticModel) -> Vec<f64> {
    match model {
        HyperelasticModel::NeoHookean { mu } => vec![*mu],
        HyperelasticModel::MooneyRivlin { c10, c01 } => vec![*c10, *c01],
        HyperelasticModel::Ogden { terms } => terms.iter().flat_map(|&(m, a)| [m, a]).collect(),
        HyperelasticModel::Gent { mu, jm } => vec![*mu, *jm],
    }
}

fn model_from_params(family: ModelFamily, p: &[f64]) -> HyperelasticModel {
    match family {
        ModelFamily::NeoHookean => HyperelasticModel::NeoHookean { mu: p[0] },
        ModelFamily::MooneyRivlin => HyperelasticModel::MooneyRivlin { c10: p[0], c01: p[1] },
        ModelFamily::Ogden(k) => HyperelasticModel::Ogden {
            terms: (0..k).map(|i| (p[2 * i], p[2 * i + 1])).collect(),
        },
        ModelFamily::Gent => HyperelasticModel::Gent { mu: p[0], jm: p[1] },
    }
}

/// Parameter bounds enforced by projection: mu/C10/Jm >= 1e-9,
/// Ogden alphas in [-20, 20].
fn project_params(family: ModelFamily, p: &mut [f64]) {
    const EPS: f64 = 1e-9;
    match family {
        ModelFamily::NeoHookean => p[0] = p[0].max(EPS),
        ModelFamily::MooneyRivlin => p[0] = p[0].max(EPS),
        ModelFamily::Ogden(k) => {
            for i in 0..k {
                p[2 * i] = p[2 * i].max(EPS);
                p[2 * i + 1] = p[2 * i + 1].clamp(-20.0, 20.0);
            }
        }
        ModelFamily::Gent => {
            p[0] = p[0].max(EPS);
            p[1] = p[1].max(EPS);
        }
    }
}

/// Residual on a Gent-locked point: large penalty growing with the overshoot
/// so the minimizer retreats into the valid domain.
const LOCKING_PENALTY: f64 = 1e6;

fn fit_residuals(family: ModelFamily, p: &[f64], data: &[(f64, f64)]) -> Vec<f64> {
    let model = model_from_params(family, p);
    data.iter()
        .map(|&(l, s)| match uniaxial_eng_stress(&model, l) {
            Ok(v) => v - s,
            Err(Error::GentLocking { i1m3, jm, .. }) => LOCKING_PENALTY * (1.0 + i1m3 - jm),
            Err(_) => LOCKING_PENALTY,
        })
        .collect()
}

/// Sum-of-squares fit objective over a curve at the model's parameters.
pub fn fit_objective(model: &HyperelasticModel, curve: &StressStrainCurve) -> Result<f64> {
    let data = stretch_stress_data(curve);
    let r = fit_residuals(model.family(), &params_of(model), &data);
    Ok(r.iter().map(|x| x * x).sum())
}

/// Analytic gradient of [`fit_objective`] with respect to the model's
/// parameter vector (same ordering as the fit uses).
pub fn fit_objective_gradient(model: &HyperelasticModel, curve: &StressStrainCurve) -> Result<Vec<f64>> {
    let data = stretch_stress_data(curve);
    let n = model.family().parameter_count();
    let mut grad = vec![0.0; n];
    for &(l, s) in &data {
        let r = uniaxial_eng_stress(model, l)? - s;
        let dsig = uniaxial_stress_param_gradient(model, l)?;
        for j in 0..n {
            grad[j] += 2.0 * r * dsig[j];
        }
    }
    Ok(grad)
}

/// Partial derivatives of the uniaxial engineering stress with respect to the
/// model parameters, evaluated at stretch `λ`.
pub fn uniaxial_stress_param_gradient(model: &HyperelasticModel, stretch: f64) -> Result<Vec<f64>> {
    check_tension(stretch)?;
    let l = stretch;
    let base = l - l.powi(-2);
    match model {
        HyperelasticModel::NeoHookean { .. } => Ok(vec![base]),
        HyperelasticModel::MooneyRivlin { .. } => Ok(vec![2.0 * base, 2.0 * base / l]),
        HyperelasticModel::Ogden { terms } => {
            let mut g = Vec::with_capacity(2 * terms.len());
            for &(mu, a) in terms {
                let t1 = l.powf(a - 1.0);
                let t2 = l.powf(-a / 2.0 - 1.0);
                g.push(t1 - t2);
                g.push(mu * l.ln() * (t1 + 0.5 * t2));
            }
            Ok(g)
        }
        HyperelasticModel::Gent { mu, jm } => {
            let i1m3 = l * l + 2.0 / l - 3.0;
            if i1m3 >= *jm {
                return Err(Error::GentLocking {
                    stretch: l,
                    i1m3,
                    jm: *jm,
                });
            }
            let d = 1.0 - i1m3 / jm;
            Ok(vec![base / d, -mu * base * i1m3 / (jm * jm * d * d)])
        }
    }
}

fn stretch_stress_data(curve: &StressStrainCurve) -> Vec<(f64, f64)> {
    curve.points.iter().map(|&(e, s)| (1.0 + e, s)).collect()
}

fn initial_guess(family: ModelFamily, data: &[(f64, f64)]) -> Vec<f64> {
    // Linear least squares of sigma against the Neo-Hookean shape function.
    let (mut num, mut den) = (0.0, 0.0);
    for &(l, s) in data {
        let f = l - l.powi(-2);
        num += s * f;
        den += f * f;
    }
    let mu0 = if den > 0.0 { (num / den).max(1e-9) } else { 0.1 };
    match family {
        ModelFamily::NeoHookean => vec![mu0],
        ModelFamily::MooneyRivlin => vec![mu0 / 2.0, 0.0],
        ModelFamily::Ogden(k) => {
            // First term starts at the Neo-Hookean equivalent (alpha = 2).
            let alphas = [2.0, 4.0, -2.0];
            (0..k)
                .flat_map(|i| [if i == 0 { mu0 } else { 0.05 * mu0 }, alphas[i]])
                .collect()
        }
        ModelFamily::Gent => {
            let i1m3_max = data
                .iter()
                .map(|&(l, _)| l * l + 2.0 / l - 3.0)
                .fold(0.0_f64, f64::max);
            vec![mu0, (2.0 * i1m3_max).max(100.0)]
        }
    }
}

/// Fit a model family to a curve by damped least squares on absolute
/// residuals in MPa. Non-convergence is reported in the result, not as an
/// error.
pub fn fit_model(
    curve: &StressStrainCurve,
    family: ModelFamily,
    initial: Option<&HyperelasticModel>,
) -> Result<FitResult> {
    curve.validate()?;
    let n_params = family.parameter_count();
    if let ModelFamily::Ogden(k) = family {
        if k == 0 || k > 3 {
            return Err(Error::invalid("Ogden fit supports 1..=3 terms"));
        }
    }
    if curve.points.len() < n_params + 1 {
        return Err(Error::invalid(format!(
            "insufficient data: {} points for {} parameters (need at least {})",
            curve.points.len(),
            n_params,
            n_params + 1
        )));
    }
    let data = stretch_stress_data(curve);
    let p0 = match initial {
        Some(m) => {
            if m.family() != family {
                return Err(Error::invalid("initial model family does not match requested family"));
            }
            m.validate()?;
            params_of(m)
        }
        None => initial_guess(family, &data),
    };

    let out = numeric::damped_least_squares(
        &p0,
        |p| fit_residuals(family, p, &data),
        |p| project_params(family, p),
    );
    let model = model_from_params(family, &out.params);
    Ok(FitResult {
        model,
        rms_residual: out.rms_residual,
        max_residual: out.max_residual,
        iterations: out.iterations,
        converged: out.converged && out.rms_residual.is_finite(),
    })
}

/// Sample a model's uniaxial response into a synthetic curve.
pub fn synthetic_curve(
    model: &HyperelasticModel,
    stretches: &[f64],
    label: &str,
) -> Result<StressStrainCurve> {
    let mut points = Vec::with_capacity(stretches.len());
    for &l in stretches {
        points.push((l - 1.0, uniaxial_eng_stress(model, l)?));
    }
    StressStrainCurve::new(points, label, "synthetic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn nh(mu: f64) -> HyperelasticModel {
        HyperelasticModel::NeoHookean { mu }
    }

    #[test]
    fn uniaxial_closed_forms() {
        assert_relative_eq!(uniaxial_eng_stress(&nh(1.0), 1.0).unwrap(), 0.0);
        assert_relative_eq!(uniaxial_eng_stress(&nh(0.3), 2.0).unwrap(), 0.525, epsilon = 1e-12);
        let gent = HyperelasticModel::Gent { mu: 0.3, jm: 100.0 };
        assert_relative_eq!(
            uniaxial_eng_stress(&gent, 2.0).unwrap(),
            0.525 / 0.98,
            epsilon = 1e-12
        );
    }

    #[test]
    fn equibiaxial_closed_forms() {
        assert_relative_eq!(equibiaxial_cauchy_stress(&nh(1.0), 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            equibiaxial_cauchy_stress(&nh(0.3), 2.0).unwrap(),
            1.18125,
            epsilon = 1e-12
        );
        let mr = HyperelasticModel::MooneyRivlin { c10: 0.15, c01: 0.0 };
        assert_relative_eq!(
            equibiaxial_cauchy_stress(&mr, 2.0).unwrap(),
            1.18125,
            epsilon = 1e-12
        );
    }

    #[test]
    fn compression_rejected() {
        assert!(uniaxial_eng_stress(&nh(1.0), 0.9).is_err());
        assert!(equibiaxial_cauchy_stress(&nh(1.0), 0.5).is_err());
    }

    #[test]
    fn gent_locking_reported_with_stretch() {
        let gent = HyperelasticModel::Gent { mu: 0.3, jm: 1.0 };
        match uniaxial_eng_stress(&gent, 3.0) {
            Err(Error::GentLocking { stretch, .. }) => assert_relative_eq!(stretch, 3.0),
            other => panic!("expected locking, got {other:?}"),
        }
    }

    #[test]
    fn mooney_rivlin_reduces_to_neo_hookean() {
        let mr = HyperelasticModel::MooneyRivlin { c10: 0.21, c01: 0.0 };
        let m = nh(0.42);
        for i in 1..50 {
            let l = 1.0 + i as f64 * 0.1;
            let a = uniaxial_eng_stress(&mr, l).unwrap();
            let b = uniaxial_eng_stress(&m, l).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn gent_approaches_neo_hookean_for_large_jm() {
        let gent = HyperelasticModel::Gent { mu: 0.3, jm: 1e9 };
        let m = nh(0.3);
        for i in 0..=40 {
            let l = 1.0 + i as f64 * 0.1;
            let a = uniaxial_eng_stress(&gent, l).unwrap();
            let b = uniaxial_eng_stress(&m, l).unwrap();
            if b != 0.0 {
                assert!(((a - b) / b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn stress_slope_positive_at_unity() {
        let models = [
            nh(0.3),
            HyperelasticModel::MooneyRivlin { c10: 0.1, c01 : 0.05 },
            HyperelasticModel::Ogden { terms: vec![(0.2, 2.5), (0.05, -2.0)] },
            HyperelasticModel::Gent { mu: 0.1, jm: 30.0 },
        ];
        let h = 1e-6;
        for m in &models {
            m.validate().unwrap();
            for f in [uniaxial_eng_stress, equibiaxial_cauchy_stress] {
                let d = (f(m, 1.0 + h).unwrap() - f(m, 1.0).unwrap()) / h;
                assert!(d > 0.0, "non-positive initial slope for {m:?}");
                assert_relative_eq!(f(m, 1.0).unwrap(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn secant_modulus_examples() {
        let c = StressStrainCurve::new(vec![(0.0, 0.0), (0.25, 0.05)], "a", "").unwrap();
        assert_relative_eq!(secant_modulus(&c, 0.25).unwrap(), 0.2, epsilon = 1e-12);
        let c = StressStrainCurve::new(vec![(0.0, 0.0), (0.5, 0.5)], "b", "").unwrap();
        assert_relative_eq!(secant_modulus(&c, 0.25).unwrap(), 1.0, epsilon = 1e-12);
        // Sampled from sigma = 0.3(l - l^-2): secant at strain 4 is sigma(5)/4.
        let pts: Vec<(f64, f64)> = (0..=50)
            .map(|i| {
                let e = i as f64 * 0.1;
                (e, 0.3 * ((1.0 + e) - (1.0 + e).powi(-2)))
            })
            .collect();
        let c = StressStrainCurve::new(pts, "nh", "").unwrap();
        assert_relative_eq!(secant_modulus(&c, 4.0).unwrap(), 0.372, epsilon = 1e-9);
        assert!(matches!(secant_modulus(&c, 9.0), Err(Error::Range(_))));
    }

    #[test]
    fn curve_extremes_examples() {
        let c = StressStrainCurve::new(vec![(0.0, 0.0)], "p", "").unwrap();
        assert_eq!(curve_extremes(&c).unwrap(), (0.0, 0.0));
        let c = StressStrainCurve::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 1.5)], "p", "").unwrap();
        assert_eq!(curve_extremes(&c).unwrap(), (2.0, 2.0));
        let c = StressStrainCurve::new(vec![(0.0, 0.0), (1.0, 20.0), (5.0, 34.6), (6.0, 30.0)], "ninjaflex-like", "").unwrap();
        assert_relative_eq!(curve_extremes(&c).unwrap().0, 34.6);
    }

    #[test]
    fn curve_invariants_enforced() {
        assert!(StressStrainCurve::new(vec![(0.0, 0.5)], "bad", "").is_err());
        assert!(StressStrainCurve::new(vec![(0.2, 0.1), (0.1, 0.2)], "bad", "").is_err());
        assert!(StressStrainCurve::new(vec![(-0.1, 0.0), (0.1, 0.1)], "bad", "").is_err());
    }

    #[test]
    fn fit_round_trip_noise_free() {
        let stretches: Vec<f64> = (0..20).map(|i| 1.0 + i as f64 * (2.0 / 19.0)).collect();
        let truth = nh(0.42);
        let curve = synthetic_curve(&truth, &stretches, "synthetic").unwrap();
        let fit = fit_model(&curve, ModelFamily::NeoHookean, None).unwrap();
        assert!(fit.converged);
        match fit.model {
            HyperelasticModel::NeoHookean { mu } => assert_relative_eq!(mu, 0.42, epsilon = 1e-6),
            m => panic!("wrong family {m:?}"),
        }
    }

    #[test]
    fn fit_gent_with_noise_within_5_percent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let truth = HyperelasticModel::Gent { mu: 0.1, jm: 50.0 };
        let stretches: Vec<f64> = (0..40).map(|i| 1.0 + i as f64 * 0.1).collect();
        let mut points = Vec::new();
        for &l in &stretches {
            let s = uniaxial_eng_stress(&truth, l).unwrap();
            let noise = 1.0 + 0.01 * (2.0 * rng.gen::<f64>() - 1.0);
            points.push((l - 1.0, s * noise));
        }
        points[0].1 = 0.0;
        let curve = StressStrainCurve::new(points, "noisy", "").unwrap();
        let fit = fit_model(&curve, ModelFamily::Gent, None).unwrap();
        match fit.model {
            HyperelasticModel::Gent { mu, jm } => {
                assert!((mu - 0.1).abs() / 0.1 < 0.05, "mu = {mu}");
                assert!((jm - 50.0).abs() / 50.0 < 0.05, "jm = {jm}");
            }
            m => panic!("wrong family {m:?}"),
        }
    }

    #[test]
    fn fit_zero_data_hits_lower_bound() {
        let points: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.2, 0.0)).collect();
        let curve = StressStrainCurve::new(points, "zero", "").unwrap();
        let fit = fit_model(&curve, ModelFamily::NeoHookean, None).unwrap();
        assert!(fit.converged);
        assert!(fit.rms_residual < 1e-8);
        match fit.model {
            HyperelasticModel::NeoHookean { mu } => assert!(mu <= 1e-8),
            m => panic!("wrong family {m:?}"),
        }
    }

    #[test]
    fn fit_rejects_insufficient_data() {
        let curve = StressStrainCurve::new(vec![(0.0, 0.0), (1.0, 0.5)], "short", "").unwrap();
        assert!(fit_model(&curve, ModelFamily::Gent, None).is_err());
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let stretches: Vec<f64> = (0..15).map(|i| 1.05 + i as f64 * 0.15).collect();
        let truth = nh(0.35);
        let curve = synthetic_curve(&truth, &stretches, "grad").unwrap();
        let models = [
            nh(0.21),
            HyperelasticModel::MooneyRivlin { c10: 0.12, c01: 0.03 },
            HyperelasticModel::Ogden { terms: vec![(0.3, 2.7)] },
            HyperelasticModel::Gent { mu: 0.2, jm: 40.0 },
        ];
        for m in &models {
            let g = fit_objective_gradient(m, &curve).unwrap();
            let p = params_of(m);
            for j in 0..p.len() {
                let h = 1e-6 * p[j].abs().max(1.0);
                let mut pf = p.clone();
                let mut pb = p.clone();
                pf[j] += h;
                pb[j] -= h;
                let ff = fit_objective(&model_from_params(m.family(), &pf), &curve).unwrap();
                let fb = fit_objective(&model_from_params(m.family(), &pb), &curve).unwrap();
                let fd = (ff - fb) / (2.0 * h);
                assert!(
                    (g[j] - fd).abs() <= 1e-4 * fd.abs().max(1e-8),
                    "model {m:?} param {j}: analytic {} vs fd {}",
                    g[j],
                    fd
                );
            }
        }
    }
}
