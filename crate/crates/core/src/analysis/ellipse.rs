//! Direct least-squares ellipse fitting (conic with the ellipse constraint)
//! and ellipse arc length by adaptive quadrature.

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::numeric;

/// Geometric ellipse parameters, mm.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Ellipse {
    pub center: (f64, f64),
    /// Semi-axes, major first.
    pub semi_major: f64,
    pub semi_minor: f64,
    /// Rotation of the major axis, rad.
    pub rotation: f64,
}

impl Ellipse {
    /// Half of the ellipse perimeter, integrated to the given relative
    /// tolerance.
    pub fn half_perimeter(&self, rel_tol: f64) -> f64 {
        self.arc_length(0.0, std::f64::consts::PI, rel_tol)
    }

    /// Arc length between two parameter angles of the standard
    /// parameterization (a·cos t, b·sin t).
    pub fn arc_length(&self, t0: f64, t1: f64, rel_tol: f64) -> f64 {
        let a = self.semi_major;
        let b = self.semi_minor;
        numeric::adaptive_simpson(
            move |t| {
                let s = t.sin();
                let c = t.cos();
                (a * a * s * s + b * b * c * c).sqrt()
            },
            t0.min(t1),
            t0.max(t1),
            rel_tol,
        )
    }

    /// Parameter angle of a point mapped into the ellipse frame.
    pub fn parameter_of(&self, point: (f64, f64)) -> f64 {
        let (dx, dy) = (point.0 - self.center.0, point.1 - self.center.1);
        let (c, s) = (self.rotation.cos(), self.rotation.sin());
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        (v / self.semi_minor.max(1e-300)).atan2(u / self.semi_major)
    }
}

/// Stable direct conic least-squares fit constrained to ellipses
/// (4ac - b² > 0). Returns the conic coefficients [a, b, c, d, e, f].
fn fit_conic(points: &[(f64, f64)]) -> Result<[f64; 6]> {
    let n = points.len();
    let mut d1 = DMatrix::<f64>::zeros(n, 3);
    let mut d2 = DMatrix::<f64>::zeros(n, 3);
    for (i, &(x, y)) in points.iter().enumerate() {
        d1[(i, 0)] = x * x;
        d1[(i, 1)] = x * y;
        d1[(i, 2)] = y * y;
        d2[(i, 0)] = x;
        d2[(i, 1)] = y;
        d2[(i, 2)] = 1.0;
    }
    let s1 = d1.transpose() * &d1;
    let s2 = d1.transpose() * &d2;
    let s3 = d2.transpose() * &d2;
    let s3_inv = Matrix3::from_iterator(s3.iter().copied())
        .try_inverse()
        .ok_or_else(|| Error::Geometry("degenerate point configuration".into()))?;
    let t = -s3_inv * Matrix3::from_iterator(s2.transpose().iter().copied());
    let m_full = Matrix3::from_iterator(s1.iter().copied())
        + Matrix3::from_iterator(s2.iter().copied()) * t;
    // Apply C1^-1 for the constraint matrix [[0,0,2],[0,-1,0],[2,0,0]].
    let m = Matrix3::new(
        m_full[(2, 0)] / 2.0, m_full[(2, 1)] / 2.0, m_full[(2, 2)] / 2.0,
        -m_full[(1, 0)], -m_full[(1, 1)], -m_full[(1, 2)],
        m_full[(0, 0)] / 2.0, m_full[(0, 1)] / 2.0, m_full[(0, 2)] / 2.0,
    );

    let eigs = m.complex_eigenvalues();
    let mut best: Option<Vector3<f64>> = None;
    for k in 0..3 {
        let lam = eigs[k];
        if lam.im.abs() > 1e-6 * (1.0 + lam.re.abs()) {
            continue;
        }
        // Null vector of (M - lambda I) from the SVD.
        let shifted = m - Matrix3::identity() * lam.re;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.as_ref().unwrap();
        let a1 = Vector3::new(v_t[(2, 0)], v_t[(2, 1)], v_t[(2, 2)]);
        let constraint = 4.0 * a1[0] * a1[2] - a1[1] * a1[1];
        if constraint > 0.0 {
            best = Some(a1);
            break;
        }
    }
    let a1 = best.ok_or_else(|| Error::Geometry("no elliptic solution (degenerate or hyperbolic fit)".into()))?;
    let a2 = t * a1;
    Ok([a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]])
}

/// Geometric parameters from conic coefficients.
fn conic_to_ellipse(c: [f64; 6]) -> Result<Ellipse> {
    let [a, b, cc, d, e, f] = c;
    let q = Matrix2::new(a, b / 2.0, b / 2.0, cc);
    let det = a * cc - b * b / 4.0;
    if det <= 0.0 {
        return Err(Error::Geometry("conic is not an ellipse".into()));
    }
    // Centre solves [2a b; b 2c] [x0 y0]' = [-d -e]'.
    let x0 = (-d * 2.0 * cc + e * b) / (2.0 * det * 2.0);
    let y0 = (-e * 2.0 * a + d * b) / (2.0 * det * 2.0);
    let f_c = a * x0 * x0 + b * x0 * y0 + cc * y0 * y0 + d * x0 + e * y0 + f;
    let eig = nalgebra::SymmetricEigen::new(q);
    let (l1, l2) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let r1 = -f_c / l1;
    let r2 = -f_c / l2;
    if r1 <= 0.0 || r2 <= 0.0 {
        return Err(Error::Geometry("imaginary ellipse".into()));
    }
    let (s1, s2) = (r1.sqrt(), r2.sqrt());
    let (major, minor, axis) = if s1 >= s2 {
        (s1, s2, eig.eigenvectors.column(0).into_owned())
    } else {
        (s2, s1, eig.eigenvectors.column(1).into_owned())
    };
    Ok(Ellipse {
        center: (x0, y0),
        semi_major: major,
        semi_minor: minor,
        rotation: axis[1].atan2(axis[0]),
    })
}

/// Fit an ellipse to boundary points. Near-collinear inputs take a flat
/// fallback: a degenerate ellipse along the principal axis with zero minor
/// axis (arc length equals the point span).
pub fn fit_ellipse(points: &[(f64, f64)]) -> Result<Ellipse> {
    if points.len() < 6 {
        return Err(Error::invalid("ellipse fit needs at least 6 points"));
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
    // Principal spread to detect flat (uninflated) profiles.
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - cx) * (x - cx);
        sxy += (x - cx) * (y - cy);
        syy += (y - cy) * (y - cy);
    }
    let cov = Matrix2::new(sxx, sxy, sxy, syy) / n;
    let eig = nalgebra::SymmetricEigen::new(cov);
    let (lmax, lmin) = (
        eig.eigenvalues[0].max(eig.eigenvalues[1]),
        eig.eigenvalues[0].min(eig.eigenvalues[1]),
    );
    if lmin <= 1e-12 * lmax.max(1e-300) {
        let idx = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
        let axis = eig.eigenvectors.column(idx);
        let mut tmin = f64::INFINITY;
        let mut tmax = f64::NEG_INFINITY;
        for &(x, y) in points {
            let t = (x - cx) * axis[0] + (y - cy) * axis[1];
            tmin = tmin.min(t);
            tmax = tmax.max(t);
        }
        return Ok(Ellipse {
            center: (cx, cy),
            semi_major: (tmax - tmin) / 2.0,
            semi_minor: 0.0,
            rotation: axis[1].atan2(axis[0]),
        });
    }
    // Centre the data for conditioning, shift the fit back afterwards.
    let shifted: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x - cx, y - cy)).collect();
    let conic = fit_conic(&shifted)?;
    let mut ell = conic_to_ellipse(conic)?;
    ell.center.0 += cx;
    ell.center.1 += cy;
    Ok(ell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fits_exact_circle() {
        let pts: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / 39.0;
                (21.0 * a.cos(), 21.0 * a.sin())
            })
            .collect();
        let e = fit_ellipse(&pts).unwrap();
        assert_relative_eq!(e.semi_major, 21.0, epsilon = 1e-6);
        assert_relative_eq!(e.semi_minor, 21.0, epsilon = 1e-6);
        assert_relative_eq!(e.center.0, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn fits_rotated_ellipse() {
        let (a, b, rot) = (30.0, 15.0, 0.6_f64);
        let pts: Vec<(f64, f64)> = (0..100)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 100.0;
                let (x, y) = (a * t.cos(), b * t.sin());
                (
                    3.0 + x * rot.cos() - y * rot.sin(),
                    -2.0 + x * rot.sin() + y * rot.cos(),
                )
            })
            .collect();
        let e = fit_ellipse(&pts).unwrap();
        assert_relative_eq!(e.semi_major, 30.0, epsilon = 1e-6);
        assert_relative_eq!(e.semi_minor, 15.0, epsilon = 1e-6);
        assert_relative_eq!(e.center.0, 3.0, epsilon = 1e-6);
        assert_relative_eq!(e.center.1, -2.0, epsilon = 1e-6);
    }

    #[test]
    fn collinear_points_take_flat_path() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        let e = fit_ellipse(&pts).unwrap();
        assert_relative_eq!(e.semi_minor, 0.0);
        assert_relative_eq!(e.semi_major, 4.5, epsilon = 1e-9);
    }

    #[test]
    fn half_perimeter_of_circle() {
        let e = Ellipse {
            center: (0.0, 0.0),
            semi_major: 21.0,
            semi_minor: 21.0,
            rotation: 0.0,
        };
        assert_relative_eq!(
            e.half_perimeter(1e-9),
            std::f64::consts::PI * 21.0,
            max_relative = 1e-9
        );
    }
}
