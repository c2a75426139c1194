//! Small numerical routines shared across the crate: a damped least-squares
//! minimizer, golden-section refinement, adaptive Simpson quadrature, and
//! piecewise-linear interpolation.

use nalgebra::{DMatrix, DVector};

/// Outcome of [`damped_least_squares`].
#[derive(Debug, Clone)]
pub struct LsqOutcome {
    pub params: Vec<f64>,
    pub rms_residual: f64,
    pub max_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Levenberg-style damped least squares over a residual vector function.
///
/// The Jacobian is formed by central differences with step
/// `1e-6 * max(1, |p|)` per parameter. After every trial step the parameters
/// are pushed back into their valid region by `project`. Convergence is
/// declared when the relative parameter change drops below `1e-8`; the
/// iteration cap is 500.
pub fn damped_least_squares<R, P>(
    initial: &[f64],
    mut residuals: R,
    mut project: P,
) -> LsqOutcome
where
    R: FnMut(&[f64]) -> Vec<f64>,
    P: FnMut(&mut [f64]),
{
    const MAX_ITER: usize = 500;
    const REL_TOL: f64 = 1e-8;

    let n = initial.len();
    let mut p = initial.to_vec();
    project(&mut p);
    let mut r = residuals(&p);
    let m = r.len();
    let mut cost = sum_sq(&r);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..MAX_ITER {
        iterations = iter + 1;
        // Central-difference Jacobian.
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for j in 0..n {
            let h = 1e-6 * p[j].abs().max(1.0);
            let mut pf = p.clone();
            let mut pb = p.clone();
            pf[j] += h;
            pb[j] -= h;
            project(&mut pf);
            project(&mut pb);
            let denom = pf[j] - pb[j];
            if denom.abs() < 1e-300 {
                continue; // parameter pinned at a bound
            }
            let rf = residuals(&pf);
            let rb = residuals(&pb);
            for i in 0..m {
                jac[(i, j)] = (rf[i] - rb[i]) / denom;
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * rv;

        let mut stepped = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * (1.0 + jtj[(k, k)].abs());
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&jtr);
            let mut trial: Vec<f64> = (0..n).map(|k| p[k] - delta[k]).collect();
            project(&mut trial);
            let rt = residuals(&trial);
            let ct = sum_sq(&rt);
            if ct.is_finite() && ct <= cost {
                let rel_change = (0..n)
                    .map(|k| (trial[k] - p[k]).abs() / p[k].abs().max(1.0))
                    .fold(0.0_f64, f64::max);
                p = trial;
                r = rt;
                cost = ct;
                lambda = (lambda * 0.3).max(1e-12);
                stepped = true;
                if rel_change < REL_TOL {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !stepped {
            // No downhill step at any damping: treat as converged at a
            // stationary (possibly bound-constrained) point.
            converged = true;
            break;
        }
    }

    let max_residual = r.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let rms = if m == 0 { 0.0 } else { (cost / m as f64).sqrt() };
    LsqOutcome {
        params: p,
        rms_residual: rms,
        max_residual,
        iterations,
        converged,
    }
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Golden-section search for a local maximum of `f` on `[lo, hi]`,
/// refined until the bracket is narrower than `tol`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to relative tolerance `rel_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * whole.abs().max(1e-300), 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64 + Copy>(
    f: F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
}

/// Piecewise-linear interpolation over `(x, y)` pairs with strictly
/// increasing `x`, clamped at the table ends.
pub fn interp_clamped(table: &[(f64, f64)], x: f64) -> f64 {
    debug_assert!(!table.is_empty());
    if x <= table[0].0 {
        return table[0].1;
    }
    if x >= table[table.len() - 1].0 {
        return table[table.len() - 1].1;
    }
    let idx = table.partition_point(|&(tx, _)| tx < x);
    let (x0, y0) = table[idx - 1];
    let (x1, y1) = table[idx];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Bisection root of `f` on `[lo, hi]` assuming a sign change.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (flo <= 0.0) == (fm <= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
