//! Small numerical kernels shared by the solvers: Carlson's symmetric
//! elliptic integral, a Brent root finder, a Dormand–Prince integrator and
//! a tridiagonal solve.

use crate::error::{Error, Result};

/// Carlson's symmetric elliptic integral of the first kind,
/// `R_F(x, y, z) = ½ ∫₀^∞ dt / √((t+x)(t+y)(t+z))`.
///
/// Arguments must be nonnegative with at most one zero. Uses the duplication
/// theorem until the arguments agree to ~1e-3, after which the fifth-order
/// series is accurate to double precision.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    const ERRTOL: f64 = 8.0e-4;
    let (mut x, mut y, mut z) = (x, y, z);
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        let mean = (x + y + z) / 3.0;
        let dx = (mean - x) / mean;
        let dy = (mean - y) / mean;
        let dz = (mean - z) / mean;
        if dx.abs().max(dy.abs()).max(dz.abs()) < ERRTOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mean.sqrt();
        }
    }
}

/// Brent's method: bisection safeguarding inverse quadratic / secant steps.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
pub fn brent<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure { lo, hi });
    }
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::RootNotConverged(max_iter))
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Tolerances for [`integrate_through`].
#[derive(Debug, Clone, Copy)]
pub struct OdeTolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_steps: 1_000_000 }
    }
}

/// Integrates the scalar ODE `y' = f(x, y)` from `(x0, y0)` with an adaptive
/// Dormand–Prince 5(4) pair, landing exactly on every abscissa of `points`
/// (which must be nondecreasing and start at or after `x0`).
pub fn integrate_through<F>(f: F, x0: f64, y0: f64, points: &[f64], tol: OdeTolerance) -> Result<Vec<f64>>
where
    F: Fn(f64, f64) -> f64,
{
    let mut out = Vec::with_capacity(points.len());
    let (mut x, mut y) = (x0, y0);
    // Kahan compensation for the running state: thousands of output stops
    // otherwise leave a visible rounding drift.
    let mut carry = 0.0f64;
    let span = points.last().map_or(0.0, |&p| p - x0).abs();
    let mut h = (span * 1e-3).max(1e-6);
    let mut steps = 0usize;
    let mut k = [0.0f64; 7];
    k[0] = f(x, y);

    for (idx, &target) in points.iter().enumerate() {
        if target < x {
            return Err(Error::OdeFailure(format!(
                "output abscissa {target} at index {idx} precedes current position {x}"
            )));
        }
        while x < target {
            steps += 1;
            if steps > tol.max_steps {
                return Err(Error::OdeFailure(format!("step budget exhausted at x = {x}")));
            }
            let remaining = target - x;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            for s in 1..7 {
                let mut acc = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += step * A[s][j] * kj;
                }
                k[s] = f(x + C[s] * step, acc);
            }
            let mut incr = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                incr += step * A[6][j] * kj;
            }
            let adj = incr - carry;
            let y_new = y + adj;
            let err_est: f64 = step * E.iter().zip(k.iter()).map(|(e, kk)| e * kk).sum::<f64>();
            let scale = tol.atol + tol.rtol * y.abs().max(y_new.abs());
            let err = (err_est / scale).abs();
            if !y_new.is_finite() || !err.is_finite() {
                return Err(Error::OdeFailure(format!("non-finite state near x = {x}")));
            }
            if err <= 1.0 {
                x = if last { target } else { x + step };
                carry = (y_new - y) - adj;
                y = y_new;
                // FSAL: the last stage is the derivative at the new point.
                k[0] = k[6];
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || grow < 1.0 {
                    h = step * grow;
                }
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h < 1e-14 * x.abs().max(1.0) {
                    return Err(Error::OdeFailure(format!("step size underflow at x = {x}")));
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Solves a tridiagonal system with the Thomas algorithm. `sub[i]` couples row
/// `i + 1` to column `i`, `sup[i]` couples row `i` to column `i + 1`.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n || sub.len() + 1 != n || sup.len() + 1 != n {
        return Err(Error::InvalidArgument("tridiagonal band lengths do not match".into()));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::SingularMatrix(0));
    }
    if n > 1 {
        c[0] = sup[0] / beta;
    }
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i - 1] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::SingularMatrix(i));
        }
        if i < n - 1 {
            c[i] = sup[i] / beta;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn rf_reduces_to_elementary_cases() {
        // R_F(0, 1, 1) = π/2 and R_F(x, y, y) = arccos(√(x/y)) / √(y − x).
        assert!((carlson_rf(0.0, 1.0, 1.0) - FRAC_PI_2).abs() < 1e-15);
        let (x, y) = (0.25f64, 1.0f64);
        let expect = (x / y).sqrt().acos() / (y - x).sqrt();
        assert!((carlson_rf(x, y, y) - expect).abs() < 1e-15);
        // Complete integral K(m) = R_F(0, 1 − m, 1); K(1/2) from the AGM.
        let k_half = PI / (2.0 * agm(1.0, 0.5f64.sqrt()));
        assert!((carlson_rf(0.0, 0.5, 1.0) - k_half).abs() < 1e-14);
    }

    fn agm(mut a: f64, mut b: f64) -> f64 {
        for _ in 0..40 {
            let m = 0.5 * (a + b);
            b = (a * b).sqrt();
            a = m;
        }
        a
    }

    #[test]
    fn rf_is_symmetric_and_homogeneous() {
        let v = carlson_rf(0.3, 1.7, 2.2);
        assert!((v - carlson_rf(2.2, 0.3, 1.7)).abs() < 1e-15);
        assert!((carlson_rf(0.6, 3.4, 4.4) - v / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn brent_finds_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = brent(|x| x.cos() - x, 0.0, 1.0, 1e-15, 100).unwrap();
        assert!((r.cos() - r).abs() < 1e-15);
        assert!(matches!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50), Err(Error::BracketFailure { .. })));
    }

    #[test]
    fn dopri_hits_points_exactly() {
        let pts: Vec<f64> = (1..=20).map(|i| i as f64 * 0.25).collect();
        let ys = integrate_through(|_, y| -y, 0.0, 1.0, &pts, OdeTolerance::default()).unwrap();
        for (x, y) in pts.iter().zip(&ys) {
            assert!((y - (-x).exp()).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn dopri_rejects_unsorted_points() {
        let err = integrate_through(|_, y| y, 0.0, 1.0, &[1.0, 0.5], OdeTolerance::default());
        assert!(err.is_err());
    }

    #[test]
    fn thomas_matches_dense_solution() {
        let sub = [1.0, 1.0, 1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let sup = [1.0, 1.0, 1.0];
        let x_true = [1.0, -2.0, 3.0, 0.5];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                let mut s = diag[i] * x_true[i];
                if i > 0 {
                    s += sub[i - 1] * x_true[i - 1];
                }
                if i < 3 {
                    s += sup[i] * x_true[i + 1];
                }
                s
            })
            .collect();
        let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
