//! The operator `D = −2(Δ − 2)⁻¹` on rotationally symmetric functions of a
//! collar, i.e. solutions of
//!
//! ```text
//! (l⁻² sin²(lx)) f″ − 2f = −2g
//! ```
//!
//! with Dirichlet data at `a` and either a Neumann condition at the core or
//! Dirichlet data at `b`. The homogeneous equation has the closed-form
//! solutions `cot(lx)` and `1 − lx cot(lx)`, so the solve is variation of
//! parameters plus two quadratures. A plain finite-difference solver is kept
//! alongside as an independent check.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{make_cylinder, CylinderDomain, Grading, RadialFunction, RadialGrid};
use crate::numerics::solve_tridiagonal;

/// `y₁ = cot(lx)` and `y₂ = 1 − lx cot(lx)`, with Wronskian `y₁y₂′ − y₁′y₂ = l`.
#[derive(Debug, Clone, Copy)]
pub struct HomogeneousBasis {
    l: f64,
}

pub fn homogeneous_basis(l: f64) -> Result<HomogeneousBasis> {
    make_cylinder(l)?;
    Ok(HomogeneousBasis { l })
}

// Below this θ the differences sin θ − θ cos θ and θ − sin θ cos θ are
// summed from their Taylor series.
const SERIES_CUTOFF: f64 = 0.5;

// sin θ − θ cos θ = Σ (−1)ⁿ⁺¹ 2n θ²ⁿ⁺¹/(2n+1)!
fn sin_minus_theta_cos(t: f64) -> f64 {
    if t > SERIES_CUTOFF {
        return t.sin() - t * t.cos();
    }
    let t2 = t * t;
    let mut term = t; // θ^{2n+1}/(2n+1)!
    let mut sum = 0.0;
    for n in 1..12 {
        term *= -t2 / ((2 * n) as f64 * (2 * n + 1) as f64);
        sum -= (2 * n) as f64 * term;
    }
    sum
}

// θ − sin θ cos θ = Σ (−1)ⁿ⁺¹ (2θ)²ⁿ⁺¹ / (2·(2n+1)!)
fn theta_minus_sin_cos(t: f64) -> f64 {
    if t > SERIES_CUTOFF {
        return t - t.sin() * t.cos();
    }
    let u = 2.0 * t;
    let u2 = u * u;
    let mut term = u;
    let mut sum = 0.0;
    for n in 1..12 {
        term *= -u2 / ((2 * n) as f64 * (2 * n + 1) as f64);
        sum -= 0.5 * term;
    }
    sum
}

impl HomogeneousBasis {
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn wronskian(&self) -> f64 {
        self.l
    }

    pub fn y1(&self, x: f64) -> f64 {
        let t = self.l * x;
        t.cos() / t.sin()
    }

    pub fn y1_prime(&self, x: f64) -> f64 {
        let s = (self.l * x).sin();
        -self.l / (s * s)
    }

    pub fn y1_second(&self, x: f64) -> f64 {
        let (s, c) = (self.l * x).sin_cos();
        2.0 * self.l * self.l * c / (s * s * s)
    }

    pub fn y2(&self, x: f64) -> f64 {
        let t = self.l * x;
        sin_minus_theta_cos(t) / t.sin()
    }

    pub fn y2_prime(&self, x: f64) -> f64 {
        let t = self.l * x;
        let s = t.sin();
        self.l * theta_minus_sin_cos(t) / (s * s)
    }

    pub fn y2_second(&self, x: f64) -> f64 {
        let s = (self.l * x).sin();
        2.0 * self.l * self.l * self.y2(x) / (s * s)
    }

    /// `|(l⁻² sin²(lx)) y″ − 2y|` for `y₁` and `y₂` at `x`.
    pub fn residuals(&self, x: f64) -> (f64, f64) {
        let s = (self.l * x).sin();
        let c = s * s / (self.l * self.l);
        ((c * self.y1_second(x) - 2.0 * self.y1(x)).abs(), (c * self.y2_second(x) - 2.0 * self.y2(x)).abs())
    }

    /// `y₁y₂′ − y₁′y₂` evaluated pointwise.
    pub fn wronskian_at(&self, x: f64) -> f64 {
        self.y1(x) * self.y2_prime(x) - self.y1_prime(x) * self.y2(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// `f(a) = left`, `f′(π/2l) = 0`.
    MidNeumann { left: f64 },
    /// `f(a) = left`, `f(b) = right`.
    Dirichlet { left: f64, right: f64 },
}

impl BoundaryCondition {
    fn data(&self) -> (f64, f64) {
        match *self {
            BoundaryCondition::MidNeumann { left } => (left, 0.0),
            BoundaryCondition::Dirichlet { left, right } => (left, right),
        }
    }

    fn nonnegative(&self) -> bool {
        let (p, q) = self.data();
        p >= 0.0 && q >= 0.0
    }
}

/// `(l⁻² sin²(lx)) f″ − 2f = −2g` with the boundary condition `bc`.
#[derive(Debug, Clone)]
pub struct BvpSpec {
    pub rhs: RadialFunction,
    pub bc: BoundaryCondition,
}

impl BvpSpec {
    pub fn new(rhs: RadialFunction, bc: BoundaryCondition) -> Result<Self> {
        let (p, q) = bc.data();
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::InvalidArgument("non-finite boundary data".into()));
        }
        Ok(Self { rhs, bc })
    }

    pub fn domain(&self) -> &CylinderDomain {
        self.rhs.grid().domain()
    }
}

/// Solution values and first derivatives at the grid nodes.
#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub value: RadialFunction,
    pub slope: Vec<f64>,
}

/// Variation-of-parameters solve sampled on `grid`.
pub fn solve_bvp(spec: &BvpSpec, grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
    Ok(solve_bvp_with_slope(spec, grid)?.value)
}

/// As [`solve_bvp`], also returning `f′` at the nodes.
///
/// In standard form `f″ − 2σf = −2σg`. With `p` the homogeneous solution
/// vanishing at `a` and `r` the one meeting the right-hand condition,
///
/// ```text
/// f_p(x) = [ r(x) ∫_a^x p s + p(x) ∫_x^{x_R} r s ] / W(p, r),   s = −2σg,
/// ```
///
/// and the boundary data are carried by multiples of `r` and `p`.
pub fn solve_bvp_with_slope(spec: &BvpSpec, grid: &Arc<RadialGrid>) -> Result<BvpSolution> {
    let d = *grid.domain();
    spec.rhs.grid().check_domain(&d)?;
    let g = spec.rhs.resample(grid)?;
    let basis = HomogeneousBasis { l: d.l() };
    let (a, b, m) = (d.a(), d.b(), d.midpoint());

    // p = P₁y₁ + P₂y₂, r = R₁y₁ + R₂y₂.
    let (p1, p2) = (-basis.y2(a), basis.y1(a));
    let (r1, r2) = match spec.bc {
        BoundaryCondition::Dirichlet { .. } => (-basis.y2(b), basis.y1(b)),
        BoundaryCondition::MidNeumann { .. } => (-basis.y2_prime(m), basis.y1_prime(m)),
    };
    let w = (p1 * r2 - p2 * r1) * basis.wronskian();
    let scale = (p1.abs() + p2.abs()) * (r1.abs() + r2.abs()) * basis.wronskian();
    if !(w.abs() > 1e-12 * scale) {
        return Err(Error::SingularBoundarySystem(w));
    }

    let x = grid.nodes();
    let n = x.len();
    let (mut pv, mut pd, mut rv, mut rd) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let (y1, y2) = (basis.y1(x[i]), basis.y2(x[i]));
        let (d1, d2) = (basis.y1_prime(x[i]), basis.y2_prime(x[i]));
        pv[i] = p1 * y1 + p2 * y2;
        pd[i] = p1 * d1 + p2 * d2;
        rv[i] = r1 * y1 + r2 * y2;
        rd[i] = r1 * d1 + r2 * d2;
    }
    pv[0] = 0.0;

    let s: Vec<f64> = x.iter().zip(g.values()).map(|(&x, &g)| -2.0 * d.density(x) * g).collect();
    let ps = RadialFunction::new(grid.clone(), pv.iter().zip(&s).map(|(p, s)| p * s).collect())?;
    let rs = RadialFunction::new(grid.clone(), rv.iter().zip(&s).map(|(r, s)| r * s).collect())?;
    let ip = ps.cumulative_from_left();
    // ∫_x^{x_R} r s: from b for Dirichlet, from the core for the Neumann case.
    let qr: Vec<f64> = match spec.bc {
        BoundaryCondition::Dirichlet { .. } => rs.cumulative_from_right(),
        BoundaryCondition::MidNeumann { .. } => {
            let left = rs.cumulative_from_left();
            let to_mid = rs.integral_to(m);
            left.iter().map(|v| to_mid - v).collect()
        }
    };

    let (left, right) = spec.bc.data();
    let (ha, hb) = match spec.bc {
        BoundaryCondition::Dirichlet { .. } => (left / rv[0], right / pv[n - 1]),
        BoundaryCondition::MidNeumann { .. } => (left / rv[0], 0.0),
    };
    let mut value = vec![0.0; n];
    let mut slope = vec![0.0; n];
    for i in 0..n {
        value[i] = (rv[i] * ip[i] + pv[i] * qr[i]) / w + ha * rv[i] + hb * pv[i];
        slope[i] = (rd[i] * ip[i] + pd[i] * qr[i]) / w + ha * rd[i] + hb * pd[i];
    }
    value[0] = left;
    if let BoundaryCondition::Dirichlet { right, .. } = spec.bc {
        value[n - 1] = right;
    }
    Ok(BvpSolution { value: RadialFunction::new(grid.clone(), value)?, slope })
}

/// `D(g)` under `bc`, on the grid of `g`.
///
/// For `g ≥ 0` with nonnegative boundary data the result must be
/// nonnegative (maximum principle); a violation beyond rounding is an error.
pub fn apply_d(g: &RadialFunction, bc: BoundaryCondition) -> Result<RadialFunction> {
    let spec = BvpSpec::new(g.clone(), bc)?;
    let f = solve_bvp(&spec, g.grid())?;
    if bc.nonnegative() && g.min() >= 0.0 {
        let floor = -1e-12 * f.max_abs().max(g.max_abs());
        if f.min() < floor {
            return Err(Error::PositivityViolated(f.min()));
        }
    }
    Ok(f)
}

/// Second-order centred differences on a uniform grid of `n` intervals,
/// solved with the Thomas algorithm. The Neumann case needs `n` even so the
/// core is a node; the left half is solved with a ghost point and the right
/// half marched outward from the core.
pub fn fd_cross_solve(spec: &BvpSpec, n: usize) -> Result<RadialFunction> {
    let d = *spec.domain();
    if n < 16 {
        return Err(Error::GridTooSmall { min: 16, got: n });
    }
    let grid = Arc::new(RadialGrid::new(&d, n + 1, Grading::Uniform)?);
    let g = spec.rhs.resample(&grid)?;
    let g = g.values();
    let x = grid.nodes();
    let h = (d.b() - d.a()) / n as f64;
    let h2 = h * h;
    let l = d.l();
    let c: Vec<f64> = x.iter().map(|&x| (l * x).sin().powi(2) / (l * l)).collect();

    let f = match spec.bc {
        BoundaryCondition::Dirichlet { left, right } => {
            let mut sub = vec![0.0; n];
            let mut diag = vec![0.0; n + 1];
            let mut sup = vec![0.0; n];
            let mut rhs = vec![0.0; n + 1];
            diag[0] = 1.0;
            rhs[0] = left;
            diag[n] = 1.0;
            rhs[n] = right;
            for i in 1..n {
                sub[i - 1] = c[i] / h2;
                diag[i] = -2.0 * c[i] / h2 - 2.0;
                sup[i] = c[i] / h2;
                rhs[i] = -2.0 * g[i];
            }
            solve_tridiagonal(&sub, &diag, &sup, &rhs)?
        }
        BoundaryCondition::MidNeumann { left } => {
            if !n.is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!("Neumann cross-solve needs an even n, got {n}")));
            }
            let mid = n / 2;
            let mut sub = vec![0.0; mid];
            let mut diag = vec![0.0; mid + 1];
            let mut sup = vec![0.0; mid];
            let mut rhs = vec![0.0; mid + 1];
            diag[0] = 1.0;
            rhs[0] = left;
            for i in 1..=mid {
                diag[i] = -2.0 * c[i] / h2 - 2.0;
                rhs[i] = -2.0 * g[i];
                if i < mid {
                    sub[i - 1] = c[i] / h2;
                    sup[i] = c[i] / h2;
                } else {
                    // Ghost node f_{M+1} = f_{M−1}.
                    sub[i - 1] = 2.0 * c[i] / h2;
                }
            }
            let mut f = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
            f.resize(n + 1, 0.0);
            for i in mid..n {
                f[i + 1] = 2.0 * f[i] - f[i - 1] + h2 * (2.0 * f[i] - 2.0 * g[i]) / c[i];
            }
            f
        }
    };
    RadialFunction::new(grid, f)
}

/// Closed-form solution of the mixed problem with source `l⁻⁴ sin⁴(lx)`:
/// `f = J + A₂ cot(lx) + A₃(1 − lx cot(lx))` with `J = sin²(lx)/(2l⁴)`,
/// `f(a) = A₁` and `f′(π/2l) = 0`. Since `J′(π/2l) = 0`, `A₂ = (π/2)A₃`.
#[derive(Debug, Clone, Copy)]
pub struct SinFourthSolution {
    basis: HomogeneousBasis,
    pub a2: f64,
    pub a3: f64,
}

pub fn sin_fourth_solution(l: f64, a1: f64) -> Result<SinFourthSolution> {
    let basis = homogeneous_basis(l)?;
    let a = l.asin() / l;
    let j_a = 1.0 / (2.0 * l * l);
    let a3 = (a1 - j_a) / (FRAC_PI_2 * basis.y1(a) + basis.y2(a));
    Ok(SinFourthSolution { basis, a2: FRAC_PI_2 * a3, a3 })
}

impl SinFourthSolution {
    pub fn particular(&self, x: f64) -> f64 {
        let l = self.basis.l;
        (l * x).sin().powi(2) / (2.0 * l.powi(4))
    }

    pub fn particular_slope(&self, x: f64) -> f64 {
        let l = self.basis.l;
        (2.0 * l * x).sin() / (2.0 * l.powi(3))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.particular(x) + self.a2 * self.basis.y1(x) + self.a3 * self.basis.y2(x)
    }
}

/// Coefficients `(A₂, A₃)` of `f − J` in the basis `(y₁, y₂)`, read off at
/// node `i` through Wronskians.
pub fn homogeneous_coefficients(sol: &BvpSolution, closed: &SinFourthSolution, i: usize) -> (f64, f64) {
    let x = sol.value.grid().nodes()[i];
    let b = closed.basis;
    let dv = sol.value.values()[i] - closed.particular(x);
    let ds = sol.slope[i] - closed.particular_slope(x);
    let w = b.wronskian();
    ((dv * b.y2_prime(x) - ds * b.y2(x)) / w, (b.y1(x) * ds - b.y1_prime(x) * dv) / w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{integrate, make_grid};
    use proptest::prelude::*;

    fn graded(l: f64, n: usize) -> Arc<RadialGrid> {
        Arc::new(make_grid(&make_cylinder(l).unwrap(), n, Grading::default()).unwrap())
    }

    fn sin4(grid: &Arc<RadialGrid>) -> RadialFunction {
        let l = grid.domain().l();
        RadialFunction::from_fn(grid.clone(), |x| (l * x).sin().powi(4) / l.powi(4)).unwrap()
    }

    #[test]
    fn basis_solves_homogeneous_equation() {
        let b = homogeneous_basis(0.2).unwrap();
        let d = make_cylinder(0.2).unwrap();
        // Deterministic scatter over (a, b).
        for k in 0..200 {
            let t = ((k as f64 + 0.5) * 0.618_033_988_749_895).fract();
            let x = d.a() + t * (d.b() - d.a());
            let (r1, r2) = b.residuals(x);
            assert!(r1 < 1e-9 && r2 < 1e-9, "x = {x}: {r1} {r2}");
        }
        for x in [d.a(), 3.0, d.midpoint(), 11.0, d.b()] {
            assert!((b.wronskian_at(x) - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        for t in [SERIES_CUTOFF - 1e-12, SERIES_CUTOFF + 1e-12] {
            let direct = t.sin() - t * t.cos();
            assert!((sin_minus_theta_cos(t) - direct).abs() < 1e-15);
            assert!((theta_minus_sin_cos(t) - (t - t.sin() * t.cos())).abs() < 1e-15);
        }
        let t = 1e-3;
        assert!((sin_minus_theta_cos(t) / (t * t * t / 3.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mixed_problem_matches_closed_form() {
        for l in [0.2, 0.05] {
            let grid = graded(l, 4097);
            let spec = BvpSpec::new(sin4(&grid), BoundaryCondition::MidNeumann { left: 1.0 }).unwrap();
            let sol = solve_bvp_with_slope(&spec, &grid).unwrap();
            let exact = sin_fourth_solution(l, 1.0).unwrap();
            let scale = sol.value.max_abs();
            for (&x, v) in grid.nodes().iter().zip(sol.value.values()) {
                assert!((v - exact.value(x)).abs() < 1e-6 * scale, "l = {l}, x = {x}");
            }
            let (a2, a3) = homogeneous_coefficients(&sol, &exact, grid.len() / 2);
            assert!((a2 - FRAC_PI_2 * a3).abs() < 1e-10);
            assert!((a2 / exact.a2 - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn coefficient_scales_like_inverse_length() {
        let ls = [0.2f64, 0.1, 0.05, 0.025];
        let pts: Vec<(f64, f64)> =
            ls.iter().map(|&l| (l.ln(), sin_fourth_solution(l, 1.0).unwrap().a2.abs().ln())).collect();
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 1.0).abs() < 0.15, "{slope}");
    }

    #[test]
    fn constants_are_fixed() {
        for l in [0.2, 0.05] {
            let grid = graded(l, 4096);
            let one = RadialFunction::constant(grid.clone(), 1.0).unwrap();
            for bc in
                [BoundaryCondition::MidNeumann { left: 1.0 }, BoundaryCondition::Dirichlet { left: 1.0, right: 1.0 }]
            {
                let f = apply_d(&one, bc).unwrap();
                let err = f.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
                assert!(err < 1e-10, "l = {l}, {bc:?}: {err}");
            }
            let three = RadialFunction::constant(grid.clone(), 3.0).unwrap();
            let f = apply_d(&three, BoundaryCondition::Dirichlet { left: 3.0, right: 3.0 }).unwrap();
            assert!(f.values().iter().all(|v| (v - 3.0).abs() < 1e-9));
        }
    }

    #[test]
    fn homogeneous_dirichlet_solve() {
        let l = 0.2;
        let grid = graded(l, 1025);
        let d = *grid.domain();
        let zero = RadialFunction::constant(grid.clone(), 0.0).unwrap();
        let f = solve_bvp(&BvpSpec::new(zero, BoundaryCondition::Dirichlet { left: 1.0, right: 1.0 }).unwrap(), &grid)
            .unwrap();
        // Direct 2×2 solve for B₃, B₄.
        let b = homogeneous_basis(l).unwrap();
        let (m11, m12, m21, m22) = (b.y1(d.a()), b.y2(d.a()), b.y1(d.b()), b.y2(d.b()));
        let det = m11 * m22 - m12 * m21;
        let (b3, b4) = ((m22 - m12) / det, (m11 - m21) / det);
        for (&x, v) in grid.nodes().iter().zip(f.values()) {
            assert!((v - (b3 * b.y1(x) + b4 * b.y2(x))).abs() < 1e-10);
        }
    }

    #[test]
    fn sin_fourth_image_is_positive() {
        let grid = graded(0.1, 2049);
        let f = apply_d(&sin4(&grid), BoundaryCondition::MidNeumann { left: 1.0 }).unwrap();
        assert!(f.min() > 0.0);
        let f = apply_d(&sin4(&grid), BoundaryCondition::Dirichlet { left: 0.0, right: 0.0 }).unwrap();
        assert!(f.values()[1..grid.len() - 1].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn self_adjoint_with_zero_data() {
        let grid = graded(0.15, 4097);
        let d = *grid.domain();
        let f = RadialFunction::from_fn(grid.clone(), |x| (-0.3 * (x - 4.0).powi(2)).exp()).unwrap();
        let g = RadialFunction::from_fn(grid.clone(), |x| 1.0 / (1.0 + (x - 12.0).powi(2))).unwrap();
        let bc = BoundaryCondition::Dirichlet { left: 0.0, right: 0.0 };
        let lhs = integrate(&apply_d(&f, bc).unwrap().mul(&g).unwrap(), &d).unwrap();
        let rhs = integrate(&apply_d(&g, bc).unwrap().mul(&f).unwrap(), &d).unwrap();
        assert!((lhs - rhs).abs() / lhs.max(rhs) < 1e-6, "{lhs} {rhs}");
    }

    fn max_rel_gap(a: &RadialFunction, b: &RadialFunction) -> f64 {
        let scale = b.max_abs();
        a.values().iter().zip(b.values()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale
    }

    #[test]
    fn finite_differences_agree_at_second_order() {
        let l = 0.2;
        let d = make_cylinder(l).unwrap();
        for bc in [BoundaryCondition::MidNeumann { left: 1.0 }, BoundaryCondition::Dirichlet { left: 1.0, right: 1.0 }]
        {
            let mut gaps = Vec::new();
            for n in [2048, 4096, 8192] {
                let grid = Arc::new(RadialGrid::new(&d, n + 1, Grading::Uniform).unwrap());
                let spec = BvpSpec::new(sin4(&grid), bc).unwrap();
                let vp = solve_bvp(&spec, &grid).unwrap();
                let fd = fd_cross_solve(&spec, n).unwrap();
                gaps.push(max_rel_gap(&fd, &vp));
            }
            assert!(gaps[2] < 1e-4, "{bc:?}: {gaps:?}");
            for w in gaps.windows(2) {
                let ratio = w[0] / w[1];
                assert!((3.5..4.5).contains(&ratio), "{bc:?}: {gaps:?}");
            }
        }
    }

    #[test]
    fn finite_differences_fix_constants() {
        let d = make_cylinder(0.3).unwrap();
        let grid = Arc::new(RadialGrid::new(&d, 257, Grading::Uniform).unwrap());
        let c = RadialFunction::constant(grid, 2.5).unwrap();
        for bc in [BoundaryCondition::MidNeumann { left: 2.5 }, BoundaryCondition::Dirichlet { left: 2.5, right: 2.5 }]
        {
            let f = fd_cross_solve(&BvpSpec::new(c.clone(), bc).unwrap(), 256).unwrap();
            assert!(f.values().iter().all(|v| (v - 2.5).abs() < 1e-12), "{bc:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn discrete_maximum_principle(
            l in 0.05f64..0.6,
            centre in 0.0f64..1.0,
            width in 0.05f64..2.0,
            left in 0.0f64..2.0,
            right in 0.0f64..2.0,
        ) {
            let d = make_cylinder(l).unwrap();
            let grid = Arc::new(RadialGrid::new(&d, 513, Grading::Uniform).unwrap());
            let x0 = d.a() + centre * (d.b() - d.a());
            let g = RadialFunction::from_fn(grid.clone(), |x| (-((x - x0) / width).powi(2)).exp()).unwrap();
            let spec = BvpSpec::new(g.clone(), BoundaryCondition::Dirichlet { left, right }).unwrap();
            let fd = fd_cross_solve(&spec, 512).unwrap();
            prop_assert!(fd.min() >= 0.0);
            let vp = apply_d(&g, BoundaryCondition::Dirichlet { left, right }).unwrap();
            prop_assert!(vp.min() >= -1e-12 * vp.max_abs());
        }
    }
}
