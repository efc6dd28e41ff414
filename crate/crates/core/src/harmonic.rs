//! Rotationally symmetric harmonic maps `w = u(x) + iy` from the collar of
//! core length `l` onto the collar of core length `L`.
//!
//! Harmonicity reduces to `u″ = L cot(Lu)(u′² − 1)`, whose first integral is
//! `L² csc²(Lu)(u′² − 1) = c₀`. The map is fixed by `u(a) = arcsin(L)/L` and
//! by symmetry under the reflection through the core, which pins
//! `u(π/2l) = π/2L`. We shoot on `c₀` and then integrate the first-order form
//! `u′ = √(1 + c₀L⁻² sin²(Lu))` across the left half.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{make_cylinder, CylinderDomain, Grading, RadialFunction, RadialGrid};
use crate::numerics::{brent, carlson_rf, integrate_through, OdeTolerance};

/// Node count of the grid used by [`solve_cylinder_map`]. Odd, so the core
/// geodesic is a node.
pub const DEFAULT_MAP_NODES: usize = 2049;

/// A solved cylinder map together with its first-integral constant.
#[derive(Debug, Clone)]
pub struct CylinderHarmonicMap {
    domain: CylinderDomain,
    big_l: f64,
    c0: f64,
    // 1 + c₀/L², kept separately: it can sit far below c₀'s rounding floor.
    eta: f64,
    tol: OdeTolerance,
    u: RadialFunction,
    u_prime: RadialFunction,
}

impl CylinderHarmonicMap {
    pub fn domain(&self) -> &CylinderDomain {
        &self.domain
    }

    pub fn l(&self) -> f64 {
        self.domain.l()
    }

    /// Target core length `L`.
    pub fn target_length(&self) -> f64 {
        self.big_l
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn u(&self) -> &RadialFunction {
        &self.u
    }

    pub fn u_prime(&self) -> &RadialFunction {
        &self.u_prime
    }

    /// `|u(a) − arcsin(L)/L|` and `|u(π/2l) − π/2L|`.
    pub fn boundary_residuals(&self) -> Result<(f64, f64)> {
        let big_l = self.big_l;
        let left = (self.u.values()[0] - big_l.asin() / big_l).abs();
        let mid = self.u_at(&[self.domain.midpoint()])?[0];
        Ok((left, (mid - FRAC_PI_2 / big_l).abs()))
    }

    /// `u` at arbitrary abscissas of `[a, b]`, integrated afresh rather than
    /// interpolated.
    pub fn u_at(&self, xs: &[f64]) -> Result<Vec<f64>> {
        integrate_map(&self.domain, self.big_l, self.eta, xs, self.tol)
    }
}

/// Solves the map on the default graded grid.
pub fn solve_cylinder_map(l: f64, big_l: f64, tol: f64) -> Result<CylinderHarmonicMap> {
    let d = make_cylinder(l)?;
    let grid = Arc::new(RadialGrid::new(&d, DEFAULT_MAP_NODES, Grading::default())?);
    solve_cylinder_map_on(grid, big_l, tol)
}

/// Solves the map and samples it on `grid`.
pub fn solve_cylinder_map_on(grid: Arc<RadialGrid>, big_l: f64, tol: f64) -> Result<CylinderHarmonicMap> {
    let domain = *grid.domain();
    check_length(big_l)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let (c0, eta) = shoot(domain.l(), big_l, tol)?;
    let rtol = (tol * 1e-2).clamp(1e-13, 1e-6);
    let ode_tol = OdeTolerance { rtol, atol: rtol * 1e-2, ..OdeTolerance::default() };
    let u_vals = integrate_map(&domain, big_l, eta, grid.nodes(), ode_tol)?;
    let up_vals = u_vals.iter().map(|&u| slope(big_l, eta, u)).collect();
    Ok(CylinderHarmonicMap {
        domain,
        big_l,
        c0,
        eta,
        tol: ode_tol,
        u: RadialFunction::new(grid.clone(), u_vals)?,
        u_prime: RadialFunction::new(grid, up_vals)?,
    })
}

fn check_length(big_l: f64) -> Result<()> {
    if big_l > 0.0 && big_l < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLength(big_l))
    }
}

// u′ = √(cos²(Lu) + η sin²(Lu)); never negative under cancellation.
fn slope(big_l: f64, eta: f64, u: f64) -> f64 {
    let (s, c) = (big_l * u).sin_cos();
    (c * c + eta * s * s).sqrt()
}

/// Integrates `u` from the left boundary to every abscissa in `xs`; points
/// past the core are filled from the reflection `u(x) = π/L − u(π/l − x)`.
fn integrate_map(d: &CylinderDomain, big_l: f64, eta: f64, xs: &[f64], tol: OdeTolerance) -> Result<Vec<f64>> {
    let mid = d.midpoint();
    for &x in xs {
        if !d.contains(x) {
            return Err(Error::OutOfDomain { x, a: d.a(), b: d.b() });
        }
    }
    let folded: Vec<f64> = xs.iter().map(|&x| if x > mid { d.reflect(x).max(d.a()) } else { x.max(d.a()) }).collect();
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| folded[i].total_cmp(&folded[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| folded[i]).collect();

    let u0 = big_l.asin() / big_l;
    let vals = integrate_through(|_, u| slope(big_l, eta, u), d.a(), u0, &sorted, tol)?;
    let mut out = vec![0.0; xs.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = if xs[i] > mid { PI / big_l - vals[k] } else { vals[k] };
    }
    Ok(out)
}

/// `∫_{arcsin(L)/L}^{π/2L} dv / √(1 + c₀L⁻² sin²(Lv))` written through `η = 1 + c₀/L²`.
///
/// With `θ = Lv` and `t = cos θ` the integral is an incomplete elliptic
/// integral of the first kind, `√(1−L²)/L · R_F(ηL², 1 − L²(1−η), η)`.
pub fn half_period(big_l: f64, eta: f64) -> f64 {
    let l2 = big_l * big_l;
    (1.0 - l2).sqrt() / big_l * carlson_rf(eta * l2, 1.0 - l2 * (1.0 - eta), eta)
}

/// The first-integral constant `c₀(l, L)`, without integrating the map.
pub fn shooting_constant(l: f64, big_l: f64) -> Result<f64> {
    make_cylinder(l)?;
    check_length(big_l)?;
    Ok(shoot(l, big_l, 1e-12)?.0)
}

// Returns (c₀, η). The target half-period uses the same closed form at η = 1,
// so L = l gives c₀ = 0 with no rounding.
fn shoot(l: f64, big_l: f64, tol: f64) -> Result<(f64, f64)> {
    let l2 = big_l * big_l;
    let target = half_period(l, 1.0);
    let defect0 = half_period(big_l, 1.0) - target;
    if defect0 == 0.0 {
        return Ok((0.0, 1.0));
    }
    let xtol = (tol * 1e-4).max(1e-16);
    const MAX_ITER: usize = 200;
    if defect0 < 0.0 {
        // Target is longer than the identity half-period (L > l): slow the
        // map down, c₀ ∈ (−L², 0). Shoot in s = ln η.
        let f = |s: f64| half_period(big_l, s.exp()) - target;
        let mut lo = -1.0;
        while f(lo) < 0.0 {
            lo *= 2.0;
            if lo < -700.0 {
                return Err(Error::BracketFailure { lo: l2 * lo.exp_m1(), hi: 0.0 });
            }
        }
        let s = brent(f, lo, 0.0, xtol, MAX_ITER)?;
        Ok((l2 * s.exp_m1(), s.exp()))
    } else {
        let f = |c: f64| half_period(big_l, 1.0 + c / l2) - target;
        let mut hi = l2;
        while f(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::BracketFailure { lo: 0.0, hi });
            }
        }
        let c = brent(f, 0.0, hi, xtol * hi.max(1.0), MAX_ITER)?;
        Ok((c, 1.0 + c / l2))
    }
}

/// Max over the grid of `|L² csc²(Lu)(u′² − 1) − c₀|`, with `u′` taken from
/// a finite-difference derivative of the sampled `u` (not from the ODE).
pub fn first_integral_residual(m: &CylinderHarmonicMap) -> f64 {
    let big_l = m.big_l;
    // Differentiating u − x keeps the stencil away from cancellation in the
    // large abscissas; near the identity only the small deviation is left.
    let dev = match m.u.map(|x, u| u - x) {
        Ok(dev) => dev,
        Err(_) => return f64::INFINITY,
    };
    dev.derivative()
        .iter()
        .zip(m.u.values())
        .map(|(&dd, &u)| {
            let s = (big_l * u).sin();
            (big_l * big_l / (s * s) * dd * (dd + 2.0) - m.c0).abs()
        })
        .fold(0.0, f64::max)
}

/// The Hopf differential `Φ = ¼L² csc²(Lu)(u′² − 1)`, constant on the
/// cylinder and equal to `c₀/4`.
pub fn hopf_differential(m: &CylinderHarmonicMap) -> f64 {
    m.c0 / 4.0
}

/// Holomorphic and anti-holomorphic energy densities.
#[derive(Debug, Clone)]
pub struct EnergyDensities {
    pub h: RadialFunction,
    pub ldens: RadialFunction,
}

impl EnergyDensities {
    /// Total energy density `e = H + L`.
    pub fn total(&self) -> Result<RadialFunction> {
        let l = self.ldens.values();
        let v = self.h.values().iter().zip(l).map(|(h, l)| h + l).collect();
        RadialFunction::new(self.h.grid().clone(), v)
    }
}

/// `H = (ρ(u)/σ(x)) ((u′+1)/2)²` and `L = (ρ(u)/σ(x)) ((u′−1)/2)²` with
/// `ρ = L² csc²(Lu)`.
pub fn energy_densities(m: &CylinderHarmonicMap) -> Result<EnergyDensities> {
    let big_l = m.big_l;
    let d = m.domain;
    let ratio: Vec<f64> =
        m.u.grid()
            .nodes()
            .iter()
            .zip(m.u.values())
            .map(|(&x, &u)| {
                let s = (big_l * u).sin();
                big_l * big_l / (s * s) / d.density(x)
            })
            .collect();
    let up = m.u_prime.values();
    let grid = m.u.grid().clone();
    let hv = ratio.iter().zip(up).map(|(r, p)| r * (0.5 * (p + 1.0)).powi(2)).collect();
    let lv = ratio.iter().zip(up).map(|(r, p)| r * (0.5 * (p - 1.0)).powi(2)).collect();
    Ok(EnergyDensities { h: RadialFunction::new(grid.clone(), hv)?, ldens: RadialFunction::new(grid, lv)? })
}

/// Max over interior nodes of `|Δ log H − 2H + 2L + 2|`, with `Δ = σ⁻¹∂²ₓ`
/// from three-point second differences.
pub fn bochner_residual(e: &EnergyDensities) -> Result<f64> {
    let log_h = e.h.map(|_, h| h.ln())?;
    let d = *log_h.grid().domain();
    let x = log_h.grid().nodes();
    let (h, ld) = (e.h.values(), e.ldens.values());
    Ok(log_h
        .interior_second_difference()
        .iter()
        .enumerate()
        .map(|(k, dd)| {
            let i = k + 1;
            (dd / d.density(x[i]) - 2.0 * h[i] + 2.0 * ld[i] + 2.0).abs()
        })
        .fold(0.0, f64::max))
}

/// Closed-form solution of the noded problem on `[1, ∞)` with hyperbolic
/// density `x⁻²`:
/// `u(L; x) = L⁻¹ arcsin((1 − k e^{2L(1−x)}) / (1 + k e^{2L(1−x)}))`,
/// `k = (1 − L)/(1 + L)`.
#[derive(Debug, Clone, Copy)]
pub struct NodedHarmonicMap {
    big_l: f64,
    k: f64,
}

pub fn noded_map(big_l: f64) -> Result<NodedHarmonicMap> {
    check_length(big_l)?;
    Ok(NodedHarmonicMap { big_l, k: (1.0 - big_l) / (1.0 + big_l) })
}

impl NodedHarmonicMap {
    pub fn target_length(&self) -> f64 {
        self.big_l
    }

    // The arcsin(tanh t) form is the Gudermannian; atan(sinh t) keeps full
    // precision as u → π/2L.
    fn t(&self, x: f64) -> f64 {
        self.big_l * (x - 1.0) - 0.5 * self.k.ln()
    }

    pub fn u(&self, x: f64) -> f64 {
        self.t(x).sinh().atan() / self.big_l
    }

    /// `u′ = cos(Lu) = sech t`.
    pub fn u_prime(&self, x: f64) -> f64 {
        1.0 / self.t(x).cosh()
    }

    pub fn energy(&self, x: f64) -> f64 {
        let big_l = self.big_l;
        let e = self.k.sqrt() * (big_l * (1.0 - x)).exp();
        big_l * big_l * x * x / 4.0 * ((1.0 + e) / (1.0 - e)).powi(2)
    }
}

/// `H₀(L; x) = (L²x²/4) [(1 + √k e^{L(1−x)}) / (1 − √k e^{L(1−x)})]²`.
pub fn noded_energy(big_l: f64, x: f64) -> Result<f64> {
    Ok(noded_map(big_l)?.energy(x))
}

/// `dc₀/dL` at `L = l` and the factor `4 / (dc₀/dL)` that normalises the
/// pinching variation.
#[derive(Debug, Clone, Copy)]
pub struct VariationScale {
    pub dc0_dl: f64,
    pub scale: f64,
}

/// Default step for [`normalized_variation_scale`].
pub fn variation_step(l: f64) -> f64 {
    (l * 1e-3).max(1e-5)
}

/// Central differences of `c₀(l, ·)` at `L = l`, Richardson-extrapolated
/// from steps `h` and `h/2`.
pub fn normalized_variation_scale(l: f64, h: f64) -> Result<VariationScale> {
    make_cylinder(l)?;
    if !(h > 0.0 && l - h > 0.0 && l + h < 1.0) {
        return Err(Error::InvalidArgument(format!("step {h} leaves (0, 1) around l = {l}")));
    }
    let central =
        |h: f64| -> Result<f64> { Ok((shooting_constant(l, l + h)? - shooting_constant(l, l - h)?) / (2.0 * h)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    let dc0_dl = (4.0 * fine - coarse) / 3.0;
    if !dc0_dl.is_finite() || dc0_dl.abs() < 1e3 * f64::EPSILON {
        return Err(Error::DegenerateDerivative(dc0_dl));
    }
    Ok(VariationScale { dc0_dl, scale: 4.0 / dc0_dl })
}
