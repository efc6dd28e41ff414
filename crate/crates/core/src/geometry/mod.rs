//! Truncated hyperbolic cylinders, graded grids over them and sampled
//! rotationally symmetric functions.
//!
//! A collar of core length `l` is the strip `[a, b] × [0, 1]` with
//! `a = arcsin(l)/l`, `b = π/l − a` and area density `σ(x) = l² csc²(lx)`.
//! The closed geodesic sits at `x = π/(2l)`; `σ = 1` on both boundary
//! circles. Every field handled by this crate is independent of `y`, so area
//! integrals collapse to `∫_a^b f(x) σ(x) dx`.

mod function;
mod grid;

pub use function::RadialFunction;
pub use grid::{make_grid, Grading, RadialGrid, MIN_NODES};

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderDomain {
    l: f64,
    a: f64,
    b: f64,
}

/// Builds the collar of core length `l`, `0 < l < 1`.
pub fn make_cylinder(l: f64) -> Result<CylinderDomain> {
    CylinderDomain::new(l)
}

impl CylinderDomain {
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0 && l < 1.0) {
            return Err(Error::InvalidLength(l));
        }
        let a = l.asin() / l;
        let b = PI / l - a;
        Ok(Self { l, a, b })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Abscissa of the core geodesic, `π/(2l)`.
    pub fn midpoint(&self) -> f64 {
        PI / (2.0 * self.l)
    }

    /// Image of `x` under the reflection through the core geodesic.
    pub fn reflect(&self, x: f64) -> f64 {
        PI / self.l - x
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 8.0 * f64::EPSILON * self.b;
        x >= self.a - slack && x <= self.b + slack
    }

    /// `σ(x) = l² csc²(lx)`, rejecting abscissas outside `[a, b]`.
    pub fn metric_density(&self, x: f64) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::OutOfDomain { x, a: self.a, b: self.b });
        }
        Ok(self.density(x))
    }

    pub(crate) fn density(&self, x: f64) -> f64 {
        let s = (self.l * x).sin();
        self.l * self.l / (s * s)
    }

    /// Hyperbolic area of the collar, `l·[−cot(lx)]_a^b = 2√(1 − l²)`.
    pub fn area(&self) -> f64 {
        2.0 * (1.0 - self.l * self.l).sqrt()
    }
}

/// `∫_a^b f(x) σ(x) dx` by the grid's composite rule. The `y`-integral is
/// trivial at unit circumference.
pub fn integrate(f: &RadialFunction, d: &CylinderDomain) -> Result<f64> {
    f.grid().check_domain(d)?;
    let grid = f.grid();
    Ok(grid.weights().iter().zip(grid.nodes()).zip(f.values()).map(|((w, &x), v)| w * v * d.density(x)).sum())
}
