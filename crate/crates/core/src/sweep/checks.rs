use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::Serialize;

use crate::collar::{
    apply_d, fd_cross_solve, homogeneous_basis, homogeneous_coefficients, sin_fourth_solution, solve_bvp,
    solve_bvp_with_slope, BoundaryCondition, BvpSpec,
};
use crate::error::Result;
use crate::geometry::{make_cylinder, make_grid, Grading, RadialFunction, RadialGrid};
use crate::harmonic::{first_integral_residual, hopf_differential, CylinderHarmonicMap};

/// One line of `operator-check` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance, pass: measured <= tolerance }
    }
}

const BCS: [(&str, BoundaryCondition); 2] = [
    ("mixed", BoundaryCondition::MidNeumann { left: 1.0 }),
    ("dirichlet", BoundaryCondition::Dirichlet { left: 1.0, right: 1.0 }),
];

fn sin4(grid: &Arc<RadialGrid>) -> Result<RadialFunction> {
    let l = grid.domain().l();
    RadialFunction::from_fn(grid.clone(), |x| (l * x).sin().powi(4) / l.powi(4))
}

fn max_gap(a: &RadialFunction, b: &RadialFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// Self-tests of the collar operator at length `l`: the closed-form basis,
/// constants, the sin⁴ closed form on a graded grid of `grid` nodes, and a
/// finite-difference cross-solve with `fd_n` intervals.
pub fn operator_check(l: f64, grid: usize, fd_n: usize) -> Result<Vec<CheckRow>> {
    let d = make_cylinder(l)?;
    let basis = homogeneous_basis(l)?;
    let mut rows = Vec::new();

    let mut res: f64 = 0.0;
    let mut wr: f64 = 0.0;
    for k in 0..401 {
        let x = d.a() + (d.b() - d.a()) * k as f64 / 400.0;
        let (r1, r2) = basis.residuals(x);
        res = res.max(r1).max(r2);
        wr = wr.max((basis.wronskian_at(x) - l).abs());
    }
    rows.push(CheckRow::new("homogeneous residual", res, 1e-9));
    rows.push(CheckRow::new("wronskian", wr, 1e-12));

    let graded = Arc::new(make_grid(&d, grid, Grading::default())?);
    let one = RadialFunction::constant(graded.clone(), 1.0)?;
    for (name, bc) in BCS {
        let f = apply_d(&one, bc)?;
        let err = f.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        rows.push(CheckRow::new(format!("D(1) = 1 [{name}]"), err, 1e-10));
    }

    let spec = BvpSpec::new(sin4(&graded)?, BCS[0].1)?;
    let sol = solve_bvp_with_slope(&spec, &graded)?;
    let exact = sin_fourth_solution(l, 1.0)?;
    let closed = RadialFunction::from_fn(graded.clone(), |x| exact.value(x))?;
    rows.push(CheckRow::new("sin^4 closed form (rel)", max_gap(&sol.value, &closed) / closed.max_abs(), 1e-6));
    let (a2, a3) = homogeneous_coefficients(&sol, &exact, graded.len() / 2);
    rows.push(CheckRow::new("A2 = (pi/2) A3", (a2 - FRAC_PI_2 * a3).abs(), 1e-10));

    let f = apply_d(&sin4(&graded)?, BCS[0].1)?;
    rows.push(CheckRow::new("positivity: -min D(sin^4)", (-f.min()).max(0.0), 0.0));

    let n = fd_n + fd_n % 2;
    let uniform = Arc::new(RadialGrid::new(&d, n + 1, Grading::Uniform)?);
    for (name, bc) in BCS {
        let spec = BvpSpec::new(sin4(&uniform)?, bc)?;
        let vp = solve_bvp(&spec, &uniform)?;
        let fd = fd_cross_solve(&spec, n)?;
        rows.push(CheckRow::new(format!("finite differences (rel) [{name}]"), max_gap(&fd, &vp) / vp.max_abs(), 1e-4));
    }
    Ok(rows)
}

/// Summary printed by `solve-map`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapSummary {
    pub l: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
    pub c0: f64,
    pub hopf: f64,
    #[serde(rename = "residualA")]
    pub residual_a: f64,
    #[serde(rename = "residualCore")]
    pub residual_core: f64,
    #[serde(rename = "firstIntegralResidual")]
    pub first_integral: f64,
}

impl MapSummary {
    pub fn of(m: &CylinderHarmonicMap) -> Result<Self> {
        let (ra, rc) = m.boundary_residuals()?;
        Ok(Self {
            l: m.l(),
            big_l: m.target_length(),
            c0: m.c0(),
            hopf: hopf_differential(m),
            residual_a: ra,
            residual_core: rc,
            first_integral: first_integral_residual(m),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::solve_cylinder_map;

    #[test]
    fn defaults_pass() {
        let rows = operator_check(0.2, 4096, 8192).unwrap();
        assert_eq!(rows.len(), 9);
        for r in &rows {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn coarse_cross_solve_fails() {
        let rows = operator_check(0.2, 1024, 64).unwrap();
        let fd: Vec<_> = rows.iter().filter(|r| r.name.starts_with("finite")).collect();
        assert!(fd.iter().all(|r| !r.pass), "{fd:?}");
    }

    #[test]
    fn map_summary() {
        let m = solve_cylinder_map(0.3, 0.25, 1e-10).unwrap();
        let s = MapSummary::of(&m).unwrap();
        assert!(s.c0 > 0.0);
        assert_eq!(s.hopf, s.c0 / 4.0);
        assert!(s.residual_a < 1e-8 && s.residual_core < 1e-8);
    }
}
