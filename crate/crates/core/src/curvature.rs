//! The two-collar model of a pinching plane and its Weil–Petersson
//! sectional curvature.
//!
//! Two collars `M₀`, `M₁` of equal core length `l` are pinched
//! independently. The variation `μ̇_k` has unit Hopf variation `|φ̇_k| = 1` on
//! its own collar and leaks onto the other one with the decay profile
//! `ζ = c₁x⁻⁴`; `μ̇ = φ̇/σ`. All fields are real and radial, so the
//! curvature tensor
//!
//! ```text
//! R_{αβ̄γδ̄} = ∫ D(μ̇_α μ̇_β) μ̇_γ μ̇_δ dA + ∫ D(μ̇_α μ̇_δ) μ̇_γ μ̇_β dA
//! ```
//!
//! only needs `D` of the three products `|μ̇₀|²`, `|μ̇₁|²`, `μ̇₀μ̇₁` per collar.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::collar::{apply_d, BoundaryCondition};
use crate::error::{Error, Result};
use crate::geometry::{integrate, make_cylinder, make_grid, CylinderDomain, Grading, RadialFunction, RadialGrid};

/// Decay profile of a variation leaking into the other collar:
/// `ζ(x) = c₁x⁻⁴` up to the core, mirrored beyond it, optionally capped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingProfile {
    pub c1: f64,
    pub cap: Option<f64>,
}

impl Default for CouplingProfile {
    fn default() -> Self {
        Self { c1: 1.0, cap: None }
    }
}

impl CouplingProfile {
    pub const EXPONENT: i32 = 4;

    pub fn new(c1: f64, cap: Option<f64>) -> Result<Self> {
        if !(c1 >= 0.0 && c1.is_finite()) {
            return Err(Error::InvalidArgument(format!("coupling amplitude {c1} must be finite and nonnegative")));
        }
        if let Some(c) = cap {
            if !(c > 0.0) {
                return Err(Error::InvalidArgument(format!("profile cap {c} must be positive")));
            }
        }
        Ok(Self { c1, cap })
    }

    pub fn zeta(&self, d: &CylinderDomain, x: f64) -> f64 {
        let r = if x <= d.midpoint() { x } else { d.reflect(x) };
        let z = self.c1 * r.powi(-Self::EXPONENT);
        match self.cap {
            Some(c) => z.min(c),
            None => z,
        }
    }
}

/// `|φ̇|` of one variation sampled on both collars.
#[derive(Debug, Clone)]
pub struct VariationField {
    pub on: [RadialFunction; 2],
}

impl VariationField {
    /// `μ̇ = |φ̇|/σ` on collar `cyl`.
    pub fn mu(&self, cyl: usize) -> Result<RadialFunction> {
        let d = *self.on[cyl].grid().domain();
        self.on[cyl].map(|x, p| p / d.density(x))
    }
}

/// The two pinching variations over a common grid (both collars share `l`).
#[derive(Debug, Clone)]
pub struct VariationPair {
    grid: Arc<RadialGrid>,
    profile: CouplingProfile,
    pub fields: [VariationField; 2],
}

/// `μ̇₀` is the unit variation on `M₀` and leaks as `ζ` onto `M₁`; `μ̇₁` is
/// its mirror image.
pub fn build_fields(grid: &Arc<RadialGrid>, profile: CouplingProfile) -> Result<VariationPair> {
    let d = *grid.domain();
    let one = RadialFunction::constant(grid.clone(), 1.0)?;
    let zeta = RadialFunction::from_fn(grid.clone(), |x| profile.zeta(&d, x))?;
    Ok(VariationPair {
        grid: grid.clone(),
        profile,
        fields: [VariationField { on: [one.clone(), zeta.clone()] }, VariationField { on: [zeta, one] }],
    })
}

impl VariationPair {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn domain(&self) -> &CylinderDomain {
        self.grid.domain()
    }

    pub fn profile(&self) -> CouplingProfile {
        self.profile
    }

    /// `μ̇_α μ̇_β` on collar `cyl`.
    pub fn product(&self, alpha: usize, beta: usize, cyl: usize) -> Result<RadialFunction> {
        self.fields[alpha].mu(cyl)?.mul(&self.fields[beta].mu(cyl)?)
    }
}

/// How `D` is closed off at the collar ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BcMode {
    /// `D(|μ̇_k|²)` on its own collar: Dirichlet at `a`, Neumann at the core.
    /// Every other solve: Dirichlet at both ends.
    #[default]
    Mixed,
    /// Dirichlet at both ends for every solve.
    Dirichlet,
}

impl fmt::Display for BcMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BcMode::Mixed => "mixed",
            BcMode::Dirichlet => "dirichlet",
        })
    }
}

impl FromStr for BcMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixed" => Ok(BcMode::Mixed),
            "dirichlet" => Ok(BcMode::Dirichlet),
            _ => Err(Error::Config(format!("unknown bc mode {s:?} (expected mixed or dirichlet)"))),
        }
    }
}

/// Boundary values of `D` on the collar ends: `A₁` for the unit variation on
/// its own collar, `(B₁, B₂)` (scaled by `c₁²`) for the leaked one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub a1: f64,
    pub b1: f64,
    pub b2: f64,
}

impl Default for BoundaryData {
    fn default() -> Self {
        Self { a1: 1.0, b1: 1.0, b2: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub profile: CouplingProfile,
    pub boundary: BoundaryData,
    pub bc_mode: BcMode,
    /// Added to every inner product, standing in for the rest of the surface.
    pub compact_offset: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            profile: CouplingProfile::default(),
            boundary: BoundaryData::default(),
            bc_mode: BcMode::Mixed,
            compact_offset: 0.0,
        }
    }
}

impl ModelParams {
    // Dirichlet pair (left, right) for D(|μ̇_k|²) on collar `cyl`.
    fn square_data(&self, k: usize, cyl: usize) -> (f64, f64) {
        let bd = self.boundary;
        if k == cyl {
            (bd.a1, bd.a1)
        } else {
            let c2 = self.profile.c1 * self.profile.c1;
            (c2 * bd.b1, c2 * bd.b2)
        }
    }

    fn condition(&self, alpha: usize, beta: usize, cyl: usize) -> BoundaryCondition {
        if alpha == beta {
            let (left, right) = self.square_data(alpha, cyl);
            if alpha == cyl && self.bc_mode == BcMode::Mixed {
                BoundaryCondition::MidNeumann { left }
            } else {
                BoundaryCondition::Dirichlet { left, right }
            }
        } else {
            // Geometric mean of the two squares' data, end by end.
            let (l0, r0) = self.square_data(0, cyl);
            let (l1, r1) = self.square_data(1, cyl);
            BoundaryCondition::Dirichlet { left: (l0 * l1).sqrt(), right: (r0 * r1).sqrt() }
        }
    }
}

fn pair_index(alpha: usize, beta: usize) -> usize {
    match (alpha, beta) {
        (0, 0) => 0,
        (1, 1) => 1,
        _ => 2,
    }
}

/// `D(μ̇_α μ̇_β)` for the three products on both collars, with the products
/// themselves.
#[derive(Debug, Clone)]
pub struct DFields {
    products: [[RadialFunction; 3]; 2],
    images: [[RadialFunction; 3]; 2],
}

impl DFields {
    pub fn compute(pair: &VariationPair, params: &ModelParams) -> Result<Self> {
        let per_cyl = |cyl: usize| -> Result<([RadialFunction; 3], [RadialFunction; 3])> {
            let prods = [pair.product(0, 0, cyl)?, pair.product(1, 1, cyl)?, pair.product(0, 1, cyl)?];
            let imgs = [
                apply_d(&prods[0], params.condition(0, 0, cyl))?,
                apply_d(&prods[1], params.condition(1, 1, cyl))?,
                apply_d(&prods[2], params.condition(0, 1, cyl))?,
            ];
            Ok((prods, imgs))
        };
        let (p0, i0) = per_cyl(0)?;
        let (p1, i1) = per_cyl(1)?;
        Ok(Self { products: [p0, p1], images: [i0, i1] })
    }

    pub fn product(&self, alpha: usize, beta: usize, cyl: usize) -> &RadialFunction {
        &self.products[cyl][pair_index(alpha, beta)]
    }

    pub fn image(&self, alpha: usize, beta: usize, cyl: usize) -> &RadialFunction {
        &self.images[cyl][pair_index(alpha, beta)]
    }

    fn pairing(&self, d: &CylinderDomain, cyl: usize, ab: (usize, usize), cd: (usize, usize)) -> Result<f64> {
        integrate(&self.image(ab.0, ab.1, cyl).mul(self.product(cd.0, cd.1, cyl))?, d)
    }

    /// `R_{αβ̄γδ̄}` restricted to collar `cyl`.
    pub fn component_on(&self, d: &CylinderDomain, cyl: usize, idx: [usize; 4]) -> Result<f64> {
        let [a, b, c, e] = idx;
        Ok(self.pairing(d, cyl, (a, b), (c, e))? + self.pairing(d, cyl, (a, e), (c, b))?)
    }

    pub fn component(&self, d: &CylinderDomain, idx: [usize; 4]) -> Result<f64> {
        Ok(self.component_on(d, 0, idx)? + self.component_on(d, 1, idx)?)
    }
}

/// `∫ μ̇_α μ̇_β σ dx` on each collar.
pub fn wp_inner_on(pair: &VariationPair, alpha: usize, beta: usize) -> Result<[f64; 2]> {
    let d = pair.domain();
    Ok([integrate(&pair.product(alpha, beta, 0)?, d)?, integrate(&pair.product(alpha, beta, 1)?, d)?])
}

/// `⟨μ̇_α, μ̇_β⟩` over both collars (no compact offset).
pub fn wp_inner(pair: &VariationPair, alpha: usize, beta: usize) -> Result<f64> {
    let [p, q] = wp_inner_on(pair, alpha, beta)?;
    Ok(p + q)
}

/// `R_{αβ̄γδ̄}` over both collars.
pub fn tensor_component(pair: &VariationPair, params: &ModelParams, idx: [usize; 4]) -> Result<f64> {
    if idx.iter().any(|&i| i > 1) {
        return Err(Error::InvalidArgument(format!("tensor indices {idx:?} must be 0 or 1")));
    }
    DFields::compute(pair, params)?.component(pair.domain(), idx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProducts {
    /// Totals including the compact offset.
    pub i00: f64,
    pub i11: f64,
    pub i01: f64,
    /// `[⟨00⟩, ⟨11⟩, ⟨01⟩]` on `M₀` and on `M₁`.
    pub per_cylinder: [[f64; 3]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorComponents {
    pub r0101: f64,
    pub r0110: f64,
    pub r1001: f64,
    pub r1010: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub l: f64,
    pub inner: InnerProducts,
    pub components: TensorComponents,
    pub r: f64,
    /// `2∫D(μ̇₀μ̇₁)μ̇₀μ̇₁σ − 2∫D(|μ̇₀|²)|μ̇₁|²σ`.
    pub r_simplified: f64,
    pub pi: f64,
    pub k: f64,
    pub lemma7_bound: f64,
    pub schwarz_violation: f64,
    pub grid_size: usize,
    pub bc_mode: BcMode,
    pub profile_c1: f64,
}

fn bound_from(df: &DFields, d: &CylinderDomain) -> Result<f64> {
    Ok(4.0 * (df.pairing(d, 0, (0, 0), (1, 1))? + df.pairing(d, 1, (0, 0), (1, 1))?))
}

fn schwarz_from(df: &DFields) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let mut scale = 0.0f64;
    for cyl in 0..2 {
        let (d00, d11, d01) = (df.image(0, 0, cyl), df.image(1, 1, cyl), df.image(0, 1, cyl));
        for ((p, q), c) in d00.values().iter().zip(d11.values()).zip(d01.values()) {
            let rhs = (p * q).max(0.0).sqrt();
            scale = scale.max(rhs);
            worst = worst.max(c.abs() - rhs);
        }
    }
    if scale == 0.0 {
        worst.max(0.0)
    } else {
        worst.max(0.0) / scale
    }
}

/// `4 ∫_Σ D(|μ̇₀|²)|μ̇₁|² σ dx`, which dominates `|R|`.
pub fn lemma7_bound(pair: &VariationPair, params: &ModelParams) -> Result<f64> {
    bound_from(&DFields::compute(pair, params)?, pair.domain())
}

/// Max of `|D(μ̇₀μ̇₁)| − √(D(|μ̇₀|²) D(|μ̇₁|²))` over both grids, relative to the
/// largest right-hand side; zero when the inequality holds everywhere.
pub fn schwarz_check(pair: &VariationPair, params: &ModelParams) -> Result<f64> {
    Ok(schwarz_from(&DFields::compute(pair, params)?))
}

/// Full report for the plane spanned by `μ̇₀, μ̇₁`.
pub fn plane_quantities(pair: &VariationPair, params: &ModelParams) -> Result<CurvatureReport> {
    let d = *pair.domain();
    let df = DFields::compute(pair, params)?;
    let comp = |idx| df.component(&d, idx);
    let components = TensorComponents {
        r0101: comp([0, 1, 0, 1])?,
        r0110: comp([0, 1, 1, 0])?,
        r1001: comp([1, 0, 0, 1])?,
        r1010: comp([1, 0, 1, 0])?,
    };
    let r = components.r0101 - components.r0110 - components.r1001 + components.r1010;
    let x = df.pairing(&d, 0, (0, 1), (0, 1))? + df.pairing(&d, 1, (0, 1), (0, 1))?;
    let y = df.pairing(&d, 0, (0, 0), (1, 1))? + df.pairing(&d, 1, (0, 0), (1, 1))?;
    let r_simplified = 2.0 * x - 2.0 * y;
    let scale = x.abs() + y.abs();
    if (r - r_simplified).abs() > 1e-10 * scale {
        return Err(Error::AssemblyMismatch { full: r, simplified: r_simplified });
    }

    let mut per_cylinder = [[0.0; 3]; 2];
    for (k, (a, b)) in [(0, 0), (1, 1), (0, 1)].into_iter().enumerate() {
        let [p, q] = wp_inner_on(pair, a, b)?;
        per_cylinder[0][k] = p;
        per_cylinder[1][k] = q;
    }
    let off = params.compact_offset;
    let total = |k: usize| per_cylinder[0][k] + per_cylinder[1][k] + off;
    let inner = InnerProducts { i00: total(0), i11: total(1), i01: total(2), per_cylinder };
    let pi = 4.0 * inner.i00 * inner.i11 - 4.0 * inner.i01 * inner.i01;
    if !(pi > 0.0) {
        return Err(Error::DegeneratePlane(pi));
    }
    Ok(CurvatureReport {
        l: d.l(),
        inner,
        components,
        r,
        r_simplified,
        pi,
        k: r / pi,
        lemma7_bound: 4.0 * y,
        schwarz_violation: schwarz_from(&df),
        grid_size: pair.grid().len(),
        bc_mode: params.bc_mode,
        profile_c1: pair.profile().c1,
    })
}

/// Builds the collar, a graded grid of `grid_size` nodes and the fields, and
/// evaluates the plane.
pub fn curvature_report(l: f64, grid_size: usize, params: &ModelParams) -> Result<CurvatureReport> {
    let d = make_cylinder(l)?;
    let grid = Arc::new(make_grid(&d, grid_size, Grading::default())?);
    plane_quantities(&build_fields(&grid, params.profile)?, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pair(l: f64, n: usize, c1: f64) -> VariationPair {
        let d = make_cylinder(l).unwrap();
        let grid = Arc::new(make_grid(&d, n, Grading::default()).unwrap());
        build_fields(&grid, CouplingProfile::new(c1, None).unwrap()).unwrap()
    }

    fn params(c1: f64) -> ModelParams {
        ModelParams { profile: CouplingProfile::new(c1, None).unwrap(), ..ModelParams::default() }
    }

    #[test]
    fn fields_match_closed_forms() {
        let p = pair(0.2, 1025, 1.0);
        let d = *p.domain();
        let x = p.grid().nodes();
        let sq00 = p.product(0, 0, 0).unwrap();
        for (&x, v) in x.iter().zip(sq00.values()) {
            let exact = (0.2 * x).sin().powi(4) / 0.2f64.powi(4);
            assert!((v - exact).abs() < 1e-12 * exact);
        }
        let sq11 = p.product(1, 1, 0).unwrap();
        assert!((sq11.values()[0] - d.a().powi(-8)).abs() < 1e-14);
        // Reflection symmetry of each field.
        let n = x.len();
        for i in 0..n {
            let v = sq11.values();
            assert!((v[i] - v[n - 1 - i]).abs() <= 1e-12 * v[i].abs().max(1e-300));
        }
    }

    #[test]
    fn profile_is_symmetric_and_continuous() {
        let d = make_cylinder(0.1).unwrap();
        let z = CouplingProfile::default();
        let m = d.midpoint();
        assert!((z.zeta(&d, m - 1e-9) - z.zeta(&d, m + 1e-9)).abs() < 1e-15);
        assert!((z.zeta(&d, 3.0) - z.zeta(&d, d.reflect(3.0))).abs() < 1e-15);
        let capped = CouplingProfile::new(1.0, Some(0.5)).unwrap();
        assert_eq!(capped.zeta(&d, d.a()), 0.5);
        assert!(CouplingProfile::new(-1.0, None).is_err());
    }

    #[test]
    fn inner_products() {
        let l = 0.1;
        let p = pair(l, 4096, 1.0);
        let exact = PI / 2.0 / l.powi(3) - l.asin() / l.powi(3) + (1.0 - l * l).sqrt() / (l * l);
        let [on0, on1] = wp_inner_on(&p, 0, 0).unwrap();
        assert!((on0 / exact - 1.0).abs() < 1e-10);
        // The leaked part stays O(1) as l shrinks.
        let [_, leak_small] = wp_inner_on(&pair(0.025, 4096, 1.0), 0, 0).unwrap();
        assert!(on1 < 1.0 && leak_small < 1.0 && (leak_small / on1 - 1.0).abs() < 0.5);
        let total = wp_inner(&p, 0, 0).unwrap();
        assert!((0.8..1.2).contains(&(total / (PI / 2.0 / l.powi(3)))));
        assert_eq!(wp_inner(&pair(l, 512, 0.0), 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn decoupled_plane_is_flat() {
        let p = pair(0.2, 1024, 0.0);
        let pm = params(0.0);
        let rep = plane_quantities(&p, &pm).unwrap();
        assert_eq!(rep.r, 0.0);
        assert_eq!(rep.k, 0.0);
        assert_eq!(rep.components.r0101, 0.0);
        assert!((rep.pi - 4.0 * rep.inner.i00 * rep.inner.i11).abs() == 0.0 && rep.pi > 0.0);
        assert_eq!(rep.lemma7_bound, 0.0);
        assert_eq!(rep.schwarz_violation, 0.0);
        let df = DFields::compute(&p, &pm).unwrap();
        let own = df.component_on(p.domain(), 0, [0, 0, 0, 0]).unwrap();
        let direct = 2.0 * integrate(&df.image(0, 0, 0).mul(df.product(0, 0, 0)).unwrap(), p.domain()).unwrap();
        assert!(own > 0.0 && (own - direct).abs() < 1e-12 * own);
    }

    #[test]
    fn mirrored_components_agree() {
        let p = pair(0.1, 2048, 1.0);
        let rep = plane_quantities(&p, &params(1.0)).unwrap();
        let c = rep.components;
        assert!((c.r0110 - c.r1001).abs() <= 1e-10 * c.r0110.abs());
        assert!((c.r0101 - c.r1010).abs() <= 1e-10 * c.r0101.abs());
        assert!((rep.r - rep.r_simplified).abs() <= 1e-10 * rep.lemma7_bound);
    }

    #[test]
    fn bound_and_schwarz_hold() {
        for l in [0.3, 0.1, 0.025] {
            for mode in [BcMode::Mixed, BcMode::Dirichlet] {
                let pm = ModelParams { bc_mode: mode, ..ModelParams::default() };
                let rep = plane_quantities(&pair(l, 4096, 1.0), &pm).unwrap();
                assert!(rep.r.abs() <= rep.lemma7_bound, "l = {l}");
                assert!(rep.schwarz_violation <= 1e-8, "l = {l}: {}", rep.schwarz_violation);
                assert!(rep.inner.i01.powi(2) <= rep.inner.i00 * rep.inner.i11);
            }
        }
    }

    #[test]
    fn schwarz_equality_for_equal_fields() {
        let p = pair(0.15, 1024, 1.0);
        let same = VariationPair { fields: [p.fields[0].clone(), p.fields[0].clone()], ..p };
        // With c₁ = A₁ = B = 1 every solve sees the same source and data.
        let pm = ModelParams { bc_mode: BcMode::Dirichlet, ..params(1.0) };
        let df = DFields::compute(&same, &pm).unwrap();
        for cyl in 0..2 {
            let (d00, d11, d01) = (df.image(0, 0, cyl), df.image(1, 1, cyl), df.image(0, 1, cyl));
            for ((p, q), c) in d00.values().iter().zip(d11.values()).zip(d01.values()) {
                let g = (p * q).sqrt();
                assert!((c.abs() - g).abs() <= 1e-12 * g);
            }
        }
    }

    #[test]
    fn curvature_shrinks_with_length() {
        let k3 = curvature_report(0.3, 4096, &ModelParams::default()).unwrap().k;
        let k2 = curvature_report(0.2, 4096, &ModelParams::default()).unwrap().k;
        assert!(k2.abs() < k3.abs());
    }

    #[test]
    fn decoupling_limit_is_continuous() {
        let ks: Vec<f64> = [1.0, 0.1, 0.01, 0.001]
            .iter()
            .map(|&c1| curvature_report(0.1, 2048, &params(c1)).unwrap().k.abs())
            .collect();
        for w in ks.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(ks[3] < 1e-4 * ks[0]);
    }

    #[test]
    fn grid_doubling_changes_k_by_under_one_percent() {
        for l in [0.3, 0.025] {
            let k1 = curvature_report(l, 4096, &ModelParams::default()).unwrap().k;
            let k2 = curvature_report(l, 8192, &ModelParams::default()).unwrap().k;
            assert!((k1 / k2 - 1.0).abs() < 0.01, "l = {l}: {k1} {k2}");
        }
    }

    #[test]
    fn bc_mode_round_trips() {
        for m in [BcMode::Mixed, BcMode::Dirichlet] {
            assert_eq!(m.to_string().parse::<BcMode>().unwrap(), m);
        }
        assert!(matches!("neumann".parse::<BcMode>(), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(tensor_component(&pair(0.3, 64, 1.0), &ModelParams::default(), [0, 2, 0, 1]).is_err());
    }
}
