use std::sync::Arc;

use crate::error::{Error, Result};

use super::grid::STENCIL;
use super::RadialGrid;

/// A rotationally symmetric function sampled at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for {} nodes", values.len(), grid.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<RadialGrid>, c: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![c; n])
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise map over `(x, f(x))`.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self.grid.nodes().iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect();
        Self::new(self.grid.clone(), values)
    }

    /// Pointwise product; both functions must live on the same grid.
    pub fn mul(&self, other: &RadialFunction) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Self::new(self.grid.clone(), values)
    }

    pub(crate) fn check_same_grid(&self, other: &RadialFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_nodes(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch("functions sampled on different grids".into()))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Value at an arbitrary abscissa from the local quintic interpolant.
    pub fn eval_at(&self, x: f64) -> f64 {
        let (s, w) = self.grid.interpolation_weights(x);
        w.iter().zip(&self.values[s..s + STENCIL]).map(|(w, v)| w * v).sum()
    }

    /// Resamples onto `grid`; a plain copy when the nodes coincide.
    pub fn resample(&self, grid: &Arc<RadialGrid>) -> Result<Self> {
        if self.grid.same_nodes(grid) {
            return Self::new(grid.clone(), self.values.clone());
        }
        Self::from_fn(grid.clone(), |x| self.eval_at(x))
    }

    /// `∫_a^b f dx` (no metric weight).
    pub fn integral(&self) -> f64 {
        self.grid.weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    /// Running integrals `∫_a^{xᵢ} f dx` at every node.
    pub fn cumulative_from_left(&self) -> Vec<f64> {
        let cells = self.grid.cells();
        let mut out = vec![0.0; self.values.len()];
        for (i, cell) in cells.iter().enumerate() {
            out[i + 1] = out[i] + self.cell_integral(cell.start, &cell.weights);
        }
        out
    }

    /// Running integrals `∫_{xᵢ}^b f dx` at every node, accumulated from `b`.
    pub fn cumulative_from_right(&self) -> Vec<f64> {
        let cells = self.grid.cells();
        let n = self.values.len();
        let mut out = vec![0.0; n];
        for i in (0..n - 1).rev() {
            out[i] = out[i + 1] + self.cell_integral(cells[i].start, &cells[i].weights);
        }
        out
    }

    /// `∫_a^x f dx` for arbitrary `x` in the grid span.
    pub fn integral_to(&self, x: f64) -> f64 {
        let (i, s, w) = self.grid.partial_cell_weights(x);
        let left = self.cumulative_from_left();
        left[i] + self.cell_integral(s, &w)
    }

    fn cell_integral(&self, start: usize, w: &[f64; STENCIL]) -> f64 {
        w.iter().zip(&self.values[start..start + STENCIL]).map(|(w, v)| w * v).sum()
    }

    /// First derivative at every node from the five-point Lagrange stencil
    /// (fourth order on smooth grids).
    pub fn derivative(&self) -> Vec<f64> {
        let x = self.grid.nodes();
        let n = x.len();
        (0..n)
            .map(|k| {
                let s = k.saturating_sub(2).min(n - 5);
                let mut d = 0.0;
                for j in s..s + 5 {
                    let coeff = if j == k {
                        (s..s + 5).filter(|&m| m != k).map(|m| 1.0 / (x[k] - x[m])).sum::<f64>()
                    } else {
                        let num: f64 = (s..s + 5).filter(|&m| m != j && m != k).map(|m| x[k] - x[m]).product();
                        let den: f64 = (s..s + 5).filter(|&m| m != j).map(|m| x[j] - x[m]).product();
                        num / den
                    };
                    d += coeff * self.values[j];
                }
                d
            })
            .collect()
    }

    /// Three-point second differences at the interior nodes `1..n−1`.
    pub fn interior_second_difference(&self) -> Vec<f64> {
        let x = self.grid.nodes();
        let f = &self.values;
        (1..x.len() - 1)
            .map(|i| {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                2.0 * (f[i - 1] / (h0 * (h0 + h1)) - f[i] / (h0 * h1) + f[i + 1] / (h1 * (h0 + h1)))
            })
            .collect()
    }
}
