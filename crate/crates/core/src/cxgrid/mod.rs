//! Discrete calculus in the conformal parameter `z = x + iy`.
//!
//! A [`ComplexGrid`] is a rectangular sample grid in the isothermal
//! parameter; a [`Field`] carries one value per node. Derivatives use
//! central 4th-order stencils in the interior and order-matched
//! one-sided stencils at non-periodic boundaries; quadrature is
//! trapezoidal (periodic trapezoidal in periodic directions) with
//! compensated summation in a fixed row-major order, so results are
//! reproducible bit-for-bit on one platform.

mod calculus;
mod io;
mod value;

pub use calculus::{d_z, d_zbar, dx, dy, integrate, laplacian, residual_norm, residual_norm_masked};
pub use io::{load_scalar_fields, save_fields, FieldChannel};
pub use value::{ComplexValue, Complexify, GridValue, RealPart};

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Margin of nodes excluded from residual reports on non-periodic
/// directions (the rows served by one-sided stencils).
pub const BOUNDARY_MARGIN: usize = 2;

/// Rectangular sample grid in the conformal parameter `z = x + iy`.
///
/// Node `(i, j)` sits at `(x0 + i*hx, y0 + j*hy)`. In a periodic
/// direction the samples cover one fundamental period, i.e. the period
/// is `n*h` and the node after the last wraps to the first.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComplexGrid {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
    pub periodic_x: bool,
    pub periodic_y: bool,
}

impl ComplexGrid {
    pub fn new(
        x0: f64,
        y0: f64,
        hx: f64,
        hy: f64,
        nx: usize,
        ny: usize,
        periodic_x: bool,
        periodic_y: bool,
    ) -> Result<Self> {
        if !(hx > 0.0 && hy > 0.0) || !hx.is_finite() || !hy.is_finite() {
            return Err(Error::InvalidGrid(format!("spacings must be positive, got ({hx}, {hy})")));
        }
        if nx < 5 || ny < 5 {
            return Err(Error::InvalidGrid(format!(
                "need at least 5 samples per direction for 4th-order stencils, got ({nx}, {ny})"
            )));
        }
        if !x0.is_finite() || !y0.is_finite() {
            return Err(Error::InvalidGrid("non-finite origin".into()));
        }
        Ok(Self { x0, y0, hx, hy, nx, ny, periodic_x, periodic_y })
    }

    /// Non-periodic grid covering `[-extent, extent]²` with `n` nodes per side.
    pub fn centered_square(extent: f64, n: usize) -> Result<Self> {
        let h = 2.0 * extent / (n as f64 - 1.0);
        Self::new(-extent, -extent, h, h, n, n, false, false)
    }

    /// Doubly periodic grid covering the cell `[x0, x0+px) × [y0, y0+py)`.
    pub fn periodic_cell(x0: f64, y0: f64, px: f64, py: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::new(x0, y0, px / nx as f64, py / ny as f64, nx, ny, true, true)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    #[inline]
    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.y(j))
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        i * self.ny + j
    }

    /// Node of the grid closest to the origin `z = 0`.
    pub fn origin_node(&self) -> (usize, usize) {
        let fi = (-self.x0 / self.hx).round().clamp(0.0, (self.nx - 1) as f64);
        let fj = (-self.y0 / self.hy).round().clamp(0.0, (self.ny - 1) as f64);
        (fi as usize, fj as usize)
    }

    /// True when `(i, j)` lies outside the boundary-stencil margin.
    pub fn is_interior(&self, i: usize, j: usize, margin: usize) -> bool {
        let x_ok = self.periodic_x || (i >= margin && i + margin < self.nx);
        let y_ok = self.periodic_y || (j >= margin && j + margin < self.ny);
        x_ok && y_ok
    }

    pub fn same_layout(&self, other: &ComplexGrid) -> bool {
        self == other
    }
}

/// Gridded values of type `T`, stored row-major with `i` (the x index)
/// outermost: `values[i*ny + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: ComplexGrid,
    values: Vec<T>,
}

impl<T: GridValue> Field<T> {
    pub fn new_fill(grid: ComplexGrid, value: T) -> Self {
        Self { grid, values: vec![value; grid.node_count()] }
    }

    pub fn zeros(grid: ComplexGrid) -> Self {
        Self::new_fill(grid, T::zero())
    }

    /// Builds a field by evaluating `f(i, j)` at every node (row-major order).
    pub fn from_fn(grid: ComplexGrid, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                values.push(f(i, j));
            }
        }
        Self { grid, values }
    }

    pub fn from_values(grid: ComplexGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "value count {} does not match grid {}x{}",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(Self { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> &ComplexGrid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn map<U: GridValue>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Combines two fields nodewise; the grids must match exactly.
    pub fn zip_map<U: GridValue, V: GridValue>(
        &self,
        other: &Field<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<Field<V>> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::GridMismatch("zip_map over different grids".into()));
        }
        let values =
            self.values.iter().zip(other.values.iter()).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid, values })
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(what.to_string()))
        }
    }

    /// Copy of row `j` (values along the x direction).
    pub fn row_copy(&self, j: usize) -> Vec<T> {
        (0..self.grid.nx).map(|i| self.get(i, j)).collect()
    }

    /// Copy of column `i` (values along the y direction).
    pub fn col_copy(&self, i: usize) -> Vec<T> {
        self.values[self.grid.index(i, 0)..self.grid.index(i, 0) + self.grid.ny].to_vec()
    }
}

/// Max-abs / rms pair reported by residual checks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResidualNorm {
    pub max_abs: f64,
    pub rms: f64,
}

impl ResidualNorm {
    pub const ZERO: ResidualNorm = ResidualNorm { max_abs: 0.0, rms: 0.0 };
}

/// Compensated (Kahan) accumulator used by every deterministic reduction.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum
    }
}
