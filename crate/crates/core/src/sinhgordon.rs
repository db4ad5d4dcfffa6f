//! The sinh-Gordon equation `v_{zz̄} + ½ sinh(2v) = 0`: residual
//! evaluation, one-dimensional orbit solutions, and the change of
//! variables between Kähler functions and sinh-Gordon pairs.

use crate::cxgrid::{self, ComplexGrid, Field, ResidualNorm};
use crate::error::{Error, Result};
use crate::rk4;
use nalgebra::SVector;

/// Where an accepted solution field came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// `v ≡ 0`.
    Trivial,
    /// y-independent orbit of `v'' = −2 sinh 2v`.
    OneDim,
    /// Loaded / caller-supplied field, validated by residual only.
    External,
}

/// A gridded sinh-Gordon solution together with its measured residual.
#[derive(Debug, Clone)]
pub struct SGSolution {
    pub v: Field<f64>,
    pub residual: ResidualNorm,
    pub provenance: Provenance,
}

impl SGSolution {
    /// The zero solution.
    pub fn trivial(grid: ComplexGrid) -> Self {
        SGSolution {
            v: Field::zeros(grid),
            residual: ResidualNorm::ZERO,
            provenance: Provenance::Trivial,
        }
    }

    /// Wraps an external field, computing its residual.
    pub fn external(v: Field<f64>) -> Result<Self> {
        v.check_finite("external sinh-Gordon field")?;
        let res = residual(&v)?;
        Ok(SGSolution { v, residual: res, provenance: Provenance::External })
    }
}

/// Nodewise residual of `v_{zz̄} + ½ sinh(2v)` over interior nodes.
pub fn residual(v: &Field<f64>) -> Result<ResidualNorm> {
    let vz = cxgrid::d_z(&v.map(num_complex::Complex64::from))?;
    let vzzb = cxgrid::d_zbar(&vz)?;
    let r = vzzb.zip_map(v, |d, vv| d.re + 0.5 * (2.0 * vv).sinh())?;
    Ok(cxgrid::residual_norm(&r))
}

/// Residual of the variable-coefficient equation
/// `v_{zz̄} + c(z) sinh(2v)` with the coefficient supplied explicitly.
pub fn scaled_residual(v: &Field<f64>, coeff: &Field<f64>) -> Result<ResidualNorm> {
    if !v.grid().same_layout(coeff.grid()) {
        return Err(Error::GridMismatch("scaled_residual: grids differ".into()));
    }
    let vz = cxgrid::d_z(&v.map(num_complex::Complex64::from))?;
    let vzzb = cxgrid::d_zbar(&vz)?;
    let g = *v.grid();
    let r = Field::from_fn(g, |i, j| {
        vzzb.get(i, j).re + coeff.get(i, j) * (2.0 * v.get(i, j)).sinh()
    });
    Ok(cxgrid::residual_norm(&r))
}

/// Conserved energy of the reduced orbit: `E = ½ v'² + cosh(2v)`.
fn orbit_energy(v: f64, vp: f64) -> f64 {
    0.5 * vp * vp + (2.0 * v).cosh()
}

/// Solution of the reduced equation `v'' = −2 sinh(2v)` with
/// `v(0) = v0`, `v'(0) = 0`, sampled onto the grid (constant in y).
///
/// Since `v_{zz̄} = ¼(v_xx + v_yy)`, a y-independent `v` solves the
/// sinh-Gordon equation exactly when `v'' + 2 sinh(2v) = 0`. The orbit
/// is integrated node to node with RK4 substeps of size at most `hx/4`,
/// and the first integral `E = ½v'² + cosh 2v` is monitored.
pub fn one_dim(v0: f64, grid: ComplexGrid) -> Result<SGSolution> {
    if v0.abs() > 3.0 {
        return Err(Error::Precondition(format!("one_dim: |v0| = {} exceeds 3", v0.abs())));
    }
    if v0 == 0.0 {
        return Ok(SGSolution::trivial(grid));
    }
    let samples = orbit_samples(v0, &grid)?;
    let v = Field::from_fn(grid, |i, _| samples[i].0);
    let res = residual(&v)?;
    Ok(SGSolution { v, residual: res, provenance: Provenance::OneDim })
}

/// Orbit samples `(v, v')` at every x node of the grid.
pub(crate) fn orbit_samples(v0: f64, grid: &ComplexGrid) -> Result<Vec<(f64, f64)>> {
    let mut f = |_t: f64, y: &SVector<f64, 2>| SVector::<f64, 2>::new(y[1], -2.0 * (2.0 * y[0]).sinh());
    let e0 = orbit_energy(v0, 0.0);
    let m = rk4::substeps(grid.hx, grid.hx / 4.0).max(4);

    let mut out = vec![(0.0, 0.0); grid.nx];
    // March from x = 0 in both directions so every node is reached by
    // node-exact steps.
    let mut march = |x_target: f64| -> SVector<f64, 2> {
        // integrate 0 -> x_target in whole-node strides

        let y = SVector::<f64, 2>::new(v0, 0.0);
        rk4::rk4_span(&y, 0.0, x_target, ((x_target.abs() / grid.hx).round() as usize).max(1) * m, &mut f)
    };
    let mut worst_drift: f64 = 0.0;
    for i in 0..grid.nx {
        let x = grid.x(i);
        let y = if x == 0.0 { SVector::<f64, 2>::new(v0, 0.0) } else { march(x) };
        worst_drift = worst_drift.max((orbit_energy(y[0], y[1]) - e0).abs());
        out[i] = (y[0], y[1]);
    }
    if worst_drift > 1e-8 * e0 {
        return Err(Error::Numeric(format!(
            "one_dim: energy drift {worst_drift:.3e} exceeds 1e-8·E (E = {e0:.6})"
        )));
    }
    Ok(out)
}

/// Full period of the reduced orbit starting at `(v0, 0)`, located by
/// bisection on the sign of `v'` after integrating with substep `h`.
pub fn one_dim_period(v0: f64, h: f64) -> Result<f64> {
    if v0 == 0.0 || v0.abs() > 3.0 {
        return Err(Error::Precondition("period needs 0 < |v0| <= 3".into()));
    }
    let v0 = v0.abs(); // the period only depends on |v0|
    let mut f = |_t: f64, y: &SVector<f64, 2>| SVector::<f64, 2>::new(y[1], -2.0 * (2.0 * y[0]).sinh());
    // Half period: time for v' to return to 0 (v reaches −v0).
    let mut t = 0.0;
    let mut y = SVector::<f64, 2>::new(v0, 0.0);
    let (t_prev, prev) = loop {
        let y_old = y;
        y = rk4::rk4_step(&y, t, h, &mut f);
        t += h;
        if t > 1e4 {
            return Err(Error::Numeric("period search did not terminate".into()));
        }
        // v' crosses zero from below exactly at the half period
        if t - h > 0.0 && y_old[1] < 0.0 && y[1] >= 0.0 {
            break (t - h, y_old);
        }
    };
    // Bisect inside [t_prev, t] on the sign of v'.
    let (mut lo, mut hi) = (t_prev, t);
    let mut ylo = prev;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let ymid = rk4::rk4_span(&ylo, lo, mid, 4, &mut f);
        if ymid[1] < 0.0 {
            lo = mid;
            ylo = ymid;
        } else {
            hi = mid;
        }
    }
    Ok(2.0 * 0.5 * (lo + hi))
}

/// Inverse of the tanh substitution: recovers `(v, w)` from Kähler
/// functions via `v = ½(artanh C₂ + artanh C₁)`,
/// `w = ½(artanh C₂ − artanh C₁)`.
pub fn kahler_to_vw(c1: &Field<f64>, c2: &Field<f64>) -> Result<(Field<f64>, Field<f64>)> {
    if !c1.grid().same_layout(c2.grid()) {
        return Err(Error::GridMismatch("kahler_to_vw: grids differ".into()));
    }
    let guard = 1.0 - 1e-10;
    for (a, b) in c1.values().iter().zip(c2.values().iter()) {
        if a.abs() >= guard || b.abs() >= guard {
            return Err(Error::Precondition(format!(
                "kahler_to_vw: complex point present (C1 = {a}, C2 = {b})"
            )));
        }
    }
    let atanh = |x: f64| 0.5 * ((1.0 + x) / (1.0 - x)).ln();
    let v = c1.zip_map(c2, |a, b| 0.5 * (atanh(b) + atanh(a)))?;
    let w = c1.zip_map(c2, |a, b| 0.5 * (atanh(b) - atanh(a)))?;
    Ok((v, w))
}
