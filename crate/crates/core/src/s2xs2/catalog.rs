//! The example catalog: slices, the diagonal, the Clifford torus,
//! Weierstrass tori and graphs of holomorphic maps.

use super::chart::{st, st_density};
use super::weierstrass::Lattice;
use super::ProductImmersion;
use crate::cxgrid::{ComplexGrid, Field};
use crate::error::{Error, Result};
use nalgebra::Vector3;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which catalog family a surface came from.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogKind {
    Slice { q: Vector3<f64> },
    Diagonal,
    Clifford,
    Weierstrass { tau: Complex64, p0: Complex64 },
    Graph { degree: u32 },
}

/// Catalog identity carried next to a [`ProductImmersion`]; supplies
/// the analytic density model used by chart-area quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMeta {
    pub name: String,
    pub kind: CatalogKind,
}

impl SurfaceMeta {
    /// Exact chart density `e^{2u}(ζ)` and total area, for plane charts.
    #[allow(clippy::type_complexity)]
    pub fn exact_density_and_area(&self) -> Option<(Box<dyn Fn(Complex64) -> f64>, f64)> {
        match &self.kind {
            CatalogKind::Slice { .. } => Some((Box::new(st_density), 4.0 * PI)),
            CatalogKind::Diagonal => Some((Box::new(|z| 2.0 * st_density(z)), 8.0 * PI)),
            CatalogKind::Graph { degree } => {
                let d = *degree;
                Some((
                    Box::new(move |z: Complex64| {
                        // pullback of the round density by ζ ↦ ζ^d:
                        // 4 d² |ζ|^{2(d−1)} / (1 + |ζ|^{2d})²
                        let r2 = z.norm_sqr();
                        let df = d as f64;
                        st_density(z)
                            + 4.0 * df * df * r2.powi(d as i32 - 1)
                                / (1.0 + r2.powi(d as i32)).powi(2)
                    }),
                    4.0 * PI * (1.0 + d as f64),
                ))
            }
            _ => None,
        }
    }

    /// Expected exact area when the catalog pins one.
    pub fn expected_area(&self) -> Option<f64> {
        match &self.kind {
            CatalogKind::Slice { .. } => Some(4.0 * PI),
            CatalogKind::Diagonal => Some(8.0 * PI),
            CatalogKind::Clifford => Some(4.0 * PI * PI),
            CatalogKind::Weierstrass { .. } => Some(16.0 * PI),
            CatalogKind::Graph { degree } => Some(4.0 * PI * (1.0 + *degree as f64)),
        }
    }
}

/// The slice `S²×{q}` in the plane chart: `Φ = (st(z), q)`.
pub fn slice(grid: ComplexGrid, q: Vector3<f64>) -> Result<(ProductImmersion, SurfaceMeta)> {
    if (q.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition("slice point q must lie on the unit sphere".into()));
    }
    let phi1 = Field::from_fn(grid, |i, j| st(grid.z(i, j)));
    let phi2 = Field::new_fill(grid, q);
    Ok((
        ProductImmersion::new(phi1, phi2)?,
        SurfaceMeta { name: "slice".into(), kind: CatalogKind::Slice { q } },
    ))
}

/// The diagonal `D = {(x, x)}`: `Φ = (st(z), st(z))`.
pub fn diagonal(grid: ComplexGrid) -> Result<(ProductImmersion, SurfaceMeta)> {
    let phi1 = Field::from_fn(grid, |i, j| st(grid.z(i, j)));
    Ok((
        ProductImmersion::new(phi1.clone(), phi1)?,
        SurfaceMeta { name: "diagonal".into(), kind: CatalogKind::Diagonal },
    ))
}

/// The Clifford torus `T`, product of two equators:
/// `Φ(x,y) = ((0, cos x, sin x), (0, cos y, sin y))` on a `(2π, 2π)` cell.
pub fn clifford(grid: ComplexGrid) -> Result<(ProductImmersion, SurfaceMeta)> {
    if grid.periodic_x && (grid.nx as f64 * grid.hx - 2.0 * PI).abs() > 1e-9 {
        return Err(Error::Precondition("clifford chart needs x-period 2π".into()));
    }
    if grid.periodic_y && (grid.ny as f64 * grid.hy - 2.0 * PI).abs() > 1e-9 {
        return Err(Error::Precondition("clifford chart needs y-period 2π".into()));
    }
    let phi1 = Field::from_fn(grid, |i, _| {
        let x = grid.x(i);
        Vector3::new(0.0, x.cos(), x.sin())
    });
    let phi2 = Field::from_fn(grid, |_, j| {
        let y = grid.y(j);
        Vector3::new(0.0, y.cos(), y.sin())
    });
    Ok((
        ProductImmersion::new(phi1, phi2)?,
        SurfaceMeta { name: "clifford".into(), kind: CatalogKind::Clifford },
    ))
}

/// The Weierstrass torus `Φ = (st∘℘(z), st∘℘(z−p₀))` on the τ-cell.
///
/// The rectangular grid machinery needs a conformal cell, so τ must be
/// purely imaginary here (the ℘ evaluator itself accepts any τ with
/// positive imaginary part), and `p₀` must stay away from the
/// half-lattice so the two branch sets are disjoint.
pub fn weierstrass_torus(
    grid: ComplexGrid,
    tau: Complex64,
    p0: Complex64,
) -> Result<(ProductImmersion, SurfaceMeta)> {
    if tau.re.abs() > 1e-12 {
        return Err(Error::Precondition(
            "weierstrass chart needs purely imaginary tau (rectangular conformal cell)".into(),
        ));
    }
    if !(grid.periodic_x && grid.periodic_y) {
        return Err(Error::Precondition("weierstrass chart must be doubly periodic".into()));
    }
    if (grid.nx as f64 * grid.hx - 1.0).abs() > 1e-9
        || (grid.ny as f64 * grid.hy - tau.im).abs() > 1e-9
    {
        return Err(Error::Precondition("weierstrass grid must cover the (1, Im τ) cell".into()));
    }
    let lat = Lattice::new(tau)?;
    // branch sets of ℘ and ℘(·−p₀) must be disjoint: p₀ ∉ ½Λ
    let half_lattice_dist = {
        let two_p0 = p0 * 2.0;
        lat.lattice_distance(two_p0) / 2.0
    };
    if half_lattice_dist < 1e-3 {
        return Err(Error::Precondition(format!(
            "p0 = {p0} lies on (or within 1e-3 of) the half-lattice"
        )));
    }
    let phi1 = Field::from_fn(grid, |i, j| lat.sphere_map(grid.z(i, j)));
    let phi2 = Field::from_fn(grid, |i, j| lat.sphere_map(grid.z(i, j) - p0));
    Ok((
        ProductImmersion::new(phi1, phi2)?,
        SurfaceMeta { name: "weierstrass".into(), kind: CatalogKind::Weierstrass { tau, p0 } },
    ))
}

/// Graph of the degree-`d` power map: `Φ = (st(z), st(z^d))`.
pub fn graph(grid: ComplexGrid, degree: u32) -> Result<(ProductImmersion, SurfaceMeta)> {
    if degree == 0 {
        return Err(Error::Precondition("graph degree must be at least 1".into()));
    }
    let phi1 = Field::from_fn(grid, |i, j| st(grid.z(i, j)));
    let phi2 = Field::from_fn(grid, |i, j| st(grid.z(i, j).powu(degree)));
    Ok((
        ProductImmersion::new(phi1, phi2)?,
        SurfaceMeta { name: format!("graph{degree}"), kind: CatalogKind::Graph { degree } },
    ))
}

/// Builds a catalog surface by name; grid-shape defaults live in the CLI.
pub fn by_name(
    name: &str,
    grid: ComplexGrid,
    tau: Complex64,
    p0: Complex64,
    degree: u32,
) -> Result<(ProductImmersion, SurfaceMeta)> {
    match name {
        "slice" => slice(grid, Vector3::new(0.0, 0.0, -1.0)),
        "diagonal" => diagonal(grid),
        "clifford" => clifford(grid),
        "weierstrass" => weierstrass_torus(grid, tau, p0),
        "graph" => graph(grid, degree),
        other => Err(Error::Precondition(format!("unknown catalog example '{other}'"))),
    }
}
