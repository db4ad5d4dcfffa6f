//! Immersions into `S²×S² ⊂ ℝ³⊕ℝ³`: the example catalog and the
//! extraction of every invariant field (conformal factor, Kähler
//! functions, Gauss and normal curvature, Hopf differential, mean
//! curvature residual).

pub mod catalog;
pub mod chart;
mod export;
pub(crate) mod invariants;
pub mod weierstrass;

pub use catalog::{by_name, clifford, diagonal, graph, slice, weierstrass_torus, CatalogKind, SurfaceMeta};
pub use export::export_obj;
pub use chart::{cross_c, st, st_density, st_inv};
pub use invariants::{
    area, degrees, gauss_curvature, gauss_curvature_from, hopf, hopf_from, invariants, jacobians,
    kahler_functions, kahler_from_phi_z, mean_curvature_residual, normal_curvature,
    normal_curvature_from, second_fundamental_form, CurvatureRoute, HopfData, KahlerData,
    MeanCurvatureResidual, SecondFundamentalForm,
};
pub use weierstrass::{weierstrass_p, Lattice};

use crate::cxgrid::{ComplexGrid, Field};
use crate::error::{Error, Result};
use nalgebra::{Vector3, Vector6};

/// Nodewise tolerance for the unit-sphere constraints of an immersion.
pub const SPHERE_TOL: f64 = 1e-8;

/// A gridded immersion `Φ = (Φ₁, Φ₂)` into `S²×S²`.
#[derive(Debug, Clone)]
pub struct ProductImmersion {
    pub phi1: Field<Vector3<f64>>,
    pub phi2: Field<Vector3<f64>>,
    /// Declared orientation of the chart (`true` = the conformal
    /// parameter is positively oriented). All constructors produce
    /// positively oriented charts.
    pub orientation: bool,
}

impl ProductImmersion {
    pub fn new(phi1: Field<Vector3<f64>>, phi2: Field<Vector3<f64>>) -> Result<Self> {
        if !phi1.grid().same_layout(phi2.grid()) {
            return Err(Error::GridMismatch("product immersion factors on different grids".into()));
        }
        phi1.check_finite("phi1")?;
        phi2.check_finite("phi2")?;
        for f in [&phi1, &phi2] {
            for v in f.values() {
                if (v.norm() - 1.0).abs() > SPHERE_TOL {
                    return Err(Error::Precondition(format!(
                        "factor leaves the unit sphere by {:.2e}",
                        (v.norm() - 1.0).abs()
                    )));
                }
            }
        }
        Ok(ProductImmersion { phi1, phi2, orientation: true })
    }

    /// Constructor for integrator output, which may sit slightly off
    /// the spheres (the drift is reported separately).
    pub fn with_tolerance(
        phi1: Field<Vector3<f64>>,
        phi2: Field<Vector3<f64>>,
        tol: f64,
    ) -> Result<Self> {
        if !phi1.grid().same_layout(phi2.grid()) {
            return Err(Error::GridMismatch("product immersion factors on different grids".into()));
        }
        for f in [&phi1, &phi2] {
            f.check_finite("factor")?;
            for v in f.values() {
                if (v.norm() - 1.0).abs() > tol {
                    return Err(Error::Precondition(format!(
                        "factor leaves the unit sphere by {:.2e} (tolerance {tol:.1e})",
                        (v.norm() - 1.0).abs()
                    )));
                }
            }
        }
        Ok(ProductImmersion { phi1, phi2, orientation: true })
    }

    pub fn grid(&self) -> &ComplexGrid {
        self.phi1.grid()
    }

    /// Both factors as one 6-vector field.
    pub fn phi6(&self) -> Field<Vector6<f64>> {
        self.phi1
            .zip_map(&self.phi2, |a, b| Vector6::new(a[0], a[1], a[2], b[0], b[1], b[2]))
            .expect("factors share a grid")
    }

    /// The reflected point `Φ̂ = (Φ₁, −Φ₂)`.
    pub fn phi_hat6(&self) -> Field<Vector6<f64>> {
        self.phi1
            .zip_map(&self.phi2, |a, b| Vector6::new(a[0], a[1], a[2], -b[0], -b[1], -b[2]))
            .expect("factors share a grid")
    }

    /// The factor-swapped immersion `S∘Φ = (Φ₂, Φ₁)`.
    pub fn swap_factors(&self) -> ProductImmersion {
        ProductImmersion {
            phi1: self.phi2.clone(),
            phi2: self.phi1.clone(),
            orientation: self.orientation,
        }
    }
}

/// All derived invariant fields of a minimal immersion.
#[derive(Debug, Clone)]
pub struct InvariantField {
    pub u: Field<f64>,
    pub c1: Field<f64>,
    pub c2: Field<f64>,
    pub k: Field<f64>,
    pub kperp: Field<f64>,
    /// Hopf coefficient `θ`, with `Θ = θ dz⊗dz = ½⟨J₁Φ_z, J₂Φ_z⟩ dz⊗dz`.
    pub theta: Field<num_complex::Complex64>,
    /// Mean-curvature residual normalized by `e^{2u}`.
    pub h_residual: Field<f64>,
    pub jac1: Field<f64>,
    pub jac2: Field<f64>,
}
