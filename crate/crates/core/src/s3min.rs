//! Conformal minimal surfaces in `S³ ⊂ ℝ⁴`: normals, Hopf differential,
//! conformal factor, the Clifford family and the great sphere, and the
//! moving-frame integrator that rebuilds a surface from a sinh-Gordon
//! conformal factor and a constant Hopf coefficient.

use crate::cxgrid::{self, ComplexGrid, Field, ResidualNorm};
use crate::error::{Error, Result};
use crate::interp::lagrange6;
use crate::rk4;
use crate::s2xs2::chart::st;
use crate::sinhgordon;
use nalgebra::{Matrix3, SVector, Vector4};
use num_complex::Complex64;

type CVec4 = Vector4<Complex64>;

/// A gridded conformal immersion into `S³` with oriented unit normal,
/// conformal log-factor and Hopf coefficient.
#[derive(Debug, Clone)]
pub struct S3Immersion {
    pub phi: Field<Vector4<f64>>,
    pub normal: Field<Vector4<f64>>,
    /// Conformal log-factor: the induced metric is `e^{2v}|dz|²`.
    pub v: Field<f64>,
    /// Hopf coefficient `θ = ⟨φ_z, N_z⟩`.
    pub theta: Field<Complex64>,
    /// First derivative when the construction provides it exactly;
    /// consumers fall back to stencils otherwise.
    pub phi_z: Option<Field<CVec4>>,
}

impl S3Immersion {
    /// Builds the derived fields from a bare position field.
    pub fn from_phi(phi: Field<Vector4<f64>>) -> Result<Self> {
        let normal = unit_normal(&phi)?;
        let (v, _) = conformal_factor(&phi)?;
        let (theta, _) = hopf(&phi, &normal)?;
        Ok(S3Immersion { phi, normal, v, theta, phi_z: None })
    }

    pub fn grid(&self) -> &ComplexGrid {
        self.phi.grid()
    }

    /// `φ_z`, exact when carried, otherwise by stencils.
    pub fn phi_z_field(&self) -> Result<Field<CVec4>> {
        match &self.phi_z {
            Some(f) => Ok(f.clone()),
            None => cxgrid::d_z(&self.phi.map(|p| p.map(|x| Complex64::new(x, 0.0)))),
        }
    }
}

#[inline]
pub(crate) fn cdot4(a: &CVec4, b: &CVec4) -> Complex64 {
    // complex-bilinear extension of the ℝ⁴ inner product
    (0..4).map(|k| a[k] * b[k]).sum()
}

/// The 4-dimensional cross product: the vector `d` with
/// `⟨d, x⟩ = det[a, b, c, x]` for every `x`.
pub fn cross4(a: Vector4<f64>, b: Vector4<f64>, c: Vector4<f64>) -> Vector4<f64> {
    let minor = |rows: [usize; 3]| {
        Matrix3::from_fn(|r, cc| {
            let row = rows[r];
            match cc {
                0 => a[row],
                1 => b[row],
                _ => c[row],
            }
        })
        .determinant()
    };
    // cofactors of the last column of [a b c x]
    Vector4::new(-minor([1, 2, 3]), minor([0, 2, 3]), -minor([0, 1, 3]), minor([0, 1, 2]))
}

/// Unit normal signed so `{φ_x, φ_y, φ, N}` is positively oriented.
pub fn unit_normal(phi: &Field<Vector4<f64>>) -> Result<Field<Vector4<f64>>> {
    let px = cxgrid::dx(phi);
    let py = cxgrid::dy(phi);
    let g = *phi.grid();
    let mut out = Field::zeros(g);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let d = cross4(px.get(i, j), py.get(i, j), phi.get(i, j));
            let n = d.norm();
            if n < 1e-12 {
                return Err(Error::Precondition(format!(
                    "degenerate differential at node ({i},{j})"
                )));
            }
            out.set(i, j, d / n);
        }
    }
    Ok(out)
}

/// Hopf coefficient `θ = ⟨φ_z, N_z⟩` and its holomorphy residual.
pub fn hopf(
    phi: &Field<Vector4<f64>>,
    normal: &Field<Vector4<f64>>,
) -> Result<(Field<Complex64>, ResidualNorm)> {
    let pz = cxgrid::d_z(&phi.map(|p| p.map(|x| Complex64::new(x, 0.0))))?;
    let nz = cxgrid::d_z(&normal.map(|p| p.map(|x| Complex64::new(x, 0.0))))?;
    let theta = pz.zip_map(&nz, |a, b| cdot4(&a, &b))?;
    let res = cxgrid::residual_norm(&cxgrid::d_zbar(&theta)?);
    Ok((theta, res))
}

/// Conformal log-factor `v = ½ log(2|φ_z|²)` and the relative
/// conformality residual `|⟨φ_z,φ_z⟩| / |φ_z|²`.
pub fn conformal_factor(phi: &Field<Vector4<f64>>) -> Result<(Field<f64>, ResidualNorm)> {
    let pz = cxgrid::d_z(&phi.map(|p| p.map(|x| Complex64::new(x, 0.0))))?;
    conformal_factor_from(&pz)
}

pub fn conformal_factor_from(pz: &Field<CVec4>) -> Result<(Field<f64>, ResidualNorm)> {
    let n2 = pz.map(|a| a.iter().map(|x| x.norm_sqr()).sum::<f64>());
    for &x in n2.values() {
        if !(x > 0.0) {
            return Err(Error::Precondition("vanishing differential".into()));
        }
    }
    let v = n2.map(|x| 0.5 * (2.0 * x).ln());
    let conf = pz.zip_map(&n2, |a, x| cdot4(&a, &a).norm() / x)?;
    Ok((v, cxgrid::residual_norm(&conf)))
}

/// Squared norm of the second fundamental form: `|σ|² = 8|θ|² e^{−4v}`.
pub fn sff_norm2(v: &Field<f64>, theta: &Field<Complex64>) -> Result<Field<f64>> {
    theta.zip_map(v, |t, vv| 8.0 * t.norm_sqr() * (-4.0 * vv).exp())
}

/// The flat associated family
/// `ψ_t(z) = (1/√2)(e^{i Re[(1+i)z e^{it/2}]}, e^{i Im[(1+i)z e^{it/2}]})`
/// with `S³ ⊂ ℂ²`, carrying exact derivatives and normal.
pub fn clifford_family(t: f64, grid: ComplexGrid) -> S3Immersion {
    let c = Complex64::new(1.0, 1.0) * Complex64::from_polar(1.0, 0.5 * t);
    let a_z = c * 0.5; // ∂_z Re(cz)
    let b_z = c / Complex64::new(0.0, 2.0); // ∂_z Im(cz)
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut phi = Field::zeros(grid);
    let mut normal = Field::zeros(grid);
    let mut phi_z = Field::zeros(grid);
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let w = c * grid.z(i, j);
            let (a, b) = (w.re, w.im);
            phi.set(i, j, Vector4::new(a.cos(), a.sin(), b.cos(), b.sin()) * s);
            normal.set(i, j, Vector4::new(a.cos(), a.sin(), -b.cos(), -b.sin()) * s);
            let d = Vector4::new(
                -Complex64::new(a.sin(), 0.0) * a_z,
                Complex64::new(a.cos(), 0.0) * a_z,
                -Complex64::new(b.sin(), 0.0) * b_z,
                Complex64::new(b.cos(), 0.0) * b_z,
            );
            phi_z.set(i, j, d.map(|x| x * s));
        }
    }
    let v = Field::zeros(grid);
    let theta = Field::new_fill(grid, Complex64::new(0.0, 0.5) * Complex64::from_polar(1.0, t));
    S3Immersion { phi, normal, v, theta, phi_z: Some(phi_z) }
}

/// The totally geodesic `S² ⊂ S³` in the plane chart: `φ = (st(z), 0)`,
/// `N = e₄`.
pub fn great_sphere(grid: ComplexGrid) -> S3Immersion {
    let mut phi = Field::zeros(grid);
    let mut phi_z = Field::zeros(grid);
    let mut v = Field::zeros(grid);
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let z = grid.z(i, j);
            let p = st(z);
            phi.set(i, j, Vector4::new(p[0], p[1], p[2], 0.0));
            // hand-differentiated chart: st = (2x, −2y, r²−1)/(1+r²)
            let d = 1.0 + z.norm_sqr();
            let d2 = d * d;
            let (x, y) = (z.re, z.im);
            let sx = Vector4::new(
                2.0 / d - 4.0 * x * x / d2,
                4.0 * x * y / d2,
                4.0 * x / d2,
                0.0,
            );
            let sy = Vector4::new(
                -4.0 * x * y / d2,
                -2.0 / d + 4.0 * y * y / d2,
                4.0 * y / d2,
                0.0,
            );
            phi_z.set(i, j, Vector4::from_fn(|k, _| Complex64::new(0.5 * sx[k], -0.5 * sy[k])));
            v.set(i, j, 0.5 * (4.0 / d2).ln());
        }
    }
    let normal = Field::new_fill(grid, Vector4::new(0.0, 0.0, 0.0, 1.0));
    let theta = Field::zeros(grid);
    S3Immersion { phi, normal, v, theta, phi_z: Some(phi_z) }
}

/// Options for the `S³` Frenet integrator.
#[derive(Debug, Clone, Copy)]
pub struct S3IntegrateOptions {
    /// Upper bound for one RK4 substep.
    pub step_max: f64,
    /// Gate on the rms sinh-Gordon residual of the input factor.
    pub residual_gate: f64,
}

impl Default for S3IntegrateOptions {
    fn default() -> Self {
        S3IntegrateOptions { step_max: 1e-3, residual_gate: 1e-6 }
    }
}

/// Integration diagnostics.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct S3IntegrationReport {
    /// max nodewise `| |φ| − 1 |`.
    pub sphere_drift: f64,
    /// max nodewise `max(| |N| − 1 |, |⟨φ, N⟩|)`.
    pub normal_drift: f64,
    /// max nodewise `|⟨φ_z,φ_z⟩| / |φ_z|²`.
    pub conformal_drift: f64,
    /// max corner discrepancy of `φ` between the two sweep orders.
    pub closure_residual: f64,
}

// state layout: φ[0..4], Re φ_z[4..8], Im φ_z[8..12], N[12..16]
const S3_DIM: usize = 16;
type S3State = SVector<f64, S3_DIM>;

fn pack(phi: Vector4<f64>, pz: CVec4, n: Vector4<f64>) -> S3State {
    let mut y = S3State::zeros();
    for k in 0..4 {
        y[k] = phi[k];
        y[4 + k] = pz[k].re;
        y[8 + k] = pz[k].im;
        y[12 + k] = n[k];
    }
    y
}

fn unpack(y: &S3State) -> (Vector4<f64>, CVec4, Vector4<f64>) {
    let phi = Vector4::new(y[0], y[1], y[2], y[3]);
    let pz = Vector4::from_fn(|k, _| Complex64::new(y[4 + k], y[8 + k]));
    let n = Vector4::new(y[12], y[13], y[14], y[15]);
    (phi, pz, n)
}

/// Frenet right side along a real direction (`dir = (1,0)` for x,
/// `(0,1)` for y), with `∂x = ∂_z + ∂_z̄` and `∂y = i(∂_z − ∂_z̄)`.
fn s3_deriv(y: &S3State, v: f64, v_z: Complex64, theta0: Complex64, dir: (f64, f64)) -> S3State {
    let (phi, pz, n) = unpack(y);
    let e2v = (2.0 * v).exp();
    let phic = phi.map(|x| Complex64::new(x, 0.0));
    let nc = n.map(|x| Complex64::new(x, 0.0));
    let pzb = pz.map(|x| x.conj());

    // φ_zz = 2v_zφ_z − θN,  φ_zz̄ = −e^{2v}φ/2,  N_z = 2e^{−2v}θφ_z̄
    let phi_zz = pz.map(|x| x * (2.0 * v_z)) - nc.map(|x| x * theta0);
    let phi_zzb = phic.map(|x| x * (-e2v / 2.0));
    let n_z = pzb.map(|x| x * (2.0 * theta0 / e2v));

    let (cx, cy) = dir;
    let dphi = Vector4::from_fn(|k, _| cx * 2.0 * pz[k].re - cy * 2.0 * pz[k].im);
    let dpz = Vector4::from_fn(|k, _| {
        Complex64::new(cx, 0.0) * (phi_zz[k] + phi_zzb[k])
            + Complex64::new(0.0, cy) * (phi_zz[k] - phi_zzb[k])
    });
    let dn = Vector4::from_fn(|k, _| cx * 2.0 * n_z[k].re - cy * 2.0 * n_z[k].im);
    pack(dphi, dpz, dn)
}

/// Rebuilds the minimal surface with conformal factor `e^{2v}` and
/// constant Hopf coefficient `θ₀` (`|θ₀| = ½`): the linear system for
/// `(φ, φ_x, φ_y, N) ∈ ℝ¹⁶` is integrated along the x-axis through the
/// origin and then along every vertical line, from the canonical frame
/// `φ = e₁`, `φ_x = e^{v(0)}e₂`, `φ_y = e^{v(0)}e₃`, `N = e₄`.
pub fn s3_frenet_integrate(
    v: &Field<f64>,
    theta0: Complex64,
    opts: S3IntegrateOptions,
) -> Result<(S3Immersion, S3IntegrationReport)> {
    if (theta0.norm() - 0.5).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "sinh-Gordon compatibility needs |θ₀| = 1/2, got {}",
            theta0.norm()
        )));
    }
    let res = sinhgordon::residual(v)?;
    if res.rms > opts.residual_gate {
        return Err(Error::Precondition(format!(
            "conformal factor does not solve sinh-Gordon: rms {:.3e} > {:.1e}",
            res.rms, opts.residual_gate
        )));
    }
    let g = *v.grid();
    let (i0, j0) = g.origin_node();
    if g.x(i0).abs() > 1e-12 || g.y(j0).abs() > 1e-12 {
        return Err(Error::Precondition("integration grid must contain z = 0 as a node".into()));
    }

    let vx = cxgrid::dx(v);
    let vy = cxgrid::dy(v);
    let v0 = v.get(i0, j0);
    let y0 = pack(
        Vector4::new(1.0, 0.0, 0.0, 0.0),
        Vector4::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(v0.exp() / 2.0, 0.0),
            Complex64::new(0.0, -v0.exp() / 2.0),
            Complex64::new(0.0, 0.0),
        ),
        Vector4::new(0.0, 0.0, 0.0, 1.0),
    );

    let states = integrate_sweep(&g, (i0, j0), y0, opts.step_max, true, |line, s, y| {
        let (vv, vz) = match line {
            Line::Row(j) => {
                let t = (s - g.x0) / g.hx;
                (
                    lagrange6(&v.row_copy(j), g.periodic_x, t),
                    Complex64::new(
                        0.5 * lagrange6(&vx.row_copy(j), g.periodic_x, t),
                        -0.5 * lagrange6(&vy.row_copy(j), g.periodic_x, t),
                    ),
                )
            }
            Line::Col(i) => {
                let t = (s - g.y0) / g.hy;
                (
                    lagrange6(&v.col_copy(i), g.periodic_y, t),
                    Complex64::new(
                        0.5 * lagrange6(&vx.col_copy(i), g.periodic_y, t),
                        -0.5 * lagrange6(&vy.col_copy(i), g.periodic_y, t),
                    ),
                )
            }
        };
        let dir = match line {
            Line::Row(_) => (1.0, 0.0),
            Line::Col(_) => (0.0, 1.0),
        };
        s3_deriv(y, vv, vz, theta0, dir)
    });
    let alt = integrate_sweep(&g, (i0, j0), y0, opts.step_max, false, |line, s, y| {
        let (vv, vz) = match line {
            Line::Row(j) => {
                let t = (s - g.x0) / g.hx;
                (
                    lagrange6(&v.row_copy(j), g.periodic_x, t),
                    Complex64::new(
                        0.5 * lagrange6(&vx.row_copy(j), g.periodic_x, t),
                        -0.5 * lagrange6(&vy.row_copy(j), g.periodic_x, t),
                    ),
                )
            }
            Line::Col(i) => {
                let t = (s - g.y0) / g.hy;
                (
                    lagrange6(&v.col_copy(i), g.periodic_y, t),
                    Complex64::new(
                        0.5 * lagrange6(&vx.col_copy(i), g.periodic_y, t),
                        -0.5 * lagrange6(&vy.col_copy(i), g.periodic_y, t),
                    ),
                )
            }
        };
        let dir = match line {
            Line::Row(_) => (1.0, 0.0),
            Line::Col(_) => (0.0, 1.0),
        };
        s3_deriv(y, vv, vz, theta0, dir)
    });

    let mut closure: f64 = 0.0;
    for (i, j) in [(0, 0), (0, g.ny - 1), (g.nx - 1, 0), (g.nx - 1, g.ny - 1)] {
        let (pa, _, _) = unpack(&states[g.index(i, j)]);
        let (pb, _, _) = unpack(&alt[g.index(i, j)]);
        closure = closure.max((pa - pb).norm());
    }

    let mut phi = Field::zeros(g);
    let mut normal = Field::zeros(g);
    let mut phi_z = Field::zeros(g);
    let mut sphere_drift: f64 = 0.0;
    let mut normal_drift: f64 = 0.0;
    let mut conformal_drift: f64 = 0.0;
    for i in 0..g.nx {
        for j in 0..g.ny {
            let (p, pz, n) = unpack(&states[g.index(i, j)]);
            phi.set(i, j, p);
            normal.set(i, j, n);
            phi_z.set(i, j, pz);
            sphere_drift = sphere_drift.max((p.norm() - 1.0).abs());
            normal_drift = normal_drift.max((n.norm() - 1.0).abs()).max(p.dot(&n).abs());
            let n2: f64 = pz.iter().map(|x| x.norm_sqr()).sum();
            conformal_drift = conformal_drift.max(cdot4(&pz, &pz).norm() / n2);
        }
    }
    if !sphere_drift.is_finite() || sphere_drift > 1e-3 {
        return Err(Error::Numeric(format!(
            "integration drifted off the sphere by {sphere_drift:.3e}"
        )));
    }
    let report = S3IntegrationReport {
        sphere_drift,
        normal_drift,
        conformal_drift,
        closure_residual: closure,
    };
    let theta = Field::new_fill(g, theta0);
    Ok((S3Immersion { phi, normal, v: v.clone(), theta, phi_z: Some(phi_z) }, report))
}

/// Which grid line an integration step runs along.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Line {
    Row(usize),
    Col(usize),
}

/// Integrates a one-step system over the whole grid: axis line through
/// the origin node first, then the transverse lines (`row_first` picks
/// the order; the alternate order serves as a closure check).
pub(crate) fn integrate_sweep<const N: usize>(
    g: &ComplexGrid,
    origin: (usize, usize),
    y0: SVector<f64, N>,
    step_max: f64,
    row_first: bool,
    mut deriv: impl FnMut(Line, f64, &SVector<f64, N>) -> SVector<f64, N>,
) -> Vec<SVector<f64, N>> {
    let (i0, j0) = origin;
    let mut states = vec![SVector::<f64, N>::zeros(); g.node_count()];
    states[g.index(i0, j0)] = y0;

    let march_row = |states: &mut Vec<SVector<f64, N>>, j: usize, deriv: &mut dyn FnMut(Line, f64, &SVector<f64, N>) -> SVector<f64, N>| {
        for dir in [1isize, -1isize] {
            let mut i = i0 as isize;
            let mut y = states[g.index(i0, j)];
            while (0..g.nx as isize).contains(&(i + dir)) {
                let inext = i + dir;
                let m = rk4::substeps(g.hx, step_max);
                let mut f = |x: f64, yy: &SVector<f64, N>| deriv(Line::Row(j), x, yy);
                y = rk4::rk4_span(&y, g.x(i as usize), g.x(inext as usize), m, &mut f);
                states[g.index(inext as usize, j)] = y;
                i = inext;
            }
        }
    };
    let march_col = |states: &mut Vec<SVector<f64, N>>, i: usize, deriv: &mut dyn FnMut(Line, f64, &SVector<f64, N>) -> SVector<f64, N>| {
        for dir in [1isize, -1isize] {
            let mut j = j0 as isize;
            let mut y = states[g.index(i, j0)];
            while (0..g.ny as isize).contains(&(j + dir)) {
                let jnext = j + dir;
                let m = rk4::substeps(g.hy, step_max);
                let mut f = |yc: f64, yy: &SVector<f64, N>| deriv(Line::Col(i), yc, yy);
                y = rk4::rk4_span(&y, g.y(j as usize), g.y(jnext as usize), m, &mut f);
                states[g.index(i, jnext as usize)] = y;
                j = jnext;
            }
        }
    };

    if row_first {
        march_row(&mut states, j0, &mut deriv);
        for i in 0..g.nx {
            march_col(&mut states, i, &mut deriv);
        }
    } else {
        march_col(&mut states, i0, &mut deriv);
        for j in 0..g.ny {
            march_row(&mut states, j, &mut deriv);
        }
    }
    states
}
