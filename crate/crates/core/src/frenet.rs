//! Fundamental data `(u, A, C_j, γ_j, f_j)` of minimal immersions into
//! `S²×S²`, their compatibility residuals, gauge changes, the
//! moving-frame integrator and the inverse extraction.

use crate::cxgrid::{self, ComplexGrid, Field, ResidualNorm};
use crate::error::{Error, Result};
use crate::interp::lagrange6;
use crate::s2xs2::chart::cross_c;
use crate::s2xs2::invariants::normal_frame_at;
use crate::s2xs2::{kahler_functions, ProductImmersion};
use crate::s3min::{integrate_sweep, Line};
use crate::sinhgordon;
use nalgebra::{SVector, Vector3, Vector6};
use num_complex::Complex64;

type CVec6 = Vector6<Complex64>;

/// The tuple `(u, A, C₁, C₂, γ₁, γ₂, f₁, f₂)` on a grid.
#[derive(Debug, Clone)]
pub struct FundamentalData {
    pub u: Field<f64>,
    pub a: Field<Complex64>,
    pub c1: Field<f64>,
    pub c2: Field<f64>,
    pub gamma1: Field<Complex64>,
    pub gamma2: Field<Complex64>,
    pub f1: Field<Complex64>,
    pub f2: Field<Complex64>,
}

impl FundamentalData {
    pub fn grid(&self) -> &ComplexGrid {
        self.u.grid()
    }

    /// Nodewise norm constraint `|γ_j|² = e^{2u}(1−C_j²)/2` and
    /// `C_j² ≤ 1`; the residual of the former is returned.
    pub fn norm_constraint_residual(&self) -> Result<ResidualNorm> {
        let g = *self.grid();
        for (c, name) in [(&self.c1, "C1"), (&self.c2, "C2")] {
            for &x in c.values() {
                if x * x > 1.0 + 1e-12 {
                    return Err(Error::Precondition(format!("{name}² exceeds 1")));
                }
            }
        }
        let r = Field::from_fn(g, |i, j| {
            let e2u = (2.0 * self.u.get(i, j)).exp();
            let r1 = self.gamma1.get(i, j).norm_sqr()
                - e2u * (1.0 - self.c1.get(i, j).powi(2)) / 2.0;
            let r2 = self.gamma2.get(i, j).norm_sqr()
                - e2u * (1.0 - self.c2.get(i, j).powi(2)) / 2.0;
            r1.abs().max(r2.abs())
        });
        Ok(cxgrid::residual_norm(&r))
    }
}

/// Residual norms of the four compatibility families, per `j`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CompatibilityReport {
    /// `(C_j)_z − 2i e^{−2u} f_j γ̄_j`
    pub c_eq: [ResidualNorm; 2],
    /// `(γ_j)_z̄ − (−1)^{j+1} Ā γ_j`
    pub gamma_eq: [ResidualNorm; 2],
    /// `(f_j)_z̄ − i(e^{2u}/4) C_j γ_j − (−1)^{j+1} Ā f_j`
    pub f_eq: [ResidualNorm; 2],
    /// `|γ_j|² − e^{2u}(1−C_j²)/2`
    pub norm_eq: [ResidualNorm; 2],
}

impl CompatibilityReport {
    /// Worst rms among all eight residual families.
    pub fn worst_rms(&self) -> f64 {
        let all = [&self.c_eq, &self.gamma_eq, &self.f_eq, &self.norm_eq];
        all.iter().flat_map(|fam| fam.iter()).map(|r| r.rms).fold(0.0, f64::max)
    }
}

/// Evaluates the compatibility equations of Prop-type structure data by
/// stencil differentiation.
pub fn compatibility_residuals(d: &FundamentalData) -> Result<CompatibilityReport> {
    let g = *d.grid();
    let e2u = d.u.map(|x| (2.0 * x).exp());
    let mut cs = Vec::with_capacity(2);
    let mut gs = Vec::with_capacity(2);
    let mut fs = Vec::with_capacity(2);
    let mut ns = Vec::with_capacity(2);
    for j in 0..2 {
        let (c, gamma, f) = if j == 0 {
            (&d.c1, &d.gamma1, &d.f1)
        } else {
            (&d.c2, &d.gamma2, &d.f2)
        };
        let sgn = if j == 0 { 1.0 } else { -1.0 };
        let cz = cxgrid::d_z(&c.map(Complex64::from))?;
        let r1 = Field::from_fn(g, |i, jj| {
            cz.get(i, jj)
                - Complex64::new(0.0, 2.0) / e2u.get(i, jj)
                    * f.get(i, jj)
                    * gamma.get(i, jj).conj()
        });
        cs.push(cxgrid::residual_norm(&r1));

        let gzb = cxgrid::d_zbar(gamma)?;
        let r2 = Field::from_fn(g, |i, jj| {
            gzb.get(i, jj) - d.a.get(i, jj).conj() * gamma.get(i, jj) * sgn
        });
        gs.push(cxgrid::residual_norm(&r2));

        let fzb = cxgrid::d_zbar(f)?;
        let r3 = Field::from_fn(g, |i, jj| {
            fzb.get(i, jj)
                - Complex64::new(0.0, e2u.get(i, jj) / 4.0) * c.get(i, jj) * gamma.get(i, jj)
                - d.a.get(i, jj).conj() * f.get(i, jj) * sgn
        });
        fs.push(cxgrid::residual_norm(&r3));

        let r4 = Field::from_fn(g, |i, jj| {
            gamma.get(i, jj).norm_sqr() - e2u.get(i, jj) * (1.0 - c.get(i, jj).powi(2)) / 2.0
        });
        ns.push(cxgrid::residual_norm(&r4));
    }
    Ok(CompatibilityReport {
        c_eq: [cs[0], cs[1]],
        gamma_eq: [gs[0], gs[1]],
        f_eq: [fs[0], fs[1]],
        norm_eq: [ns[0], ns[1]],
    })
}

/// Fundamental data of the 1-parameter family attached to a sinh-Gordon
/// pair `(v, w)`:
/// `C₁ = tanh(v−w)`, `C₂ = tanh(v+w)`, `e^{2u} = 4cosh(v+w)cosh(v−w)`,
/// `γ₁ = √2 e^{it/2} √(cosh(v+w)/cosh(v−w))`, `γ₂` with the reciprocal
/// ratio, `A = (log √(cosh(v+w)/cosh(v−w)))_z`, `f_j = −iγ_j(v+(−1)ʲw)_z`.
pub fn from_sinh_gordon(v: &Field<f64>, w: &Field<f64>, t: f64) -> Result<FundamentalData> {
    if !v.grid().same_layout(w.grid()) {
        return Err(Error::GridMismatch("from_sinh_gordon: v and w grids differ".into()));
    }
    for (f, name) in [(v, "v"), (w, "w")] {
        let r = sinhgordon::residual(f)?;
        if r.rms > 1e-5 {
            return Err(Error::Precondition(format!(
                "{name} does not solve sinh-Gordon: rms {:.3e}",
                r.rms
            )));
        }
    }
    let phase = Complex64::from_polar(1.0, 0.5 * t);
    let sqrt2 = std::f64::consts::SQRT_2;

    let plus = v.zip_map(w, |a, b| a + b)?;
    let minus = v.zip_map(w, |a, b| a - b)?;
    let u = plus.zip_map(&minus, |p, m| 0.5 * (4.0 * p.cosh() * m.cosh()).ln())?;
    let c1 = minus.map(|x| x.tanh());
    let c2 = plus.map(|x| x.tanh());
    let ratio = plus.zip_map(&minus, |p, m| (p.cosh() / m.cosh()).sqrt())?;
    let gamma1 = ratio.map(|r| phase * (sqrt2 * r));
    let gamma2 = ratio.map(|r| phase * (sqrt2 / r));
    let log_ratio = ratio.map(|r| r.ln());
    let a = cxgrid::d_z(&log_ratio.map(Complex64::from))?;
    let minus_z = cxgrid::d_z(&minus.map(Complex64::from))?;
    let plus_z = cxgrid::d_z(&plus.map(Complex64::from))?;
    let f1 = gamma1.zip_map(&minus_z, |gm, dz| -Complex64::i() * gm * dz)?;
    let f2 = gamma2.zip_map(&plus_z, |gm, dz| -Complex64::i() * gm * dz)?;

    let d = FundamentalData { u, a, c1, c2, gamma1, gamma2, f1, f2 };
    d.norm_constraint_residual()?;
    Ok(d)
}

/// Change of orthonormal normal reference `ξ ↦ e^{iθ}ξ`:
/// `γ₁* = e^{−iθ}γ₁`, `γ₂* = e^{iθ}γ₂`, `f₁* = e^{−iθ}f₁`,
/// `f₂* = e^{iθ}f₂`, `A* = iθ_z + A`.
pub fn gauge_rotate(d: &FundamentalData, theta: &Field<f64>) -> Result<FundamentalData> {
    if !d.grid().same_layout(theta.grid()) {
        return Err(Error::GridMismatch("gauge_rotate: theta grid differs".into()));
    }
    let theta_z = cxgrid::d_z(&theta.map(Complex64::from))?;
    let em = theta.map(|t| Complex64::from_polar(1.0, -t));
    let ep = theta.map(|t| Complex64::from_polar(1.0, t));
    Ok(FundamentalData {
        u: d.u.clone(),
        a: d.a.zip_map(&theta_z, |a, tz| a + Complex64::i() * tz)?,
        c1: d.c1.clone(),
        c2: d.c2.clone(),
        gamma1: d.gamma1.zip_map(&em, |g, e| g * e)?,
        gamma2: d.gamma2.zip_map(&ep, |g, e| g * e)?,
        f1: d.f1.zip_map(&em, |f, e| f * e)?,
        f2: d.f2.zip_map(&ep, |f, e| f * e)?,
    })
}

/// An adapted frame at one point: base point, first derivative and the
/// complex normal direction `ξ = (N − iÑ)/√2`.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    pub phi: Vector6<f64>,
    pub phi_z: CVec6,
    pub xi: CVec6,
}

#[inline]
fn cdot(a: &CVec6, b: &CVec6) -> Complex64 {
    (0..6).map(|k| a[k] * b[k]).sum()
}

#[inline]
fn hdot(a: &CVec6, b: &CVec6) -> Complex64 {
    (0..6).map(|k| a[k] * b[k].conj()).sum()
}

fn j1_at(phi: &Vector6<f64>, a: &CVec6) -> CVec6 {
    let p1 = Vector3::new(phi[0], phi[1], phi[2]);
    let p2 = Vector3::new(phi[3], phi[4], phi[5]);
    let b1 = cross_c(p1, Vector3::new(a[0], a[1], a[2]));
    let b2 = cross_c(p2, Vector3::new(a[3], a[4], a[5]));
    Vector6::new(b1[0], b1[1], b1[2], b2[0], b2[1], b2[2])
}

fn j2_at(phi: &Vector6<f64>, a: &CVec6) -> CVec6 {
    let p1 = Vector3::new(phi[0], phi[1], phi[2]);
    let p2 = Vector3::new(phi[3], phi[4], phi[5]);
    let b1 = cross_c(p1, Vector3::new(a[0], a[1], a[2]));
    let b2 = -cross_c(p2, Vector3::new(a[3], a[4], a[5]));
    Vector6::new(b1[0], b1[1], b1[2], b2[0], b2[1], b2[2])
}

/// Deterministic adapted frame at the origin node of the data grid.
///
/// The base point is `((0,0,−1), (0,0,−1))`; the factor derivatives are
/// solved from the algebraic relations
/// `J₁Φ_z = iC₁Φ_z + γ₁ξ`, `J₂Φ_z = iC₂Φ_z + γ₂ξ̄` using the closed
/// factor splittings `|∂Φ₁|² = (e^{2u}/8)(1+C₁)(1+C₂)` etc., with the
/// holomorphic parts taken real-positive and the seed tangent rotated
/// by `seed_angle`. Fails when the data violate the norm constraints.
pub fn canonical_frame(d: &FundamentalData, seed_angle: f64) -> Result<AdaptedFrame> {
    let g = d.grid();
    let (i0, j0) = g.origin_node();
    let e2u = (2.0 * d.u.get(i0, j0)).exp();
    let c1 = d.c1.get(i0, j0);
    let c2 = d.c2.get(i0, j0);
    let g1 = d.gamma1.get(i0, j0);
    let g2 = d.gamma2.get(i0, j0);

    for (gj, cj, name) in [(g1, c1, "γ1"), (g2, c2, "γ2")] {
        let expected = e2u * (1.0 - cj * cj) / 2.0;
        if (gj.norm_sqr() - expected).abs() > 1e-8 * (1.0 + e2u) {
            return Err(Error::Precondition(format!(
                "canonical_frame: |{name}|² = {:.6e} violates the norm constraint {:.6e}",
                gj.norm_sqr(),
                expected
            )));
        }
    }

    // factor splittings of Φ_z into (1,0)- and (0,1)-parts
    let q = e2u / 8.0;
    let a2 = q * (1.0 + c1) * (1.0 + c2);
    let b2 = q * (1.0 - c1) * (1.0 - c2);
    let c2f = q * (1.0 + c1) * (1.0 - c2);
    let d2f = q * (1.0 - c1) * (1.0 + c2);
    let prod = g1 * g2 / 4.0; // αβ = γ₁γ₂/4 = −γδ
    let alpha = Complex64::new(a2.max(0.0).sqrt(), 0.0);
    let beta = if alpha.norm() > 1e-14 { prod / alpha } else { Complex64::new(b2.sqrt(), 0.0) };
    let gam = Complex64::new(c2f.max(0.0).sqrt(), 0.0);
    let delta = if gam.norm() > 1e-14 { -prod / gam } else { Complex64::new(d2f.sqrt(), 0.0) };

    // base point and holomorphic frame of each factor sphere
    let p = Vector3::new(0.0, 0.0, -1.0);
    let t = Vector3::new(seed_angle.cos(), -seed_angle.sin(), 0.0);
    let jt = p.cross(&t);
    let eps: Vector3<Complex64> =
        Vector3::from_fn(|k, _| Complex64::new(t[k], -jt[k]) / std::f64::consts::SQRT_2);
    let epsb = eps.map(|x| x.conj());

    let d1 = eps.map(|x| alpha * x) + epsb.map(|x| beta * x);
    let d2v = eps.map(|x| gam * x) + epsb.map(|x| delta * x);
    let phi = Vector6::new(p[0], p[1], p[2], p[0], p[1], p[2]);
    let phi_z = Vector6::new(d1[0], d1[1], d1[2], d2v[0], d2v[1], d2v[2]);

    // ξ from the less degenerate of the two algebraic relations
    let xi = if g1.norm() >= g2.norm() {
        if g1.norm() < 1e-12 {
            return Err(Error::Precondition(
                "canonical_frame: both γ_j vanish (complex point); the integrator excludes complex data".into(),
            ));
        }
        let raw = j1_at(&phi, &phi_z) - phi_z.map(|x| Complex64::i() * c1 * x);
        raw.map(|x| x / g1)
    } else {
        let raw = j2_at(&phi, &phi_z) - phi_z.map(|x| Complex64::i() * c2 * x);
        raw.map(|x| (x / g2).conj())
    };

    let frame = AdaptedFrame { phi, phi_z, xi };
    verify_frame(&frame, e2u, c1, c2, g1, g2)?;
    Ok(frame)
}

/// Checks the AdaptedFrame invariants against data values.
fn verify_frame(
    fr: &AdaptedFrame,
    e2u: f64,
    c1: f64,
    c2: f64,
    g1: Complex64,
    g2: Complex64,
) -> Result<()> {
    let tol = 1e-8 * (1.0 + e2u);
    let xi = &fr.xi;
    let checks = [
        ((hdot(xi, xi) - Complex64::new(1.0, 0.0)).norm(), "|ξ| = 1"),
        (cdot(xi, xi).norm(), "⟨ξ,ξ⟩ = 0"),
        ((hdot(&fr.phi_z, &fr.phi_z).re - e2u / 2.0).abs(), "|Φ_z|² = e^{2u}/2"),
        (cdot(&fr.phi_z, &fr.phi_z).norm(), "⟨Φ_z,Φ_z⟩ = 0"),
        (
            {
                let r = j1_at(&fr.phi, &fr.phi_z)
                    - fr.phi_z.map(|x| Complex64::i() * c1 * x)
                    - xi.map(|x| g1 * x);
                r.map(|x| x.norm()).max()
            },
            "J₁ relation",
        ),
        (
            {
                let xib = xi.map(|x| x.conj());
                let r = j2_at(&fr.phi, &fr.phi_z)
                    - fr.phi_z.map(|x| Complex64::i() * c2 * x)
                    - xib.map(|x| g2 * x);
                r.map(|x| x.norm()).max()
            },
            "J₂ relation",
        ),
    ];
    for (err, what) in checks {
        if !(err < tol) {
            return Err(Error::Precondition(format!(
                "canonical_frame: {what} fails by {err:.3e} (inconsistent data)"
            )));
        }
    }
    Ok(())
}

/// Integrator options.
#[derive(Debug, Clone, Copy)]
pub struct FrenetOptions {
    pub step_max: f64,
    /// Per-step re-projection of the factors to the spheres (off by
    /// default; when on, pre/post drift are both reported).
    pub reproject: bool,
    /// Compatibility gate: worst rms ≤ `compat_gate · max e^{2u}`.
    pub compat_gate: f64,
}

impl Default for FrenetOptions {
    fn default() -> Self {
        FrenetOptions { step_max: 1e-3, reproject: false, compat_gate: 1e-6 }
    }
}

/// Integration diagnostics.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FrenetReport {
    /// max nodewise `| |Φ_k| − 1 |` over both factors.
    pub sphere_drift: f64,
    /// max nodewise frame defect: `| |ξ|−1 |`, `|⟨ξ,ξ⟩|`, `|⟨Φ_z,Φ_z⟩|/e^{2u}`.
    pub frame_drift: f64,
    /// max corner discrepancy of Φ between the two sweep orders.
    pub closure_residual: f64,
    /// pre-projection drift when `reproject` is on (equals
    /// `sphere_drift` otherwise).
    pub raw_sphere_drift: f64,
}

// state: Φ[0..6], Re Φ_z[6..12], Im Φ_z[12..18], Re ξ[18..24], Im ξ[24..30]
const FRENET_DIM: usize = 30;
type FState = SVector<f64, FRENET_DIM>;

fn fpack(phi: Vector6<f64>, pz: CVec6, xi: CVec6) -> FState {
    let mut y = FState::zeros();
    for k in 0..6 {
        y[k] = phi[k];
        y[6 + k] = pz[k].re;
        y[12 + k] = pz[k].im;
        y[18 + k] = xi[k].re;
        y[24 + k] = xi[k].im;
    }
    y
}

fn funpack(y: &FState) -> (Vector6<f64>, CVec6, CVec6) {
    let phi = Vector6::from_fn(|k, _| y[k]);
    let pz = Vector6::from_fn(|k, _| Complex64::new(y[6 + k], y[12 + k]));
    let xi = Vector6::from_fn(|k, _| Complex64::new(y[18 + k], y[24 + k]));
    (phi, pz, xi)
}

/// Coefficient values at an evaluation point.
#[derive(Debug, Clone, Copy)]
struct Coeffs {
    u: f64,
    u_z: Complex64,
    c1: f64,
    c2: f64,
    g1: Complex64,
    g2: Complex64,
    f1: Complex64,
    f2: Complex64,
    a: Complex64,
}

fn frenet_deriv(y: &FState, c: &Coeffs, dir: (f64, f64)) -> FState {
    let (phi, pz, xi) = funpack(y);
    let e2u = (2.0 * c.u).exp();
    let phic = phi.map(|x| Complex64::new(x, 0.0));
    let phihat = Vector6::new(
        Complex64::new(phi[0], 0.0),
        Complex64::new(phi[1], 0.0),
        Complex64::new(phi[2], 0.0),
        Complex64::new(-phi[3], 0.0),
        Complex64::new(-phi[4], 0.0),
        Complex64::new(-phi[5], 0.0),
    );
    let pzb = pz.map(|x| x.conj());
    let xib = xi.map(|x| x.conj());

    // Frenet system of a minimal immersion
    let phi_zz = pz.map(|x| x * (2.0 * c.u_z))
        + xi.map(|x| x * c.f1)
        + xib.map(|x| x * c.f2)
        - phihat.map(|x| x * (c.g1 * c.g2 / 2.0));
    let phi_zzb =
        phic.map(|x| x * (-e2u / 4.0)) + phihat.map(|x| x * (-e2u / 4.0 * c.c1 * c.c2));
    let xi_z = pzb.map(|x| x * (-2.0 / e2u * c.f2))
        + xi.map(|x| x * c.a)
        + phihat.map(|x| x * (Complex64::i() * c.c1 * c.g2 / 2.0));
    let xi_zb = pz.map(|x| x * (-2.0 / e2u * c.f1.conj()))
        - xi.map(|x| x * c.a.conj())
        - phihat.map(|x| x * (Complex64::i() * c.c2 * c.g1.conj() / 2.0));

    let (cx, cy) = dir;
    let dphi = Vector6::from_fn(|k, _| cx * 2.0 * pz[k].re - cy * 2.0 * pz[k].im);
    let dpz = Vector6::from_fn(|k, _| {
        Complex64::new(cx, 0.0) * (phi_zz[k] + phi_zzb[k])
            + Complex64::new(0.0, cy) * (phi_zz[k] - phi_zzb[k])
    });
    let dxi = Vector6::from_fn(|k, _| {
        Complex64::new(cx, 0.0) * (xi_z[k] + xi_zb[k])
            + Complex64::new(0.0, cy) * (xi_z[k] - xi_zb[k])
    });
    fpack(dphi, dpz, dxi)
}

/// Interpolating evaluator for the nine coefficient fields.
struct DataInterp<'a> {
    d: &'a FundamentalData,
    u_z: Field<Complex64>,
}

impl<'a> DataInterp<'a> {
    fn new(d: &'a FundamentalData) -> Result<Self> {
        let u_z = cxgrid::d_z(&d.u.map(Complex64::from))?;
        Ok(DataInterp { d, u_z })
    }

    fn eval(&self, line: Line, s: f64) -> Coeffs {
        let g = self.d.grid();
        macro_rules! ip {
            ($field:expr) => {
                match line {
                    Line::Row(j) => {
                        lagrange6(&$field.row_copy(j), g.periodic_x, (s - g.x0) / g.hx)
                    }
                    Line::Col(i) => {
                        lagrange6(&$field.col_copy(i), g.periodic_y, (s - g.y0) / g.hy)
                    }
                }
            };
        }
        Coeffs {
            u: ip!(self.d.u),
            u_z: ip!(self.u_z),
            c1: ip!(self.d.c1),
            c2: ip!(self.d.c2),
            g1: ip!(self.d.gamma1),
            g2: ip!(self.d.gamma2),
            f1: ip!(self.d.f1),
            f2: ip!(self.d.f2),
            a: ip!(self.d.a),
        }
    }
}

/// Rebuilds the immersion from fundamental data and an adapted frame at
/// the origin, integrating the 30-dimensional linear system along the
/// x-axis and then along vertical lines.
pub fn frenet_integrate(
    d: &FundamentalData,
    frame: &AdaptedFrame,
    opts: FrenetOptions,
) -> Result<(ProductImmersion, FrenetReport)> {
    let g = *d.grid();
    let (i0, j0) = g.origin_node();
    if g.x(i0).abs() > 1e-12 || g.y(j0).abs() > 1e-12 {
        return Err(Error::Precondition("data grid must contain z = 0 as a node".into()));
    }
    // the discrete integrator has no continuation rule across γ zeros
    for gam in [&d.gamma1, &d.gamma2] {
        for x in gam.values() {
            if x.norm() < 1e-12 {
                return Err(Error::Precondition(
                    "γ_j vanishes at a grid node; the Frenet integrator requires |γ_j| > 0".into(),
                ));
            }
        }
    }
    let compat = compatibility_residuals(d)?;
    let e2u_max = d.u.values().iter().fold(0.0f64, |m, &x| m.max((2.0 * x).exp()));
    if compat.worst_rms() > opts.compat_gate * e2u_max {
        return Err(Error::Precondition(format!(
            "compatibility residuals too large: worst rms {:.3e} > {:.1e}·max e^{{2u}}",
            compat.worst_rms(),
            opts.compat_gate
        )));
    }

    let interp = DataInterp::new(d)?;
    let y0 = fpack(frame.phi, frame.phi_z, frame.xi);
    let mut raw_sphere_drift = 0.0f64;
    let run = |row_first: bool, raw_drift: &mut f64| -> Vec<FState> {
        let mut states = integrate_sweep(&g, (i0, j0), y0, opts.step_max, row_first, |line, s, y| {
            let c = interp.eval(line, s);
            let dir = match line {
                Line::Row(_) => (1.0, 0.0),
                Line::Col(_) => (0.0, 1.0),
            };
            frenet_deriv(y, &c, dir)
        });
        if opts.reproject {
            for y in states.iter_mut() {
                let (mut phi, pz, xi) = funpack(y);
                for half in 0..2 {
                    let r = 3 * half;
                    let n = (phi[r] * phi[r] + phi[r + 1] * phi[r + 1] + phi[r + 2] * phi[r + 2])
                        .sqrt();
                    *raw_drift = raw_drift.max((n - 1.0).abs());
                    for k in 0..3 {
                        phi[r + k] /= n;
                    }
                }
                *y = fpack(phi, pz, xi);
            }
        }
        states
    };
    let states = run(true, &mut raw_sphere_drift);
    let alt = run(false, &mut raw_sphere_drift);

    let mut closure: f64 = 0.0;
    for (i, j) in [(0, 0), (0, g.ny - 1), (g.nx - 1, 0), (g.nx - 1, g.ny - 1)] {
        let (pa, _, _) = funpack(&states[g.index(i, j)]);
        let (pb, _, _) = funpack(&alt[g.index(i, j)]);
        closure = closure.max((pa - pb).norm());
    }

    let mut phi1 = Field::zeros(g);
    let mut phi2 = Field::zeros(g);
    let mut sphere_drift: f64 = 0.0;
    let mut frame_drift: f64 = 0.0;
    for i in 0..g.nx {
        for j in 0..g.ny {
            let (phi, pz, xi) = funpack(&states[g.index(i, j)]);
            phi1.set(i, j, Vector3::new(phi[0], phi[1], phi[2]));
            phi2.set(i, j, Vector3::new(phi[3], phi[4], phi[5]));
            let n1 = Vector3::new(phi[0], phi[1], phi[2]).norm();
            let n2 = Vector3::new(phi[3], phi[4], phi[5]).norm();
            sphere_drift = sphere_drift.max((n1 - 1.0).abs()).max((n2 - 1.0).abs());
            let e2u = (2.0 * d.u.get(i, j)).exp();
            frame_drift = frame_drift
                .max((hdot(&xi, &xi).re - 1.0).abs())
                .max(cdot(&xi, &xi).norm())
                .max(cdot(&pz, &pz).norm() / e2u);
        }
    }
    if !sphere_drift.is_finite() || sphere_drift > 1e-3 {
        return Err(Error::Numeric(format!(
            "integration drifted off the spheres by {sphere_drift:.3e}"
        )));
    }
    if !opts.reproject {
        raw_sphere_drift = sphere_drift;
    }
    let report = FrenetReport { sphere_drift, frame_drift, closure_residual: closure, raw_sphere_drift };
    let p = ProductImmersion::with_tolerance(phi1, phi2, 1e-3)?;
    Ok((p, report))
}

/// Smooth normal frame fields produced by extraction.
#[derive(Debug, Clone)]
pub struct FrameFields {
    pub n_tilde: Field<Vector6<f64>>,
    pub n: Field<Vector6<f64>>,
}

/// Extracts fundamental data from a gridded minimal immersion.
///
/// The normal frame is seeded at the origin node by a deterministic
/// orthonormal completion and propagated node to node (projection onto
/// the new normal space and re-orthonormalization), row `j₀` first and
/// then along every column. Frame derivatives near periodic seams use
/// one-sided stencils (the propagated frame need not close up).
pub fn extract(p: &ProductImmersion) -> Result<(FundamentalData, FrameFields)> {
    let g = *p.grid();
    let kd = kahler_functions(p)?;
    let mc = crate::s2xs2::mean_curvature_residual(p)?;
    let h_worst = cxgrid::residual_norm(&mc.normalized);
    if h_worst.max_abs > 1e-3 {
        return Err(Error::Precondition(format!(
            "extract needs a minimal immersion: normalized H residual {:.3e}",
            h_worst.max_abs
        )));
    }

    let phi6 = p.phi6();
    let phihat = p.phi_hat6();
    let px = cxgrid::dx(&phi6);
    let py = cxgrid::dy(&phi6);

    // propagated orthonormal normal frame
    let (i0, j0) = g.origin_node();
    let mut nt = Field::zeros(g);
    let mut nn = Field::zeros(g);
    let seed = normal_frame_at(p.phi1.get(i0, j0), p.phi2.get(i0, j0), px.get(i0, j0), py.get(i0, j0))?;
    nt.set(i0, j0, seed.0);
    nn.set(i0, j0, seed.1);

    let project = |i: usize, j: usize, w: Vector6<f64>| -> Vector6<f64> {
        // remove ambient-normal and tangent components at node (i,j)
        let pp = phi6.get(i, j);
        let ph = phihat.get(i, j);
        let tx = px.get(i, j);
        let ty = py.get(i, j);
        let mut r = w;
        r -= pp * (w.dot(&pp) / 2.0);
        r -= ph * (w.dot(&ph) / 2.0);
        // Gram solve over the (nearly orthogonal) tangent pair
        let gxx = tx.dot(&tx);
        let gxy = tx.dot(&ty);
        let gyy = ty.dot(&ty);
        let det = gxx * gyy - gxy * gxy;
        let cx = (r.dot(&tx) * gyy - r.dot(&ty) * gxy) / det;
        let cy = (r.dot(&ty) * gxx - r.dot(&tx) * gxy) / det;
        r - tx * cx - ty * cy
    };
    let step_frame = |from: (usize, usize), to: (usize, usize), nt: &mut Field<Vector6<f64>>, nn: &mut Field<Vector6<f64>>| -> Result<()> {
        let a = project(to.0, to.1, nt.get(from.0, from.1));
        let na = a.norm();
        let mut b = project(to.0, to.1, nn.get(from.0, from.1));
        if na < 1e-6 {
            return Err(Error::Precondition(format!(
                "normal frame propagation degenerated at node {to:?}"
            )));
        }
        let a = a / na;
        b -= a * b.dot(&a);
        let nb = b.norm();
        if nb < 1e-6 {
            return Err(Error::Precondition(format!(
                "normal frame propagation degenerated at node {to:?}"
            )));
        }
        nt.set(to.0, to.1, a);
        nn.set(to.0, to.1, b / nb);
        Ok(())
    };
    for dir in [1isize, -1isize] {
        let mut i = i0 as isize;
        while (0..g.nx as isize).contains(&(i + dir)) {
            step_frame((i as usize, j0), ((i + dir) as usize, j0), &mut nt, &mut nn)?;
            i += dir;
        }
    }
    for i in 0..g.nx {
        for dir in [1isize, -1isize] {
            let mut j = j0 as isize;
            while (0..g.ny as isize).contains(&(j + dir)) {
                step_frame((i, j as usize), (i, (j + dir) as usize), &mut nt, &mut nn)?;
                j += dir;
            }
        }
    }

    // ξ = (N − iÑ)/√2, differentiated on a non-periodic copy of the grid
    // (the propagated frame need not match across periodic seams)
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let xi = nn.zip_map(&nt, |n, t| {
        Vector6::from_fn(|k, _| Complex64::new(n[k] * s, -t[k] * s))
    })?;
    let mut g_open = g;
    g_open.periodic_x = false;
    g_open.periodic_y = false;
    let xi_open = Field::from_values(g_open, xi.values().to_vec())?;
    let xi_z_open = cxgrid::d_z(&xi_open)?;
    let xi_z = Field::from_values(g, xi_z_open.values().to_vec())?;

    let phi_zz = cxgrid::d_z(&kd.phi_z)?;
    let mut gamma1 = Field::zeros(g);
    let mut gamma2 = Field::zeros(g);
    let mut f1 = Field::zeros(g);
    let mut f2 = Field::zeros(g);
    let mut a = Field::zeros(g);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let xiv = xi.get(i, j);
            let xib = xiv.map(|x| x.conj());
            let pz = kd.phi_z.get(i, j);
            let pp = phi6.get(i, j);
            gamma1.set(i, j, cdot(&j1_at(&pp, &pz), &xib));
            gamma2.set(i, j, cdot(&j2_at(&pp, &pz), &xiv));
            f1.set(i, j, cdot(&phi_zz.get(i, j), &xib));
            f2.set(i, j, cdot(&phi_zz.get(i, j), &xiv));
            a.set(i, j, cdot(&xi_z.get(i, j), &xib));
        }
    }
    let data = FundamentalData {
        u: kd.u,
        a,
        c1: kd.c1,
        c2: kd.c2,
        gamma1,
        gamma2,
        f1,
        f2,
    };
    Ok((data, FrameFields { n_tilde: nt, n: nn }))
}
