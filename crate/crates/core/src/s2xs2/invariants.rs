//! Invariant extraction from gridded product-sphere immersions.

use super::catalog::SurfaceMeta;
use super::chart::cross_c;
use super::ProductImmersion;
use crate::cxgrid::{self, Field, ResidualNorm};
use crate::error::{Error, Result};
use nalgebra::{Matrix2, Matrix4, Vector2, Vector3, Vector6};
use num_complex::Complex64;

/// Relative conformality tolerance accepted by the Kähler extractor.
pub const CONFORMALITY_TOL: f64 = 1e-4;

type CVec6 = Vector6<Complex64>;

#[inline]
fn cdot(a: &CVec6, b: &CVec6) -> Complex64 {
    // complex-bilinear extension of the Euclidean inner product
    (0..6).map(|k| a[k] * b[k]).sum()
}

#[inline]
fn rdot(a: &CVec6, b: &Vector6<f64>) -> Complex64 {
    (0..6).map(|k| a[k] * b[k]).sum()
}

#[inline]
fn hnorm2(a: &CVec6) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `J₁ = (J, J)` acting on a complexified tangent vector at `(p₁, p₂)`.
fn j1(p1: Vector3<f64>, p2: Vector3<f64>, a: &CVec6) -> CVec6 {
    let a1 = Vector3::new(a[0], a[1], a[2]);
    let a2 = Vector3::new(a[3], a[4], a[5]);
    let b1 = cross_c(p1, a1);
    let b2 = cross_c(p2, a2);
    Vector6::new(b1[0], b1[1], b1[2], b2[0], b2[1], b2[2])
}

/// `J₂ = (J, −J)`.
fn j2(p1: Vector3<f64>, p2: Vector3<f64>, a: &CVec6) -> CVec6 {
    let a1 = Vector3::new(a[0], a[1], a[2]);
    let a2 = Vector3::new(a[3], a[4], a[5]);
    let b1 = cross_c(p1, a1);
    let b2 = -cross_c(p2, a2);
    Vector6::new(b1[0], b1[1], b1[2], b2[0], b2[1], b2[2])
}

/// Shared first-derivative data of an immersion.
#[derive(Debug, Clone)]
pub struct KahlerData {
    pub phi_z: Field<CVec6>,
    pub u: Field<f64>,
    pub e2u: Field<f64>,
    pub c1: Field<f64>,
    pub c2: Field<f64>,
    /// Interior norm of `⟨Φ_z, Φ_z⟩ / e^{2u}` (conformality defect).
    pub conformality: ResidualNorm,
    /// Interior norm of the imaginary parts of the measured `C_j`.
    pub c_imag: ResidualNorm,
}

/// Kähler functions `C_j = −2i e^{−2u}⟨J_jΦ_z, Φ_z̄⟩` and the conformal
/// log-factor `u = ½ log(2|Φ_z|²)`.
pub fn kahler_functions(p: &ProductImmersion) -> Result<KahlerData> {
    let phi6c = p.phi6().map(|v| v.map(|x| Complex64::new(x, 0.0)));
    let phi_z = cxgrid::d_z(&phi6c)?;
    kahler_from_phi_z(p, phi_z)
}

/// Same extraction, reusing an externally supplied first derivative
/// (integrators carry `Φ_z` exactly).
pub fn kahler_from_phi_z(p: &ProductImmersion, phi_z: Field<CVec6>) -> Result<KahlerData> {
    let g = *p.grid();
    let e2u = phi_z.map(|v| 2.0 * hnorm2(&v));
    for &x in e2u.values() {
        if !(x > 0.0) {
            return Err(Error::Precondition("vanishing differential at a node".into()));
        }
    }
    let u = e2u.map(|x| 0.5 * x.ln());

    let conf = Field::from_fn(g, |i, j| {
        let v = phi_z.get(i, j);
        cdot(&v, &v).norm() / e2u.get(i, j)
    });
    let conformality = cxgrid::residual_norm(&conf);
    if conformality.max_abs > CONFORMALITY_TOL {
        return Err(Error::Precondition(format!(
            "chart is not conformal: relative defect {:.3e}",
            conformality.max_abs
        )));
    }

    let mut c1 = Field::zeros(g);
    let mut c2 = Field::zeros(g);
    let mut c_imag = Field::zeros(g);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let pz = phi_z.get(i, j);
            let pzb = pz.map(|x| x.conj());
            let p1 = p.phi1.get(i, j);
            let p2 = p.phi2.get(i, j);
            let scale = Complex64::new(0.0, -2.0 / e2u.get(i, j));
            let v1 = scale * cdot(&j1(p1, p2, &pz), &pzb);
            let v2 = scale * cdot(&j2(p1, p2, &pz), &pzb);
            c1.set(i, j, v1.re);
            c2.set(i, j, v2.re);
            c_imag.set(i, j, v1.im.abs().max(v2.im.abs()));
        }
    }
    let c_imag = cxgrid::residual_norm(&c_imag);
    Ok(KahlerData { phi_z, u, e2u, c1, c2, conformality, c_imag })
}

/// Jacobians of the factor maps: `Jac Φ₁ = (C₁+C₂)/2`, `Jac Φ₂ = (C₁−C₂)/2`.
pub fn jacobians(c1: &Field<f64>, c2: &Field<f64>) -> Result<(Field<f64>, Field<f64>)> {
    let jac1 = c1.zip_map(c2, |a, b| 0.5 * (a + b))?;
    let jac2 = c1.zip_map(c2, |a, b| 0.5 * (a - b))?;
    Ok((jac1, jac2))
}

/// Degrees `d_j = (1/4π) ∫ Jac Φ_j dA` of a closed-surface chart.
pub fn degrees(p: &ProductImmersion) -> Result<(f64, f64)> {
    let g = p.grid();
    if !(g.periodic_x && g.periodic_y) {
        return Err(Error::Precondition(
            "degrees need a doubly periodic (closed surface) chart".into(),
        ));
    }
    let kd = kahler_functions(p)?;
    let (jac1, jac2) = jacobians(&kd.c1, &kd.c2)?;
    let f = 4.0 * std::f64::consts::PI;
    Ok((cxgrid::integrate(&jac1, &kd.u)? / f, cxgrid::integrate(&jac2, &kd.u)? / f))
}

/// Mean-curvature residual: the part of `Φ_zz̄` outside
/// `span{Φ, Φ̂, Φ_x, Φ_y}` (equal to `(e^{2u}/2) H` on a conformal chart).
#[derive(Debug, Clone)]
pub struct MeanCurvatureResidual {
    /// `|remainder|` nodewise.
    pub raw: Field<f64>,
    /// `|remainder| / e^{2u}` nodewise (`= |H|/2` on conformal charts).
    pub normalized: Field<f64>,
}

pub fn mean_curvature_residual(p: &ProductImmersion) -> Result<MeanCurvatureResidual> {
    let g = *p.grid();
    let phi6 = p.phi6();
    let phi_hat = p.phi_hat6();
    let phi6c = phi6.map(|v| v.map(|x| Complex64::new(x, 0.0)));
    let phi_z = cxgrid::d_z(&phi6c)?;
    let phi_zzb = cxgrid::d_zbar(&phi_z)?;

    let mut raw = Field::zeros(g);
    let mut normalized = Field::zeros(g);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let v = phi_zzb.get(i, j);
            let pp = phi6.get(i, j);
            let ph = phi_hat.get(i, j);
            let pz = phi_z.get(i, j);
            // ambient-normal components (|Φ|² = |Φ̂|² = 2, orthogonal)
            let ca = rdot(&v, &pp) / 2.0;
            let cb = rdot(&v, &ph) / 2.0;
            // tangent components via the Gram matrix of {Φ_x, Φ_y}
            let txr: Vector6<f64> = pz.map(|x| 2.0 * x.re); // Φ_x
            let tyr: Vector6<f64> = pz.map(|x| -2.0 * x.im); // Φ_y
            let gxx = txr.dot(&txr);
            let gxy = txr.dot(&tyr);
            let gyy = tyr.dot(&tyr);
            let rx = rdot(&v, &txr);
            let ry = rdot(&v, &tyr);
            let gram = Matrix2::new(gxx, gxy, gxy, gyy);
            let inv = gram.try_inverse().ok_or_else(|| {
                Error::Precondition(format!("degenerate differential at node ({i},{j})"))
            })?;
            let cre = inv * Vector2::new(rx.re, ry.re);
            let cim = inv * Vector2::new(rx.im, ry.im);
            let mut rem2 = 0.0;
            for k in 0..6 {
                let t = v[k]
                    - ca * pp[k]
                    - cb * ph[k]
                    - Complex64::new(cre[0], cim[0]) * txr[k]
                    - Complex64::new(cre[1], cim[1]) * tyr[k];
                rem2 += t.norm_sqr();
            }
            let r = rem2.sqrt();
            raw.set(i, j, r);
            let e2u = 2.0 * hnorm2(&pz);
            normalized.set(i, j, r / e2u);
        }
    }
    Ok(MeanCurvatureResidual { raw, normalized })
}

/// Second fundamental form in the orthonormal frame
/// `{e₁, e₂} = e^{−u}{Φ_x, Φ_y}` against the oriented normal frame
/// `{Ñ, N}`; entries ordered (11, 12, 22).
#[derive(Debug, Clone)]
pub struct SecondFundamentalForm {
    pub h_t: [Field<f64>; 3],
    pub h_n: [Field<f64>; 3],
}

impl SecondFundamentalForm {
    pub fn norm2_at(&self, i: usize, j: usize) -> f64 {
        let s = |f: &[Field<f64>; 3]| {
            f[0].get(i, j).powi(2) + 2.0 * f[1].get(i, j).powi(2) + f[2].get(i, j).powi(2)
        };
        s(&self.h_t) + s(&self.h_n)
    }

    pub fn mean_curvature2_at(&self, i: usize, j: usize) -> f64 {
        let m = |f: &[Field<f64>; 3]| 0.5 * (f[0].get(i, j) + f[2].get(i, j));
        m(&self.h_t).powi(2) + m(&self.h_n).powi(2)
    }

    /// `⟨[A_N, A_Ñ] e₁, e₂⟩` (the Ricci-equation commutator term):
    /// with shapes t = A_Ñ, n = A_N this is `n₁₂(t₁₁−t₂₂) − t₁₂(n₁₁−n₂₂)`.
    pub fn weingarten_commutator_at(&self, i: usize, j: usize) -> f64 {
        let t = [self.h_t[0].get(i, j), self.h_t[1].get(i, j), self.h_t[2].get(i, j)];
        let n = [self.h_n[0].get(i, j), self.h_n[1].get(i, j), self.h_n[2].get(i, j)];
        n[1] * (t[0] - t[2]) - t[1] * (n[0] - n[2])
    }
}

/// Orthonormal basis of the normal bundle of `Σ` inside `S²×S²` at one
/// node, oriented so `{Φ_x, Φ_y, Ñ, N}` is positive for the ambient
/// orientation form `π₁*ω ∧ π₂*ω`.
pub(crate) fn normal_frame_at(
    p1: Vector3<f64>,
    p2: Vector3<f64>,
    tx: Vector6<f64>,
    ty: Vector6<f64>,
) -> Result<(Vector6<f64>, Vector6<f64>)> {
    let pp = Vector6::new(p1[0], p1[1], p1[2], p2[0], p2[1], p2[2]);
    let ph = Vector6::new(p1[0], p1[1], p1[2], -p2[0], -p2[1], -p2[2]);
    let mut span = [pp / pp.norm(), ph / ph.norm(), tx, ty];
    // orthonormalize the tangent part against the ambient normals
    for k in 2..4 {
        for l in 0..k {
            let c = span[k].dot(&span[l]);
            span[k] -= span[l] * c;
        }
        let n = span[k].norm();
        if n < 1e-12 {
            return Err(Error::Precondition("degenerate tangent frame".into()));
        }
        span[k] /= n;
    }

    // complete to an orthonormal basis of ℝ⁶ by the two best seeds
    let mut best: Vec<(f64, usize)> = (0..6)
        .map(|a| {
            let mut e = Vector6::zeros();
            e[a] = 1.0;
            let mut r = e;
            for s in &span {
                r -= s * e.dot(s);
            }
            (r.norm(), a)
        })
        .collect();
    best.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

    let mut frame: Vec<Vector6<f64>> = Vec::with_capacity(2);
    for &(_, a) in best.iter() {
        if frame.len() == 2 {
            break;
        }
        let mut e = Vector6::zeros();
        e[a] = 1.0;
        for s in span.iter().chain(frame.iter()) {
            e -= s * e.dot(s);
        }
        let n = e.norm();
        if n > 1e-6 {
            frame.push(e / n);
        }
    }
    if frame.len() != 2 {
        return Err(Error::Precondition("normal space degenerated numerically".into()));
    }
    let (n_tilde, mut n) = (frame[0], frame[1]);

    // Ambient orientation test in an oriented basis of T(S²×S²).
    let t1 = unit_tangent(p1);
    let t2 = unit_tangent(p2);
    let b = [
        embed1(t1),
        embed1(p1.cross(&t1)),
        embed2(t2),
        embed2(p2.cross(&t2)),
    ];
    let m = Matrix4::from_fn(|r, c| {
        let v = match c {
            0 => tx,
            1 => ty,
            2 => n_tilde,
            _ => n,
        };
        v.dot(&b[r])
    });
    if m.determinant() < 0.0 {
        n = -n;
    }
    Ok((n_tilde, n))
}

fn unit_tangent(p: Vector3<f64>) -> Vector3<f64> {
    let seed = if p[0].abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let t = seed - p * p.dot(&seed);
    t / t.norm()
}

fn embed1(v: Vector3<f64>) -> Vector6<f64> {
    Vector6::new(v[0], v[1], v[2], 0.0, 0.0, 0.0)
}

fn embed2(v: Vector3<f64>) -> Vector6<f64> {
    Vector6::new(0.0, 0.0, 0.0, v[0], v[1], v[2])
}

/// Assembles the second fundamental form from second derivatives
/// projected onto the nodewise normal frame.
pub fn second_fundamental_form(
    p: &ProductImmersion,
    kd: &KahlerData,
) -> Result<SecondFundamentalForm> {
    let g = *p.grid();
    let phi6 = p.phi6();
    let px = cxgrid::dx(&phi6);
    let py = cxgrid::dy(&phi6);
    let pxx = cxgrid::dx(&px);
    let pxy = cxgrid::dy(&px);
    let pyy = cxgrid::dy(&py);

    let mut out = SecondFundamentalForm {
        h_t: [Field::zeros(g), Field::zeros(g), Field::zeros(g)],
        h_n: [Field::zeros(g), Field::zeros(g), Field::zeros(g)],
    };
    for i in 0..g.nx {
        for j in 0..g.ny {
            let (nt, nn) =
                normal_frame_at(p.phi1.get(i, j), p.phi2.get(i, j), px.get(i, j), py.get(i, j))?;
            let w = (-2.0 * kd.u.get(i, j)).exp(); // e^{-2u}: unit-frame normalization
            let second = [pxx.get(i, j), pxy.get(i, j), pyy.get(i, j)];
            for (k, d) in second.iter().enumerate() {
                out.h_t[k].set(i, j, w * d.dot(&nt));
                out.h_n[k].set(i, j, w * d.dot(&nn));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureRoute {
    /// `K = −4 e^{−2u} u_{zz̄}` from the conformal factor.
    Conformal,
    /// `K = ½(C₁²+C₂²) + 2|H|² − |σ|²/2` from the Gauss equation.
    GaussEq,
}

pub fn gauss_curvature(p: &ProductImmersion, route: CurvatureRoute) -> Result<Field<f64>> {
    let kd = kahler_functions(p)?;
    gauss_curvature_from(p, &kd, route)
}

pub fn gauss_curvature_from(
    p: &ProductImmersion,
    kd: &KahlerData,
    route: CurvatureRoute,
) -> Result<Field<f64>> {
    match route {
        CurvatureRoute::Conformal => {
            let lap = cxgrid::laplacian(&kd.u, &kd.u)?;
            Ok(lap.map(|v| -v))
        }
        CurvatureRoute::GaussEq => {
            let sff = second_fundamental_form(p, kd)?;
            let g = *p.grid();
            Ok(Field::from_fn(g, |i, j| {
                let c1 = kd.c1.get(i, j);
                let c2 = kd.c2.get(i, j);
                0.5 * (c1 * c1 + c2 * c2) + 2.0 * sff.mean_curvature2_at(i, j)
                    - 0.5 * sff.norm2_at(i, j)
            }))
        }
    }
}

/// Normal curvature by the Ricci equation
/// `K⊥ = ½(C₁²−C₂²) + ⟨[A_N, A_Ñ]e₁, e₂⟩`.
pub fn normal_curvature(p: &ProductImmersion) -> Result<Field<f64>> {
    let kd = kahler_functions(p)?;
    normal_curvature_from(p, &kd)
}

pub fn normal_curvature_from(p: &ProductImmersion, kd: &KahlerData) -> Result<Field<f64>> {
    let sff = second_fundamental_form(p, kd)?;
    let g = *p.grid();
    Ok(Field::from_fn(g, |i, j| {
        let c1 = kd.c1.get(i, j);
        let c2 = kd.c2.get(i, j);
        0.5 * (c1 * c1 - c2 * c2) + sff.weingarten_commutator_at(i, j)
    }))
}

/// Hopf coefficient `θ = ½⟨J₁Φ_z, J₂Φ_z⟩`, its holomorphy residual and
/// the modulus identity `|2θ|² = (e^{4u}/4)(1−C₁²)(1−C₂²)`.
#[derive(Debug, Clone)]
pub struct HopfData {
    pub theta: Field<Complex64>,
    pub holomorphy: ResidualNorm,
    /// Residual of `4|2θ|²e^{−4u} − (1−C₁²)(1−C₂²)`.
    pub modulus_identity: ResidualNorm,
}

pub fn hopf(p: &ProductImmersion) -> Result<HopfData> {
    let kd = kahler_functions(p)?;
    hopf_from(p, &kd)
}

pub fn hopf_from(p: &ProductImmersion, kd: &KahlerData) -> Result<HopfData> {
    let g = *p.grid();
    let theta = Field::from_fn(g, |i, j| {
        let pz = kd.phi_z.get(i, j);
        let p1 = p.phi1.get(i, j);
        let p2 = p.phi2.get(i, j);
        0.5 * cdot(&j1(p1, p2, &pz), &j2(p1, p2, &pz))
    });
    let holomorphy = cxgrid::residual_norm(&cxgrid::d_zbar(&theta)?);
    let modid = Field::from_fn(g, |i, j| {
        let e2u = kd.e2u.get(i, j);
        let c1 = kd.c1.get(i, j);
        let c2 = kd.c2.get(i, j);
        4.0 * (2.0 * theta.get(i, j)).norm_sqr() / (e2u * e2u)
            - (1.0 - c1 * c1) * (1.0 - c2 * c2)
    });
    let modulus_identity = cxgrid::residual_norm(&modid);
    Ok(HopfData { theta, holomorphy, modulus_identity })
}

/// Bundles every invariant field of a (numerically) minimal immersion.
pub fn invariants(p: &ProductImmersion) -> Result<super::InvariantField> {
    let kd = kahler_functions(p)?;
    let k = gauss_curvature_from(p, &kd, CurvatureRoute::Conformal)?;
    let kperp = normal_curvature_from(p, &kd)?;
    let hopf = hopf_from(p, &kd)?;
    let mc = mean_curvature_residual(p)?;
    let (jac1, jac2) = jacobians(&kd.c1, &kd.c2)?;
    Ok(super::InvariantField {
        u: kd.u,
        c1: kd.c1,
        c2: kd.c2,
        k,
        kperp,
        theta: hopf.theta,
        h_residual: mc.normalized,
        jac1,
        jac2,
    })
}

/// Chart area of a catalog surface.
///
/// Periodic cells integrate the measured density directly. Plane
/// (sphere) charts integrate the measured density over the grid box and
/// add the exact complement of the catalog density outside the box; the
/// box integral of the exact density uses the same trapezoid rule, so
/// quadrature error cancels and the result reflects the measured-vs-
/// exact density mismatch only.
pub fn area(p: &ProductImmersion, meta: &SurfaceMeta) -> Result<f64> {
    // the measured log-factor alone; no conformality gate (far-field
    // nodes of wide charts carry large relative but tiny absolute noise)
    let phi6c = p.phi6().map(|v| v.map(|x| Complex64::new(x, 0.0)));
    let phi_z = cxgrid::d_z(&phi6c)?;
    let u = phi_z.map(|v| 0.5 * (2.0 * hnorm2(&v)).ln());
    let g = *p.grid();
    let one = Field::new_fill(g, 1.0);
    let measured = cxgrid::integrate(&one, &u)?;
    if g.periodic_x && g.periodic_y {
        return Ok(measured);
    }
    let (density, total) = meta
        .exact_density_and_area()
        .ok_or_else(|| Error::Precondition(format!(
            "area on a non-periodic chart needs an exact tail model (example {})",
            meta.name
        )))?;
    let u_exact = Field::from_fn(g, |i, j| 0.5 * density(g.z(i, j)).ln());
    let exact_box = cxgrid::integrate(&one, &u_exact)?;
    Ok(measured + (total - exact_box))
}
