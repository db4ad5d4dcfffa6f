//! Gauss maps of pairs of minimal surfaces in `S³`: the pair
//! construction of a minimal immersion into `S²₊×S²₋`, the `S²×ℝ`
//! specialization, the polar surface, and the two-route round trip
//! between sinh-Gordon data and Gauss-map pairs.

use crate::cxgrid::{self, Field, ResidualNorm};
use crate::error::{Error, Result};
use crate::frenet;
use crate::grassmann::{inner, split, wedge, BiVector4};
use crate::s2xs2::{self, ProductImmersion};
use crate::s3min::S3Immersion;
use crate::sinhgordon::SGSolution;
use nalgebra::{Vector3, Vector4};
use num_complex::Complex64;

/// Two conformal minimal immersions of the same chart with equal Hopf
/// differentials.
#[derive(Debug, Clone)]
pub struct GaussPair {
    pub phi: S3Immersion,
    pub psi: S3Immersion,
}

impl GaussPair {
    pub fn new(phi: S3Immersion, psi: S3Immersion) -> Result<Self> {
        Self::with_tolerance(phi, psi, 1e-8)
    }

    pub fn with_tolerance(phi: S3Immersion, psi: S3Immersion, tol: f64) -> Result<Self> {
        if !phi.grid().same_layout(psi.grid()) {
            return Err(Error::GridMismatch("gauss pair on different grids".into()));
        }
        let mismatch = phi
            .theta
            .values()
            .iter()
            .zip(psi.theta.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        if mismatch > tol {
            return Err(Error::Precondition(format!(
                "Hopf differentials disagree by {mismatch:.3e} (tolerance {tol:.1e})"
            )));
        }
        Ok(GaussPair { phi, psi })
    }
}

/// The unit tangent bivector `ê₁∧ê₂` and `φ∧N` at one node.
fn node_bivectors(
    phi: Vector4<f64>,
    n: Vector4<f64>,
    pz: Vector4<Complex64>,
) -> (BiVector4, BiVector4) {
    let px = Vector4::from_fn(|k, _| 2.0 * pz[k].re);
    let py = Vector4::from_fn(|k, _| -2.0 * pz[k].im);
    let t = wedge(px, py);
    let nt = inner(t, t).sqrt();
    (t.scale(1.0 / nt), wedge(phi, n))
}

/// Self-dual Gauss map `ν⁺ = (1/√2)(ê₁∧ê₂ + φ∧N)` in `E⁺` coordinates.
pub fn nu_plus(s: &S3Immersion) -> Result<Field<Vector3<f64>>> {
    let pz = s.phi_z_field()?;
    let g = *s.grid();
    let mut out = Field::zeros(g);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let (t, d) = node_bivectors(s.phi.get(i, j), s.normal.get(i, j), pz.get(i, j));
            let b = t.add(d).scale(std::f64::consts::FRAC_1_SQRT_2);
            out.set(i, j, split(b).p);
        }
    }
    Ok(out)
}

/// Anti-self-dual Gauss map `ν⁻ = (1/√2)(ê₁∧ê₂ − φ∧N)` in `E⁻`
/// coordinates.
pub fn nu_minus(s: &S3Immersion) -> Result<Field<Vector3<f64>>> {
    let pz = s.phi_z_field()?;
    let g = *s.grid();
    let mut out = Field::zeros(g);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let (t, d) = node_bivectors(s.phi.get(i, j), s.normal.get(i, j), pz.get(i, j));
            let b = t.add(d.scale(-1.0)).scale(std::f64::consts::FRAC_1_SQRT_2);
            out.set(i, j, split(b).m);
        }
    }
    Ok(out)
}

/// Closed-form invariants predicted for a Gauss-map pair, evaluated
/// from `(v, w, θ)` of the two factors.
#[derive(Debug, Clone)]
pub struct PairPrediction {
    /// Metric coefficient `e^{2u} = e^{2v}+e^{2w}+4|θ|²(e^{−2v}+e^{−2w})`.
    pub e2u: Field<f64>,
    /// `C₁ = (|σ_ψ|−|σ_φ|)/(|σ_ψ|+|σ_φ|)`; `None` on the degeneracy mask.
    pub c1: Field<f64>,
    /// Nodes where `|σ_φ|+|σ_ψ| ≤ 1e−8` (closed form for `C₁` is 0/0).
    pub c1_mask: Field<f64>,
    /// `C₂ = (2−|σ_φ||σ_ψ|)/(2+|σ_φ||σ_ψ|)`.
    pub c2: Field<f64>,
    /// Hopf coefficient `θ_pair = −2iθ_φ`.
    pub theta: Field<Complex64>,
}

/// The Gauss map of a pair: `ν = (ν⁺_φ, ν⁻_ψ)`, with the closed-form
/// predictions of its invariants.
pub fn gauss_map_pair(pair: &GaussPair) -> Result<(ProductImmersion, PairPrediction)> {
    let p1 = nu_plus(&pair.phi)?;
    let p2 = nu_minus(&pair.psi)?;
    let immersion = ProductImmersion::with_tolerance(p1, p2, 1e-6)?;

    let g = *pair.phi.grid();
    let mut e2u = Field::zeros(g);
    let mut c1 = Field::zeros(g);
    let mut c1_mask = Field::zeros(g);
    let mut c2 = Field::zeros(g);
    let mut theta = Field::zeros(g);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let v = pair.phi.v.get(i, j);
            let w = pair.psi.v.get(i, j);
            let th = pair.phi.theta.get(i, j);
            let t2 = th.norm_sqr();
            e2u.set(
                i,
                j,
                (2.0 * v).exp() + (2.0 * w).exp()
                    + 4.0 * t2 * ((-2.0 * v).exp() + (-2.0 * w).exp()),
            );
            // |σ| = 2√2 |θ| e^{−2v}
            let sf = 2.0 * std::f64::consts::SQRT_2 * th.norm() * (-2.0 * v).exp();
            let sp = 2.0 * std::f64::consts::SQRT_2 * th.norm() * (-2.0 * w).exp();
            if sf + sp > 1e-8 {
                c1.set(i, j, (sp - sf) / (sp + sf));
                c1_mask.set(i, j, 1.0);
            }
            c2.set(i, j, (2.0 - sf * sp) / (2.0 + sf * sp));
            theta.set(i, j, Complex64::new(0.0, -2.0) * th);
        }
    }
    Ok((immersion, PairPrediction { e2u, c1, c1_mask, c2, theta }))
}

/// A gridded immersion into `S²×ℝ`.
#[derive(Debug, Clone)]
pub struct S2xRImmersion {
    pub sphere: Field<Vector3<f64>>,
    pub height: Field<f64>,
}

impl S2xRImmersion {
    /// Measured metric coefficient `e^{2u} = 2(|s_z|² + |h_z|²)`.
    pub fn metric(&self) -> Result<Field<f64>> {
        let sz = cxgrid::d_z(&self.sphere.map(|p| p.map(|x| Complex64::new(x, 0.0))))?;
        let hz = cxgrid::d_z(&self.height.map(Complex64::from))?;
        sz.zip_map(&hz, |a, h| {
            2.0 * (a.iter().map(|x| x.norm_sqr()).sum::<f64>() + h.norm_sqr())
        })
    }
}

/// The `S²×ℝ` immersion of a sinh-Gordon solution:
/// `Φ_t(z) = (ν⁺_{φ_t}(z), 2 Im(z e^{it/2}))` where `φ_t` is the
/// associated `S³` family with Hopf coefficient `(i/2)e^{it}`.
pub fn gauss_map_s2xr(
    v: &SGSolution,
    t: f64,
    opts: crate::s3min::S3IntegrateOptions,
) -> Result<(S2xRImmersion, crate::s3min::S3IntegrationReport)> {
    let theta0 = Complex64::new(0.0, 0.5) * Complex64::from_polar(1.0, t);
    let (phi_t, report) = crate::s3min::s3_frenet_integrate(&v.v, theta0, opts)?;
    let sphere = nu_plus(&phi_t)?;
    let g = *v.v.grid();
    let rot = Complex64::from_polar(1.0, 0.5 * t);
    let height = Field::from_fn(g, |i, j| 2.0 * (g.z(i, j) * rot).im);
    Ok((S2xRImmersion { sphere, height }, report))
}

/// The polar surface `(φ, N) ↦ (N, φ)`: minimal, possibly branched at
/// the zeros of the Hopf coefficient; returns the branched node list.
pub fn polar(s: &S3Immersion) -> Result<(S3Immersion, Vec<(usize, usize)>)> {
    let g = *s.grid();
    let pz = s.phi_z_field()?;
    let mut branched = Vec::new();
    let mut v_pol = Field::zeros(g);
    let mut n_z = Field::zeros(g);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let th = s.theta.get(i, j);
            let e2v = (2.0 * s.v.get(i, j)).exp();
            // N_z = 2e^{−2v}θ φ_z̄
            let nz = pz.get(i, j).map(|x| x.conj() * (2.0 * th / e2v));
            n_z.set(i, j, nz);
            let e2v_pol = 4.0 * th.norm_sqr() / e2v;
            if e2v_pol < 1e-16 {
                branched.push((i, j));
                v_pol.set(i, j, -20.0); // masked: no valid conformal factor
            } else {
                v_pol.set(i, j, 0.5 * e2v_pol.ln());
            }
        }
    }
    if branched.len() == g.node_count() {
        return Err(Error::Precondition(
            "polar surface is branched everywhere (θ ≡ 0)".into(),
        ));
    }
    Ok((
        S3Immersion {
            phi: s.normal.clone(),
            normal: s.phi.clone(),
            v: v_pol,
            theta: s.theta.clone(),
            phi_z: Some(n_z),
        },
        branched,
    ))
}

/// Per-field comparison entry of the two construction routes.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FieldDiff {
    pub max_abs: f64,
    pub rms: f64,
}

impl From<ResidualNorm> for FieldDiff {
    fn from(r: ResidualNorm) -> Self {
        FieldDiff { max_abs: r.max_abs, rms: r.rms }
    }
}

/// Round-trip comparison of the Frenet route and the Gauss-map route.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RoundtripReport {
    pub u: FieldDiff,
    pub c1: FieldDiff,
    pub c2: FieldDiff,
    pub k: FieldDiff,
    pub kperp: FieldDiff,
    pub theta_abs: FieldDiff,
    /// max |C₁| of the Frenet route (Lagrangian detector for w = ±v).
    pub c1_max: f64,
}

impl RoundtripReport {
    pub fn worst_max(&self) -> f64 {
        [self.u, self.c1, self.c2, self.k, self.kperp, self.theta_abs]
            .iter()
            .map(|d| d.max_abs)
            .fold(0.0, f64::max)
    }
}

/// Builds the same surface twice — (a) by integrating the fundamental
/// data of the sinh-Gordon pair, (b) as the Gauss map of the two `S³`
/// surfaces integrated from `v` and `w` with Hopf coefficient `i/2` —
/// and compares the invariant fields nodewise.
pub fn roundtrip_thm54(
    v: &SGSolution,
    w: &SGSolution,
    step_max: f64,
) -> Result<RoundtripReport> {
    let data = frenet::from_sinh_gordon(&v.v, &w.v, 0.0)?;
    let frame = frenet::canonical_frame(&data, 0.0)?;
    let (pa, _) = frenet::frenet_integrate(
        &data,
        &frame,
        frenet::FrenetOptions { step_max, ..Default::default() },
    )?;
    let ia = s2xs2::invariants(&pa)?;

    let opts = crate::s3min::S3IntegrateOptions { step_max, ..Default::default() };
    let theta0 = Complex64::new(0.0, 0.5);
    let (phi, _) = crate::s3min::s3_frenet_integrate(&v.v, theta0, opts)?;
    let (psi, _) = crate::s3min::s3_frenet_integrate(&w.v, theta0, opts)?;
    let pair = GaussPair::new(phi, psi)?;
    let (pb, _) = gauss_map_pair(&pair)?;
    let ib = s2xs2::invariants(&pb)?;

    let diff = |a: &Field<f64>, b: &Field<f64>| -> Result<FieldDiff> {
        Ok(cxgrid::residual_norm(&a.zip_map(b, |x, y| x - y)?).into())
    };
    Ok(RoundtripReport {
        u: diff(&ia.u, &ib.u)?,
        c1: diff(&ia.c1, &ib.c1)?,
        c2: diff(&ia.c2, &ib.c2)?,
        k: diff(&ia.k, &ib.k)?,
        kperp: diff(&ia.kperp, &ib.kperp)?,
        theta_abs: cxgrid::residual_norm(
            &ia.theta.zip_map(&ib.theta, |x, y| x.norm() - y.norm())?,
        )
        .into(),
        c1_max: cxgrid::residual_norm(&ia.c1).max_abs,
    })
}
