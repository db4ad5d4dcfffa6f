//! Acceptance suite: every quantitative contract of the laboratory is
//! pinned here with its tolerance, one pass/fail line per criterion
//! (run with `--nocapture` to see them). Desk scale throughout: grids
//! at most 257², one-step size at least 1e-3.

use minsurf_core::cxgrid::{self, ComplexGrid, Field};
use minsurf_core::gaussbridge::{self, GaussPair};
use minsurf_core::grassmann;
use minsurf_core::s2xs2::{self, CurvatureRoute, ProductImmersion};
use minsurf_core::s3min;
use minsurf_core::sinhgordon;
use minsurf_core::validator::{self, Label};
use minsurf_core::{frenet, SGSolution};
use nalgebra::{Vector3, Vector4};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

// ── pinned tolerances ───────────────────────────────────────────────
/// Catalog constants at 129² (criterion 1).
const TOL_CONSTANTS: f64 = 1e-4;
/// Slice/diagonal relative area error (criterion 2).
const TOL_AREA_SPHERE: f64 = 1e-3;
/// Torus / graph relative area error (criterion 2).
const TOL_AREA_TORUS: f64 = 1e-2;
/// Weierstrass degree error (criterion 2).
const TOL_DEGREE: f64 = 0.02;
/// Minimality gate on the normalized residual (criterion 3).
const TOL_MINIMAL: f64 = 1e-4;
/// Negative control must exceed this (criterion 3).
const TOL_NEGATIVE: f64 = 1e-2;
/// Fundamental-data identities at 129² (criterion 4).
const TOL_LEMMA35: f64 = 1e-3;
/// Required rms reduction under 129 → 257 refinement (criterion 4).
const REFINE_FACTOR: f64 = 3.5;
/// Compatibility rms gate (criterion 5).
const TOL_COMPAT_RMS: f64 = 1e-6;
/// Sphere drift over the unit square at step 1e-3 (criterion 5).
const TOL_DRIFT: f64 = 1e-6;
/// Extraction recovery, max error (criterion 5).
const TOL_EXTRACT: f64 = 1e-4;
/// Non-fullness of the w = 0 family (criterion 5).
const TOL_NONFULL: f64 = 1e-6;
/// Hopf modulus/argument against e^{it} (criterion 6).
const TOL_HOPF: f64 = 1e-4;
/// Hopf holomorphy rms (criterion 6).
const TOL_HOPF_HOL: f64 = 1e-5;
/// Gauss-map Hopf relation θ = −2iθ_φ (criterion 6).
const TOL_HOPF_PAIR: f64 = 1e-6;
/// Clifford-pair exactness (criterion 7; grid 257²).
const TOL_PAIR_EXACT: f64 = 1e-8;
/// Generic-pair closed forms (criterion 7).
const TOL_PAIR: f64 = 1e-3;
/// Two-route invariant agreement (criterion 8).
const TOL_ROUNDTRIP: f64 = 1e-3;
/// Lagrangian detector for w = v (criterion 8).
const TOL_LAGRANGIAN: f64 = 1e-4;
/// S²×ℝ metric against 4cosh²v (criterion 9).
const TOL_S2XR_METRIC: f64 = 1e-3;
/// Great-circle confinement of the flat partner (criterion 9).
const TOL_GREAT_CIRCLE: f64 = 1e-8;
/// Exact algebra of Λ²ℝ⁴ (criterion 10).
const TOL_EXACT: f64 = 1e-12;
/// Randomized trials for criterion 10.
const EXACT_TRIALS: usize = 10_000;
/// Curvature identities of §6 members (criterion 11).
const TOL_SECTION6: f64 = 1e-4;

const STEP: f64 = 1e-3;

fn unit_grid(n: usize) -> ComplexGrid {
    ComplexGrid::centered_square(0.5, n).unwrap()
}

fn clifford_grid(n: usize) -> ComplexGrid {
    ComplexGrid::periodic_cell(0.0, 0.0, 2.0 * PI, 2.0 * PI, n, n).unwrap()
}

fn torus_grid(n: usize) -> ComplexGrid {
    ComplexGrid::periodic_cell(0.0, 0.0, 1.0, 1.0, n, n).unwrap()
}

fn tau_i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn p0() -> Complex64 {
    Complex64::new(0.25, 0.31)
}

fn max_err(f: &Field<f64>, target: f64) -> f64 {
    cxgrid::residual_norm(&f.map(|v| v - target)).max_abs
}

// shared fixtures
fn sg05_129() -> &'static SGSolution {
    static S: OnceLock<SGSolution> = OnceLock::new();
    S.get_or_init(|| sinhgordon::one_dim(0.5, unit_grid(129)).unwrap())
}

fn sg05_257() -> &'static SGSolution {
    static S: OnceLock<SGSolution> = OnceLock::new();
    S.get_or_init(|| sinhgordon::one_dim(0.5, unit_grid(257)).unwrap())
}

fn sg04_129() -> &'static SGSolution {
    static S: OnceLock<SGSolution> = OnceLock::new();
    S.get_or_init(|| sinhgordon::one_dim(0.4, unit_grid(129)).unwrap())
}

/// Frenet-route surface of (v, w) = (one_dim(0.5), 0) with diagnostics.
fn sg_surface_129() -> &'static (ProductImmersion, frenet::FundamentalData, frenet::FrenetReport) {
    static S: OnceLock<(ProductImmersion, frenet::FundamentalData, frenet::FrenetReport)> =
        OnceLock::new();
    S.get_or_init(|| {
        let g = unit_grid(129);
        let d = frenet::from_sinh_gordon(&sg05_129().v, &Field::zeros(g), 0.0).unwrap();
        let fr = frenet::canonical_frame(&d, 0.0).unwrap();
        let (p, rep) = frenet::frenet_integrate(
            &d,
            &fr,
            frenet::FrenetOptions { step_max: STEP, ..Default::default() },
        )
        .unwrap();
        (p, d, rep)
    })
}

fn sg_surface_257() -> &'static ProductImmersion {
    static S: OnceLock<ProductImmersion> = OnceLock::new();
    S.get_or_init(|| {
        let g = unit_grid(257);
        let d = frenet::from_sinh_gordon(&sg05_257().v, &Field::zeros(g), 0.0).unwrap();
        let fr = frenet::canonical_frame(&d, 0.0).unwrap();
        frenet::frenet_integrate(
            &d,
            &fr,
            frenet::FrenetOptions { step_max: STEP, ..Default::default() },
        )
        .unwrap()
        .0
    })
}

fn weierstrass_129() -> &'static (ProductImmersion, s2xs2::SurfaceMeta) {
    static S: OnceLock<(ProductImmersion, s2xs2::SurfaceMeta)> = OnceLock::new();
    S.get_or_init(|| s2xs2::weierstrass_torus(torus_grid(129), tau_i(), p0()).unwrap())
}

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:02} [{}] {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: the catalog constants (C₁, C₂, K, K⊥) of the slice,
/// the diagonal and the Clifford torus at 129².
#[test]
fn criterion_01_catalog_constants() {
    let mut worst: f64 = 0.0;
    let mut check = |p: &ProductImmersion, want: [f64; 4]| {
        let kd = s2xs2::kahler_functions(p).unwrap();
        let k = s2xs2::gauss_curvature_from(p, &kd, CurvatureRoute::Conformal).unwrap();
        let kp = s2xs2::normal_curvature_from(p, &kd).unwrap();
        for (f, t) in [(&kd.c1, want[0]), (&kd.c2, want[1]), (&k, want[2]), (&kp, want[3])] {
            worst = worst.max(max_err(f, t));
        }
    };
    let (slice, _) = s2xs2::slice(unit_grid(129), Vector3::new(0.0, 0.0, -1.0)).unwrap();
    check(&slice, [1.0, 1.0, 1.0, 0.0]);
    let (diag, _) = s2xs2::diagonal(unit_grid(129)).unwrap();
    check(&diag, [1.0, 0.0, 0.5, 0.5]);
    let (cliff, _) = s2xs2::clifford(clifford_grid(129)).unwrap();
    check(&cliff, [0.0, 0.0, 0.0, 0.0]);
    report(
        1,
        worst < TOL_CONSTANTS,
        &format!("catalog constants: worst error {worst:.3e} < {TOL_CONSTANTS:.0e}"),
    );
}

/// Criterion 2: areas of the catalog members and the degrees of the
/// Weierstrass torus.
#[test]
fn criterion_02_areas_and_degrees() {
    let wide = ComplexGrid::centered_square(8.0, 257).unwrap();
    let (slice, ms) = s2xs2::slice(wide, Vector3::new(0.0, 0.0, -1.0)).unwrap();
    let a_slice = s2xs2::area(&slice, &ms).unwrap();
    let (diag, md) = s2xs2::diagonal(wide).unwrap();
    let a_diag = s2xs2::area(&diag, &md).unwrap();
    let (w, mw) = weierstrass_129();
    let a_w = s2xs2::area(w, mw).unwrap();
    let (g2, mg) = s2xs2::graph(wide, 2).unwrap();
    let a_g2 = s2xs2::area(&g2, &mg).unwrap();
    let (d1, d2) = s2xs2::degrees(w).unwrap();

    let e_slice = (a_slice - 4.0 * PI).abs() / (4.0 * PI);
    let e_diag = (a_diag - 8.0 * PI).abs() / (8.0 * PI);
    let e_w = (a_w - 16.0 * PI).abs() / (16.0 * PI);
    let e_g2 = (a_g2 - 12.0 * PI).abs() / (12.0 * PI);
    let e_deg = (d1 - 2.0).abs().max((d2 - 2.0).abs());
    let pass = e_slice < TOL_AREA_SPHERE
        && e_diag < TOL_AREA_SPHERE
        && e_w < TOL_AREA_TORUS
        && e_g2 < TOL_AREA_TORUS
        && e_deg < TOL_DEGREE;
    report(
        2,
        pass,
        &format!(
            "areas: slice 4π·(1±{e_slice:.1e}), diagonal 8π·(1±{e_diag:.1e}), \
             weierstrass 16π·(1±{e_w:.1e}), graph² 12π·(1±{e_g2:.1e}); degrees ({d1:.4},{d2:.4})"
        ),
    );
}

/// Criterion 3: the minimality gate on every catalog and constructed
/// surface, with the perturbed diagonal as negative control.
#[test]
fn criterion_03_minimality_gate() {
    let mut worst: f64 = 0.0;
    let mut gate = |p: &ProductImmersion, name: &str| {
        let mc = s2xs2::mean_curvature_residual(p).unwrap();
        let m = cxgrid::residual_norm(&mc.normalized).max_abs;
        worst = worst.max(m);
        assert!(m < TOL_MINIMAL, "{name}: normalized H residual {m:.3e}");
    };
    let g = unit_grid(129);
    gate(&s2xs2::slice(g, Vector3::new(0.0, 0.0, -1.0)).unwrap().0, "slice");
    gate(&s2xs2::diagonal(g).unwrap().0, "diagonal");
    gate(&s2xs2::clifford(clifford_grid(129)).unwrap().0, "clifford");
    gate(&weierstrass_129().0, "weierstrass");
    gate(&s2xs2::graph(g, 2).unwrap().0, "graph2");
    gate(&sg_surface_129().0, "frenet(v=0.5,w=0)");
    {
        let s = s3min::clifford_family(0.0, g);
        let (p, _) = gaussbridge::gauss_map_pair(&GaussPair::new(s.clone(), s).unwrap()).unwrap();
        gate(&p, "gauss pair (clifford, clifford)");
    }

    // negative control: Φ = (st(z), st(z + 0.1 z̄)) is not minimal
    let pert = {
        let phi1 = Field::from_fn(g, |i, j| s2xs2::st(g.z(i, j)));
        let phi2 = Field::from_fn(g, |i, j| {
            let z = g.z(i, j);
            s2xs2::st(z + 0.1 * z.conj())
        });
        ProductImmersion::new(phi1, phi2).unwrap()
    };
    let mc = s2xs2::mean_curvature_residual(&pert).unwrap();
    let neg = cxgrid::residual_norm(&mc.normalized).max_abs;
    report(
        3,
        worst < TOL_MINIMAL && neg > TOL_NEGATIVE,
        &format!(
            "minimality: worst residual {worst:.3e} < {TOL_MINIMAL:.0e}; \
             negative control {neg:.3e} > {TOL_NEGATIVE:.0e}"
        ),
    );
}

/// Criterion 4: the fundamental-data identity suite on the sinh-Gordon
/// surface, with 2nd-order-or-better observed convergence.
#[test]
fn criterion_04_lemma35_suite() {
    let rep = validator::lemma35(
        &sg_surface_129().0,
        "sg(v0=0.5,w=0)",
        validator::Lemma35Tols { identity: TOL_LEMMA35, ..Default::default() },
    )
    .unwrap();
    let worst_max = rep.entries.iter().map(|e| e.max_residual).fold(0.0, f64::max);
    let worst_rms_129 = rep.entries.iter().map(|e| e.rms_residual).fold(0.0, f64::max);

    let rep2 = validator::lemma35(
        sg_surface_257(),
        "sg(v0=0.5,w=0)",
        validator::Lemma35Tols { identity: TOL_LEMMA35, ..Default::default() },
    )
    .unwrap();
    // compare rms identity by identity and require uniform reduction
    let mut worst_ratio = f64::INFINITY;
    for (a, b) in rep.entries.iter().zip(rep2.entries.iter()) {
        if a.rms_residual > 1e-12 {
            worst_ratio = worst_ratio.min(a.rms_residual / b.rms_residual);
        }
    }
    report(
        4,
        rep.all_pass() && worst_ratio >= REFINE_FACTOR,
        &format!(
            "lemma 3.5 (i)-(iii): max residual {worst_max:.3e} < {TOL_LEMMA35:.0e} \
             (rms {worst_rms_129:.3e}); refinement 129→257 reduces rms by ≥ {worst_ratio:.2}×"
        ),
    );
}

/// Criterion 5: compatibility residuals, integrator drift, extraction
/// recovery and the non-fullness of the w = 0 family.
#[test]
fn criterion_05_compat_and_roundtrip() {
    let (p, d, rep) = sg_surface_129();
    let compat = frenet::compatibility_residuals(d).unwrap();
    let (dx, _) = frenet::extract(p).unwrap();

    let mut rec: f64 = 0.0;
    let g = p.grid();
    for i in 0..g.nx {
        for j in 0..g.ny {
            if !g.is_interior(i, j, 2) {
                continue;
            }
            rec = rec
                .max((dx.u.get(i, j) - d.u.get(i, j)).abs())
                .max((dx.c1.get(i, j) - d.c1.get(i, j)).abs())
                .max((dx.c2.get(i, j) - d.c2.get(i, j)).abs())
                .max((dx.gamma1.get(i, j).norm() - d.gamma1.get(i, j).norm()).abs())
                .max((dx.gamma2.get(i, j).norm() - d.gamma2.get(i, j).norm()).abs())
                .max((dx.f1.get(i, j).norm() - d.f1.get(i, j).norm()).abs())
                .max((dx.f2.get(i, j).norm() - d.f2.get(i, j).norm()).abs());
        }
    }
    let nonfull = cxgrid::residual_norm(
        &dx.c1.zip_map(&dx.c2, |a, b| a * a - b * b).unwrap(),
    )
    .max_abs;
    let kperp = cxgrid::residual_norm(&s2xs2::normal_curvature(p).unwrap()).max_abs;

    let pass = compat.worst_rms() < TOL_COMPAT_RMS
        && rep.sphere_drift < TOL_DRIFT
        && rec < TOL_EXTRACT
        && nonfull < TOL_NONFULL
        && kperp < TOL_EXTRACT;
    report(
        5,
        pass,
        &format!(
            "compatibility rms {:.3e} < {TOL_COMPAT_RMS:.0e}; drift {:.3e} < {TOL_DRIFT:.0e}; \
             extract recovery {rec:.3e} < {TOL_EXTRACT:.0e}; C₁²−C₂² {nonfull:.3e} < {TOL_NONFULL:.0e}; \
             K⊥ {kperp:.3e} < {TOL_EXTRACT:.0e}",
            compat.worst_rms(),
            rep.sphere_drift
        ),
    );
}

/// Criterion 6: the Hopf contracts of the sinh-Gordon family and the
/// Gauss-map pair relation θ = −2iθ_φ.
#[test]
fn criterion_06_hopf_contracts() {
    let g = unit_grid(129);
    let mut worst_mod: f64 = 0.0;
    let mut worst_arg: f64 = 0.0;
    let mut worst_hol: f64 = 0.0;
    for t in [0.0, PI / 3.0] {
        let d = frenet::from_sinh_gordon(&sg05_129().v, &Field::zeros(g), t).unwrap();
        let fr = frenet::canonical_frame(&d, 0.0).unwrap();
        let (p, _) = frenet::frenet_integrate(
            &d,
            &fr,
            frenet::FrenetOptions { step_max: STEP, ..Default::default() },
        )
        .unwrap();
        let h = s2xs2::hopf(&p).unwrap();
        let target = Complex64::from_polar(1.0, t);
        for th in h.theta.values() {
            worst_mod = worst_mod.max((th.norm() - 1.0).abs());
            worst_arg = worst_arg.max((th / target).arg().abs());
        }
        worst_hol = worst_hol.max(h.holomorphy.rms);
    }

    // Gauss-map pair: Θ = −2iΘ_φ, on the flat pair where θ_φ = i/2
    let s = s3min::clifford_family(0.0, g);
    let (pp, _) = gaussbridge::gauss_map_pair(&GaussPair::new(s.clone(), s).unwrap()).unwrap();
    let hp = s2xs2::hopf(&pp).unwrap();
    let pair_err = cxgrid::residual_norm(
        &hp.theta.map(|x| x - Complex64::new(1.0, 0.0)),
    )
    .max_abs;

    let pass = worst_mod < TOL_HOPF
        && worst_arg < TOL_HOPF
        && worst_hol < TOL_HOPF_HOL
        && pair_err < TOL_HOPF_PAIR;
    report(
        6,
        pass,
        &format!(
            "Hopf: |θ|−1 max {worst_mod:.3e}, arg θ − t max {worst_arg:.3e} (< {TOL_HOPF:.0e}); \
             ∂̄θ rms {worst_hol:.3e} < {TOL_HOPF_HOL:.0e}; pair θ=−2iθ_φ err {pair_err:.3e} < {TOL_HOPF_PAIR:.0e}"
        ),
    );
}

/// Criterion 7: closed-form invariants of Gauss-map pairs.
#[test]
fn criterion_07_pair_predictions() {
    // exact case: (Clifford, Clifford) at 257²
    let g = unit_grid(257);
    let s = s3min::clifford_family(0.0, g);
    let (p, _) = gaussbridge::gauss_map_pair(&GaussPair::new(s.clone(), s).unwrap()).unwrap();
    let kd = s2xs2::kahler_functions(&p).unwrap();
    let exact = cxgrid::residual_norm(&kd.c1)
        .max_abs
        .max(cxgrid::residual_norm(&kd.c2).max_abs)
        .max(max_err(&kd.e2u, 4.0));

    // generic pair: integrated v = one_dim(0.4) against the flat factor
    let g = unit_grid(129);
    let (phi, _) = s3min::s3_frenet_integrate(
        &sg04_129().v,
        Complex64::new(0.0, 0.5),
        s3min::S3IntegrateOptions { step_max: STEP, ..Default::default() },
    )
    .unwrap();
    let psi = s3min::clifford_family(0.0, g);
    let (pp, pred) = gaussbridge::gauss_map_pair(&GaussPair::new(phi, psi).unwrap()).unwrap();
    let kdp = s2xs2::kahler_functions(&pp).unwrap();
    let mut generic: f64 = 0.0;
    for i in 0..g.nx {
        for j in 0..g.ny {
            if !g.is_interior(i, j, 2) || pred.c1_mask.get(i, j) == 0.0 {
                continue;
            }
            generic = generic
                .max((kdp.e2u.get(i, j) - pred.e2u.get(i, j)).abs())
                .max((kdp.c1.get(i, j) - pred.c1.get(i, j)).abs())
                .max((kdp.c2.get(i, j) - pred.c2.get(i, j)).abs());
        }
    }
    report(
        7,
        exact < TOL_PAIR_EXACT && generic < TOL_PAIR,
        &format!(
            "pair predictions: (clifford,clifford) (C₁,C₂,e^{{2u}})=(0,0,4) err {exact:.3e} < {TOL_PAIR_EXACT:.0e}; \
             generic pair metric/C forms err {generic:.3e} < {TOL_PAIR:.0e}"
        ),
    );
}

/// Criterion 8: the two-route round trip at 129², step 1e-3.
#[test]
fn criterion_08_roundtrip_thm54() {
    let zero = SGSolution::trivial(unit_grid(129));
    let r1 = gaussbridge::roundtrip_thm54(sg05_129(), &zero, STEP).unwrap();
    let r2 = gaussbridge::roundtrip_thm54(sg04_129(), sg04_129(), STEP).unwrap();
    let pass = r1.worst_max() < TOL_ROUNDTRIP
        && r2.worst_max() < TOL_ROUNDTRIP
        && r2.c1_max < TOL_LAGRANGIAN;
    report(
        8,
        pass,
        &format!(
            "two routes agree: (0.5, 0) worst {:.3e}, (0.4, 0.4) worst {:.3e} < {TOL_ROUNDTRIP:.0e}; \
             Lagrangian max|C₁| {:.3e} < {TOL_LAGRANGIAN:.0e}",
            r1.worst_max(),
            r2.worst_max(),
            r2.c1_max
        ),
    );
}

/// Criterion 9: the S²×ℝ specialization.
#[test]
fn criterion_09_s2xr() {
    let (f, _) = gaussbridge::gauss_map_s2xr(
        sg05_129(),
        0.0,
        s3min::S3IntegrateOptions { step_max: STEP, ..Default::default() },
    )
    .unwrap();
    let m = f.metric().unwrap();
    let target = sg05_129().v.map(|v| 4.0 * v.cosh().powi(2));
    let metric_err = cxgrid::residual_norm(&m.zip_map(&target, |a, b| a - b).unwrap()).max_abs;

    // flat partner stays on a great circle of S²₋
    let g = unit_grid(129);
    let psi = s3min::clifford_family(0.0, g);
    let nm = gaussbridge::nu_minus(&psi).unwrap();
    let circle_err = nm.values().iter().map(|v| v[0].abs()).fold(0.0f64, f64::max);

    // height field is exactly 2 Im(z e^{it/2})
    let mut height_err: f64 = 0.0;
    for i in 0..g.nx {
        for j in 0..g.ny {
            height_err = height_err.max((f.height.get(i, j) - 2.0 * g.y(j)).abs());
        }
    }
    let pass =
        metric_err < TOL_S2XR_METRIC && circle_err < TOL_GREAT_CIRCLE && height_err == 0.0;
    report(
        9,
        pass,
        &format!(
            "S²×ℝ: metric−4cosh²v max {metric_err:.3e} < {TOL_S2XR_METRIC:.0e}; \
             ν⁻ great-circle defect {circle_err:.3e} < {TOL_GREAT_CIRCLE:.0e}; height exact ({height_err:.1e})"
        ),
    );
}

/// Criterion 10: exactness of the Λ²ℝ⁴ algebra over seeded random
/// trials.
#[test]
fn criterion_10_grassmann_exactness() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x4d5f_1234);
    let mut worst: f64 = 0.0;
    // unit-scale inputs: the geometry lives on unit bivectors/spheres
    let mut rand_bivec = |r: &mut rand_chacha::ChaCha8Rng| {
        let b = grassmann::BiVector4(std::array::from_fn(|_| r.gen_range(-1.0..1.0)));
        b.scale(1.0 / b.norm().max(1e-3))
    };
    for _ in 0..EXACT_TRIALS {
        let b = rand_bivec(&mut rng);
        let c = rand_bivec(&mut rng);
        // involution and isometry of the star operator
        let ss = grassmann::star(grassmann::star(b));
        worst = worst.max(ss.add(b.scale(-1.0)).norm());
        worst = worst
            .max((grassmann::inner(grassmann::star(b), grassmann::star(c)) - grassmann::inner(b, c)).abs());

        // random orthonormal frame by Gram–Schmidt
        let mut cols: Vec<Vector4<f64>> = Vec::with_capacity(4);
        while cols.len() < 4 {
            let mut v = Vector4::from_fn(|_, _| rng.gen_range(-1.0f64..1.0));
            for c in &cols {
                v -= c * v.dot(c);
            }
            if v.norm() > 1e-3 {
                cols.push(v / v.norm());
            }
        }
        let a = nalgebra::Matrix4::from_columns(&cols);
        // induced isometry preserves the inner product
        let ab = grassmann::induced_isometry(&a, b).unwrap();
        let ac = grassmann::induced_isometry(&a, c).unwrap();
        worst = worst.max((grassmann::inner(ab, ac) - grassmann::inner(b, c)).abs());
        // split parts map within / across the factors per det A
        let det = a.determinant();
        let s = grassmann::split(ab);
        let s0 = grassmann::split(b);
        if det > 0.0 {
            worst = worst.max((s.p.norm() - s0.p.norm()).abs());
            worst = worst.max((s.m.norm() - s0.m.norm()).abs());
        } else {
            worst = worst.max((s.p.norm() - s0.m.norm()).abs());
            worst = worst.max((s.m.norm() - s0.p.norm()).abs());
        }

        // E± orthonormality derived from the frame (pairwise products)
        let mut es: Vec<grassmann::BiVector4> = Vec::new();
        let pairs = [(0usize, 1usize, 2usize, 3usize), (0, 2, 3, 1), (0, 3, 1, 2)];
        for &(i1, i2, i3, i4) in &pairs {
            let w = grassmann::wedge(cols[i1], cols[i2]);
            let sw = grassmann::wedge(cols[i3], cols[i4]);
            es.push(w.add(sw).scale(std::f64::consts::FRAC_1_SQRT_2));
            es.push(w.add(sw.scale(-1.0)).scale(std::f64::consts::FRAC_1_SQRT_2));
        }
        for (ii, x) in es.iter().enumerate() {
            for (jj, y) in es.iter().enumerate() {
                let expect = if ii == jj { 1.0 } else { 0.0 };
                worst = worst.max((grassmann::inner(*x, *y) - expect).abs());
            }
        }

        // plane_to_spheres: unit outputs and frame-independence
        let (pq, mq) = grassmann::plane_to_spheres(cols[0], cols[1]).unwrap();
        worst = worst.max((pq.norm() - 1.0).abs()).max((mq.norm() - 1.0).abs());
        let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let v2 = cols[0] * ang.cos() + cols[1] * ang.sin();
        let w2 = -cols[0] * ang.sin() + cols[1] * ang.cos();
        let (p2, m2) = grassmann::plane_to_spheres(v2, w2).unwrap();
        worst = worst.max((p2 - pq).norm()).max((m2 - mq).norm());
    }
    report(
        10,
        worst < TOL_EXACT,
        &format!("Λ²ℝ⁴ algebra exact to {worst:.3e} < {TOL_EXACT:.0e} over {EXACT_TRIALS} seeded trials"),
    );
}

/// Criterion 11: quantitative §6 consistency — area lower bound on
/// every compact-chart member plus the complex/Lagrangian curvature
/// identities on the members the grid resolves; the Weierstrass
/// identity is recorded without a gate (its curvature spikes exceed
/// desk-scale resolution), and the classifier must label the whole
/// catalog correctly.
#[test]
fn criterion_11_section6_consistency() {
    let narrow = unit_grid(129);
    let mut all = true;
    let mut detail = String::new();

    let mut run = |p: &ProductImmersion, meta: &s2xs2::SurfaceMeta| {
        let rep = validator::section6_checks(p, meta, TOL_SECTION6).unwrap();
        for e in &rep.entries {
            if e.tolerance.is_infinite() {
                detail.push_str(&format!(
                    "{}::{} recorded (ungated): {:.3e}; ",
                    meta.name, e.name, e.max_residual
                ));
            } else if !e.pass {
                all = false;
                detail.push_str(&format!(
                    "{}::{} FAILED {:.3e} > {:.1e}; ",
                    meta.name, e.name, e.max_residual, e.tolerance
                ));
            }
        }
    };
    let (p, m) = s2xs2::slice(narrow, Vector3::new(0.0, 0.0, -1.0)).unwrap();
    run(&p, &m);
    let (p, m) = s2xs2::diagonal(narrow).unwrap();
    run(&p, &m);
    let (p, m) = s2xs2::graph(narrow, 1).unwrap();
    run(&p, &m);
    let (p, m) = s2xs2::graph(narrow, 2).unwrap();
    run(&p, &m);
    let (p, m) = s2xs2::clifford(clifford_grid(129)).unwrap();
    run(&p, &m);
    let (p, m) = weierstrass_129();
    run(p, m);

    // classifier behaves on all members
    let classify_ok = {
        let c = |p: &ProductImmersion| validator::classify(p).unwrap().labels;
        let (sl, _) = s2xs2::slice(narrow, Vector3::new(0.0, 0.0, -1.0)).unwrap();
        let (di, _) = s2xs2::diagonal(narrow).unwrap();
        let (cl, _) = s2xs2::clifford(clifford_grid(129)).unwrap();
        let lw = c(&weierstrass_129().0);
        c(&sl).contains(&Label::Slice)
            && c(&di).contains(&Label::Diagonal)
            && c(&di).contains(&Label::Complex)
            && c(&di).contains(&Label::Lagrangian)
            && c(&cl).contains(&Label::CliffordT)
            && lw.contains(&Label::Complex)
            && !lw.contains(&Label::Slice)
            && {
                let nf = c(&sg_surface_129().0);
                nf.contains(&Label::NonFull)
            }
    };
    if !classify_ok {
        all = false;
        detail.push_str("classifier mislabelled a catalog member; ");
    }
    report(
        11,
        all,
        &format!("§6 consistency: area ≥ 4π and K±K⊥ identities on resolvable members; {detail}"),
    );
}
