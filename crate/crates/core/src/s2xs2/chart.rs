//! The plane chart of the round sphere and the complex structure
//! `J_p(w) = p × w`.
//!
//! `st` is normalized so that holomorphic functions of `ζ` compose to
//! J-holomorphic maps into the sphere: `st(0) = (0,0,−1)`,
//! `st(1) = (1,0,0)`, `st(∞) = (0,0,1)` and `J(st_x) = st_y`.

use nalgebra::Vector3;
use num_complex::Complex64;

/// Stereographic chart `st(ζ) = (2Reζ, −2Imζ, |ζ|²−1)/(1+|ζ|²)`.
pub fn st(zeta: Complex64) -> Vector3<f64> {
    let r2 = zeta.norm_sqr();
    let d = 1.0 + r2;
    Vector3::new(2.0 * zeta.re / d, -2.0 * zeta.im / d, (r2 - 1.0) / d)
}

/// The same chart precomposed with inversion: `st(1/w)`, written so it
/// is smooth at `w = 0` (where it takes the value `(0,0,1)`).
pub fn st_inv(w: Complex64) -> Vector3<f64> {
    let r2 = w.norm_sqr();
    let d = 1.0 + r2;
    Vector3::new(2.0 * w.re / d, 2.0 * w.im / d, (1.0 - r2) / d)
}

/// Round-metric area density of `st`: `|st_x|² = 4/(1+|ζ|²)²`.
pub fn st_density(zeta: Complex64) -> f64 {
    let d = 1.0 + zeta.norm_sqr();
    4.0 / (d * d)
}

/// Complexified cross product `p × a` with `p` real.
pub fn cross_c(p: Vector3<f64>, a: Vector3<Complex64>) -> Vector3<Complex64> {
    Vector3::new(
        a[2].scale(p[1]) - a[1].scale(p[2]),
        a[0].scale(p[2]) - a[2].scale(p[0]),
        a[1].scale(p[0]) - a[0].scale(p[1]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pinned_values() {
        assert!((st(Complex64::new(0.0, 0.0)) - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        assert!((st(Complex64::new(1.0, 0.0)) - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((st(Complex64::new(1e12, 0.0)) - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn unit_norm_everywhere() {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let z = Complex64::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0));
            assert!((st(z).norm() - 1.0).abs() < 1e-14);
            assert!((st_inv(z).norm() - 1.0).abs() < 1e-14);
        }
    }

    /// Holomorphy of the chart: J(st_x) = st_y for J_p(w) = p×w,
    /// checked by centered differences.
    #[test]
    fn chart_is_j_holomorphic() {
        let h = 1e-5;
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let z = Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            let p = st(z);
            let sx = (st(z + Complex64::new(h, 0.0)) - st(z - Complex64::new(h, 0.0))) / (2.0 * h);
            let sy = (st(z + Complex64::new(0.0, h)) - st(z - Complex64::new(0.0, h))) / (2.0 * h);
            assert!((p.cross(&sx) - sy).norm() < 1e-8, "at {z}");
        }
    }

    #[test]
    fn inversion_chart_consistent() {
        let w = Complex64::new(0.3, -0.8);
        assert!((st_inv(w) - st(w.inv())).norm() < 1e-13);
    }
}
