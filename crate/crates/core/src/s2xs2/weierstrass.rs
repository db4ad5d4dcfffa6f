//! The Weierstrass ℘-function by convergence-accelerated lattice
//! summation.
//!
//! The argument is first reduced to the centered fundamental cell, then
//! the sum runs over the square box of `radius` shells with the Laurent
//! terms through `ω⁻⁶` subtracted from each summand; the subtracted
//! series is restored exactly through the Eisenstein sums `G₄`, `G₆`,
//! which converge geometrically as q-series. The remaining truncation
//! error is `O(|z|⁶ / R⁶)` on the reduced cell.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default truncation radius in lattice shells.
pub const DEFAULT_SHELLS: usize = 40;

/// Minimum allowed distance from the lattice for direct ℘ evaluation.
pub const POLE_GUARD: f64 = 1e-6;

/// The lattice `{m + nτ}` with its cached Eisenstein sums.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub tau: Complex64,
    pub radius: usize,
    g4: Complex64,
    g6: Complex64,
    g8: Complex64,
}

impl Lattice {
    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_radius(tau, DEFAULT_SHELLS)
    }

    pub fn with_radius(tau: Complex64, radius: usize) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(Error::Precondition(format!("lattice needs Im tau > 0, got {tau}")));
        }
        if radius < 4 {
            return Err(Error::Precondition("lattice radius below 4 shells".into()));
        }
        let (g4, g6, g8) = eisenstein_sums(tau);
        Ok(Lattice { tau, radius, g4, g6, g8 })
    }

    /// `g₂ = 60 G₄`, `g₃ = 140 G₆` of the differential equation
    /// `℘′² = 4℘³ − g₂℘ − g₃`.
    pub fn invariants(&self) -> (Complex64, Complex64) {
        (self.g4 * 60.0, self.g6 * 140.0)
    }

    /// Reduces `z` modulo the lattice to the centered cell
    /// (coefficients of `1` and `τ` in `[−½, ½)`).
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let b = z.im / self.tau.im;
        let a = z.re - b * self.tau.re;
        let af = a - (a + 0.5).floor();
        let bf = b - (b + 0.5).floor();
        Complex64::new(af + bf * self.tau.re, bf * self.tau.im)
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn lattice_distance(&self, z: Complex64) -> f64 {
        self.reduce(z).norm()
    }

    /// `℘(z)` and `℘′(z)`.
    pub fn wp(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let zr = self.reduce(z);
        if zr.norm() <= POLE_GUARD {
            return Err(Error::Precondition(format!(
                "wp: z within {POLE_GUARD:.0e} of a lattice point"
            )));
        }
        let (tp, tpp) = self.regular_parts(zr);
        let z2 = zr * zr;
        Ok((1.0 / z2 + tp, -2.0 / (z2 * zr) + tpp))
    }

    /// The regular parts `℘ − z⁻²` and `℘′ + 2z⁻³` at a reduced point;
    /// both are analytic across the origin of the cell.
    pub fn regular_parts(&self, zr: Complex64) -> (Complex64, Complex64) {
        let z = zr;
        let z2 = z * z;
        let z3 = z2 * z;
        let z4 = z2 * z2;
        let z5 = z4 * z;
        let z6 = z4 * z2;
        let r = self.radius as isize;
        let mut sp = Complex64::new(0.0, 0.0);
        let mut spp = Complex64::new(0.0, 0.0);
        // fixed shell-by-shell order for reproducibility
        for shell in 1..=r {
            for (m, n) in shell_points(shell) {
                let w = Complex64::new(m as f64, 0.0) + self.tau * n as f64;
                let iw = 1.0 / w;
                let iw2 = iw * iw;
                let iw3 = iw2 * iw;
                let iw4 = iw2 * iw2;
                let iw5 = iw4 * iw;
                let iw6 = iw3 * iw3;
                let iw7 = iw6 * iw;
                let iw8 = iw4 * iw4;
                let d = 1.0 / (z - w);
                let d2 = d * d;
                // summand with the Laurent tail through ω⁻⁸ removed
                sp += d2 - iw2 - (2.0 * z) * iw3 - (3.0 * z2) * iw4 - (4.0 * z3) * iw5
                    - (5.0 * z4) * iw6 - (6.0 * z5) * iw7 - (7.0 * z6) * iw8;
                spp += -2.0 * d2 * d - 2.0 * iw3 - (6.0 * z) * iw4 - (12.0 * z2) * iw5
                    - (20.0 * z3) * iw6 - (30.0 * z4) * iw7 - (42.0 * z5) * iw8;
            }
        }
        // restore the subtracted series: odd Eisenstein sums vanish
        sp += (3.0 * z2) * self.g4 + (5.0 * z4) * self.g6 + (7.0 * z6) * self.g8;
        spp += (6.0 * z) * self.g4 + (20.0 * z3) * self.g6 + (42.0 * z5) * self.g8;
        (sp, spp)
    }

    /// `st ∘ ℘` as a smooth sphere map, using the reciprocal chart near
    /// the pole (the composed map is regular there).
    pub fn sphere_map(&self, z: Complex64) -> nalgebra::Vector3<f64> {
        let zr = self.reduce(z);
        if zr.norm() < 1e-3 {
            // 1/℘ = z²/(1 + z² T) with T the regular part
            let (tp, _) = self.regular_parts(zr);
            let z2 = zr * zr;
            let w = z2 / (1.0 + z2 * tp);
            super::chart::st_inv(w)
        } else {
            let (p, _) = self.wp(zr).expect("pole excluded by branch");
            super::chart::st(p)
        }
    }

    /// The three nonzero half periods of the cell.
    pub fn half_periods(&self) -> [Complex64; 3] {
        let half = Complex64::new(0.5, 0.0);
        let ht = self.tau * 0.5;
        [half, ht, half + ht]
    }
}

/// Points of the square shell `max(|m|, |n|) = s`, fixed traversal order.
fn shell_points(s: isize) -> Vec<(isize, isize)> {
    let mut pts = Vec::with_capacity((8 * s) as usize);
    for m in -s..=s {
        pts.push((m, -s));
        pts.push((m, s));
    }
    for n in (-s + 1)..s {
        pts.push((-s, n));
        pts.push((s, n));
    }
    pts
}

/// `G₂ₖ = Σ'ω⁻²ᵏ` for k = 2, 3, 4 through the geometrically convergent
/// q-expansions `G₄ = (π⁴/45)E₄`, `G₆ = (2π⁶/945)E₆`, `G₈ = (π⁸/4725)E₈`.
fn eisenstein_sums(tau: Complex64) -> (Complex64, Complex64, Complex64) {
    let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    let mut s3 = Complex64::new(0.0, 0.0);
    let mut s5 = Complex64::new(0.0, 0.0);
    let mut s7 = Complex64::new(0.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..=4000u32 {
        qn *= q;
        let nf = n as f64;
        let lambert = qn / (1.0 - qn);
        let t3 = nf.powi(3) * lambert;
        let t5 = nf.powi(5) * lambert;
        let t7 = nf.powi(7) * lambert;
        s3 += t3;
        s5 += t5;
        s7 += t7;
        if t7.norm() < 1e-18 && t3.norm() < 1e-18 && n > 8 {
            break;
        }
    }
    let e4 = 1.0 + 240.0 * s3;
    let e6 = 1.0 - 504.0 * s5;
    let e8 = 1.0 + 480.0 * s7;
    (e4 * PI.powi(4) / 45.0, e6 * 2.0 * PI.powi(6) / 945.0, e8 * PI.powi(8) / 4725.0)
}

/// One-shot evaluation of `(℘, ℘′)` for the lattice `{m + nτ}`.
pub fn weierstrass_p(z: Complex64, tau: Complex64) -> Result<(Complex64, Complex64)> {
    Lattice::new(tau)?.wp(z)
}
