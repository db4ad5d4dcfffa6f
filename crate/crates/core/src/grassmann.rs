//! Exact algebra of `Λ²ℝ⁴`: wedge, the star operator, the self-dual /
//! anti-self-dual split and the identification `G⁺(2,4) ≅ S²₊×S²₋`.
//!
//! The bivector basis is fixed once and for all as
//! `(e₁∧e₂, e₁∧e₃, e₁∧e₄, e₂∧e₃, e₂∧e₄, e₃∧e₄)`; the split bases are
//! `E±₁ = (e₁∧e₂ ± e₃∧e₄)/√2`, `E±₂ = (e₁∧e₃ ± e₄∧e₂)/√2`,
//! `E±₃ = (e₁∧e₄ ± e₂∧e₃)/√2`. Points of `S²₊` and `S²₋` are exported
//! as their three `E±` coordinates; the product `S²₊×S²₋` is identified
//! with `S²×S²` through these coordinates.

use crate::error::{Error, Result};
use nalgebra::{Matrix4, Vector3, Vector4};

/// A vector of `ℝ⁴` (alias kept distinct from grid value vectors).
pub type Vector4r = Vector4<f64>;

/// Element of `Λ²ℝ⁴` in the fixed ordered basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiVector4(pub [f64; 6]);

/// Self-dual / anti-self-dual coordinates of a bivector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSplit {
    /// Coordinates in `(E⁺₁, E⁺₂, E⁺₃)`.
    pub p: Vector3<f64>,
    /// Coordinates in `(E⁻₁, E⁻₂, E⁻₃)`.
    pub m: Vector3<f64>,
}

const SQRT1_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl BiVector4 {
    pub const ZERO: BiVector4 = BiVector4([0.0; 6]);

    /// Basis bivector `e_k ∧ e_l` for `0 ≤ k < l ≤ 3`.
    pub fn basis(k: usize, l: usize) -> BiVector4 {
        assert!(k < l && l < 4);
        let idx = match (k, l) {
            (0, 1) => 0,
            (0, 2) => 1,
            (0, 3) => 2,
            (1, 2) => 3,
            (1, 3) => 4,
            (2, 3) => 5,
            _ => unreachable!(),
        };
        let mut c = [0.0; 6];
        c[idx] = 1.0;
        BiVector4(c)
    }

    /// Self-dual basis element `E⁺_k`, `k ∈ {0,1,2}`.
    pub fn e_plus(k: usize) -> BiVector4 {
        let mut c = [0.0; 6];
        c[k] = SQRT1_2;
        // star partners: 12<->34, 13<->-24, 14<->23
        match k {
            0 => c[5] = SQRT1_2,
            1 => c[4] = -SQRT1_2,
            2 => c[3] = SQRT1_2,
            _ => panic!("E+ index out of range"),
        }
        BiVector4(c)
    }

    /// Anti-self-dual basis element `E⁻_k`.
    pub fn e_minus(k: usize) -> BiVector4 {
        let mut c = [0.0; 6];
        c[k] = SQRT1_2;
        match k {
            0 => c[5] = -SQRT1_2,
            1 => c[4] = SQRT1_2,
            2 => c[3] = -SQRT1_2,
            _ => panic!("E- index out of range"),
        }
        BiVector4(c)
    }

    pub fn add(self, o: BiVector4) -> BiVector4 {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        BiVector4(c)
    }

    pub fn scale(self, s: f64) -> BiVector4 {
        let mut c = self.0;
        for a in c.iter_mut() {
            *a *= s;
        }
        BiVector4(c)
    }

    pub fn norm(&self) -> f64 {
        inner(*self, *self).sqrt()
    }
}

/// Wedge product `v ∧ w`; bilinear and antisymmetric.
pub fn wedge(v: Vector4r, w: Vector4r) -> BiVector4 {
    BiVector4([
        v[0] * w[1] - v[1] * w[0],
        v[0] * w[2] - v[2] * w[0],
        v[0] * w[3] - v[3] * w[0],
        v[1] * w[2] - v[2] * w[1],
        v[1] * w[3] - v[3] * w[1],
        v[2] * w[3] - v[3] * w[2],
    ])
}

/// The inner product `⟨v∧w, v'∧w'⟩ = ⟨v,v'⟩⟨w,w'⟩ − ⟨v,w'⟩⟨w,v'⟩`,
/// which makes the six basis bivectors orthonormal: the plain dot of
/// coordinates.
pub fn inner(a: BiVector4, b: BiVector4) -> f64 {
    a.0.iter().zip(b.0.iter()).map(|(x, y)| x * y).sum()
}

/// The star operator: `*(e₁∧e₂)=e₃∧e₄`, `*(e₁∧e₃)=e₄∧e₂`,
/// `*(e₁∧e₄)=e₂∧e₃`; an isometry and an involution.
pub fn star(b: BiVector4) -> BiVector4 {
    let c = b.0;
    BiVector4([c[5], -c[4], c[3], c[2], -c[1], c[0]])
}

/// Splits into the `±1` eigenspaces of `*`: `p = (B + *B)/2` in `E⁺`
/// coordinates, `m = (B − *B)/2` in `E⁻` coordinates.
pub fn split(b: BiVector4) -> DualSplit {
    let sb = star(b);
    let sd = b.add(sb).scale(0.5);
    let asd = b.add(sb.scale(-1.0)).scale(0.5);
    let p = Vector3::new(
        inner(sd, BiVector4::e_plus(0)),
        inner(sd, BiVector4::e_plus(1)),
        inner(sd, BiVector4::e_plus(2)),
    );
    let m = Vector3::new(
        inner(asd, BiVector4::e_minus(0)),
        inner(asd, BiVector4::e_minus(1)),
        inner(asd, BiVector4::e_minus(2)),
    );
    DualSplit { p, m }
}

/// Reassembles a bivector from its split coordinates.
pub fn assemble(s: &DualSplit) -> BiVector4 {
    let mut b = BiVector4::ZERO;
    for k in 0..3 {
        b = b.add(BiVector4::e_plus(k).scale(s.p[k]));
        b = b.add(BiVector4::e_minus(k).scale(s.m[k]));
    }
    b
}

/// The diffeomorphism `G⁺(2,4) → S²₊×S²₋`: an oriented plane given by
/// an orthonormal frame `{v, w}` maps to
/// `(1/√2)(v∧w + *(v∧w), v∧w − *(v∧w))` in `E±` coordinates.
pub fn plane_to_spheres(v: Vector4r, w: Vector4r) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let tol = 1e-10;
    if (v.norm() - 1.0).abs() > tol || (w.norm() - 1.0).abs() > tol || v.dot(&w).abs() > tol {
        return Err(Error::Precondition("plane_to_spheres: frame not orthonormal".into()));
    }
    let b = wedge(v, w);
    let s = split(b.scale(std::f64::consts::SQRT_2));
    Ok((s.p, s.m))
}

/// The linear isometry `Â(v∧w) = Av∧Aw` of `Λ²ℝ⁴` induced by an
/// orthogonal matrix; satisfies `*Â = (det A) Â *`.
pub fn induced_isometry(a: &Matrix4<f64>, b: BiVector4) -> Result<BiVector4> {
    let err = (a.transpose() * a - Matrix4::identity()).norm();
    if err > 1e-10 {
        return Err(Error::Precondition(format!(
            "induced_isometry: matrix not orthogonal (|AᵀA−I| = {err:.2e})"
        )));
    }
    let cols: Vec<Vector4r> = (0..4).map(|k| a.column(k).into_owned()).collect();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut out = BiVector4::ZERO;
    for (idx, &(k, l)) in pairs.iter().enumerate() {
        if b.0[idx] != 0.0 {
            out = out.add(wedge(cols[k], cols[l]).scale(b.0[idx]));
        }
    }
    Ok(out)
}

/// The isometry `I : Λ²₊ → Λ²₋` with `I(E⁺ᵢ) = E⁻ᵢ`: the identity on
/// coordinates.
pub fn iso_i(p: Vector3<f64>) -> Vector3<f64> {
    p
}
