//! Local 6-point Lagrange interpolation along a grid line. Used by the
//! Frenet integrators to evaluate sampled coefficient fields between
//! nodes; the O(h⁶) interpolation error stays far below the one-step
//! method error.

use crate::cxgrid::GridValue;

// Barycentric weights for 6 equispaced nodes: (-1)^k C(5,k).
const W: [f64; 6] = [1.0, -5.0, 10.0, -10.0, 5.0, -1.0];

/// Interpolates uniformly spaced samples at the fractional node
/// coordinate `t` (node k sits at t = k). Non-periodic lines clamp the
/// stencil window at the ends; periodic lines wrap.
pub fn lagrange6<T: GridValue>(vals: &[T], periodic: bool, t: f64) -> T {
    const M: usize = 6;
    let n = vals.len();
    debug_assert!(n >= M);

    let base = if periodic {
        (t.floor() as isize) - 2
    } else {
        ((t.floor() as isize) - 2).clamp(0, n as isize - M as isize)
    };
    let s = t - base as f64;

    let mut coeff = [0.0f64; M];
    for (k, c) in coeff.iter_mut().enumerate() {
        let d = s - k as f64;
        if d.abs() < 1e-12 {
            return vals[index(base + k as isize, n, periodic)];
        }
        *c = W[k] / d;
    }
    let wsum: f64 = coeff.iter().sum();
    let mut acc = T::zero();
    for (k, c) in coeff.iter().enumerate() {
        acc = acc.add(vals[index(base + k as isize, n, periodic)].scale(c / wsum));
    }
    acc
}

#[inline]
fn index(k: isize, n: usize, periodic: bool) -> usize {
    if periodic {
        k.rem_euclid(n as isize) as usize
    } else {
        k.clamp(0, n as isize - 1) as usize
    }
}
