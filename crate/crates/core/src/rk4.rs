//! Classical 4th-order one-step integration over fixed-size states.

use nalgebra::SVector;

/// One RK4 step of size `h` for `dy/dt = f(t, y)`.
pub fn rk4_step<const N: usize>(
    y: &SVector<f64, N>,
    t: f64,
    h: f64,
    f: &mut impl FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
) -> SVector<f64, N> {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y + k1 * (0.5 * h)));
    let k3 = f(t + 0.5 * h, &(y + k2 * (0.5 * h)));
    let k4 = f(t + h, &(y + k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Integrates from `t0` to `t1` with `m` equal substeps.
pub fn rk4_span<const N: usize>(
    y: &SVector<f64, N>,
    t0: f64,
    t1: f64,
    m: usize,
    f: &mut impl FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
) -> SVector<f64, N> {
    let h = (t1 - t0) / m as f64;
    let mut y = *y;
    for k in 0..m {
        y = rk4_step(&y, t0 + k as f64 * h, h, f);
    }
    y
}

/// Substep count so each substep is at most `step_max` long.
pub fn substeps(span: f64, step_max: f64) -> usize {
    ((span.abs() / step_max).ceil() as usize).max(1)
}
