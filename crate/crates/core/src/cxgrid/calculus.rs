//! Wirtinger derivatives, the metric Laplacian, quadrature and residual
//! norms on gridded fields.

use super::value::{ComplexValue, GridValue};
use super::{Field, KahanSum, ResidualNorm, BOUNDARY_MARGIN};
use crate::error::{Error, Result};

/// 4th-order first-derivative stencils on a uniform grid.
///
/// Rows: forward edge, offset-1 biased, central, offset+1 biased (mirror),
/// backward edge. Coefficients are divided by `12 h` at application time.
const CENTRAL: [(isize, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
const EDGE0: [(isize, f64); 5] = [(0, -25.0), (1, 48.0), (2, -36.0), (3, 16.0), (4, -3.0)];
const EDGE1: [(isize, f64); 5] = [(-1, -3.0), (0, -10.0), (1, 18.0), (2, -6.0), (3, 1.0)];

#[inline]
fn stencil_for(i: usize, n: usize, periodic: bool) -> &'static [(isize, f64)] {
    if periodic || (2..n - 2).contains(&i) {
        &CENTRAL
    } else if i == 0 {
        &EDGE0
    } else if i == 1 {
        &EDGE1
    } else {
        // Right edge stencils are the mirrored left ones with flipped signs;
        // handled by the caller through `mirror`.
        unreachable!("mirrored edge handled separately")
    }
}

fn derive_line<T: GridValue>(vals: &[T], h: f64, periodic: bool, out: &mut [T]) {
    let n = vals.len();
    let inv = 1.0 / (12.0 * h);
    for i in 0..n {
        let mirrored = !periodic && i >= n - 2;
        let (stencil, sign) = if mirrored {
            // mirror index i -> n-1-i: offsets and coefficients negate
            (if n - 1 - i == 0 { &EDGE0[..] } else { &EDGE1[..] }, -1.0)
        } else {
            (stencil_for(i, n, periodic), 1.0)
        };
        let mut acc = T::zero();
        for &(off, c) in stencil {
            // Mirrored edges read f(i - off) with negated coefficients.
            let k = if mirrored {
                (i as isize - off) as usize
            } else if periodic {
                (i as isize + off).rem_euclid(n as isize) as usize
            } else {
                (i as isize + off) as usize
            };
            acc = acc.add(vals[k].scale(sign * c * inv));
        }
        out[i] = acc;
    }
}

/// Partial derivative `∂/∂x` by 4th-order stencils.
pub fn dx<T: GridValue>(f: &Field<T>) -> Field<T> {
    let g = *f.grid();
    let mut out = Field::zeros(g);
    let mut line = vec![T::zero(); g.nx];
    let mut dline = vec![T::zero(); g.nx];
    for j in 0..g.ny {
        for i in 0..g.nx {
            line[i] = f.get(i, j);
        }
        derive_line(&line, g.hx, g.periodic_x, &mut dline);
        for i in 0..g.nx {
            out.set(i, j, dline[i]);
        }
    }
    out
}

/// Partial derivative `∂/∂y` by 4th-order stencils.
pub fn dy<T: GridValue>(f: &Field<T>) -> Field<T> {
    let g = *f.grid();
    let mut out = Field::zeros(g);
    let mut line = vec![T::zero(); g.ny];
    let mut dline = vec![T::zero(); g.ny];
    for i in 0..g.nx {
        line.copy_from_slice(&f.values()[g.index(i, 0)..g.index(i, 0) + g.ny]);
        derive_line(&line, g.hy, g.periodic_y, &mut dline);
        for j in 0..g.ny {
            out.set(i, j, dline[j]);
        }
    }
    out
}

/// Wirtinger derivative `∂_z = ½(∂/∂x − i ∂/∂y)`.
pub fn d_z<T: ComplexValue>(f: &Field<T>) -> Result<Field<T>> {
    f.check_finite("d_z input")?;
    let fx = dx(f);
    let fy = dy(f);
    fx.zip_map(&fy, |a, b| a.add(b.mul_i().scale(-1.0)).scale(0.5))
}

/// Wirtinger derivative `∂_z̄ = ½(∂/∂x + i ∂/∂y)`.
pub fn d_zbar<T: ComplexValue>(f: &Field<T>) -> Result<Field<T>> {
    f.check_finite("d_zbar input")?;
    let fx = dx(f);
    let fy = dy(f);
    fx.zip_map(&fy, |a, b| a.add(b.mul_i()).scale(0.5))
}

/// Metric Laplacian `Δf = 4 e^{−2u} f_{zz̄}` of a real field, where `u`
/// is the conformal log-factor of the metric `e^{2u}|dz|²`.
pub fn laplacian(f: &Field<f64>, u: &Field<f64>) -> Result<Field<f64>> {
    if !f.grid().same_layout(u.grid()) {
        return Err(Error::GridMismatch("laplacian: f and u grids differ".into()));
    }
    f.check_finite("laplacian input")?;
    let fz = d_z(&f.map(|v| num_complex::Complex64::new(v, 0.0)))?;
    let fzzb = d_zbar(&fz)?;
    fzzb.zip_map(u, |d, uu| 4.0 * (-2.0 * uu).exp() * d.re)
}

/// Quadrature of `∫ f e^{2u} dx dy`.
///
/// Trapezoidal weights in non-periodic directions, plain (spectrally
/// accurate) periodic trapezoid in periodic directions. Summation is
/// compensated and runs in row-major order (`i` outer, `j` inner).
pub fn integrate(f: &Field<f64>, u: &Field<f64>) -> Result<f64> {
    if !f.grid().same_layout(u.grid()) {
        return Err(Error::GridMismatch("integrate: f and u grids differ".into()));
    }
    f.check_finite("integrate integrand")?;
    u.check_finite("integrate conformal factor")?;
    let g = *f.grid();
    let wx = |i: usize| if !g.periodic_x && (i == 0 || i == g.nx - 1) { 0.5 } else { 1.0 };
    let wy = |j: usize| if !g.periodic_y && (j == 0 || j == g.ny - 1) { 0.5 } else { 1.0 };
    let mut acc = KahanSum::new();
    for i in 0..g.nx {
        for j in 0..g.ny {
            acc.add(wx(i) * wy(j) * f.get(i, j) * (2.0 * u.get(i, j)).exp());
        }
    }
    Ok(acc.total() * g.hx * g.hy)
}

/// Max-abs and rms of a field over interior nodes (a 2-node margin is
/// excluded along non-periodic directions).
pub fn residual_norm<T: GridValue>(f: &Field<T>) -> ResidualNorm {
    residual_norm_masked(f, |_, _| true)
}

/// Residual norm restricted by a caller-supplied node mask (applied on
/// top of the interior margin).
pub fn residual_norm_masked<T: GridValue>(
    f: &Field<T>,
    mask: impl Fn(usize, usize) -> bool,
) -> ResidualNorm {
    let g = f.grid();
    let mut max_abs: f64 = 0.0;
    let mut sq = KahanSum::new();
    let mut count = 0usize;
    for i in 0..g.nx {
        for j in 0..g.ny {
            if !g.is_interior(i, j, BOUNDARY_MARGIN) || !mask(i, j) {
                continue;
            }
            let a = f.get(i, j).abs();
            max_abs = max_abs.max(a);
            sq.add(a * a);
            count += 1;
        }
    }
    if count == 0 {
        return ResidualNorm::ZERO;
    }
    ResidualNorm { max_abs, rms: (sq.total() / count as f64).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxgrid::ComplexGrid;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn grid(n: usize) -> ComplexGrid {
        ComplexGrid::centered_square(1.0, n).unwrap()
    }

    fn sample_complex(
        grid: ComplexGrid,
        f: impl Fn(Complex64) -> Complex64,
    ) -> Field<Complex64> {
        Field::from_fn(grid, |i, j| f(grid.z(i, j)))
    }

    #[test]
    fn dz_of_z_is_one() {
        let f = sample_complex(grid(33), |z| z);
        let d = d_z(&f).unwrap();
        let err = d.map(|v| v - Complex64::new(1.0, 0.0));
        let r = residual_norm(&err);
        assert!(r.max_abs < 1e-12, "max err {}", r.max_abs);
    }

    #[test]
    fn dz_kills_zbar_and_dzbar_kills_z() {
        let f = sample_complex(grid(33), |z| z.conj());
        assert!(residual_norm(&d_z(&f).unwrap()).max_abs < 1e-12);
        let f = sample_complex(grid(33), |z| z);
        assert!(residual_norm(&d_zbar(&f).unwrap()).max_abs < 1e-12);
    }

    #[test]
    fn dzbar_of_zbar_is_one() {
        let f = sample_complex(grid(33), |z| z.conj());
        let d = d_zbar(&f).unwrap();
        let err = d.map(|v| v - Complex64::new(1.0, 0.0));
        assert!(residual_norm(&err).max_abs < 1e-12);
    }

    /// Order-of-convergence measurement on an analytic function with a
    /// non-vanishing 5th derivative. Quadratics sit in the exact space of
    /// the stencil, so the oracle function is exp(z); halving h must
    /// shrink the interior error by about 2^4.
    #[test]
    fn dz_fourth_order_on_exp() {
        let err_at = |n: usize| {
            let f = sample_complex(grid(n), |z| z.exp());
            let d = d_z(&f).unwrap();
            let e = Field::from_fn(*f.grid(), |i, j| d.get(i, j) - f.grid().z(i, j).exp());
            residual_norm(&e).max_abs
        };
        let (e1, e2) = (err_at(33), err_at(65));
        let ratio = e1 / e2;
        assert!(ratio > 13.0 && ratio < 19.0, "convergence ratio {ratio} (e1={e1}, e2={e2})");
    }

    #[test]
    fn dzbar_conjugate_convergence_mirror() {
        // mirror of the d_z order test through conjugation
        let err_at = |n: usize| {
            let f = sample_complex(grid(n), |z| z.conj().exp());
            let d = d_zbar(&f).unwrap();
            let e = Field::from_fn(*f.grid(), |i, j| d.get(i, j) - f.grid().z(i, j).conj().exp());
            residual_norm(&e).max_abs
        };
        let ratio = err_at(33) / err_at(65);
        assert!(ratio > 13.0 && ratio < 19.0, "ratio {ratio}");
    }

    #[test]
    fn dz_of_conjugate_is_conjugate_of_dzbar_exactly() {
        let f = sample_complex(grid(21), |z| (z * z + Complex64::new(0.3, 0.7)).sin());
        let lhs = d_z(&f.map(|v| v.conj())).unwrap();
        let rhs = d_zbar(&f).unwrap().map(|v| v.conj());
        assert_eq!(lhs, rhs); // real-coefficient stencils: exact in floating point
    }

    #[test]
    fn mixed_partials_commute_to_rounding() {
        let f = sample_complex(grid(41), |z| (z * Complex64::new(0.9, 0.2)).cos());
        let a = d_z(&d_zbar(&f).unwrap()).unwrap();
        let b = d_zbar(&d_z(&f).unwrap()).unwrap();
        let diff = a.zip_map(&b, |x, y| x - y).unwrap();
        assert!(residual_norm(&diff).max_abs < 1e-10);
    }

    #[test]
    fn periodic_dz_is_spectral_on_trig() {
        let g = ComplexGrid::periodic_cell(0.0, 0.0, 2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI, 32, 32).unwrap();
        let f = Field::from_fn(g, |i, j| Complex64::new((g.x(i)).sin() * (g.y(j)).cos(), 0.0));
        let d = dx(&f);
        let e = Field::from_fn(g, |i, j| d.get(i, j) - Complex64::new(g.x(i).cos() * g.y(j).cos(), 0.0));
        assert!(residual_norm(&e).max_abs < 3e-4); // h^4 at h = 2π/32
    }

    #[test]
    fn flat_laplacian_of_r2() {
        let g = grid(33);
        let f = Field::from_fn(g, |i, j| g.x(i).powi(2) + g.y(j).powi(2));
        let u = Field::zeros(g);
        let lap = laplacian(&f, &u).unwrap();
        let e = lap.map(|v| v - 4.0);
        assert!(residual_norm(&e).max_abs < 1e-10);
    }

    /// Oracle by hand differentiation: Δ log(1+x²+y²) = 4/(1+r²)²;
    /// interior error must shrink at 4th order under refinement.
    #[test]
    fn laplacian_matches_symbolic_oracle() {
        let err_at = |n: usize| {
            let g = grid(n);
            let f = Field::from_fn(g, |i, j| (1.0 + g.x(i).powi(2) + g.y(j).powi(2)).ln());
            let lap = laplacian(&f, &Field::zeros(g)).unwrap();
            let e = Field::from_fn(g, |i, j| {
                let r2 = g.x(i).powi(2) + g.y(j).powi(2);
                lap.get(i, j) - 4.0 / (1.0 + r2).powi(2)
            });
            residual_norm(&e).max_abs
        };
        let (e1, e2) = (err_at(65), err_at(129));
        assert!(e1 < 5e-5, "coarse error {e1}");
        assert!(e1 / e2 > 10.0, "order ratio {} (e1={e1}, e2={e2})", e1 / e2);
    }

    #[test]
    fn laplacian_conformal_scaling() {
        let g = grid(33);
        let f = Field::from_fn(g, |i, j| (g.x(i) * 1.3).sin() + g.y(j).cos());
        let u = Field::from_fn(g, |i, j| 0.2 * g.x(i) - 0.1 * g.y(j));
        let lap_u = laplacian(&f, &u).unwrap();
        let lap_0 = laplacian(&f, &Field::zeros(g)).unwrap();
        let e = Field::from_fn(g, |i, j| {
            lap_u.get(i, j) - (-2.0 * u.get(i, j)).exp() * lap_0.get(i, j)
        });
        assert!(residual_norm(&e).max_abs < 1e-12);
    }

    #[test]
    fn integrate_unit_square() {
        let g = ComplexGrid::new(0.0, 0.0, 1.0 / 16.0, 1.0 / 16.0, 17, 17, false, false).unwrap();
        let one = Field::new_fill(g, 1.0);
        let u = Field::zeros(g);
        assert_abs_diff_eq!(integrate(&one, &u).unwrap(), 1.0, epsilon = 1e-13);
    }

    /// Area of the round sphere through the plane chart: density
    /// 4/(1+r²)², box [-40,40]², tail below 0.1 %.
    #[test]
    fn integrate_slice_chart_area() {
        let g = ComplexGrid::centered_square(40.0, 257).unwrap();
        let u = Field::from_fn(g, |i, j| {
            let r2 = g.x(i).powi(2) + g.y(j).powi(2);
            0.5 * (4.0 / (1.0 + r2).powi(2)).ln()
        });
        let one = Field::new_fill(g, 1.0);
        let a = integrate(&one, &u).unwrap();
        let target = 4.0 * std::f64::consts::PI;
        assert!((a - target).abs() < 0.001 * target, "area {a} vs {target}");
    }

    /// ∫ C₁ dA over the diagonal chart: C₁ ≡ 1, density 8/(1+r²)² → 8π.
    #[test]
    fn integrate_c1_diagonal_chart() {
        let g = ComplexGrid::centered_square(40.0, 257).unwrap();
        let u = Field::from_fn(g, |i, j| {
            let r2 = g.x(i).powi(2) + g.y(j).powi(2);
            0.5 * (8.0 / (1.0 + r2).powi(2)).ln()
        });
        let c1 = Field::new_fill(g, 1.0);
        let a = integrate(&c1, &u).unwrap();
        let target = 8.0 * std::f64::consts::PI;
        assert!((a - target).abs() < 0.001 * target, "got {a}");
    }

    #[test]
    fn integrate_linear_and_monotone() {
        let g = grid(17);
        let u = Field::from_fn(g, |i, j| 0.1 * g.x(i) + 0.05 * g.y(j));
        let f1 = Field::from_fn(g, |i, _j| g.x(i).cos() + 1.5);
        let f2 = Field::from_fn(g, |_i, j| (g.y(j) * 2.0).sin() + 2.0);
        let sum = f1.zip_map(&f2, |a, b| 2.0 * a + b).unwrap();
        let lhs = integrate(&sum, &u).unwrap();
        let rhs = 2.0 * integrate(&f1, &u).unwrap() + integrate(&f2, &u).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        assert!(integrate(&f1, &u).unwrap() > 0.0);
    }

    #[test]
    fn residual_norm_trivial_cases() {
        let g = grid(9);
        assert_eq!(residual_norm(&Field::<f64>::zeros(g)), ResidualNorm::ZERO);
        let c = Field::new_fill(g, -2.5f64);
        let r = residual_norm(&c);
        assert_abs_diff_eq!(r.max_abs, 2.5);
        assert_abs_diff_eq!(r.rms, 2.5, epsilon = 1e-12);
        let checker = Field::from_fn(g, |i, j| if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
        let r = residual_norm(&checker);
        assert_abs_diff_eq!(r.max_abs, 1.0);
        assert_abs_diff_eq!(r.rms, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dz_rejects_non_finite() {
        let g = grid(9);
        let mut f = Field::new_fill(g, Complex64::new(1.0, 0.0));
        f.set(3, 3, Complex64::new(f64::NAN, 0.0));
        assert!(d_z(&f).is_err());
    }
}
