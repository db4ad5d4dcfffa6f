//! Value traits that let the stencil and residual machinery run over
//! scalars, complex numbers and small (complex) vectors uniformly.

use nalgebra::{Vector3, Vector4, Vector6};
use num_complex::Complex64;

/// Types a [`super::Field`] can carry: closed under real-linear
/// combinations with a norm and a finiteness check.
pub trait GridValue: Copy + 'static + Send + Sync {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, c: f64) -> Self;
    fn is_finite(&self) -> bool;
    /// Euclidean magnitude (modulus for complex entries).
    fn abs(&self) -> f64;
}

/// Complex-linear values: additionally closed under multiplication by `i`.
pub trait ComplexValue: GridValue {
    fn mul_i(self) -> Self;
    fn conj(self) -> Self;
}

/// Real values with a complexification (used before applying `d_z`).
pub trait Complexify: GridValue {
    type Complexified: ComplexValue;
    fn complexify(self) -> Self::Complexified;
}

/// Complex values with a real part (used after composed stencils).
pub trait RealPart: ComplexValue {
    type Real: GridValue;
    fn real_part(self) -> Self::Real;
}

impl GridValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn abs(&self) -> f64 {
        f64::abs(*self)
    }
}

impl GridValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn abs(&self) -> f64 {
        self.norm()
    }
}

impl ComplexValue for Complex64 {
    fn mul_i(self) -> Self {
        Complex64::new(-self.im, self.re)
    }
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
}

impl Complexify for f64 {
    type Complexified = Complex64;
    fn complexify(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl RealPart for Complex64 {
    type Real = f64;
    fn real_part(self) -> f64 {
        self.re
    }
}

macro_rules! impl_real_vector {
    ($v:ident) => {
        impl GridValue for $v<f64> {
            fn zero() -> Self {
                $v::zeros()
            }
            fn add(self, other: Self) -> Self {
                self + other
            }
            fn scale(self, c: f64) -> Self {
                self * c
            }
            fn is_finite(&self) -> bool {
                self.iter().all(|x| x.is_finite())
            }
            fn abs(&self) -> f64 {
                self.norm()
            }
        }

        impl Complexify for $v<f64> {
            type Complexified = $v<Complex64>;
            fn complexify(self) -> $v<Complex64> {
                self.map(|x| Complex64::new(x, 0.0))
            }
        }
    };
}

macro_rules! impl_complex_vector {
    ($v:ident) => {
        impl GridValue for $v<Complex64> {
            fn zero() -> Self {
                $v::zeros()
            }
            fn add(self, other: Self) -> Self {
                self + other
            }
            fn scale(self, c: f64) -> Self {
                self.map(|x| x * c)
            }
            fn is_finite(&self) -> bool {
                self.iter().all(|x| x.re.is_finite() && x.im.is_finite())
            }
            fn abs(&self) -> f64 {
                self.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
            }
        }

        impl ComplexValue for $v<Complex64> {
            fn mul_i(self) -> Self {
                self.map(|x| Complex64::new(-x.im, x.re))
            }
            fn conj(self) -> Self {
                self.map(|x| x.conj())
            }
        }

        impl RealPart for $v<Complex64> {
            type Real = $v<f64>;
            fn real_part(self) -> $v<f64> {
                self.map(|x| x.re)
            }
        }
    };
}

impl_real_vector!(Vector3);
impl_real_vector!(Vector4);
impl_real_vector!(Vector6);
impl_complex_vector!(Vector3);
impl_complex_vector!(Vector4);
impl_complex_vector!(Vector6);
