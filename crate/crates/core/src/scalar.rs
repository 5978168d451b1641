//! Scalar abstraction shared by every numerical module.
//!
//! All of the library is written against [`Real`]; `f64` is the working
//! precision used by the tests and the CLI, `f32` compiles and runs but is
//! not expected to meet the double-precision tolerances.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable by the library.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in T")
}

/// Converts an integer into `T`.
#[inline]
pub fn int<T: Real>(i: i64) -> T {
    T::from_i64(i).expect("integer representable in T")
}

/// `e^{ix}` for real `x`.
#[inline]
pub fn cis<T: Real>(x: T) -> Complex<T> {
    Complex::new(x.cos(), x.sin())
}

/// The imaginary unit.
#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `i^k` for any integer `k`, evaluated exactly.
pub fn i_pow<T: Real>(k: i64) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match k.rem_euclid(4) {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

/// Integer power of a complex number by repeated squaring; exact branch, no logarithms.
pub fn cpow<T: Real>(base: Complex<T>, exp: u32) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b;
        }
        b = b * b;
        e >>= 1;
    }
    acc
}

/// `ln(n!)` as a plain sum of logarithms.
pub fn ln_factorial<T: Real>(n: u32) -> T {
    (2..=n).fold(T::zero(), |acc, k| acc + int::<T>(k as i64).ln())
}

/// Machine epsilon of `T` scaled by a small factor, used for "numerically zero" tests.
#[inline]
pub fn tiny<T: Real>() -> T {
    T::epsilon() * lit(64.0)
}
