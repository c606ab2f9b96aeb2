//! Real and complex scalar fields.
//!
//! Every matrix routine in the crate is generic over [`Scalar`], which is
//! implemented for `f64` and [`c64`]. The field of a run is a type parameter;
//! [`Field`] is its runtime tag.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use faer::traits::ComplexField;
pub use num_complex::Complex64 as c64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(Error::param(format!(
                "unknown field `{other}` (expected `real` or `complex`)"
            ))),
        }
    }
}

pub trait Scalar:
    ComplexField<Real = f64>
    + Copy
    + Send
    + Sync
    + fmt::Debug
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const FIELD: Field;

    fn from_real(x: f64) -> Self;
    fn real(self) -> f64;
    fn imag(self) -> f64;
    fn conjugate(self) -> Self;

    fn abs_sq(self) -> f64 {
        let (re, im) = (self.real(), self.imag());
        re * re + im * im
    }

    /// A standard Gaussian in this field: `N(0, 1)` for reals and
    /// `(Z1 + i Z2) / sqrt(2)` for complex numbers, so that `E|Z|^2 = 1`.
    fn standard_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn real(self) -> f64 {
        self
    }
    #[inline]
    fn imag(self) -> f64 {
        0.0
    }
    #[inline]
    fn conjugate(self) -> Self {
        self
    }
    #[inline]
    fn standard_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Scalar for c64 {
    const FIELD: Field = Field::Complex;

    #[inline]
    fn from_real(x: f64) -> Self {
        c64::new(x, 0.0)
    }
    #[inline]
    fn real(self) -> f64 {
        self.re
    }
    #[inline]
    fn imag(self) -> f64 {
        self.im
    }
    #[inline]
    fn conjugate(self) -> Self {
        self.conj()
    }
    #[inline]
    fn standard_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}
