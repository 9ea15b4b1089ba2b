//! Scalar fields for moment computations: exact rational functions of κ and
//! double-precision floats behind one trait.

mod factored;
mod poly;
mod ratfunc;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

pub use factored::FactoredRatFunc;
pub use poly::Poly;
pub use ratfunc::RatFunc;

use crate::{Error, Result};

/// Float denominators smaller than this are treated as resonant.
pub const RESONANCE_EPS: f64 = 1e-13;

/// Field operations needed by the word and closed-form engines.
pub trait Scalar:
    Clone + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Whether arithmetic is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// Exact embedding of a finite float (every finite double is a dyadic rational).
    fn from_f64(x: f64) -> Result<Self>;
    /// Reciprocal of a denominator factor; a vanishing factor is a resonance.
    fn recip(&self) -> Result<Self>;
    fn is_zero(&self) -> bool;

    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.recip()?)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_f64(x: f64) -> Result<Self> {
        Ok(x)
    }
    fn recip(&self) -> Result<Self> {
        if self.abs() < RESONANCE_EPS || !self.is_finite() {
            Err(Error::Resonance(format!("factor {self:e}")))
        } else {
            Ok(1.0 / self)
        }
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for RatFunc {
    const EXACT: bool = true;

    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn from_i64(n: i64) -> Self {
        RatFunc::from_int(n)
    }
    fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(|r| RatFunc::from_rational(&r))
            .ok_or_else(|| Error::Unsupported(format!("non-finite value {x}")))
    }
    fn recip(&self) -> Result<Self> {
        RatFunc::recip(self).map_err(|_| Error::Resonance("zero rational function".into()))
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}
