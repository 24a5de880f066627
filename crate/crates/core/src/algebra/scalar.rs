use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use super::Rat;

/// A commutative ring of exact scalars with partial inversion.
///
/// Implemented by [`Rat`](super::Rat), [`RatFunc`](super::RatFunc) and
/// [`HSeries`](super::HSeries) over either of them.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rat(r: &Rat) -> Self;
    /// Multiplicative inverse, `None` when the element is not a unit.
    fn inverse(&self) -> Option<Self>;

    fn add_ref(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
    fn scale(&self, r: &Rat) -> Self {
        self.mul_ref(&Self::from_rat(r))
    }
}
