//! Exact scalar arithmetic: rationals, univariate polynomials, reduced rational
//! functions and truncated power series in the deformation parameter ħ.

mod poly;
mod rat;
mod ratfunc;
mod scalar;
mod series;

pub use poly::Poly;
pub use rat::Rat;
pub use ratfunc::RatFunc;
pub use scalar::Scalar;
pub use series::HSeries;

use crate::error::Result;

/// Taylor expansion `F(a + bħ)` through `ħ^order`.
pub fn shift_in_hbar(f: &RatFunc, a: &Rat, b: &Rat, order: usize) -> Result<HSeries<Rat>> {
    let x = HSeries::from_coeffs(vec![a.clone(), b.clone()], Some(order));
    f.eval_in(&x)
}

/// `F(t + bħ)` with `t` kept symbolic: the coefficient of `ħ^m` is a rational
/// function of `t`.
pub fn shift_symbolic(f: &RatFunc, b: &Rat, order: usize) -> Result<HSeries<RatFunc>> {
    let x = HSeries::from_coeffs(vec![RatFunc::var(), RatFunc::constant(b.clone())], Some(order));
    f.eval_in(&x)
}
