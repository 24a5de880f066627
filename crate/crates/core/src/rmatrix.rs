//! The rational sl₂ R-matrix `R(z) = (zI + ħP)/(z + ħ) · exp(g(z))` and the
//! local identities it satisfies.
//!
//! Two realizations are provided. The *bare* form drops the scalar factor and
//! works with a numeric ħ. The *normalized* form keeps ħ formal and carries the
//! scalar factor as a truncated ħ-series, where
//! `g(z) = tanh(ħ∂/2)/∂ · z^{-1} = Σ_k T_k (ħ/2)^{2k+1} (2k)! z^{-2k-1}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{HSeries, Rat, RatFunc, Scalar};
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::tensor::TensorMat;

/// Choice of R-matrix realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RMode {
    Bare,
    Normalized { order: usize },
}

impl RMode {
    pub fn validate(self) -> Result<Self> {
        match self {
            RMode::Normalized { order: 0 } => {
                Err(Error::InvalidConfig("normalized mode requires truncation order >= 1".into()))
            }
            m => Ok(m),
        }
    }
}

/// A spectral argument `a + bħ`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HbarAffine {
    pub a: Rat,
    pub b: Rat,
}

impl HbarAffine {
    pub fn new(a: Rat, b: Rat) -> Self {
        HbarAffine { a, b }
    }

    pub fn constant(a: Rat) -> Self {
        HbarAffine { a, b: Rat::zero() }
    }

    /// Numeric value at a given ħ.
    pub fn at(&self, hbar: &Rat) -> Rat {
        &self.a + &(&self.b * hbar)
    }

    pub fn shift_hbar(&self, db: &Rat) -> Self {
        HbarAffine { a: self.a.clone(), b: &self.b + db }
    }

    pub fn neg(&self) -> Self {
        HbarAffine { a: -&self.a, b: -&self.b }
    }
}

impl std::ops::Add for &HbarAffine {
    type Output = HbarAffine;
    fn add(self, rhs: &HbarAffine) -> HbarAffine {
        HbarAffine { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl std::ops::Sub for &HbarAffine {
    type Output = HbarAffine;
    fn sub(self, rhs: &HbarAffine) -> HbarAffine {
        HbarAffine { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl fmt::Display for HbarAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + ({})*h", self.a, self.b)
        }
    }
}

impl fmt::Debug for HbarAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A concrete way of turning spectral arguments into R-matrices over a scalar ring.
pub trait RFamily: Clone + Send + Sync {
    type S: Scalar;

    fn mode(&self) -> RMode;

    /// `R(arg)` on two legs.
    fn r_matrix(&self, arg: &HbarAffine) -> Result<TensorMat<Self::S>>;

    /// Records the realization's own parameters in a report.
    fn describe(&self, report: CheckReport) -> CheckReport;

    /// Whether two spectral points are distinct in this realization.
    fn distinct(&self, x: &HbarAffine, y: &HbarAffine) -> bool;
}

/// Bare R-matrix at a numeric ħ, over [`Rat`].
#[derive(Debug, Clone, PartialEq)]
pub struct Bare {
    pub hbar: Rat,
}

/// Normalized R-matrix with formal ħ, over ħ-series of rationals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    pub order: usize,
}

impl RFamily for Bare {
    type S = Rat;

    fn mode(&self) -> RMode {
        RMode::Bare
    }

    fn r_matrix(&self, arg: &HbarAffine) -> Result<TensorMat<Rat>> {
        bare_r(&arg.at(&self.hbar), &self.hbar)
    }

    fn describe(&self, report: CheckReport) -> CheckReport {
        report.param("hbar", &self.hbar)
    }

    fn distinct(&self, x: &HbarAffine, y: &HbarAffine) -> bool {
        x.at(&self.hbar) != y.at(&self.hbar)
    }
}

impl RFamily for Normalized {
    type S = HSeries<Rat>;

    fn mode(&self) -> RMode {
        RMode::Normalized { order: self.order }
    }

    fn r_matrix(&self, arg: &HbarAffine) -> Result<TensorMat<HSeries<Rat>>> {
        normalized_r(arg, self.order)
    }

    fn describe(&self, report: CheckReport) -> CheckReport {
        report.param("hbar", "formal")
    }

    // ħ-shifts never separate points: only the constant parts count.
    fn distinct(&self, x: &HbarAffine, y: &HbarAffine) -> bool {
        x.a != y.a
    }
}

/// The flip `P(v_a ⊗ v_b) = v_b ⊗ v_a`.
pub fn perm_p<S: Scalar>() -> TensorMat<S> {
    TensorMat::from_fn(2, |r, c| {
        let swapped = ((r & 1) << 1) | (r >> 1);
        if swapped == c {
            S::one()
        } else {
            S::zero()
        }
    })
}

/// `(zI + ħP)/(z + ħ)`.
pub fn bare_r<S: Scalar>(z: &S, hbar: &S) -> Result<TensorMat<S>> {
    let denom = z.add_ref(hbar);
    let inv = denom
        .inverse()
        .ok_or_else(|| Error::PoleEncountered(format!("bare R-matrix at z = {z}, z + h = {denom}")))?;
    let m = TensorMat::<S>::identity(2).scale(z).add(&perm_p::<S>().scale(hbar));
    Ok(m.scale(&inv))
}

/// Maclaurin coefficients `T_0, …, T_{count-1}` of `tanh x = Σ T_k x^{2k+1}`,
/// from the quotient of the sinh and cosh series.
pub fn tanh_coefficients(count: usize) -> Vec<Rat> {
    if count == 0 {
        return Vec::new();
    }
    let deg = 2 * count - 1;
    let mut fact = Rat::one();
    let mut sinh = vec![Rat::zero(); deg + 1];
    let mut cosh = vec![Rat::zero(); deg + 1];
    for m in 0..=deg {
        if m > 0 {
            fact = &fact * &Rat::from_int(m as i64);
        }
        let term = fact.recip().unwrap();
        if m % 2 == 0 {
            cosh[m] = term;
        } else {
            sinh[m] = term;
        }
    }
    let sinh = HSeries::from_coeffs(sinh, Some(deg));
    let cosh = HSeries::from_coeffs(cosh, Some(deg));
    let tanh = sinh.mul_ref(&cosh.try_inverse().expect("cosh(0) = 1"));
    (0..count).map(|k| tanh.coeff(2 * k + 1)).collect()
}

fn factorial(n: usize) -> Rat {
    (1..=n as i64).fold(Rat::one(), |acc, k| &acc * &Rat::from_int(k))
}

/// The exponent `g(z)` of the scalar factor as an ħ-series with rational
/// function coefficients, truncated at `ħ^order`. Only odd powers occur.
pub fn scalar_factor_exponent(order: usize) -> Result<HSeries<RatFunc>> {
    if order == 0 {
        return Err(Error::InvalidConfig("scalar factor exponent needs order >= 1".into()));
    }
    let count = order.div_ceil(2);
    let tanh = tanh_coefficients(count);
    let mut coeffs = vec![RatFunc::zero(); order + 1];
    for (k, t) in tanh.iter().enumerate() {
        let p = 2 * k + 1;
        if p > order {
            break;
        }
        let c = &(t * &Rat::new(1, 2).pow(p as u32)) * &factorial(2 * k);
        coeffs[p] = RatFunc::inv_power(c, p);
    }
    Ok(HSeries::from_coeffs(coeffs, Some(order)))
}

/// Normalized R-matrix at `a + bħ` for any coefficient ring (e.g. `a` a
/// rational number, or the symbolic variable in [`RatFunc`]).
pub fn normalized_r_general<C: Scalar>(a: C, b: &Rat, order: usize) -> Result<TensorMat<HSeries<C>>> {
    let g = scalar_factor_exponent(order)?;
    let x = HSeries::affine(a, C::from_rat(b), Some(order));
    let hbar = HSeries::<C>::hbar();
    let mut exponent = HSeries::<C>::zero().truncate(order);
    let mut hpow = HSeries::<C>::one();
    for k in 0..=order {
        let gk = g.coeff(k);
        if !gk.is_zero() {
            let val = gk.eval_in(&x)?;
            exponent = exponent.add_ref(&val.mul_ref(&hpow));
        }
        hpow = hpow.mul_ref(&hbar);
    }
    let factor = exponent.exp()?;
    Ok(bare_r(&x, &hbar)?.scale(&factor))
}

/// Normalized R-matrix at `a + bħ` over ħ-series of rationals; pole iff `a = 0`.
pub fn normalized_r(arg: &HbarAffine, order: usize) -> Result<TensorMat<HSeries<Rat>>> {
    if arg.a.is_zero() {
        return Err(Error::PoleEncountered(format!("normalized R-matrix at z = {arg}")));
    }
    normalized_r_general(arg.a.clone(), &arg.b, order)
}

/// Yang–Baxter: `R¹²(u−v) R¹³(u) R²³(v) = R²³(v) R¹³(u) R¹²(u−v)`.
pub fn ybe_with<F: RFamily>(family: &F, u: &HbarAffine, v: &HbarAffine) -> Result<CheckReport> {
    let r12 = family.r_matrix(&(u - v))?.embed(3, 1, 2)?;
    let r13 = family.r_matrix(u)?.embed(3, 1, 3)?;
    let r23 = family.r_matrix(v)?.embed(3, 2, 3)?;
    let lhs = r12.mul(&r13).mul(&r23);
    let rhs = r23.mul(&r13).mul(&r12);
    let report = CheckReport::new("yang_baxter", family.mode()).param("u", u).param("v", v);
    Ok(family.describe(report).with_residual(lhs.first_nonzero_residual(&rhs)))
}

pub fn ybe_check(mode: RMode, u: &Rat, v: &Rat, hbar: &Rat) -> Result<CheckReport> {
    let (u, v) = (HbarAffine::constant(u.clone()), HbarAffine::constant(v.clone()));
    match mode.validate()? {
        RMode::Bare => ybe_with(&Bare { hbar: hbar.clone() }, &u, &v),
        RMode::Normalized { order } => ybe_with(&Normalized { order }, &u, &v),
    }
}

/// Unitarity: `R(z) R²¹(−z) = c(z)·I`. Passes when the product is scalar; for the
/// bare form the scalar must also be 1. The scalar is reported in `details`.
pub fn unitarity_with<F: RFamily>(family: &F, z: &HbarAffine) -> Result<CheckReport> {
    let r = family.r_matrix(z)?;
    let r21 = family.r_matrix(&z.neg())?.embed(2, 2, 1)?;
    let prod = r.mul(&r21);
    let c = prod.get(0, 0).clone();
    let scalar_residual = prod.first_nonzero_residual(&TensorMat::identity(2).scale(&c));
    let is_one = c == F::S::one() || c.sub_ref(&F::S::one()).is_zero();
    let report = family
        .describe(CheckReport::new("unitarity", family.mode()).param("z", z))
        .detail("scalar", c.to_string())
        .detail("scalar_is_one", is_one);
    let mut report = report.with_residual(scalar_residual);
    if family.mode() == RMode::Bare && !is_one {
        report.pass = false;
    }
    Ok(report)
}

pub fn unitarity_check(mode: RMode, z: &Rat, hbar: &Rat) -> Result<CheckReport> {
    let z = HbarAffine::constant(z.clone());
    match mode.validate()? {
        RMode::Bare => unitarity_with(&Bare { hbar: hbar.clone() }, &z),
        RMode::Normalized { order } => unitarity_with(&Normalized { order }, &z),
    }
}

type Sides<S> = (TensorMat<S>, TensorMat<S>);

/// Both sides of the crossing identity at spectral parameter `z`:
/// `((R(z+2ħ))⁻¹)^{t₂}` and `(R(z)^{t₂})⁻¹`.
pub fn crossing_sides<F: RFamily>(family: &F, z: &HbarAffine) -> Result<Sides<F::S>> {
    let shifted = family.r_matrix(&z.shift_hbar(&Rat::from_int(2)))?;
    let lhs = shifted.inverse()?.partial_transpose(2)?;
    let rhs = family.r_matrix(z)?.partial_transpose(2)?.inverse()?;
    Ok((lhs, rhs))
}

/// Crossing check; on failure reports the scalar `rhs = ratio · lhs` when the
/// two sides are proportional.
pub fn crossing_with<F: RFamily>(family: &F, z: &HbarAffine) -> Result<CheckReport> {
    let (lhs, rhs) = crossing_sides(family, z)?;
    let report = family.describe(CheckReport::new("crossing", family.mode()).param("z", z));
    let mut report = report.with_residual(rhs.first_nonzero_residual(&lhs));
    if !report.pass {
        if let Some(ratio) = proportionality(&lhs, &rhs) {
            report = report.detail("ratio", ratio.to_string());
        }
    }
    Ok(report)
}

/// `Some(c)` with `b = c·a`, when such a scalar exists.
pub fn proportionality<S: Scalar>(a: &TensorMat<S>, b: &TensorMat<S>) -> Option<S> {
    let (r, c) = (0..a.dim())
        .flat_map(|r| (0..a.dim()).map(move |c| (r, c)))
        .find(|&(r, c)| a.get(r, c).inverse().is_some())?;
    let ratio = b.get(r, c).mul_ref(&a.get(r, c).inverse()?);
    a.scale(&ratio).first_nonzero_residual(b).is_none().then_some(ratio)
}

pub fn crossing_check(mode: RMode, z: &Rat, hbar: &Rat) -> Result<CheckReport> {
    let z = HbarAffine::constant(z.clone());
    match mode.validate()? {
        RMode::Bare => crossing_with(&Bare { hbar: hbar.clone() }, &z),
        RMode::Normalized { order } => crossing_with(&Normalized { order }, &z),
    }
}
