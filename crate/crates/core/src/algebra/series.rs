use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Rat, Scalar};
use crate::error::{Error, Result};

/// Truncated power series in ħ.
///
/// `order = Some(N)` means the terms `ħ^0 … ħ^N` are known and the remainder is
/// `O(ħ^{N+1})`. `order = None` marks an exact (polynomial) series, used for
/// constants and for ħ itself. Binary operations truncate to the smaller order.
#[derive(Clone, PartialEq)]
pub struct HSeries<C> {
    coeffs: Vec<C>,
    order: Option<usize>,
}

impl<C: Scalar> HSeries<C> {
    pub fn from_coeffs(mut coeffs: Vec<C>, order: Option<usize>) -> Self {
        if let Some(n) = order {
            coeffs.truncate(n + 1);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        HSeries { coeffs, order }
    }

    pub fn constant(c: C, order: Option<usize>) -> Self {
        HSeries::from_coeffs(vec![c], order)
    }

    /// The exact series `ħ`.
    pub fn hbar() -> Self {
        HSeries::from_coeffs(vec![C::zero(), C::one()], None)
    }

    /// `a + bħ` truncated at `order`.
    pub fn affine(a: C, b: C, order: Option<usize>) -> Self {
        HSeries::from_coeffs(vec![a, b], order)
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    /// Stored coefficients (trailing zeros trimmed).
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `ħ^m`; zero when not stored.
    pub fn coeff(&self, m: usize) -> C {
        self.coeffs.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let o = Some(self.order.map_or(order, |n| n.min(order)));
        HSeries::from_coeffs(self.coeffs.clone(), o)
    }

    fn min_order(&self, rhs: &Self) -> Option<usize> {
        match (self.order, rhs.order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        }
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> HSeries<D> {
        HSeries::from_coeffs(self.coeffs.iter().map(f).collect(), self.order)
    }

    /// Multiplicative inverse. Requires an invertible constant term and, unless
    /// the series is a constant, a finite truncation order.
    pub fn try_inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let inv0 = c0
            .inverse()
            .ok_or_else(|| Error::NotInvertible(format!("constant term {c0} of series")))?;
        let n = match self.order {
            Some(n) => n,
            None if self.coeffs.len() <= 1 => return Ok(HSeries::constant(inv0, None)),
            None => return Err(Error::UnboundedOrder),
        };
        let mut out: Vec<C> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for m in 1..=n {
            let mut acc = C::zero();
            for k in 1..=m.min(self.coeffs.len().saturating_sub(1)) {
                acc = acc.add_ref(&self.coeffs[k].mul_ref(&out[m - k]));
            }
            out.push(-(acc.mul_ref(&inv0)));
        }
        Ok(HSeries::from_coeffs(out, self.order))
    }

    /// `exp(s)` for a series without constant term, via `m·e_m = Σ k·s_k·e_{m-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonNilpotentConstantTerm);
        }
        let n = match self.order {
            Some(n) => n,
            None if self.coeffs.is_empty() => return Ok(HSeries::constant(C::one(), None)),
            None => return Err(Error::UnboundedOrder),
        };
        let mut out: Vec<C> = Vec::with_capacity(n + 1);
        out.push(C::one());
        for m in 1..=n {
            let mut acc = C::zero();
            for k in 1..=m.min(self.coeffs.len().saturating_sub(1)) {
                let term = self.coeffs[k].mul_ref(&out[m - k]).scale(&Rat::from_int(k as i64));
                acc = acc.add_ref(&term);
            }
            out.push(acc.scale(&Rat::new(1, m as i64)));
        }
        Ok(HSeries::from_coeffs(out, self.order))
    }

    /// Equality of all coefficients known on both sides.
    pub fn agrees_with(&self, rhs: &Self) -> bool {
        self.sub_ref(rhs).is_zero()
    }
}

impl<C: Scalar> Scalar for HSeries<C> {
    fn zero() -> Self {
        HSeries { coeffs: Vec::new(), order: None }
    }
    fn one() -> Self {
        HSeries::constant(C::one(), None)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn from_rat(r: &Rat) -> Self {
        HSeries::constant(C::from_rat(r), None)
    }
    fn inverse(&self) -> Option<Self> {
        self.try_inverse().ok()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        let order = self.min_order(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let n = order.map_or(n, |o| n.min(o + 1));
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => C::zero(),
            })
            .collect();
        HSeries::from_coeffs(coeffs, order)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&rhs.neg_ref())
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        let order = self.min_order(rhs);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return HSeries { coeffs: Vec::new(), order };
        }
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let n = order.map_or(full, |o| full.min(o + 1));
        let mut out = vec![C::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        HSeries::from_coeffs(out, order)
    }
    fn scale(&self, r: &Rat) -> Self {
        HSeries::from_coeffs(self.coeffs.iter().map(|c| c.scale(r)).collect(), self.order)
    }
}

impl<C: Scalar> HSeries<C> {
    fn neg_ref(&self) -> Self {
        HSeries { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(), order: self.order }
    }
}

impl<C: Scalar> Add for HSeries<C> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<C: Scalar> Sub for HSeries<C> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<C: Scalar> Mul for HSeries<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<C: Scalar> Neg for HSeries<C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl<C: Scalar> fmt::Display for HSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let cs = if cs.contains([' ', '/']) && k > 0 { format!("({cs})") } else { cs };
            terms.push(match k {
                0 => cs,
                1 => format!("{cs}*h"),
                _ => format!("{cs}*h^{k}"),
            });
        }
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        match self.order {
            Some(n) => write!(f, "{body} + O(h^{})", n + 1),
            None => f.write_str(&body),
        }
    }
}

impl<C: Scalar> fmt::Debug for HSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// JSON form: `{"order": N | null, "coeffs": ["p/q", ...]}`.
impl<C: Scalar> Serialize for HSeries<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("HSeries", 2)?;
        st.serialize_field("order", &self.order)?;
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coeffs", &cs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for HSeries<Rat> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            order: Option<usize>,
            coeffs: Vec<Rat>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if let Some(n) = raw.order {
            if raw.coeffs.len() > n + 1 {
                return Err(serde::de::Error::custom("more coefficients than the truncation order allows"));
            }
        }
        Ok(HSeries::from_coeffs(raw.coeffs, raw.order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{shift_in_hbar, Poly, RatFunc};

    fn s(v: &[(i64, i64)], order: usize) -> HSeries<Rat> {
        HSeries::from_coeffs(v.iter().map(|&(p, q)| Rat::new(p, q)).collect(), Some(order))
    }

    #[test]
    fn exp_of_hbar() {
        let e = s(&[(0, 1), (1, 1)], 3).exp().unwrap();
        assert_eq!(e, s(&[(1, 1), (1, 1), (1, 2), (1, 6)], 3));
        let one = HSeries::<Rat>::zero().truncate(4).exp().unwrap();
        assert_eq!(one, s(&[(1, 1)], 4));
    }

    #[test]
    fn exp_of_exponent_over_ratfunc() {
        // exp(ħ/(2z)) = 1 + ħ/(2z) + ħ²/(8z²) + O(ħ³)
        let g = HSeries::from_coeffs(
            vec![RatFunc::zero(), RatFunc::inv_power(Rat::new(1, 2), 1)],
            Some(2),
        );
        let e = g.exp().unwrap();
        assert_eq!(e.coeff(0), RatFunc::one());
        assert_eq!(e.coeff(1), RatFunc::inv_power(Rat::new(1, 2), 1));
        assert_eq!(e.coeff(2), RatFunc::inv_power(Rat::new(1, 8), 2));
    }

    #[test]
    fn exp_rejects_constant_term() {
        assert_eq!(s(&[(1, 1), (1, 1)], 3).exp().unwrap_err(), Error::NonNilpotentConstantTerm);
        assert_eq!(HSeries::<Rat>::hbar().exp().unwrap_err(), Error::UnboundedOrder);
    }

    #[test]
    fn exp_times_exp_neg_is_one() {
        let x = s(&[(0, 1), (3, 7), (-2, 5), (1, 9)], 5);
        let p = x.exp().unwrap().mul_ref(&(-x.clone()).exp().unwrap());
        assert_eq!(p, s(&[(1, 1)], 5));
    }

    #[test]
    fn mixed_order_truncates_to_minimum() {
        let a = s(&[(1, 1), (1, 1), (1, 1), (1, 1)], 3);
        let b = s(&[(1, 1), (2, 1)], 1);
        assert_eq!(a.mul_ref(&b).order(), Some(1));
        assert_eq!(a.add_ref(&HSeries::hbar()).order(), Some(3));
    }

    #[test]
    fn inverse_requires_unit_constant() {
        assert!(s(&[(0, 1), (1, 1)], 3).try_inverse().is_err());
        let inv = s(&[(2, 1), (1, 1)], 3).try_inverse().unwrap();
        assert_eq!(inv, s(&[(1, 2), (-1, 4), (1, 8), (-1, 16)], 3));
    }

    #[test]
    fn shift_examples() {
        let z = RatFunc::var();
        let r = shift_in_hbar(&z, &Rat::from_int(2), &Rat::from_int(3), 5).unwrap();
        assert_eq!(r, s(&[(2, 1), (3, 1)], 5));
        let inv = RatFunc::inv_power(Rat::one(), 1);
        let r = shift_in_hbar(&inv, &Rat::one(), &Rat::one(), 2).unwrap();
        assert_eq!(r, s(&[(1, 1), (-1, 1), (1, 1)], 2));
        let f = RatFunc::new(Poly::constant(Rat::one()), Poly::new(vec![Rat::one(), Rat::one()])).unwrap();
        let r = shift_in_hbar(&f, &Rat::one(), &Rat::from_int(-1), 2).unwrap();
        assert_eq!(r, s(&[(1, 2), (1, 4), (1, 8)], 2));
        assert!(shift_in_hbar(&inv, &Rat::zero(), &Rat::one(), 2).unwrap_err().is_pole());
    }

    #[test]
    fn json_shape() {
        let x = s(&[(1, 1), (0, 1), (-1, 12)], 3);
        let js = serde_json::to_value(&x).unwrap();
        assert_eq!(js, serde_json::json!({"order": 3, "coeffs": ["1", "0", "-1/12"]}));
        let back: HSeries<Rat> = serde_json::from_value(js).unwrap();
        assert_eq!(back, x);
    }
}
