use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Poly, Rat, Scalar};
use crate::error::{Error, Result};

/// Reduced ratio of polynomials in one variable: `gcd(num, den) = 1`, `den` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Builds and reduces `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::PoleEncountered("rational function with zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RatFunc::from_poly(Poly::zero()));
        }
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lc = den.leading().unwrap().recip().unwrap();
        Ok(RatFunc { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::constant(Rat::one()) }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// The variable itself.
    pub fn var() -> Self {
        RatFunc::from_poly(Poly::var())
    }

    /// `c / z^k`.
    pub fn inv_power(c: Rat, k: usize) -> Self {
        RatFunc::new(Poly::constant(c), Poly::monomial(Rat::one(), k)).unwrap()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn eval(&self, a: &Rat) -> Result<Rat> {
        let d = self.den.eval(a);
        if d.is_zero() {
            return Err(Error::PoleEncountered(format!("{self} at z = {a}")));
        }
        Ok(&self.num.eval(a) / &d)
    }

    /// Evaluates at an element of another scalar ring, e.g. at `a + bħ` in a
    /// truncated series ring, which yields the Taylor expansion.
    pub fn eval_in<S: Scalar>(&self, x: &S) -> Result<S> {
        let d = self.den.eval_in(x);
        let inv = d
            .inverse()
            .ok_or_else(|| Error::PoleEncountered(format!("{self} at z = {x}")))?;
        Ok(self.num.eval_in(x).mul_ref(&inv))
    }

    /// Formal derivative by the quotient rule.
    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den).unwrap()
    }

    /// `Some((c, k))` when the function equals `c / z^k` with `k >= 0`.
    pub fn as_inverse_monomial(&self) -> Option<(Rat, usize)> {
        if self.num.degree() != Some(0) {
            return None;
        }
        let k = self.den.degree()?;
        let expected = Poly::monomial(Rat::one(), k);
        (self.den == expected).then(|| (self.num.coeff(0), k))
    }

    pub fn fmt_in(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.fmt_in(var);
        }
        let wrap = |p: &Poly| {
            let s = p.fmt_in(var);
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_in("z"))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        self.add_ref(&rhs)
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        self.sub_ref(&rhs)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        self.mul_ref(&rhs)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den }
    }
}

impl Scalar for RatFunc {
    fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }
    fn one() -> Self {
        RatFunc::constant(Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn from_rat(r: &Rat) -> Self {
        RatFunc::constant(r.clone())
    }
    fn inverse(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            RatFunc::new(self.den.clone(), self.num.clone()).ok()
        }
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::new(n, &self.den * &rhs.den).unwrap()
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.add_ref(&-rhs.clone())
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }
    fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(r), den: self.den.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[i64]) -> Poly {
        Poly::new(v.iter().map(|&c| Rat::from_int(c)).collect())
    }

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(poly(n), poly(d)).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(rf(&[1], &[1, 1]).eval(&Rat::one()).unwrap(), Rat::new(1, 2));
        assert_eq!(rf(&[-1, 1], &[0, 1]).eval(&Rat::one()).unwrap(), Rat::zero());
        let err = rf(&[0, 1], &[1, 1]).eval(&Rat::from_int(-1)).unwrap_err();
        assert!(matches!(err, Error::PoleEncountered(_)));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(RatFunc::from_poly(poly(&[0, 0, 1])).derivative(), RatFunc::from_poly(poly(&[0, 2])));
        assert_eq!(rf(&[1], &[0, 1]).derivative(), rf(&[-1], &[0, 0, 1]));
        // z/(z+1) -> 1/(z+1)^2
        assert_eq!(rf(&[0, 1], &[1, 1]).derivative(), rf(&[1], &[1, 2, 1]));
    }

    #[test]
    fn canonical_form() {
        // (2z+2)/(4z^2-4) = (1/2)/(z-1)
        let f = rf(&[2, 2], &[-4, 0, 4]);
        assert_eq!(f.num(), &Poly::constant(Rat::new(1, 2)));
        assert_eq!(f.den(), &poly(&[-1, 1]));
        assert!(RatFunc::new(poly(&[1]), Poly::zero()).is_err());
    }

    #[test]
    fn inverse_monomial_detection() {
        assert_eq!(RatFunc::inv_power(Rat::new(3, 2), 3).as_inverse_monomial(), Some((Rat::new(3, 2), 3)));
        assert_eq!(rf(&[1], &[1, 1]).as_inverse_monomial(), None);
        assert_eq!(RatFunc::constant(Rat::from_int(4)).as_inverse_monomial(), Some((Rat::from_int(4), 0)));
    }
}
