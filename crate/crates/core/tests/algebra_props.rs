use proptest::prelude::*;
use qkz_core::algebra::{shift_in_hbar, HSeries, Poly, Rat, RatFunc, Scalar};
use qkz_core::Error;

fn rat() -> impl Strategy<Value = Rat> {
    (-60i64..=60, 1i64..=30).prop_map(|(p, q)| Rat::new(p, q))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rat(), 1..=max_deg + 1).prop_map(Poly::new)
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(3), poly(2)).prop_filter_map("zero denominator", |(n, d)| RatFunc::new(n, d).ok())
}

fn series(order: usize) -> impl Strategy<Value = HSeries<Rat>> {
    prop::collection::vec(rat(), order + 1).prop_map(move |c| HSeries::from_coeffs(c, Some(order)))
}

proptest! {
    #[test]
    fn rational_field_axioms(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Rat::one());
        }
    }

    #[test]
    fn ratfunc_eval_is_multiplicative(f in ratfunc(), g in ratfunc(), a in rat()) {
        let fg = f.mul_ref(&g);
        if let (Ok(x), Ok(y)) = (f.eval(&a), g.eval(&a)) {
            prop_assert_eq!(fg.eval(&a).unwrap(), &x * &y);
        }
    }

    #[test]
    fn ratfunc_is_reduced_with_monic_denominator(f in ratfunc(), g in ratfunc()) {
        let h = f.add_ref(&g);
        prop_assert!(h.den().is_one() || h.den().leading() == Some(&Rat::one()));
        prop_assert!(Poly::gcd(h.num(), h.den()).degree().unwrap_or(0) == 0);
    }

    #[test]
    fn series_inverse(s in series(5)) {
        prop_assume!(!s.constant_term().is_zero());
        let inv = s.try_inverse().unwrap();
        let prod = s.mul_ref(&inv);
        prop_assert_eq!(prod.coeff(0), Rat::one());
        for k in 1..=5 {
            prop_assert!(prod.coeff(k).is_zero());
        }
    }

    #[test]
    fn exp_of_negation_is_inverse(tail in prop::collection::vec(rat(), 4)) {
        let mut c = vec![Rat::zero()];
        c.extend(tail);
        let s = HSeries::from_coeffs(c, Some(4));
        let neg = s.scale(&Rat::from_int(-1));
        let prod = s.exp().unwrap().mul_ref(&neg.exp().unwrap());
        prop_assert!(prod.agrees_with(&HSeries::one()));
    }

    #[test]
    fn zero_shift_is_evaluation(f in ratfunc(), a in rat()) {
        match f.eval(&a) {
            Ok(v) => {
                let s = shift_in_hbar(&f, &a, &Rat::zero(), 3).unwrap();
                prop_assert!(s.agrees_with(&HSeries::constant(v, Some(3))));
            }
            Err(e) => prop_assert!(e.is_pole()),
        }
    }

    #[test]
    fn shift_is_a_ring_map(f in ratfunc(), g in ratfunc(), a in rat(), b in rat()) {
        let fs = shift_in_hbar(&f, &a, &b, 4);
        let gs = shift_in_hbar(&g, &a, &b, 4);
        if let (Ok(fs), Ok(gs)) = (fs, gs) {
            let both = shift_in_hbar(&f.mul_ref(&g), &a, &b, 4).unwrap();
            prop_assert!(both.agrees_with(&fs.mul_ref(&gs)));
        }
    }
}

#[test]
fn spec_examples() {
    let z = RatFunc::var();
    let one = RatFunc::one();
    let f = one.mul_ref(&z.add_ref(&one).inverse().unwrap());
    assert_eq!(f.eval(&Rat::one()).unwrap(), Rat::new(1, 2));
    let g = z.sub_ref(&one).mul_ref(&z.inverse().unwrap());
    assert_eq!(g.eval(&Rat::one()).unwrap(), Rat::zero());
    let h = z.mul_ref(&z.add_ref(&one).inverse().unwrap());
    assert!(matches!(h.eval(&Rat::from_int(-1)), Err(Error::PoleEncountered(_))));
    assert_eq!(h.derivative(), z.add_ref(&one).mul_ref(&z.add_ref(&one)).inverse().unwrap());
    assert_eq!(z.inverse().unwrap().derivative(), RatFunc::inv_power(Rat::from_int(-1), 2));

    let s = shift_in_hbar(&f, &Rat::one(), &Rat::from_int(-1), 2).unwrap();
    assert_eq!(s.coeffs(), &[Rat::new(1, 2), Rat::new(1, 4), Rat::new(1, 8)]);
    let s = shift_in_hbar(&z.inverse().unwrap(), &Rat::one(), &Rat::one(), 2).unwrap();
    assert_eq!(s.coeffs(), &[Rat::one(), Rat::from_int(-1), Rat::one()]);

    let e = HSeries::<Rat>::hbar().truncate(3).exp().unwrap();
    assert_eq!(e.coeffs(), &[Rat::one(), Rat::one(), Rat::new(1, 2), Rat::new(1, 6)]);
    let bad = HSeries::constant(Rat::one(), Some(2));
    assert_eq!(bad.exp().unwrap_err(), Error::NonNilpotentConstantTerm);
}
