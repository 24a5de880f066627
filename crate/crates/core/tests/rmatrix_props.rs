use proptest::prelude::*;
use qkz_core::algebra::{Rat, Scalar};
use qkz_core::rmatrix::{
    bare_r, crossing_with, normalized_r, perm_p, unitarity_with, ybe_check, Bare, HbarAffine, Normalized, RMode,
};
use qkz_core::tensor::TensorMat;

fn rat() -> impl Strategy<Value = Rat> {
    (-1000i64..=1000, 1i64..=1000).prop_map(|(p, q)| Rat::new(p, q))
}

fn nonzero() -> impl Strategy<Value = Rat> {
    rat().prop_filter("nonzero", |r| !r.is_zero())
}

fn mat(n_legs: usize) -> impl Strategy<Value = TensorMat<Rat>> {
    let d = 1 << n_legs;
    prop::collection::vec((-9i64..=9, 1i64..=5), d * d)
        .prop_map(move |v| TensorMat::from_fn(n_legs, |r, c| Rat::new(v[r * d + c].0, v[r * d + c].1)))
}

proptest! {
    #[test]
    fn bare_unitarity(z in rat(), h in nonzero()) {
        match unitarity_with(&Bare { hbar: h }, &HbarAffine::constant(z)) {
            Ok(rep) => prop_assert!(rep.pass),
            Err(e) => prop_assert!(e.is_pole()),
        }
    }

    #[test]
    fn bare_yang_baxter(u in rat(), v in rat(), h in nonzero()) {
        match ybe_check(RMode::Bare, &u, &v, &h) {
            Ok(rep) => prop_assert!(rep.pass),
            Err(e) => prop_assert!(e.is_pole()),
        }
    }

    #[test]
    fn embed_respects_composition(a in mat(2), b in mat(2), pick in 0usize..6) {
        let pairs = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)];
        let (i, j) = pairs[pick];
        let lhs = a.mul(&b).embed(3, i, j).unwrap();
        let rhs = a.embed(3, i, j).unwrap().mul(&b.embed(3, i, j).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn embed_matches_permutation_conjugation(a in mat(2)) {
        // P^{(2,3)} A^{(1,2)} P^{(2,3)} = A^{(1,3)}
        let p23 = perm_p::<Rat>().embed(3, 2, 3).unwrap();
        let conj = p23.mul(&a.embed(3, 1, 2).unwrap()).mul(&p23);
        prop_assert_eq!(conj, a.embed(3, 1, 3).unwrap());
        let swapped = perm_p::<Rat>().mul(&a).mul(&perm_p());
        prop_assert_eq!(swapped.embed(3, 1, 2).unwrap(), a.embed(3, 2, 1).unwrap());
    }

    #[test]
    fn partial_transpose_reverses_single_leg_products(x in mat(1), y in mat(1), leg in 1usize..=2) {
        let ex = x.embed_single(2, leg).unwrap();
        let ey = y.embed_single(2, leg).unwrap();
        let lhs = ex.mul(&ey).partial_transpose(leg).unwrap();
        let rhs = ey.partial_transpose(leg).unwrap().mul(&ex.partial_transpose(leg).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partial_transposes_compose_to_transpose(a in mat(2)) {
        let both = a.partial_transpose(1).unwrap().partial_transpose(2).unwrap();
        prop_assert_eq!(both, a.transpose());
    }
}

#[test]
fn r_at_zero_is_permutation() {
    for h in [Rat::one(), Rat::new(-7, 3)] {
        assert_eq!(bare_r(&Rat::zero(), &h).unwrap(), perm_p());
    }
}

#[test]
fn normalized_constant_term_is_identity() {
    for a in [Rat::one(), Rat::new(-5, 2), Rat::new(13, 7)] {
        let r = normalized_r(&HbarAffine::constant(a), 4).unwrap();
        assert!(r.map(|s| s.coeff(0)).is_identity());
        assert!(normalized_r(&HbarAffine::new(Rat::zero(), Rat::one()), 4).unwrap_err().is_pole());
    }
}

#[test]
fn crossing_orders_one_to_six() {
    for order in 1..=6 {
        for k in 1..=10 {
            let z = HbarAffine::constant(Rat::new(3 * k - 17, k + 1));
            let rep = crossing_with(&Normalized { order }, &z).unwrap();
            assert!(rep.pass, "N={order} z={z}");
        }
    }
    let rep = crossing_with(&Bare { hbar: Rat::one() }, &HbarAffine::constant(Rat::one())).unwrap();
    assert!(!rep.pass);
    assert_eq!(rep.details["ratio"], "4/3");
}
