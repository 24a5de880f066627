use proptest::prelude::*;
use qkz_core::algebra::{Rat, RatFunc, Scalar};
use qkz_core::classical::{compare_loop_algebra, expand_rll, jacobi_check, BracketTable, Identification, Word};
use qkz_core::fusion::{eval_l_plus_dual, qdet_bare_symbolic, rll_sample_check, Relation, RllSample};
use qkz_core::rmatrix::{Bare, HbarAffine, Normalized, RFamily};

fn rat(bound: i64) -> impl Strategy<Value = Rat> {
    (-bound..=bound, 1..=bound).prop_map(|(p, q)| Rat::new(p, q))
}

fn sample() -> impl Strategy<Value = RllSample> {
    (1usize..=3).prop_flat_map(|n| {
        (prop::collection::vec(rat(12), n), rat(30), rat(30), 1..=n, 1..=n).prop_map(|(pts, t, tp, i, j)| RllSample {
            points: pts.into_iter().map(HbarAffine::constant).collect(),
            t: HbarAffine::constant(t),
            t_prime: HbarAffine::constant(tp),
            i,
            j,
            central: Rat::zero(),
            misorder: false,
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn rll_relations_in_evaluation_representation(s in sample(), h in rat(5)) {
        prop_assume!(!h.is_zero());
        for rel in Relation::ALL {
            match rll_sample_check(&Bare { hbar: h.clone() }, rel, &s) {
                Ok(rep) => prop_assert!(rep.pass, "{rel:?}: {:?}", rep.residual),
                Err(e) => prop_assert!(e.is_pole()),
            }
        }
    }
}

#[test]
fn dual_l_operator_is_crossing_shifted() {
    for order in 1..=4 {
        let family = Normalized { order };
        for t in [1, -2, 5, 7, -9] {
            let t = HbarAffine::constant(Rat::new(t, 3));
            let dual = eval_l_plus_dual(&family, &t).unwrap();
            let shifted = family.r_matrix(&t.shift_hbar(&Rat::from_int(2))).unwrap().inverse().unwrap();
            assert_eq!(dual, shifted.partial_transpose(2).unwrap(), "N={order} t={t}");
        }
    }
}

#[test]
fn symbolic_quantum_determinant() {
    for h in [Rat::one(), Rat::new(-2, 5)] {
        let t = RatFunc::var();
        let expected = t.sub_ref(&RatFunc::constant(h.clone())).mul_ref(&t.inverse().unwrap());
        assert_eq!(qdet_bare_symbolic(&h).unwrap(), expected);
    }
}

#[test]
fn brackets_are_antisymmetric_and_graded() {
    for rel in Relation::ALL {
        let t = expand_rll(rel, 2).unwrap();
        for (&(a, b), v) in t.entries() {
            if let Some(w) = t.get(b, a) {
                assert_eq!(w, v.scale(&Rat::from_int(-1)));
            }
            for word in v.terms().keys() {
                match word {
                    Word::Single(g) => assert_eq!(g.mode, a.mode + b.mode),
                    Word::Central => {
                        assert_eq!(rel, Relation::MinusPlus);
                        assert_eq!(a.mode + b.mode, 0);
                    }
                    other => panic!("unexpected word {other:?} in [{a}, {b}]"),
                }
            }
        }
    }
}

#[test]
fn unsigned_identifications_fail() {
    let mp = expand_rll(Relation::MinusPlus, 2).unwrap();
    assert!(compare_loop_algebra(&mp, Identification::Signed).pass);
    assert!(!compare_loop_algebra(&mp, Identification::Transposed).pass);
    assert!(!compare_loop_algebra(&mp, Identification::Direct).pass);
}

#[test]
fn jacobi_catches_a_corrupted_entry() {
    let tables: Vec<BracketTable> = Relation::ALL.iter().map(|&r| expand_rll(r, 2).unwrap()).collect();
    let merged = BracketTable::merge(&tables.iter().collect::<Vec<_>>());
    assert!(jacobi_check(&merged).pass);
    let (&(a, b), _) = merged.entries().iter().find(|(_, v)| !v.is_zero()).unwrap();
    let bad = merged.corrupted(a, b).unwrap();
    assert!(!jacobi_check(&bad).pass);
}
