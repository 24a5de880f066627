//! Acceptance criteria 1-9. Each test prints one `criterion N: PASS|FAIL` line.

use std::time::{Duration, Instant};

use qkz_core::algebra::{HSeries, Rat, RatFunc, Scalar};
use qkz_core::classical::{compare_loop_algebra, expand_rll, jacobi_check, BracketTable, Identification};
use qkz_core::fusion::{iz_consistency_check, qdet_check, Relation};
use qkz_core::qkz::{CoinvariantVector, LatticePath, QkzSystem};
use qkz_core::rmatrix::{
    crossing_with, scalar_factor_exponent, unitarity_check, ybe_check, Bare, HbarAffine, Normalized, RFamily, RMode,
};
use qkz_core::rng::Lcg64;
use qkz_core::Result;

struct Outcome {
    failures: Vec<String>,
    note: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), note: String::new() }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn run(number: u32, limit: Duration, body: impl FnOnce(&mut Outcome)) {
    let start = Instant::now();
    let mut out = Outcome::new();
    body(&mut out);
    let elapsed = start.elapsed();
    if elapsed > limit {
        out.failures.push(format!("took {elapsed:?}, limit {limit:?}"));
    }
    let verdict = if out.failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {number}: {verdict} ({} ms) {}", elapsed.as_millis(), out.note);
    for f in out.failures.iter().take(5) {
        println!("  {f}");
    }
    assert!(out.failures.is_empty(), "criterion {number} failed: {:?}", out.failures.first());
}

fn r(p: i64, q: i64) -> Rat {
    Rat::new(p, q)
}

/// Retries `attempt` with fresh random draws while it reports a pole.
fn pole_free<T>(g: &mut Lcg64, mut attempt: impl FnMut(&mut Lcg64) -> Result<T>) -> T {
    for _ in 0..1000 {
        match attempt(g) {
            Ok(v) => return v,
            Err(e) if e.is_pole() => continue,
            Err(e) => panic!("unexpected error: {e:?}"),
        }
    }
    panic!("no pole-free sample in 1000 draws");
}

fn random_points(g: &mut Lcg64, n: usize, distinct: impl Fn(&HbarAffine, &HbarAffine) -> bool) -> Vec<HbarAffine> {
    loop {
        let pts: Vec<HbarAffine> = (0..n).map(|_| HbarAffine::constant(g.rat(20))).collect();
        if (0..n).all(|a| (a + 1..n).all(|b| distinct(&pts[a], &pts[b]))) {
            return pts;
        }
    }
}

fn random_system<F: RFamily>(g: &mut Lcg64, family: F, n: usize) -> QkzSystem<F> {
    let level = Rat::from_int(g.range(0, 4));
    let pts = random_points(g, n, |x, y| family.distinct(x, y));
    QkzSystem::new(family, level, pts).expect("distinct points")
}

#[test]
fn criterion_1_yang_baxter() {
    run(1, Duration::from_secs(5), |out| {
        let mut g = Lcg64::new(1);
        let mut done = 0;
        while done < 200 {
            let (u, v, h) = (g.rat(1000), g.rat(1000), g.nonzero_rat(1000));
            match ybe_check(RMode::Bare, &u, &v, &h) {
                Ok(rep) => {
                    out.expect(rep.pass, || format!("u={u} v={v} hbar={h}: {:?}", rep.residual));
                    done += 1;
                }
                Err(e) if e.is_pole() => continue,
                Err(e) => panic!("{e}"),
            }
        }
        out.note = format!("{done} samples");
    });
}

#[test]
fn criterion_2_unitarity() {
    run(2, Duration::from_secs(2), |out| {
        let mut g = Lcg64::new(2);
        let mut done = 0;
        while done < 200 {
            let (z, h) = (g.rat(1000), g.nonzero_rat(1000));
            match unitarity_check(RMode::Bare, &z, &h) {
                Ok(rep) => {
                    out.expect(rep.pass && rep.details["scalar"] == "1", || format!("z={z} hbar={h}: {rep:?}"));
                    done += 1;
                }
                Err(e) if e.is_pole() => continue,
                Err(e) => panic!("{e}"),
            }
        }
        out.note = format!("{done} samples");
    });
}

#[test]
fn criterion_3_crossing() {
    run(3, Duration::from_secs(30), |out| {
        let mut g = Lcg64::new(3);
        let mut checked = 0;
        for order in 1..=6 {
            let family = Normalized { order };
            for _ in 0..10 {
                let z = HbarAffine::constant(g.nonzero_rat(50));
                let rep = crossing_with(&family, &z).unwrap();
                out.expect(rep.pass, || format!("N={order} z={z}: {:?}", rep.residual));
                checked += 1;
            }
        }
        for _ in 0..10 {
            let rep = pole_free(&mut g, |g| {
                let (z, h) = (g.nonzero_rat(50), g.nonzero_rat(50));
                crossing_with(&Bare { hbar: h.clone() }, &HbarAffine::constant(z.clone())).map(|rep| (z, h, rep))
            });
            let (z, h, rep) = rep;
            let expected = &(&(&z + &h) * &(&z + &h)) / &(&z * &(&z + &(&h * &Rat::from_int(2))));
            out.expect(!rep.pass, || format!("bare control passed at z={z}"));
            out.expect(rep.details.get("ratio").and_then(|v| v.as_str()) == Some(&expected.to_string()), || {
                format!("bare ratio at z={z} hbar={h}: {:?}, expected {expected}", rep.details.get("ratio"))
            });
        }
        out.note = format!("{checked} normalized samples, 10 bare controls");
    });
}

#[test]
fn criterion_4_quantum_determinant() {
    run(4, Duration::from_secs(10), |out| {
        for h in [r(1, 1), r(-3, 7), r(5, 2)] {
            let rep = qdet_check(RMode::Bare, &h).unwrap();
            let t = RatFunc::var();
            let hc = RatFunc::constant(h.clone());
            let oracle = t.sub_ref(&hc).mul_ref(&t.inverse().unwrap());
            out.expect(rep.pass && rep.details["det"] == oracle.fmt_in("t"), || format!("bare hbar={h}: {rep:?}"));
        }
        for order in 1..=6 {
            let rep = qdet_check(RMode::Normalized { order }, &Rat::one()).unwrap();
            out.expect(rep.pass, || format!("normalized N={order}: {:?}", rep.residual));
        }
    });
}

#[test]
fn criterion_5_flatness() {
    run(5, Duration::from_secs(60), |out| {
        let mut g = Lcg64::new(5);
        let mut checks = 0;
        for n in 2..=4 {
            for _ in 0..20 {
                let (sys, reps) = pole_free(&mut g, |g| {
                    let h = g.nonzero_rat(10);
                    let sys = random_system(g, Bare { hbar: h }, n);
                    let mut reps = Vec::new();
                    for i in 1..=n {
                        for j in i + 1..=n {
                            reps.push(sys.flatness_check(i, j)?);
                        }
                    }
                    Ok((sys, reps))
                });
                for rep in reps {
                    checks += 1;
                    out.expect(rep.pass, || format!("bare {:?}: {:?}", sys.points(), rep.residual));
                }
            }
        }
        for n in 2..=3 {
            for _ in 0..3 {
                let (sys, reps) = pole_free(&mut g, |g| {
                    let sys = random_system(g, Normalized { order: 4 }, n);
                    let mut reps = Vec::new();
                    for i in 1..=n {
                        for j in i + 1..=n {
                            reps.push(sys.flatness_check(i, j)?);
                        }
                    }
                    Ok((sys, reps))
                });
                for rep in reps {
                    checks += 1;
                    out.expect(rep.pass, || format!("normalized {:?}: {:?}", sys.points(), rep.residual));
                }
            }
        }
        out.note = format!("{checks} pair checks");
    });
}

fn random_vector(g: &mut Lcg64, n: usize) -> CoinvariantVector<Rat> {
    CoinvariantVector::new((0..1 << n).map(|_| g.rat(9)).collect(), n).unwrap()
}

#[test]
fn criterion_6_plaquette_and_transport() {
    run(6, Duration::from_secs(30), |out| {
        let mut g = Lcg64::new(6);
        let mut systems = 0;
        for n in [2, 3, 4, 2, 3, 4, 2, 3, 4, 3, 4, 4] {
            let outcome = pole_free(&mut g, |g| {
                let h = g.nonzero_rat(10);
                let sys = random_system(g, Bare { hbar: h }, n);
                let mut plaquettes = Vec::new();
                for i in 1..=n {
                    for j in i + 1..=n {
                        plaquettes.push(sys.plaquette_check(i, j)?);
                    }
                }
                let i = g.range(1, n as i64 - 1) as usize;
                let j = g.range(i as i64 + 1, n as i64) as usize;
                let path = LatticePath::rectangle(i, j, g.range(1, 3) as usize, g.range(1, 3) as usize);
                let v = random_vector(g, n);
                let (w, end) = sys.transport(&path, &v)?;
                Ok((sys, plaquettes, v, w, end))
            });
            let (sys, plaquettes, v, w, end) = outcome;
            systems += 1;
            for rep in plaquettes {
                out.expect(rep.pass, || format!("plaquette {:?}: {:?}", sys.points(), rep.residual));
            }
            out.expect(v == w, || format!("rectangle transport moved the vector at {:?}", sys.points()));
            out.expect(end.points() == sys.points(), || "rectangle did not close".into());
        }
        out.note = format!("{systems} systems");
    });
}

#[test]
fn criterion_7_fusion_contraction() {
    run(7, Duration::from_secs(30), |out| {
        let mut g = Lcg64::new(7);
        let mut sets = 0;
        for n in [2, 3] {
            for _ in 0..5 {
                let (sys, reps) = pole_free(&mut g, |g| {
                    let h = g.nonzero_rat(10);
                    let sys = random_system(g, Bare { hbar: h }, n);
                    let reps = (1..=n).map(|i| iz_consistency_check(&sys, i)).collect::<Result<Vec<_>>>()?;
                    Ok((sys, reps))
                });
                sets += 1;
                for rep in reps {
                    out.expect(rep.pass, || format!("bare {:?}: {rep:?}", sys.points()));
                }
            }
            let (sys, reps) = pole_free(&mut g, |g| {
                let sys = random_system(g, Normalized { order: 3 }, n);
                let reps = (1..=n).map(|i| iz_consistency_check(&sys, i)).collect::<Result<Vec<_>>>()?;
                Ok((sys, reps))
            });
            sets += 1;
            for rep in reps {
                out.expect(rep.pass, || format!("normalized {:?}: {rep:?}", sys.points()));
            }
        }
        out.note = format!("{sets} parameter sets, convention: contraction = transpose(A_i)");
    });
}

#[test]
fn criterion_8_classical_limit() {
    run(8, Duration::from_secs(60), |out| {
        for cutoff in [2, 3] {
            let tables: Vec<BracketTable> = Relation::ALL.iter().map(|&rel| expand_rll(rel, cutoff).unwrap()).collect();
            for (rel, t) in Relation::ALL.iter().zip(&tables) {
                let rep = compare_loop_algebra(t, Identification::Signed);
                out.expect(rep.pass, || format!("{} M={cutoff}: {:?}", rel.name(), rep.residual));
                if *rel == Relation::MinusPlus {
                    out.expect(rep.details["central_support_ok"] == true, || "central term off m+n=0".into());
                    out.expect(rep.details["central_constant_consistent"] == true, || "central term not proportional to m".into());
                }
            }
            let merged = BracketTable::merge(&tables.iter().collect::<Vec<_>>());
            let rep = jacobi_check(&merged);
            out.expect(rep.pass, || format!("jacobi M={cutoff}: {:?}", rep.residual));
        }
    });
}

#[test]
fn criterion_9_scalar_factor_series() {
    run(9, Duration::from_secs(1), |out| {
        let g = scalar_factor_exponent(6).unwrap();
        let expected: [(usize, Rat); 6] =
            [(0, r(0, 1)), (1, r(1, 2)), (2, r(0, 1)), (3, r(-1, 12)), (4, r(0, 1)), (5, r(1, 10))];
        for (k, c) in expected {
            let want = if c.is_zero() { RatFunc::zero() } else { RatFunc::inv_power(c.clone(), k) };
            out.expect(g.coeff(k) == want, || format!("coefficient of hbar^{k}: {}", g.coeff(k).fmt_in("z")));
        }
        let truncated: HSeries<RatFunc> = scalar_factor_exponent(5).unwrap();
        out.expect(truncated.coeffs().len() <= 6, || "order-5 truncation keeps extra terms".into());
    });
}
