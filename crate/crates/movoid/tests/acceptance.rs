//! The acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Criteria cover the smallest instance end to end, the
//! three verification routes, the b-sweep, mutation sensitivity, table
//! reproduction, the conjecture ratios, and the always-on property suites.

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use movoid::construct::{
    build_candidate, build_candidate_in, conjecture_ratio, printed_tables, table_row,
    ConstructionParams, OvoidCandidate, RowPrime,
};
use movoid::cyclotomy::CyclotomicSystem;
use movoid::gf::build_field;
use movoid::symplectic::make_space;
use movoid::verify::{
    candidate_srg_params, check_movoid, check_movoid_generators, classify_type, expected_perp_counts,
    srg_eigen, Eigenvalues, Mode, SrgParams, TypeClass, VerifyError, VerifyOptions,
};

fn smallest() -> &'static Arc<OvoidCandidate> {
    static CAND: OnceLock<Arc<OvoidCandidate>> = OnceLock::new();
    CAND.get_or_init(|| {
        Arc::new(build_candidate(ConstructionParams::first_b(3, 3, 3, 2, 1)).expect("smallest instance"))
    })
}

fn report(criterion: u32, name: &str, pass: bool) {
    println!("criterion {criterion} ({name}): {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} ({name}) failed");
}

#[test]
fn criterion_1_smallest_instance_character() {
    let c = smallest();
    let mut pass = c.points.len() == 9490 && c.m_claimed == 13;
    let verdict = check_movoid(c, Mode::Character, &VerifyOptions::default()).unwrap();
    pass &= verdict.pass;
    let pred = movoid::verify::candidate_prediction(c).unwrap();
    let values = c.sys.shifted_sums(&c.j).unwrap();
    pass &= values.iter().filter(|&&v| v == 104).count() == 24
        && values.iter().filter(|&&v| v == -625).count() == 4
        && pred.alpha1 == 104
        && pred.alpha2 == -625;
    report(1, "smallest instance, character mode", pass);
}

#[test]
fn criterion_2_perp_certification() {
    let c = smallest();
    let (on, off) = expected_perp_counts(c);
    let mut pass = (on, off) == (985, 1066);
    let verdict = check_movoid(c, Mode::Perp, &VerifyOptions::default()).unwrap();
    pass &= verdict.pass && verdict.coverage == movoid::verify::Coverage::Certified;
    // re-assert the two counts directly on a stratified spot set
    for y in (0..66430u32).step_by(997) {
        let got = c.space.perp_count(y, &c.points);
        let expected = if c.points.contains(y) { on } else { off };
        pass &= got == expected;
    }
    report(2, "perp counts 985/1066 over all 66430 points", pass);
}

#[test]
fn criterion_3_generator_certification() {
    let c = smallest();
    let verdict = check_movoid_generators(c, &c.points, c.m_claimed, false);
    let pass = verdict.pass
        && verdict.coverage == movoid::verify::Coverage::Certified
        && c.space.generator_count() == 598600
        && verdict.detail.contains("598600 of 598600");
    report(3, "all 598600 generators meet M in 13 points", pass);
}

#[test]
fn criterion_4_b_sweep() {
    let c1 = smallest();
    let mut pass = true;
    for b in 1..=6u64 {
        let c = if b == 1 {
            Arc::clone(c1)
        } else {
            Arc::new(
                build_candidate_in(ConstructionParams::first_b(3, 3, 3, 2, b), c1.space.clone())
                    .unwrap(),
            )
        };
        pass &= c.m_claimed == 13 * b;
        let verdict = check_movoid(&c, Mode::Character, &VerifyOptions::default()).unwrap();
        pass &= verdict.pass;
        if b <= 2 {
            let (on, off) = expected_perp_counts(&c);
            pass &= on == 13 * b * 82 - 81 && off == 13 * b * 82;
            let verdict = check_movoid(&c, Mode::Perp, &VerifyOptions::default()).unwrap();
            pass &= verdict.pass;
        }
    }
    report(4, "b-sweep: character for b=1..6, perp for b=1,2", pass);
}

#[test]
fn criterion_5_mutation_sensitivity() {
    let c = smallest();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (on, off) = expected_perp_counts(c);
    let mut pass = true;
    for _ in 0..10 {
        let victim = c.points.reps()[rng.gen_range(0..c.points.len())];
        let mutated = c.points.without(victim);
        // perp route must fail with a concrete witness point
        let mut witness = None;
        for y in 0..c.space.point_modulus() as u32 {
            let got = c.space.perp_count(y, &mutated);
            let expected = if mutated.contains(y) { on } else { off };
            if got != expected {
                witness = Some(y);
                break;
            }
        }
        pass &= witness.is_some();
        // generators route with early exit must also fail with a witness
        let verdict = check_movoid_generators(c, &mutated, c.m_claimed, true);
        pass &= !verdict.pass && verdict.witness.is_some();
    }
    report(5, "10 random single-point removals all detected", pass);
}

#[test]
fn criterion_6_table_reproduction() {
    let rows = printed_tables();
    let mut pass = rows.len() == 23;
    let mut flagged = Vec::new();
    for row in &rows {
        let rep = table_row(row, 1).unwrap();
        let anomalous = matches!(row.p, RowPrime::AnyOddPrime)
            || (row.table == 1 && row.p == RowPrime::Fixed(7) && row.printed_m_base == 5);
        if anomalous {
            flagged.push(row.clone());
            match row.p {
                // d0 = 3 printed, true only for p ≡ 2 (mod 3)
                RowPrime::AnyOddPrime => {
                    pass &= rep.evaluations.iter().all(|&(p, _, ok)| ok == (p % 3 == 2))
                }
                // base-5 m-column on the p = 7 row
                _ => pass &= rep.flags.iter().any(|f| f.contains("base mismatch")),
            }
        } else {
            pass &= rep.consistent();
            if row.table == 2 {
                pass &= rep.evaluations.iter().all(|&(_, ref d0, ok)| {
                    ok && *d0 == BigUint::from(row.printed_d0)
                });
            }
        }
    }
    pass &= flagged.len() == 2;
    report(6, "tables: all rows recomputed, two anomalies flagged", pass);
}

#[test]
fn criterion_7_conjecture_ratios() {
    let r1 = conjecture_ratio(3, 5, 2, 1, 1).unwrap();
    let r2 = conjecture_ratio(3, 5, 2, 2, 1).unwrap();
    let r3 = conjecture_ratio(3, 5, 2, 3, 1).unwrap();
    let pass = r1 == BigRational::new(121.into(), 729.into()) && r1 > r2 && r2 > r3;
    report(7, "ratio 121/729 at l0=1, strictly decreasing to l0=3", pass);
}

#[test]
fn criterion_8_property_suites() {
    let mut pass = true;

    // field axioms and trace/Frobenius laws, exhaustively on GF(3^6) and GF(81)
    for s in [4u32, 6] {
        let f = build_field(3, s).unwrap();
        let els: Vec<_> = f.elements().collect();
        for &x in &els {
            pass &= f.add(x, f.zero()) == x && f.mul(x, f.one()) == x;
            pass &= f.add(x, f.neg(x)).is_zero();
            if !x.is_zero() {
                pass &= f.mul(x, f.inv(x).unwrap()) == f.one();
            }
            pass &= f.frobenius(x, s) == x;
            pass &= f.trace(f.frobenius(x, 1), 1).unwrap() == f.trace(x, 1).unwrap();
        }
        for &x in els.iter().step_by(7) {
            for &y in els.iter().step_by(11) {
                pass &= f.mul(x, y) == f.mul(y, x);
                pass &= f.frobenius(f.add(x, y), 1) == f.add(f.frobenius(x, 1), f.frobenius(y, 1));
            }
        }
    }

    // alternating and antisymmetric f, exhaustively on W(3,3)
    let sp = make_space(3, 1, 2).unwrap();
    let f = sp.field().clone();
    let els: Vec<_> = f.elements().collect();
    for &x in &els {
        pass &= sp.eval_form(x, x).is_zero();
        for &y in &els {
            pass &= sp.eval_form(x, y) == f.neg(sp.eval_form(y, x));
        }
    }

    // Gauss-period sums Σ η_i = −1 on every constructed system
    for (p, s, n) in [(3u64, 4u32, 2u64), (3, 4, 4), (3, 4, 10), (3, 12, 28)] {
        let field = Arc::new(build_field(p, s).unwrap());
        let sys = CyclotomicSystem::new(field, n).unwrap();
        pass &= sys.gauss_periods().unwrap().iter().sum::<i64>() == -1;
    }

    // Lemma 2.1 relation enforced on all SRG inputs
    pass &= matches!(
        srg_eigen(SrgParams { v: 10, k: 3, lambda: 1, mu: 1 }),
        Err(VerifyError::NotSrg(_))
    );
    pass &= matches!(
        srg_eigen(SrgParams { v: 10, k: 3, lambda: 0, mu: 1 }),
        Ok(Eigenvalues::Integral { alpha1: 1, alpha2: -2, m1: 5, m2: 4 })
    );

    // negative-Latin classification on every constructed candidate
    let c1 = smallest();
    for b in 1..=6u64 {
        let c = if b == 1 {
            Arc::clone(c1)
        } else {
            Arc::new(
                build_candidate_in(ConstructionParams::first_b(3, 3, 3, 2, b), c1.space.clone())
                    .unwrap(),
            )
        };
        let srg = candidate_srg_params(&c).unwrap();
        pass &= matches!(classify_type(srg), TypeClass::NegativeLatin { .. });
        pass &= BigUint::from(c.d0).is_one() == false;
    }

    report(8, "property suites (fields, form, periods, SRG algebra)", pass);
}
