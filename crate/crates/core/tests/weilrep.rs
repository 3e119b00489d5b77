use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thetalift::examples;
use thetalift::field::FieldElement;
use thetalift::lattice::{DiscriminantGroup, OFLattice, QuadraticSpace};
use thetalift::qmat;
use thetalift::weilrep::{e_rat, generator_matrix, relation_report, word_matrix, GeneratorWord, Letter};

fn disc(rows: &[&[i64]]) -> DiscriminantGroup {
    examples::rational_lattice(rows, false).unwrap().discriminant_group().unwrap()
}

fn sqrt3(a: i64, b: i64) -> FieldElement {
    FieldElement(vec![qmat::rat(a), qmat::rat(b)])
}

fn sqrt3_disc(gram: Vec<Vec<FieldElement>>) -> DiscriminantGroup {
    let space = QuadraticSpace::new(examples::sqrt3_field(), gram, false).unwrap();
    OFLattice::standard(Arc::new(space)).discriminant_group().unwrap()
}

/// Discriminant groups of order ≤ 256 over Q and Q(√3).
fn battery() -> Vec<(String, DiscriminantGroup)> {
    let mut out = vec![
        ("A1".to_string(), disc(&[&[2]])),
        ("A2".to_string(), disc(&[&[2, -1], &[-1, 2]])),
        ("D4".to_string(), disc(&[&[2, -1, 0, 0], &[-1, 2, -1, -1], &[0, -1, 2, 0], &[0, -1, 0, 2]])),
        ("split_rank3".to_string(), examples::split_rank3().unwrap().discriminant_group().unwrap()),
        ("<6>+<10>".to_string(), disc(&[&[6, 0], &[0, 10]])),
        ("<2>^4".to_string(), disc(&[&[2, 0, 0, 0], &[0, 2, 0, 0], &[0, 0, 2, 0], &[0, 0, 0, 2]])),
        ("<-4>+<8>+<4>".to_string(), disc(&[&[-4, 0, 0], &[0, 8, 0], &[0, 0, 4]])),
        ("<256>".to_string(), disc(&[&[256]])),
        ("<2>+<-42>".to_string(), disc(&[&[2, 0], &[0, -42]])),
    ];
    out.push(("sqrt3 L1".to_string(), examples::sqrt3_l1().unwrap().discriminant_group().unwrap()));
    out.push(("sqrt3 L0".to_string(), examples::sqrt3_l0().unwrap().discriminant_group().unwrap()));
    out.push(("sqrt3 <2>".to_string(), sqrt3_disc(vec![vec![sqrt3(2, 0)]])));
    out.push(("sqrt3 <2+√3>".to_string(), sqrt3_disc(vec![vec![sqrt3(2, 1)]])));
    let mut l1_two = examples::sqrt3_l1_gram();
    for row in l1_two.iter_mut() {
        row.push(sqrt3(0, 0));
    }
    let mut last = vec![sqrt3(0, 0); l1_two.len()];
    last.push(sqrt3(2, 0));
    l1_two.push(last);
    out.push(("sqrt3 L1+<2>".to_string(), sqrt3_disc(l1_two)));
    // random even diagonal-plus-offdiagonal lattices over Q
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    while out.len() < 24 {
        let r = rng.gen_range(1..=3usize);
        let mut g = vec![vec![0i64; r]; r];
        for i in 0..r {
            g[i][i] = 2 * rng.gen_range(1..=4) * if rng.gen_bool(0.3) { -1 } else { 1 };
            for j in 0..i {
                let x = rng.gen_range(-1..=1);
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        let rows: Vec<&[i64]> = g.iter().map(|r| r.as_slice()).collect();
        let Ok(l) = examples::rational_lattice(&rows, false) else { continue };
        let Ok(dg) = l.discriminant_group() else { continue };
        if dg.order() <= 256 && dg.order() > 1 {
            out.push((format!("random {g:?}"), dg));
        }
    }
    out
}

#[test]
fn relations_hold_on_the_battery() {
    for (name, dg) in battery() {
        assert!(dg.order() <= 256);
        let rep = relation_report(&dg, 1e-12).unwrap();
        assert!(rep.all_passed(), "{name}: {:?}", rep.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    }
}

#[test]
fn words_multiply_in_order() {
    let dg = disc(&[&[6, 0], &[0, 10]]);
    let one = dg.lattice().field().one();
    let s = generator_matrix(&dg, &Letter::S).unwrap();
    let t = generator_matrix(&dg, &Letter::T(one.clone())).unwrap();
    let w = word_matrix(&dg, &GeneratorWord::new(vec![Letter::S, Letter::T(one.clone())])).unwrap();
    assert!(w.max_deviation(&s.mul(&t)) <= 1e-14);
    assert!(w.max_deviation(&t.mul(&s)) > 1e-3);
    let empty = word_matrix(&dg, &GeneratorWord::default()).unwrap();
    assert_eq!(empty.max_deviation(&thetalift::weilrep::WeilRepMatrix::identity(dg.order())), 0.0);
    let ss = word_matrix(&dg, &GeneratorWord::new(vec![Letter::S, Letter::S])).unwrap();
    let z = word_matrix(&dg, &GeneratorWord::new(vec![Letter::Z])).unwrap();
    assert!(ss.max_deviation(&z) <= 1e-12);
    let st3 = GeneratorWord::new(vec![Letter::S, Letter::T(one)]).repeat(3);
    assert!(word_matrix(&dg, &st3).unwrap().max_deviation(&z) <= 1e-12);
}

#[test]
fn n_acts_by_the_rank_parity() {
    for (name, dg) in battery() {
        let l = dg.lattice().space().rank();
        let n = generator_matrix(&dg, &Letter::N).unwrap();
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        for mu in 0..dg.order() {
            for nu in 0..dg.order() {
                let want = if mu == nu { sign } else { 0.0 };
                assert!((n.entries[nu][mu] - want).norm() <= 1e-15, "{name}");
            }
        }
    }
}

#[test]
fn unimodular_s_is_the_signature_scalar() {
    let l = examples::sqrt3_lattice(1).unwrap();
    let dg = l.discriminant_group().unwrap();
    assert_eq!(dg.order(), 1);
    let trsig = l.space().trace_signature();
    let s = generator_matrix(&dg, &Letter::S).unwrap();
    assert!((s.entries[0][0] - e_rat(&qmat::ratio(-trsig, 8))).norm() <= 1e-14);
    let e8 = examples::sqrt3_l0().unwrap().discriminant_group().unwrap();
    assert_eq!(e8.order(), 1);
    let s = generator_matrix(&e8, &Letter::S).unwrap();
    assert!((s.entries[0][0] - Complex64::new(1.0, 0.0)).norm() <= 1e-14);
}

#[test]
fn unit_letters_are_unitary_and_compose() {
    let dg = sqrt3_disc(vec![vec![sqrt3(2, 1)]]);
    assert_eq!(dg.order(), 12);
    let eps = sqrt3(2, 1);
    let m = generator_matrix(&dg, &Letter::M(eps.clone())).unwrap();
    assert!(m.unitarity_defect() <= 1e-12);
    let eps_inv = sqrt3(2, -1);
    let mm = word_matrix(&dg, &GeneratorWord::new(vec![Letter::M(eps), Letter::M(eps_inv)])).unwrap();
    assert!(mm.max_deviation(&thetalift::weilrep::WeilRepMatrix::identity(dg.order())) <= 1e-12);
    for b in [sqrt3(0, 1), sqrt3(3, -2)] {
        let t = generator_matrix(&dg, &Letter::T(b)).unwrap();
        assert!(t.unitarity_defect() <= 1e-12);
    }
    assert!(generator_matrix(&dg, &Letter::T(FieldElement(vec![qmat::ratio(1, 2), qmat::rat(0)]))).is_err());
}
