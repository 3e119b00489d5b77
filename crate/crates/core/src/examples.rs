//! Ready-made fields and lattices used by the command line, the tests and the
//! benchmarks.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::Result;
use crate::field::{FieldElement, FieldSpec};
use crate::lattice::{OFLattice, QuadraticSpace};
use crate::qmat::{self, QMat};

/// Q(√3) with basis {1, √3} and σ_1(√3) > 0.
pub fn sqrt3_field() -> Arc<FieldSpec> {
    Arc::new(FieldSpec::real_quadratic(3).expect("Q(sqrt 3)"))
}

/// The cubic field Q(cos 2π/7) = Q[x]/(x³ + x² − 2x − 1), power basis,
/// σ_1 the largest root.
pub fn cubic_field() -> Arc<FieldSpec> {
    let poly: Vec<BigInt> = [-1, -2, 1, 1].iter().map(|&c| BigInt::from(c)).collect();
    Arc::new(FieldSpec::new(&poly, &qmat::identity(3), 2, 50).expect("cubic field"))
}

/// a + b√3 with rational a = an/ad, b = bn/bd.
fn q3(an: i64, ad: i64, bn: i64, bd: i64) -> FieldElement {
    FieldElement(vec![qmat::ratio(an, ad), qmat::ratio(bn, bd)])
}

/// Gram matrix of an even unimodular O_F-lattice of signature ((4,0),(4,0))
/// over Q(√3); its trace form is E8.
pub fn sqrt3_l0_gram() -> Vec<Vec<FieldElement>> {
    vec![
        vec![q3(2, 1, -1, 1), q3(-1, 2, 1, 2), q3(1, 2, -1, 6), q3(0, 1, 1, 6)],
        vec![q3(-1, 2, 1, 2), q3(3, 1, 0, 1), q3(0, 1, 1, 2), q3(-1, 2, -1, 6)],
        vec![q3(1, 2, -1, 6), q3(0, 1, 1, 2), q3(1, 1, 0, 1), q3(1, 2, 1, 2)],
        vec![q3(0, 1, 1, 6), q3(-1, 2, -1, 6), q3(1, 2, 1, 2), q3(2, 1, 1, 1)],
    ]
}

/// Gram matrix −(1/√D)[[2, α], [α, 2β]] over Q(√3) (D = 12) with α = √3,
/// β = 1, so that −1 = α² − 4β; signature ((0,2),(2,0)).
pub fn sqrt3_l1_gram() -> Vec<Vec<FieldElement>> {
    // -1/(2√3) = -√3/6, -√3/(2√3) = -1/2
    vec![
        vec![q3(0, 1, -1, 3), q3(-1, 2, 0, 1)],
        vec![q3(-1, 2, 0, 1), q3(0, 1, -1, 3)],
    ]
}

/// Orthogonal sum of Gram matrices.
pub fn direct_sum(d: usize, blocks: &[Vec<Vec<FieldElement>>]) -> Vec<Vec<FieldElement>> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut g = vec![vec![FieldElement::zero(d); n]; n];
    let mut off = 0;
    for b in blocks {
        for i in 0..b.len() {
            for j in 0..b.len() {
                g[off + i][off + j] = b[i][j].clone();
            }
        }
        off += b.len();
    }
    g
}

/// L₀ as a definite lattice over Q(√3).
pub fn sqrt3_l0() -> Result<OFLattice> {
    let f = sqrt3_field();
    let space = QuadraticSpace::new(f, sqrt3_l0_gram(), false)?;
    Ok(OFLattice::standard(Arc::new(space)))
}

/// L₁ over Q(√3).
pub fn sqrt3_l1() -> Result<OFLattice> {
    let f = sqrt3_field();
    let space = QuadraticSpace::new(f, sqrt3_l1_gram(), false)?;
    Ok(OFLattice::standard(Arc::new(space)))
}

/// L₀^{⊕k} ⊕ L₁: even unimodular of signature ((4k,2),(4k+2,0)).
pub fn sqrt3_lattice(k: usize) -> Result<OFLattice> {
    let f = sqrt3_field();
    let mut blocks = vec![sqrt3_l0_gram(); k];
    blocks.push(sqrt3_l1_gram());
    let space = QuadraticSpace::new(f, direct_sum(2, &blocks), true)?;
    Ok(OFLattice::standard(Arc::new(space)))
}

fn rational_gram(rows: &[&[i64]]) -> Vec<Vec<FieldElement>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| FieldElement(vec![qmat::rat(x)])).collect())
        .collect()
}

/// Rational lattice from an integer Gram matrix.
pub fn rational_lattice(rows: &[&[i64]], admissible: bool) -> Result<OFLattice> {
    let f = Arc::new(FieldSpec::rationals());
    let space = QuadraticSpace::new(f, rational_gram(rows), admissible)?;
    Ok(OFLattice::standard(Arc::new(space)))
}

/// Z³ with Q(a, b, c) = ac − b², signature (1, 2); L'/L ≅ Z/2. The group
/// SL_2(Z) acts by isometries through binary quadratic forms.
pub fn split_rank3() -> Result<OFLattice> {
    rational_lattice(&[&[0, 0, 1], &[0, -2, 0], &[1, 0, 0]], true)
}

/// Integer matrices of the isometries of `split_rank3` induced by
/// T = [[1,1],[0,1]] and S = [[0,-1],[1,0]] acting on a x² + 2b xy + c y².
pub fn split_rank3_isometries() -> (QMat, QMat) {
    let m = |rows: [[i64; 3]; 3]| -> QMat {
        rows.iter()
            .map(|r| r.iter().map(|&x| qmat::rat(x)).collect())
            .collect()
    };
    // (a, b, c) ↦ (a + 2b + c, b + c, c) and (a, b, c) ↦ (c, −b, a)
    let t = m([[1, 2, 1], [0, 1, 1], [0, 0, 1]]);
    let s = m([[0, 0, 1], [0, -1, 0], [1, 0, 0]]);
    (t, s)
}
