//! The Weil representation ρ_L of the metaplectic Hilbert modular group on
//! C[L'/L], as dense matrices for words in the standard generators.
//!
//! Matrices act on column vectors in the basis χ_μ indexed as in the
//! discriminant group: column μ of ρ(γ) is ρ(γ)χ_μ.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::lattice::DiscriminantGroup;
use crate::qmat::{self, Rat};

/// One generator of the metaplectic group.
#[derive(Clone, Debug, PartialEq)]
pub enum Letter {
    /// T_b = ([[1, b], [0, 1]], 1) with b ∈ O_F.
    T(FieldElement),
    /// S = ([[0, -1], [1, 0]], √N(τ)).
    S,
    /// N = (1, -1).
    N,
    /// Z = (-1, i^d) = S².
    Z,
    /// m(ε) = ([[ε, 0], [0, ε⁻¹]], 1) for a totally positive unit ε.
    M(FieldElement),
}

/// A word in the generators; the group element is the ordered product.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeneratorWord(pub Vec<Letter>);

impl GeneratorWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        GeneratorWord(letters)
    }

    pub fn then(mut self, l: Letter) -> Self {
        self.0.push(l);
        self
    }

    pub fn repeat(&self, k: usize) -> Self {
        GeneratorWord(self.0.iter().cloned().cycle().take(self.0.len() * k).collect())
    }

    /// Validates the field data carried by the letters.
    pub fn validate(&self, field: &FieldSpec) -> Result<()> {
        for l in &self.0 {
            match l {
                Letter::T(b) => {
                    if b.degree() != field.degree() || !b.is_integral() {
                        return Err(Error::BadWord(format!("T_b needs b in O_F, got {b}")));
                    }
                }
                Letter::M(e) => check_positive_unit(field, e)?,
                _ => {}
            }
        }
        Ok(())
    }
}

fn check_positive_unit(field: &FieldSpec, e: &FieldElement) -> Result<()> {
    if e.degree() != field.degree() || !e.is_integral() {
        return Err(Error::BadWord(format!("m(ε) needs ε in O_F, got {e}")));
    }
    if !field.norm(e).abs().is_one() {
        return Err(Error::BadWord(format!("{e} is not a unit")));
    }
    if !field.is_totally_positive(e)? {
        return Err(Error::BadWord(format!("{e} is not totally positive")));
    }
    Ok(())
}

/// e(x) = exp(2πi x) for a rational x, reduced mod 1 first.
pub fn e_rat(x: &Rat) -> Complex64 {
    let f = qmat::to_f64(&qmat::frac(x));
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f)
}

/// ρ_L of a word, with the word it came from.
#[derive(Clone, Debug)]
pub struct WeilRepMatrix {
    pub dim: usize,
    pub entries: Vec<Vec<Complex64>>,
    pub word: GeneratorWord,
}

impl WeilRepMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![vec![Complex64::zero(); dim]; dim];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = Complex64::one();
        }
        WeilRepMatrix { dim, entries, word: GeneratorWord::default() }
    }

    pub fn mul(&self, o: &WeilRepMatrix) -> WeilRepMatrix {
        let n = self.dim;
        let mut entries = vec![vec![Complex64::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i][k];
                if a == Complex64::zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i][j] += a * o.entries[k][j];
                }
            }
        }
        let mut word = self.word.clone();
        word.0.extend(o.word.0.iter().cloned());
        WeilRepMatrix { dim: n, entries, word }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// max |A_ij - B_ij|.
    pub fn max_deviation(&self, o: &WeilRepMatrix) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max((self.entries[i][j] - o.entries[i][j]).norm());
            }
        }
        m
    }

    /// ‖ρ†ρ − I‖_max.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: Complex64 = (0..n).map(|k| self.entries[k][i].conj() * self.entries[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                m = m.max((s - want).norm());
            }
        }
        m
    }
}

/// Matrix of one generator.
pub fn generator_matrix(dg: &DiscriminantGroup, letter: &Letter) -> Result<WeilRepMatrix> {
    let n = dg.order();
    let space = dg.lattice().space();
    let field = space.field();
    let mut out = vec![vec![Complex64::zero(); n]; n];
    let trsig = space.trace_signature();
    match letter {
        Letter::T(b) => {
            GeneratorWord(vec![letter.clone()]).validate(field)?;
            for (mu, row) in out.iter_mut().enumerate() {
                row[mu] = e_rat(&dg.trace_q_times(mu, b));
            }
        }
        Letter::S => {
            let c = e_rat(&qmat::ratio(-trsig, 8)) / (n as f64).sqrt();
            for mu in 0..n {
                for nu in 0..n {
                    out[nu][mu] = c * e_rat(&-dg.trace_pairing(mu, nu));
                }
            }
        }
        Letter::N => {
            let s = if space.rank() % 2 == 0 { 1.0 } else { -1.0 };
            for (mu, row) in out.iter_mut().enumerate() {
                row[mu] = Complex64::new(s, 0.0);
            }
        }
        Letter::Z => {
            let c = e_rat(&qmat::ratio(-trsig, 4));
            for mu in 0..n {
                out[dg.neg(mu)][mu] = c;
            }
        }
        Letter::M(eps) => {
            check_positive_unit(field, eps)?;
            let inv = field.inv(eps)?;
            let mut seen = vec![false; n];
            for mu in 0..n {
                let target = dg
                    .scale_index(&inv, mu)
                    .map_err(|_| Error::BadWord("ε⁻¹ does not permute the cosets".into()))?;
                if seen[target] {
                    return Err(Error::BadWord("ε⁻¹ does not permute the cosets".into()));
                }
                seen[target] = true;
                out[target][mu] = Complex64::one();
            }
        }
    }
    Ok(WeilRepMatrix {
        dim: n,
        entries: out,
        word: GeneratorWord(vec![letter.clone()]),
    })
}

/// Ordered product of the generator matrices of a word.
pub fn word_matrix(dg: &DiscriminantGroup, word: &GeneratorWord) -> Result<WeilRepMatrix> {
    let mut acc = WeilRepMatrix::identity(dg.order());
    for l in &word.0 {
        acc = acc.mul(&generator_matrix(dg, l)?);
    }
    acc.word = word.clone();
    Ok(acc)
}

/// Outcome of one relation check.
#[derive(Clone, Debug)]
pub struct RelationCheck {
    pub name: String,
    pub deviation: f64,
    pub passed: bool,
}

/// Checks of the defining relations and of unitarity.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub order: usize,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }
}

/// Σ_μ e(tr Q(μ)).
pub fn gauss_sum(dg: &DiscriminantGroup) -> Complex64 {
    let f = dg.lattice().field();
    (0..dg.order())
        .map(|mu| e_rat(&f.trace(dg.q_value(mu))))
        .sum()
}

pub fn relation_report(dg: &DiscriminantGroup, tol: f64) -> Result<RelationReport> {
    let field = dg.lattice().field().clone();
    let d = field.degree();
    let one = field.one();
    let s = generator_matrix(dg, &Letter::S)?;
    let t1 = generator_matrix(dg, &Letter::T(one.clone()))?;
    let z = generator_matrix(dg, &Letter::Z)?;
    let nn = generator_matrix(dg, &Letter::N)?;
    let id = WeilRepMatrix::identity(dg.order());
    let mut checks = Vec::new();
    let mut push = |name: &str, dev: f64| {
        checks.push(RelationCheck { name: name.to_string(), deviation: dev, passed: dev <= tol });
    };
    push("S^2 = Z", s.mul(&s).max_deviation(&z));
    let st = s.mul(&t1);
    push("(S T_1)^3 = Z", st.mul(&st).mul(&st).max_deviation(&z));
    // Z acts by e(-tr sig/4) χ_{-μ}, compared against S²
    let trsig = dg.lattice().space().trace_signature();
    let c = e_rat(&qmat::ratio(-trsig, 4));
    let s2 = s.mul(&s);
    let mut zdev: f64 = 0.0;
    for mu in 0..dg.order() {
        for nu in 0..dg.order() {
            let want = if nu == dg.neg(mu) { c } else { Complex64::zero() };
            zdev = zdev.max((s2.entries[nu][mu] - want).norm());
        }
    }
    push("Z chi_mu = e(-tr sig/4) chi_{-mu}", zdev);
    let z2 = z.mul(&z);
    if d % 2 == 1 {
        push("Z^2 = N", z2.max_deviation(&nn));
    } else {
        push("Z^2 = 1", z2.max_deviation(&id));
        push("N^2 = 1", nn.mul(&nn).max_deviation(&id));
    }
    for a in 0..d {
        let b = field.basis_element(a);
        let tb = generator_matrix(dg, &Letter::T(b))?;
        push(&format!("unitary T_omega{}", a + 1), tb.unitarity_defect());
    }
    push("unitary S", s.unitarity_defect());
    push("unitary N", nn.unitarity_defect());
    push("unitary Z", z.unitarity_defect());
    // ⟨conj(ρ a), ρ b⟩ = ⟨a, b⟩ on basis vectors
    let mut bil: f64 = 0.0;
    for m in [&s, &t1, &z] {
        for i in 0..dg.order() {
            for j in 0..dg.order() {
                let v: Complex64 = (0..dg.order())
                    .map(|k| m.entries[k][i].conj() * m.entries[k][j])
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                bil = bil.max((v - want).norm());
            }
        }
    }
    push("<conj(rho a), rho b> = <a, b>", bil);
    let g = gauss_sum(dg);
    let milgram = g - e_rat(&qmat::ratio(trsig, 8)) * (dg.order() as f64).sqrt();
    push("Milgram |sum e(tr Q(mu))| = sqrt|D|", (g.norm() - (dg.order() as f64).sqrt()).abs());
    push("Milgram phase e(tr sig/8)", milgram.norm());
    Ok(RelationReport { order: dg.order(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn t1_on_a1() {
        let a1 = examples::rational_lattice(&[&[2]], false).unwrap();
        let dg = a1.discriminant_group().unwrap();
        let one = dg.lattice().field().one();
        let t = generator_matrix(&dg, &Letter::T(one)).unwrap();
        assert!((t.entries[0][0] - Complex64::one()).norm() < 1e-15);
        assert!((t.entries[1][1] - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn a1_relations() {
        let a1 = examples::rational_lattice(&[&[2]], false).unwrap();
        let dg = a1.discriminant_group().unwrap();
        let rep = relation_report(&dg, 1e-12).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
    }

    #[test]
    fn unimodular_sqrt3_s_scalar() {
        let l = examples::sqrt3_lattice(1).unwrap();
        let dg = l.discriminant_group().unwrap();
        let s = generator_matrix(&dg, &Letter::S).unwrap();
        assert!((s.entries[0][0] - Complex64::one()).norm() < 1e-14);
        let n = generator_matrix(&dg, &Letter::N).unwrap();
        assert!((n.entries[0][0] - Complex64::one()).norm() < 1e-15);
        // 2 + √3 is a totally positive unit
        let eps = FieldElement(vec![qmat::rat(2), qmat::rat(1)]);
        let m = generator_matrix(&dg, &Letter::M(eps)).unwrap();
        assert_eq!(m.dim, 1);
        let bad = FieldElement(vec![qmat::rat(1), qmat::rat(1)]);
        assert!(generator_matrix(&dg, &Letter::M(bad)).is_err());
    }
}
