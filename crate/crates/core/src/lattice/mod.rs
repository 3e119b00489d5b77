//! Quadratic spaces over F, even O_F-lattices, their duals and discriminant
//! groups, and lattice-point enumeration.
//!
//! Vectors of V = F^ℓ are stored flattened over Q: the coordinate with index
//! `i * d + a` is the coefficient of ω_a in the i-th F-coordinate. A lattice
//! is a Z-basis of rank dℓ in these coordinates.

pub mod enumerate;
pub mod lll;
pub mod snf;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::qmat::{self, QMat, Rat};

pub use enumerate::{Enumerator, LevelSet, QuadraticInY};

/// A nondegenerate quadratic space (V, Q) over F with Q(x) = (x, x)/2.
#[derive(Clone, Debug)]
pub struct QuadraticSpace {
    field: Arc<FieldSpec>,
    rank: usize,
    gram: Vec<Vec<FieldElement>>,
    /// Gram matrix of the Q-bilinear form tr(x, y) on flattened coordinates.
    trace_form: QMat,
    /// For each basis index c, the matrix B_c with (x, y)_c = x^T B_c y.
    coord_forms: Vec<QMat>,
    gram_f64: Vec<Vec<Vec<f64>>>,
    signatures: Vec<(usize, usize)>,
    admissible: bool,
}

impl QuadraticSpace {
    /// Build a space from its Gram matrix. When `admissible` is set the
    /// signature must be (n, 2) at σ_1 and definite positive elsewhere.
    pub fn new(
        field: Arc<FieldSpec>,
        gram: Vec<Vec<FieldElement>>,
        admissible: bool,
    ) -> Result<Self> {
        let l = gram.len();
        let d = field.degree();
        if l == 0 || gram.iter().any(|r| r.len() != l) {
            return Err(Error::InvalidInput("gram must be a nonempty square matrix".into()));
        }
        for i in 0..l {
            for j in 0..l {
                if gram[i][j].degree() != d {
                    return Err(Error::InvalidInput(format!(
                        "gram entry ({i},{j}) has {} coordinates, expected {d}",
                        gram[i][j].degree()
                    )));
                }
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidInput("gram is not symmetric".into()));
                }
            }
        }
        let r = d * l;
        let mut coord_forms = vec![qmat::zeros(r, r); d];
        let mut trace_form = qmat::zeros(r, r);
        for i in 0..l {
            for j in 0..l {
                for a in 0..d {
                    let ga = field.mul(&field.basis_element(a), &gram[i][j]);
                    for b in 0..d {
                        let e = field.mul(&ga, &field.basis_element(b));
                        trace_form[i * d + a][j * d + b] = field.trace(&e);
                        for (c, form) in coord_forms.iter_mut().enumerate() {
                            form[i * d + a][j * d + b] = e.0[c].clone();
                        }
                    }
                }
            }
        }
        let gram_f64 = (0..d)
            .map(|k| {
                (0..l)
                    .map(|i| (0..l).map(|j| field.embed_exactish(&gram[i][j], k)).collect())
                    .collect()
            })
            .collect();
        let signatures = exact_signatures(&field, &gram)?;
        let space = QuadraticSpace {
            field,
            rank: l,
            gram,
            trace_form,
            coord_forms,
            gram_f64,
            signatures,
            admissible,
        };
        if admissible {
            space.check_admissible()?;
        }
        Ok(space)
    }

    fn check_admissible(&self) -> Result<()> {
        let l = self.rank;
        if l < 3 {
            return Err(Error::NotAdmissible(format!("rank {l} < 3")));
        }
        for (k, &(p, q)) in self.signatures.iter().enumerate() {
            let ok = if k == 0 { p == l - 2 && q == 2 } else { p == l && q == 0 };
            if !ok {
                return Err(Error::NotAdmissible(format!(
                    "signature ({p},{q}) at embedding {}",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// ℓ = n + 2.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension over Q, d·ℓ.
    pub fn qdim(&self) -> usize {
        self.rank * self.field.degree()
    }

    pub fn gram(&self) -> &[Vec<FieldElement>] {
        &self.gram
    }

    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    /// Gram matrix of tr(x, y) in flattened coordinates.
    pub fn trace_form(&self) -> &QMat {
        &self.trace_form
    }

    /// Matrices B_c with (x, y) = Σ_c (x^T B_c y) ω_c.
    pub fn coord_forms(&self) -> &[QMat] {
        &self.coord_forms
    }

    /// σ_k applied to the Gram matrix.
    pub fn gram_embedded(&self, k: usize) -> &[Vec<f64>] {
        &self.gram_f64[k]
    }

    /// Signature (p_k, q_k) of V at each embedding.
    pub fn signatures(&self) -> &[(usize, usize)] {
        &self.signatures
    }

    /// Σ_k (p_k - q_k).
    pub fn trace_signature(&self) -> i64 {
        self.signatures.iter().map(|&(p, q)| p as i64 - q as i64).sum()
    }

    /// Splits a flattened vector into its F-coordinates.
    pub fn to_field_coords(&self, v: &[Rat]) -> Vec<FieldElement> {
        let d = self.field.degree();
        (0..self.rank)
            .map(|i| FieldElement(v[i * d..(i + 1) * d].to_vec()))
            .collect()
    }

    pub fn from_field_coords(&self, x: &[FieldElement]) -> Vec<Rat> {
        x.iter().flat_map(|e| e.0.iter().cloned()).collect()
    }

    /// (x, y) ∈ F.
    pub fn bilinear(&self, x: &[Rat], y: &[Rat]) -> FieldElement {
        FieldElement(
            self.coord_forms
                .iter()
                .map(|b| qmat::bilinear(x, b, y))
                .collect(),
        )
    }

    /// Q(x) = (x, x)/2 ∈ F.
    pub fn q(&self, x: &[Rat]) -> FieldElement {
        self.bilinear(x, x).scale(&qmat::ratio(1, 2))
    }

    /// tr Q(x).
    pub fn trace_q(&self, x: &[Rat]) -> Rat {
        qmat::bilinear(x, &self.trace_form, x) / Rat::from_integer(BigInt::from(2))
    }

    /// Multiply every F-coordinate of a flattened vector by a.
    pub fn scale_vector(&self, a: &FieldElement, v: &[Rat]) -> Vec<Rat> {
        let coords = self.to_field_coords(v);
        let scaled: Vec<FieldElement> = coords.iter().map(|x| self.field.mul(a, x)).collect();
        self.from_field_coords(&scaled)
    }

    /// σ_k of a flattened vector, as a real ℓ-vector.
    pub fn embed_vector(&self, v: &[Rat], k: usize) -> Vec<f64> {
        let d = self.field.degree();
        let w = &self.field.basis_embeddings()[k];
        (0..self.rank)
            .map(|i| (0..d).map(|a| qmat::to_f64(&v[i * d + a]) * w[a]).sum())
            .collect()
    }

    /// Real matrix (dℓ × ℓ) sending flattened coordinates to σ_k(v).
    pub fn embedding_matrix(&self, k: usize) -> Vec<Vec<f64>> {
        let d = self.field.degree();
        let w = &self.field.basis_embeddings()[k];
        let mut m = vec![vec![0.0; self.rank]; self.qdim()];
        for i in 0..self.rank {
            for a in 0..d {
                m[i * d + a][i] = w[a];
            }
        }
        m
    }
}

/// Signatures by exact congruence diagonalization over F followed by
/// certified sign determination of the pivots.
fn exact_signatures(field: &FieldSpec, gram: &[Vec<FieldElement>]) -> Result<Vec<(usize, usize)>> {
    let d = field.degree();
    let mut a: Vec<Vec<FieldElement>> = gram.to_vec();
    let mut pivots = Vec::new();
    while !a.is_empty() {
        let n = a.len();
        if a[0][0].is_zero() {
            if let Some(i) = (1..n).find(|&i| !a[i][i].is_zero()) {
                a.swap(0, i);
                for row in a.iter_mut() {
                    row.swap(0, i);
                }
            } else if let Some(j) = (1..n).find(|&j| !a[0][j].is_zero()) {
                // replace e_0 by e_0 + e_j
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[0][c] = a[0][c].add(&t);
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][0] = a[r][0].add(&t);
                }
            } else {
                return Err(Error::Singular("degenerate quadratic form".into()));
            }
        }
        let p = a[0][0].clone();
        let pinv = field.inv(&p)?;
        let mut next = vec![vec![FieldElement::zero(d); n - 1]; n - 1];
        for i in 1..n {
            let f = field.mul(&a[i][0], &pinv);
            for j in 1..n {
                next[i - 1][j - 1] = a[i][j].sub(&field.mul(&f, &a[0][j]));
            }
        }
        pivots.push(p);
        a = next;
    }
    let mut sig = vec![(0usize, 0usize); d];
    for p in &pivots {
        for (k, s) in field.signs(p)?.into_iter().enumerate() {
            if s > 0 {
                sig[k].0 += 1;
            } else {
                sig[k].1 += 1;
            }
        }
    }
    Ok(sig)
}

/// A lattice in V given by a Z-basis of rank dℓ.
#[derive(Clone, Debug)]
pub struct OFLattice {
    space: Arc<QuadraticSpace>,
    basis: QMat,
    basis_inv: QMat,
    tr_gram: QMat,
}

/// Summary of checked lattice properties.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeProperties {
    pub rank_z: usize,
    pub o_module: bool,
    pub even: bool,
    pub dual_pairing_ok: bool,
    pub discriminant_order: BigInt,
    pub signatures: Vec<(usize, usize)>,
}

impl OFLattice {
    /// O_F^ℓ, spanned by ω_a e_i.
    pub fn standard(space: Arc<QuadraticSpace>) -> Self {
        let r = space.qdim();
        Self::new(space, qmat::identity(r)).expect("identity basis")
    }

    pub fn new(space: Arc<QuadraticSpace>, basis: QMat) -> Result<Self> {
        let r = space.qdim();
        if basis.len() != r || basis.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidInput(format!("zbasis must be {r}x{r}")));
        }
        let basis_inv = qmat::inverse(&basis)
            .map_err(|_| Error::InvalidInput("zbasis is not of full rank".into()))?;
        let tr_gram = qmat::mul(&qmat::mul(&basis, space.trace_form()), &qmat::transpose(&basis));
        Ok(OFLattice { space, basis, basis_inv, tr_gram })
    }

    pub fn space(&self) -> &Arc<QuadraticSpace> {
        &self.space
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        self.space.field()
    }

    /// Rows are the Z-basis vectors in flattened coordinates.
    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn rank_z(&self) -> usize {
        self.basis.len()
    }

    /// Gram matrix of tr(·,·) on the Z-basis.
    pub fn tr_gram(&self) -> &QMat {
        &self.tr_gram
    }

    /// Coordinates of v on the Z-basis.
    pub fn coords_of(&self, v: &[Rat]) -> Vec<Rat> {
        qmat::vec_mul(v, &self.basis_inv)
    }

    /// Vector with the given Z-basis coordinates.
    pub fn vector(&self, x: &[Rat]) -> Vec<Rat> {
        qmat::vec_mul(x, &self.basis)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coords_of(v).iter().all(|c| c.is_integer())
    }

    /// Closed under multiplication by each ω_a.
    pub fn is_o_module(&self) -> bool {
        let f = self.field();
        (0..f.degree()).all(|a| {
            let w = f.basis_element(a);
            self.basis
                .iter()
                .all(|b| self.contains(&self.space.scale_vector(&w, b)))
        })
    }

    /// Q(b_i) and (b_i, b_j) lie in ∂⁻¹.
    pub fn is_even(&self) -> bool {
        let f = self.field();
        let r = self.rank_z();
        for i in 0..r {
            if !f.in_codifferent(&self.space.q(&self.basis[i])) {
                return false;
            }
            for j in i + 1..r {
                if !f.in_codifferent(&self.space.bilinear(&self.basis[i], &self.basis[j])) {
                    return false;
                }
            }
        }
        true
    }

    /// Same Z-span.
    pub fn same_span(&self, other: &OFLattice) -> bool {
        let t = qmat::mul(&self.basis, &other.basis_inv);
        let s = qmat::mul(&other.basis, &self.basis_inv);
        qmat::is_integral(&t) && qmat::is_integral(&s)
    }

    /// The dual lattice {x : tr(x, L) ⊂ Z}.
    pub fn z_dual(&self) -> Result<OFLattice> {
        let ginv = qmat::inverse(&self.tr_gram)
            .map_err(|_| Error::Singular("degenerate trace form".into()))?;
        let dual = OFLattice::new(self.space.clone(), qmat::mul(&ginv, &self.basis))?;
        Ok(dual)
    }

    /// (L, L') ⊂ ∂⁻¹ and L ⊂ L'.
    pub fn check_dual_pairing(&self, dual: &OFLattice) -> bool {
        let f = self.field();
        let inside = self.basis.iter().all(|b| dual.contains(b));
        inside
            && self.basis.iter().all(|b| {
                dual.basis
                    .iter()
                    .all(|c| f.in_codifferent(&self.space.bilinear(b, c)))
            })
    }

    /// |det tr-Gram| = |L'/L|.
    pub fn discriminant_order(&self) -> BigInt {
        qmat::det(&self.tr_gram).abs().to_integer()
    }

    pub fn properties(&self) -> Result<LatticeProperties> {
        let dual = self.z_dual()?;
        Ok(LatticeProperties {
            rank_z: self.rank_z(),
            o_module: self.is_o_module(),
            even: self.is_even(),
            dual_pairing_ok: self.check_dual_pairing(&dual),
            discriminant_order: self.discriminant_order(),
            signatures: self.space.signatures().to_vec(),
        })
    }

    /// Validates evenness and the module property.
    pub fn check_even_module(&self) -> Result<()> {
        if !self.is_o_module() {
            return Err(Error::NotOModule("basis not closed under O_F".into()));
        }
        if !self.is_even() {
            return Err(Error::NotEven("Q(L) is not contained in the inverse different".into()));
        }
        Ok(())
    }

    pub fn discriminant_group(&self) -> Result<DiscriminantGroup> {
        DiscriminantGroup::new(self)
    }
}

/// The finite quadratic module L'/L with an explicit indexing of its
/// elements.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    lattice: OFLattice,
    invariant_factors: Vec<BigInt>,
    /// Rows of the SNF left transform belonging to nontrivial factors.
    u_rows: Vec<Vec<BigInt>>,
    /// Representatives: Z-basis coordinates in [0, 1).
    reps: Vec<Vec<Rat>>,
    q_values: Vec<FieldElement>,
    neg: Vec<usize>,
}

/// Largest discriminant group for which cosets are listed explicitly.
pub const MAX_DISCRIMINANT_ORDER: usize = 1 << 20;

impl DiscriminantGroup {
    fn new(lattice: &OFLattice) -> Result<Self> {
        lattice.check_even_module()?;
        let den = qmat::common_denominator(lattice.tr_gram.iter().flatten());
        if !den.is_one() {
            return Err(Error::NotEven("trace Gram matrix is not integral".into()));
        }
        let g: Vec<Vec<BigInt>> = lattice
            .tr_gram
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        let s = snf::smith(&g);
        if s.d.iter().any(|x| x.is_zero()) {
            return Err(Error::Singular("degenerate trace form".into()));
        }
        let nontrivial: Vec<usize> = (0..s.d.len()).filter(|&i| !s.d[i].is_one()).collect();
        let invariant_factors: Vec<BigInt> = nontrivial.iter().map(|&i| s.d[i].clone()).collect();
        let order = invariant_factors
            .iter()
            .fold(BigInt::one(), |a, b| a * b)
            .to_usize()
            .filter(|&o| o <= MAX_DISCRIMINANT_ORDER)
            .ok_or_else(|| Error::InvalidInput("discriminant group too large to list".into()))?;
        let u_rows = nontrivial.iter().map(|&i| s.u[i].clone()).collect();
        let r = lattice.rank_z();
        // generator i: V[:, i] / d_i
        let gens: Vec<Vec<Rat>> = nontrivial
            .iter()
            .map(|&i| {
                (0..r)
                    .map(|t| Rat::new(s.v[t][i].clone(), s.d[i].clone()))
                    .collect()
            })
            .collect();
        let mut reps = Vec::with_capacity(order);
        let factors: Vec<usize> = invariant_factors.iter().map(|f| f.to_usize().unwrap()).collect();
        for idx in 0..order {
            let mut x = vec![Rat::zero(); r];
            let mut rem = idx;
            for (g, &f) in gens.iter().zip(&factors).rev() {
                let k = rem % f;
                rem /= f;
                let kk = qmat::rat(k as i64);
                for t in 0..r {
                    x[t] += &kk * &g[t];
                }
            }
            reps.push(x.iter().map(qmat::frac).collect());
        }
        let field = lattice.field().clone();
        let q_values = reps
            .iter()
            .map(|x: &Vec<Rat>| field.reduce_mod_codifferent(&lattice.space.q(&lattice.vector(x))))
            .collect();
        let mut dg = DiscriminantGroup {
            lattice: lattice.clone(),
            invariant_factors,
            u_rows,
            reps,
            q_values,
            neg: Vec::new(),
        };
        dg.neg = (0..order)
            .map(|i| {
                let m: Vec<Rat> = dg.reps[i].iter().map(|c| -c).collect();
                dg.index_of_coords(&m)
            })
            .collect::<Result<_>>()?;
        Ok(dg)
    }

    pub fn lattice(&self) -> &OFLattice {
        &self.lattice
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    /// Z-basis coordinates of the representative of coset i, in [0, 1).
    pub fn rep_coords(&self, i: usize) -> &[Rat] {
        &self.reps[i]
    }

    /// Representative of coset i as a flattened vector of V.
    pub fn rep_vector(&self, i: usize) -> Vec<Rat> {
        self.lattice.vector(&self.reps[i])
    }

    /// Q(μ_i) reduced modulo ∂⁻¹.
    pub fn q_value(&self, i: usize) -> &FieldElement {
        &self.q_values[i]
    }

    pub fn q_values(&self) -> &[FieldElement] {
        &self.q_values
    }

    /// Index of -μ_i.
    pub fn neg(&self, i: usize) -> usize {
        self.neg[i]
    }

    /// Index of the coset of the dual vector with Z-basis coordinates x.
    pub fn index_of_coords(&self, x: &[Rat]) -> Result<usize> {
        let g = &self.lattice.tr_gram;
        let y: Vec<Rat> = g.iter().map(|row| qmat::dot(row, x)).collect();
        if y.iter().any(|c| !c.is_integer()) {
            return Err(Error::InvalidInput("vector is not in the dual lattice".into()));
        }
        let y: Vec<BigInt> = y.iter().map(|c| c.to_integer()).collect();
        let mut idx = 0usize;
        for (row, f) in self.u_rows.iter().zip(&self.invariant_factors) {
            let v: BigInt = row.iter().zip(&y).map(|(a, b)| a * b).sum();
            let k = num_integer::Integer::mod_floor(&v, f);
            idx = idx * f.to_usize().unwrap() + k.to_usize().unwrap();
        }
        Ok(idx)
    }

    /// Index of the coset containing the vector v ∈ L'.
    pub fn index_of_vector(&self, v: &[Rat]) -> Result<usize> {
        self.index_of_coords(&self.lattice.coords_of(v))
    }

    /// tr(μ_i, μ_j) modulo 1, as a rational in [0, 1).
    pub fn trace_pairing(&self, i: usize, j: usize) -> Rat {
        qmat::frac(&qmat::bilinear(&self.reps[i], &self.lattice.tr_gram, &self.reps[j]))
    }

    /// tr(Q(μ_i) b) modulo 1.
    pub fn trace_q_times(&self, i: usize, b: &FieldElement) -> Rat {
        let f = self.lattice.field();
        qmat::frac(&f.trace(&f.mul(&self.q_values[i], b)))
    }

    /// Index of a·μ_i for a ∈ O_F.
    pub fn scale_index(&self, a: &FieldElement, i: usize) -> Result<usize> {
        let v = self.lattice.space.scale_vector(a, &self.rep_vector(i));
        self.index_of_vector(&v)
    }
}

/// Number of λ ∈ μ+L with Q(λ) = m for a totally definite lattice.
pub fn representation_count(
    dg: &DiscriminantGroup,
    coset: usize,
    m: &FieldElement,
) -> Result<u64> {
    let lat = dg.lattice();
    let space = lat.space();
    if space.signatures().iter().any(|&(_, q)| q != 0) {
        return Err(Error::InvalidInput(
            "representation counts need a totally positive definite lattice".into(),
        ));
    }
    let f = space.field();
    if !f.is_totally_positive(m)? {
        return Ok(u64::from(m.is_zero() && coset == 0));
    }
    let tr_form = qmat::mat_to_f64(lat.tr_gram());
    let en = Enumerator::new(&tr_form, dg.rep_coords(coset))?;
    let level = en.level_set(lat, m)?;
    let bound = 2.0 * qmat::to_f64(&f.trace(m));
    let counts = en.map_shards(bound, Some(&level), || 0u64, |c, _| *c += 1)?;
    Ok(counts.into_iter().sum())
}
