//! Harmonic Whittaker forms: finite combinations of the functions f_{m,μ},
//! their evaluation, the operator δ_k, the pairing with cusp forms and the
//! coefficient sums attached to Eisenstein data.
//!
//! Indices are stored as totally positive m; a term c(m, μ) stands for
//! c(m, μ)·f_{−m,μ}, so the function actually evaluated has index −m ≪ 0.
//! Every sign flip between the two conventions happens in this module.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::lattice::DiscriminantGroup;
use crate::specfun::{gamma, m_cal, upper_gamma, EvalPolicy};
use crate::theta::SiegelPoint;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// The cosets of L'/L with their Q-values modulo ∂⁻¹, and the O_F-rank ℓ.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    field: Arc<FieldSpec>,
    q_values: Vec<FieldElement>,
    rank: usize,
}

impl DiscriminantForm {
    pub fn new(field: Arc<FieldSpec>, q_values: Vec<FieldElement>, rank: usize) -> Result<Self> {
        if q_values.is_empty() {
            return Err(Error::InvalidInput("a discriminant form has at least one coset".into()));
        }
        Ok(DiscriminantForm { field, q_values, rank })
    }

    pub fn from_group(dg: &DiscriminantGroup) -> Self {
        let lat = dg.lattice();
        DiscriminantForm {
            field: lat.field().clone(),
            q_values: dg.q_values().to_vec(),
            rank: lat.space().rank(),
        }
    }

    /// Trivial discriminant form of an even unimodular lattice of rank ℓ.
    pub fn unimodular(field: Arc<FieldSpec>, rank: usize) -> Self {
        let d = field.degree();
        DiscriminantForm {
            field,
            q_values: vec![FieldElement::zero(d)],
            rank,
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.q_values.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Checks that m is totally positive and m − Q(μ) ∈ ∂⁻¹.
    pub fn check_index(&self, m: &FieldElement, mu: usize) -> Result<()> {
        if mu >= self.order() {
            return Err(Error::InvalidInput(format!("coset {mu} out of range")));
        }
        if m.degree() != self.field.degree() {
            return Err(Error::InvalidInput(format!("index {m} has the wrong degree")));
        }
        if !self.field.is_totally_positive(m)? {
            return Err(Error::InvalidInput(format!("index {m} is not totally positive")));
        }
        if !self.field.in_codifferent(&m.sub(&self.q_values[mu])) {
            return Err(Error::Incompatible(format!(
                "index {m} is not congruent to Q(μ) = {} modulo ∂⁻¹",
                self.q_values[mu]
            )));
        }
        Ok(())
    }
}

/// A weight k ∈ (½Z)^d, stored as the integers 2k_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    twice: Vec<i64>,
}

impl WeightVector {
    pub fn from_twice(twice: Vec<i64>) -> Result<Self> {
        if twice.is_empty() {
            return Err(Error::InvalidInput("empty weight".into()));
        }
        Ok(WeightVector { twice })
    }

    /// k = ((2 − n)/2, (2 + n)/2, …, (2 + n)/2) for the lift on signature (n, 2).
    pub fn for_lift(n: usize, d: usize) -> Self {
        let n = n as i64;
        let mut twice = vec![2 + n; d];
        twice[0] = 2 - n;
        WeightVector { twice }
    }

    pub fn degree(&self) -> usize {
        self.twice.len()
    }

    pub fn k(&self) -> Vec<f64> {
        self.twice.iter().map(|&t| t as f64 / 2.0).collect()
    }

    pub fn twice(&self) -> &[i64] {
        &self.twice
    }

    /// κ = (2 − k_1, k_2, …, k_d).
    pub fn dual(&self) -> WeightVector {
        let mut twice = self.twice.clone();
        twice[0] = 4 - twice[0];
        WeightVector { twice }
    }

    /// s₀ = 1 − k_1.
    pub fn s0(&self) -> f64 {
        1.0 - self.twice[0] as f64 / 2.0
    }

    /// k ≡ (ℓ/2, …, ℓ/2) mod Z^d.
    pub fn check_rank(&self, rank: usize) -> Result<()> {
        if self.twice.iter().any(|t| (t - rank as i64).rem_euclid(2) != 0) {
            return Err(Error::Incompatible(format!(
                "weight {:?} is not congruent to ℓ/2 = {}/2 modulo 1",
                self.k(),
                rank
            )));
        }
        Ok(())
    }

    /// Weights with k_j > 1 for j ≥ 2, where C(m, k, s) is finite.
    fn check_tail(&self) -> Result<()> {
        if self.twice[1..].iter().any(|&t| t <= 2) {
            return Err(Error::InvalidInput(format!(
                "Γ(k_j − 1) has a pole: need k_j > 1 for j ≥ 2, got {:?}",
                self.k()
            )));
        }
        Ok(())
    }
}

fn check_point(field: &FieldSpec, weight: &WeightVector, tau: &SiegelPoint) -> Result<()> {
    if weight.degree() != field.degree() || tau.degree() != field.degree() {
        return Err(Error::InvalidInput("weight, τ and field differ in degree".into()));
    }
    weight.check_tail()
}

/// C(m, k, s) = Π_{j≥2} |4πm_j|^{k_j−1} / (Γ(s+1) Π_{j≥2} Γ(k_j − 1)).
pub fn normalizer(mj: &[f64], k: &[f64], s: f64) -> f64 {
    let mut log = 0.0;
    let mut den = gamma(s + 1.0);
    for j in 1..k.len() {
        log += (k[j] - 1.0) * (FOUR_PI * mj[j].abs()).ln();
        den *= gamma(k[j] - 1.0);
    }
    log.exp() / den
}

/// e(−tr(m u)) for the stored positive index m.
fn phase(mj: &[f64], u: &[f64]) -> Complex64 {
    let t: f64 = mj.iter().zip(u).map(|(a, b)| a * b).sum();
    Complex64::from_polar(1.0, -TWO_PI * t)
}

/// Value of f_{−m,μ}(τ, s) at χ_μ for a totally positive m:
/// C(−m, k, s) 𝓜_s(−4π m v) e(−tr(m u)).
pub fn eval_f(
    field: &FieldSpec,
    weight: &WeightVector,
    m: &FieldElement,
    tau: &SiegelPoint,
    s: f64,
    policy: &EvalPolicy,
) -> Result<Complex64> {
    check_point(field, weight, tau)?;
    if s < weight.s0() - 1e-12 {
        return Err(Error::InvalidInput(format!("s = {s} is below s₀ = {}", weight.s0())));
    }
    let mj = field.embed(m);
    let k = weight.k();
    let v = tau.v();
    let arg: Vec<f64> = mj.iter().zip(&v).map(|(a, b)| -FOUR_PI * a * b).collect();
    let val = normalizer(&mj, &k, s) * m_cal(s, &arg, &k, policy)?;
    Ok(phase(&mj, &tau.u()) * val)
}

/// The harmonic case s = s₀ through the incomplete Γ-function:
/// C Γ(2−k_1) (1 − Γ(1−k_1, 4πm_1v_1)/Γ(1−k_1)) e^{4πm_1v_1} e(−tr(m τ̄)).
pub fn eval_f_harmonic(
    field: &FieldSpec,
    weight: &WeightVector,
    m: &FieldElement,
    tau: &SiegelPoint,
    policy: &EvalPolicy,
) -> Result<Complex64> {
    check_point(field, weight, tau)?;
    let k = weight.k();
    if k[0] >= 1.0 {
        return Err(Error::InvalidInput(format!("the harmonic closed form needs k_1 < 1, got {}", k[0])));
    }
    let mj = field.embed(m);
    let v = tau.v();
    let x = FOUR_PI * mj[0] * v[0];
    let a = 1.0 - k[0];
    let bracket = 1.0 - upper_gamma(a, x, policy)? / gamma(a);
    let trmv: f64 = mj.iter().zip(&v).map(|(a, b)| a * b).sum();
    let size = normalizer(&mj, &k, weight.s0()) * gamma(2.0 - k[0]) * bracket * (x - TWO_PI * trmv).exp();
    Ok(phase(&mj, &tau.u()) * size)
}

/// δ_k(f_{−m,μ})(τ) = Π_j |4πm_j|^{κ_j−1}/Γ(κ_j−1) · e(tr(m τ)).
pub fn delta_k_closed(
    field: &FieldSpec,
    weight: &WeightVector,
    m: &FieldElement,
    tau: &SiegelPoint,
) -> Result<Complex64> {
    check_point(field, weight, tau)?;
    let kappa = weight.dual().k();
    if kappa[0] <= 1.0 {
        return Err(Error::InvalidInput(format!("Γ(κ_1 − 1) has a pole at κ_1 = {}", kappa[0])));
    }
    let mj = field.embed(m);
    let mut log = 0.0;
    let mut den = 1.0;
    for (kj, mjj) in kappa.iter().zip(&mj) {
        log += (kj - 1.0) * (FOUR_PI * mjj).ln();
        den *= gamma(kj - 1.0);
    }
    let mut e = Complex64::new(0.0, 0.0);
    for (mjj, t) in mj.iter().zip(tau.tau()) {
        e += Complex64::new(0.0, TWO_PI) * *mjj * t;
    }
    Ok(e.exp() * (log.exp() / den))
}

/// One term c(m, μ) f_{−m,μ}.
#[derive(Clone, Debug, PartialEq)]
pub struct WhittakerTerm {
    pub m: FieldElement,
    pub mu: usize,
    pub c: Complex64,
}

/// A finite combination Σ c(m, μ) f_{−m,μ} of weight k.
#[derive(Clone, Debug)]
pub struct WhittakerForm {
    disc: DiscriminantForm,
    weight: WeightVector,
    terms: Vec<WhittakerTerm>,
}

/// Sums coefficients of repeated indices and drops zeros.
fn merge_terms(terms: Vec<WhittakerTerm>) -> Vec<WhittakerTerm> {
    let mut out: Vec<WhittakerTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.iter_mut().find(|o| o.mu == t.mu && o.m == t.m) {
            Some(o) => o.c += t.c,
            None => out.push(t),
        }
    }
    out.retain(|t| t.c != Complex64::new(0.0, 0.0));
    out
}

impl WhittakerForm {
    pub fn new(disc: DiscriminantForm, weight: WeightVector, terms: Vec<WhittakerTerm>) -> Result<Self> {
        if weight.degree() != disc.field().degree() {
            return Err(Error::InvalidInput("weight and field differ in degree".into()));
        }
        weight.check_rank(disc.rank())?;
        for t in &terms {
            disc.check_index(&t.m, t.mu)?;
        }
        Ok(WhittakerForm {
            disc,
            weight,
            terms: merge_terms(terms),
        })
    }

    pub fn zero(disc: DiscriminantForm, weight: WeightVector) -> Result<Self> {
        Self::new(disc, weight, Vec::new())
    }

    pub fn weight(&self) -> &WeightVector {
        &self.weight
    }

    pub fn terms(&self) -> &[WhittakerTerm] {
        &self.terms
    }

    pub fn disc(&self) -> &DiscriminantForm {
        &self.disc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| WhittakerTerm { c: t.c * a, ..t.clone() })
            .collect();
        WhittakerForm {
            disc: self.disc.clone(),
            weight: self.weight.clone(),
            terms: merge_terms(terms),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.weight != o.weight || self.disc.order() != o.disc.order() {
            return Err(Error::Incompatible("forms of different weight or lattice".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Ok(WhittakerForm {
            disc: self.disc.clone(),
            weight: self.weight.clone(),
            terms: merge_terms(terms),
        })
    }

    /// f(τ, s) as a vector over the cosets.
    pub fn eval(&self, tau: &SiegelPoint, s: f64, policy: &EvalPolicy) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.disc.order()];
        for t in &self.terms {
            out[t.mu] += t.c * eval_f(self.disc.field(), &self.weight, &t.m, tau, s, policy)?;
        }
        Ok(out)
    }

    /// δ_k(f)(τ) as a vector over the cosets.
    pub fn delta(&self, tau: &SiegelPoint) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.disc.order()];
        for t in &self.terms {
            out[t.mu] += t.c * delta_k_closed(self.disc.field(), &self.weight, &t.m, tau)?;
        }
        Ok(out)
    }
}

/// Fourier coefficients b(n, ν) of a cusp form of weight κ (externally
/// supplied).
#[derive(Clone, Debug)]
pub struct CuspFormData {
    pub weight: WeightVector,
    pub coeffs: Vec<(FieldElement, usize, Complex64)>,
}

impl CuspFormData {
    pub fn new(
        disc: &DiscriminantForm,
        weight: WeightVector,
        coeffs: Vec<(FieldElement, usize, Complex64)>,
    ) -> Result<Self> {
        for (n, nu, _) in &coeffs {
            disc.check_index(n, *nu)?;
        }
        Ok(CuspFormData { weight, coeffs })
    }

    /// b(n, ν), zero when absent.
    pub fn coefficient(&self, n: &FieldElement, nu: usize) -> Complex64 {
        self.coeffs
            .iter()
            .filter(|(m, i, _)| *i == nu && m == n)
            .map(|(_, _, b)| *b)
            .sum()
    }
}

/// {g, f} = Σ c(m, μ) b(m, μ) in the positive-index storage.
pub fn pairing(g: &CuspFormData, f: &WhittakerForm) -> Result<Complex64> {
    let kappa = f.weight().dual();
    if g.weight != kappa {
        return Err(Error::Incompatible(format!(
            "cusp form of weight {:?} does not pair with weight {:?} (dual weight {:?})",
            g.weight.k(),
            f.weight().k(),
            kappa.k()
        )));
    }
    Ok(f.terms().iter().map(|t| t.c * g.coefficient(&t.m, t.mu)).sum())
}

/// The pairings of f with a basis of cusp forms of the dual weight.
#[derive(Clone, Debug)]
pub struct Obstruction {
    pub pairings: Vec<Complex64>,
    /// All pairings vanish: f is weakly holomorphic provided the basis spans
    /// the cusp forms of weight κ.
    pub weakly_holomorphic: bool,
    pub assumption: &'static str,
}

pub fn weak_holomorphy_obstruction(f: &WhittakerForm, basis: &[CuspFormData]) -> Result<Obstruction> {
    let pairings = basis.iter().map(|g| pairing(g, f)).collect::<Result<Vec<_>>>()?;
    let weakly_holomorphic = pairings.iter().all(|p| *p == Complex64::new(0.0, 0.0));
    Ok(Obstruction {
        pairings,
        weakly_holomorphic,
        assumption: "the supplied cusp forms span the space of dual weight",
    })
}

/// Coefficients B(m, μ) of the Eisenstein series of weight κ; the constant
/// term B(0, 0) = 1 is implicit.
#[derive(Clone, Debug)]
pub struct EisensteinData {
    pub coeffs: Vec<(FieldElement, usize, f64)>,
}

impl EisensteinData {
    pub fn new(coeffs: Vec<(FieldElement, usize, f64)>) -> Self {
        EisensteinData { coeffs }
    }

    /// B(m, μ) = −A(m, μ)/2 from residues A(m, μ).
    pub fn from_residues(a: &[(FieldElement, usize, f64)]) -> Self {
        EisensteinData {
            coeffs: a.iter().map(|(m, mu, x)| (m.clone(), *mu, -0.5 * x)).collect(),
        }
    }

    pub fn coefficient(&self, m: &FieldElement, mu: usize) -> Option<f64> {
        self.coeffs.iter().find(|(n, i, _)| *i == mu && n == m).map(|t| t.2)
    }
}

/// Σ c(m, μ) x(m, μ) for real data x covering every index of f.
fn real_sum(f: &WhittakerForm, data: &[(FieldElement, usize, f64)]) -> Result<f64> {
    let mut missing = Vec::new();
    let mut total = 0.0;
    for t in f.terms() {
        if t.c.im != 0.0 {
            return Err(Error::InvalidInput(format!(
                "coefficient {} at ({}, {}) is not real",
                t.c, t.m, t.mu
            )));
        }
        match data.iter().find(|(n, i, _)| *i == t.mu && *n == t.m) {
            Some((_, _, x)) => total += t.c.re * x,
            None => missing.push(format!("({}, {})", t.m, t.mu)),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Incompatible(format!("no coefficient for {}", missing.join(", "))));
    }
    Ok(total)
}

/// B(f) = Σ c(m, μ) B(m, μ); the lifted form has weight −B(f).
pub fn b_of_f(f: &WhittakerForm, e: &EisensteinData) -> Result<f64> {
    real_sum(f, &e.coeffs)
}

/// A(f) = Σ c(m, μ) A(m, μ) from residue data.
pub fn a_of_f(f: &WhittakerForm, a: &[(FieldElement, usize, f64)]) -> Result<f64> {
    real_sum(f, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_at_i_for_weight_zero() {
        let f = FieldSpec::rationals();
        let w = WeightVector::from_twice(vec![0]).unwrap();
        let tau = SiegelPoint::from_parts(&[0.0], &[1.0]).unwrap();
        let d = delta_k_closed(&f, &w, &f.one(), &tau).unwrap();
        let expect = FOUR_PI * (-TWO_PI).exp();
        assert!((d - expect).norm() < 1e-15 * expect);
    }

    #[test]
    fn weights() {
        let k = WeightVector::for_lift(2, 3);
        assert_eq!(k.k(), vec![0.0, 2.0, 2.0]);
        assert_eq!(k.dual().k(), vec![2.0, 2.0, 2.0]);
        assert_eq!(k.s0(), 1.0);
        assert!(k.check_rank(4).is_ok());
        assert!(k.check_rank(3).is_err());
        let k1 = WeightVector::for_lift(1, 1);
        assert_eq!(k1.k(), vec![0.5]);
        assert!(k1.check_rank(3).is_ok());
    }
}
