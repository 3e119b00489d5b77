//! Vector-valued Siegel theta functions and a numerical check of their
//! transformation law.
//!
//! For an even lattice L, τ ∈ ℍ^d and (when V has signature (n, 2) at σ_1) a
//! point z of the domain, the component at the coset μ is
//!
//!   θ(τ, z; χ_μ) = v_1^{q/2} Σ_{λ ∈ μ+L} e(Σ_k Q(λ_{z⊥})_k τ_k + Q(λ_{1z}) τ̄_1)
//!
//! where q is the number of negative directions at σ_1 (2 with a point z,
//! 0 for a totally positive definite lattice, which takes no z). Each term has
//! modulus e^{−2π M(λ)} with M the v-weighted majorant, so the sum is
//! truncated at M ≤ R with a rigorous bound on the rest.

use num_complex::Complex64;

use crate::domain::{majorant_gram, DomainPoint};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::lattice::{DiscriminantGroup, Enumerator, QuadraticInY, QuadraticSpace};
use crate::qmat;
use crate::specfun::{gamma, EvalPolicy};
use crate::weilrep::{word_matrix, GeneratorWord, Letter};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// A point τ of ℍ^d.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    tau: Vec<Complex64>,
}

impl SiegelPoint {
    pub fn new(tau: Vec<Complex64>) -> Result<Self> {
        if tau.is_empty() {
            return Err(Error::InvalidInput("τ has no coordinates".into()));
        }
        for (i, t) in tau.iter().enumerate() {
            if !(t.im > 0.0) || !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::InvalidInput(format!("Im τ_{} = {} is not positive", i + 1, t.im)));
            }
        }
        Ok(SiegelPoint { tau })
    }

    /// τ = u + iv from real and imaginary parts.
    pub fn from_parts(u: &[f64], v: &[f64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::InvalidInput("u and v differ in length".into()));
        }
        Self::new(u.iter().zip(v).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }

    pub fn tau(&self) -> &[Complex64] {
        &self.tau
    }

    pub fn degree(&self) -> usize {
        self.tau.len()
    }

    pub fn u(&self) -> Vec<f64> {
        self.tau.iter().map(|t| t.re).collect()
    }

    pub fn v(&self) -> Vec<f64> {
        self.tau.iter().map(|t| t.im).collect()
    }
}

/// Θ(τ, z) as a vector over the cosets, with its truncation data.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaValue {
    pub components: Vec<Complex64>,
    /// Bound on |θ_μ − truncated θ_μ|, the same for every component.
    pub tail_estimate: f64,
    pub truncation_radius: f64,
    /// Number of lattice vectors summed over all cosets.
    pub points: usize,
}

/// Precomputed data for evaluating Θ at one (τ, z).
struct ThetaSetup {
    scale: f64,
    /// One enumerator per coset, all for the same form.
    enums: Vec<Enumerator>,
    /// 2M and the phase Σ_k u_k Q_k in enumeration coordinates, per coset.
    majorant: Vec<QuadraticInY>,
    phase: Vec<QuadraticInY>,
    rank: usize,
    det: f64,
    rho: f64,
}

/// Σ_k v_k E_k G_k E_k^T on flattened coordinates: x^T A x = 2 Σ_k v_k Q_k(x).
fn weighted_trace_form(space: &QuadraticSpace, weights: &[f64]) -> Vec<Vec<f64>> {
    let r = space.qdim();
    let mut out = vec![vec![0.0; r]; r];
    for (k, wk) in weights.iter().enumerate() {
        let e = space.embedding_matrix(k);
        let g = space.gram_embedded(k);
        let l = g.len();
        for p in 0..r {
            for q in 0..r {
                let mut s = 0.0;
                for i in 0..l {
                    if e[p][i] == 0.0 {
                        continue;
                    }
                    for j in 0..l {
                        s += e[p][i] * g[i][j] * e[q][j];
                    }
                }
                out[p][q] += wk * s;
            }
        }
    }
    out
}

/// B A B^T for the rows of B.
fn sandwich(b: &[Vec<f64>], a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = b.len();
    let r = a.len();
    let ba: Vec<Vec<f64>> = b
        .iter()
        .map(|row| (0..r).map(|j| (0..r).map(|i| row[i] * a[i][j]).sum()).collect())
        .collect();
    let mut out = vec![vec![0.0; n]; n];
    for p in 0..n {
        for q in 0..n {
            out[p][q] = (0..r).map(|j| ba[p][j] * b[q][j]).sum();
        }
    }
    out
}

/// Number of negative directions at σ_1 that the theta kernel carries.
fn check_signature(space: &QuadraticSpace, z: Option<&DomainPoint>) -> Result<usize> {
    match z {
        Some(_) => {
            if !space.is_admissible() {
                return Err(Error::NotAdmissible(
                    "a domain point needs signature (n, 2) at σ_1 and definite elsewhere".into(),
                ));
            }
            Ok(2)
        }
        None => {
            if space.signatures().iter().any(|&(_, neg)| neg != 0) {
                return Err(Error::NotAdmissible(
                    "without a domain point the lattice must be totally positive definite".into(),
                ));
            }
            Ok(0)
        }
    }
}

impl ThetaSetup {
    fn new(dg: &DiscriminantGroup, z: Option<&DomainPoint>, tau: &SiegelPoint) -> Result<Self> {
        let lat = dg.lattice();
        let space = lat.space();
        if !lat.is_even() {
            return Err(Error::NotEven("theta functions need an even lattice".into()));
        }
        let d = space.field().degree();
        if tau.degree() != d {
            return Err(Error::InvalidInput(format!(
                "τ has {} coordinates, the field has degree {d}",
                tau.degree()
            )));
        }
        let q1 = check_signature(space, z)?;
        let v = tau.v();
        let u = tau.u();
        let maj = match z {
            Some(z) => majorant_gram(space, z, &v),
            None => weighted_trace_form(space, &v),
        };
        let mut phase = weighted_trace_form(space, &u);
        for row in phase.iter_mut() {
            for x in row.iter_mut() {
                *x *= 0.5;
            }
        }
        let basis = qmat::mat_to_f64(lat.basis());
        let maj_l = sandwich(&basis, &maj);
        let phase_l = sandwich(&basis, &phase);
        let mut enums = Vec::with_capacity(dg.order());
        let mut majorant = Vec::with_capacity(dg.order());
        let mut phases = Vec::with_capacity(dg.order());
        for mu in 0..dg.order() {
            let en = Enumerator::new(&maj_l, dg.rep_coords(mu))?.with_max_points(f64::INFINITY);
            majorant.push(en.pull_quadratic(&maj_l));
            phases.push(en.pull_quadratic(&phase_l));
            enums.push(en);
        }
        let rank = lat.rank_z();
        let det = enums[0].det();
        let rho = enums[0].covering_radius_bound();
        Ok(ThetaSetup {
            scale: v[0].powf(q1 as f64 / 2.0),
            enums,
            majorant,
            phase: phases,
            rank,
            det,
            rho,
        })
    }

    /// Rigorous bound on Σ_{λ ∈ μ+L, M(λ) > R} |term|, valid for every coset.
    ///
    /// With N(t) = #{M ≤ t} ≤ V_r (√(2t) + ρ)^r / √det the tail is at most
    /// 2π ∫_R^∞ e^{−2πt} N(t) dt; splitting √(2R + 2s) ≤ √(2R) + √(2s) gives
    /// a finite sum of Γ-moments.
    fn tail_bound(&self, radius: f64) -> f64 {
        let r = self.rank;
        let rf = r as f64;
        let vol = std::f64::consts::PI.powf(rf / 2.0) / gamma(rf / 2.0 + 1.0);
        let a = (2.0 * radius.max(0.0)).sqrt() + self.rho;
        let mut sum = 0.0;
        let mut binom = 1.0;
        for j in 0..=r {
            let jf = j as f64;
            sum += binom * a.powi((r - j) as i32) * gamma(jf / 2.0 + 1.0)
                / std::f64::consts::PI.powf(jf / 2.0);
            binom *= (rf - jf) / (jf + 1.0);
        }
        self.scale * vol / self.det.sqrt() * (-TWO_PI * radius).exp() * sum
    }

    /// Expected number of visited points: the volume term of the count.
    fn expected_points(&self, radius: f64) -> f64 {
        let rf = self.rank as f64;
        let vol = std::f64::consts::PI.powf(rf / 2.0) / gamma(rf / 2.0 + 1.0);
        self.enums.len() as f64 * vol * (2.0 * radius.max(0.0)).powf(rf / 2.0) / self.det.sqrt()
    }

    /// Smallest radius (up to bisection accuracy) whose tail bound is at most
    /// `target`.
    fn radius_for(&self, target: f64, max_points: f64) -> Result<f64> {
        let mut hi = 0.5;
        while self.tail_bound(hi) > target {
            hi *= 2.0;
            if self.expected_points(hi / 2.0) > max_points || hi > 1e6 {
                return Err(Error::TailBound(format!(
                    "tail {:.3e} at radius {:.3} with about {:.3e} points; target {target:.3e}",
                    self.tail_bound(hi / 2.0),
                    hi / 2.0,
                    self.expected_points(hi / 2.0)
                )));
            }
        }
        let mut lo = hi / 2.0;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.tail_bound(mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if self.expected_points(hi) > max_points {
            return Err(Error::TailBound(format!(
                "radius {hi:.3} needs about {:.3e} points, budget {max_points:.3e}",
                self.expected_points(hi)
            )));
        }
        Ok(hi)
    }

    fn sum(&self, radius: f64) -> Result<ThetaValue> {
        let mut components = Vec::with_capacity(self.enums.len());
        let mut points = 0usize;
        for (mu, en) in self.enums.iter().enumerate() {
            let maj = &self.majorant[mu];
            let ph = &self.phase[mu];
            let shards = en.map_shards(
                2.0 * radius,
                None,
                || (Complex64::new(0.0, 0.0), 0usize),
                |acc, y| {
                    let m = 0.5 * maj.eval(y);
                    if m > radius {
                        return;
                    }
                    acc.0 += Complex64::from_polar((-TWO_PI * m).exp(), TWO_PI * ph.eval(y));
                    acc.1 += 1;
                },
            )?;
            let mut total = Complex64::new(0.0, 0.0);
            for (s, n) in shards {
                total += s;
                points += n;
            }
            components.push(total * self.scale);
        }
        Ok(ThetaValue {
            components,
            tail_estimate: self.tail_bound(radius),
            truncation_radius: radius,
            points,
        })
    }
}

/// Θ(τ, z) with the truncation radius chosen so that the tail bound is at
/// most `policy.rel_tol` times v_1^{q/2} (the size of the λ = 0 term).
/// Pass `z = None` for a totally positive definite lattice.
pub fn siegel_theta(
    dg: &DiscriminantGroup,
    z: Option<&DomainPoint>,
    tau: &SiegelPoint,
    policy: &EvalPolicy,
) -> Result<ThetaValue> {
    policy.validate()?;
    let setup = ThetaSetup::new(dg, z, tau)?;
    let radius = setup.radius_for(policy.rel_tol * setup.scale, policy.max_points)?;
    setup.sum(radius)
}

/// Θ(τ, z) truncated at majorant value `radius`, with the matching tail
/// bound.
pub fn siegel_theta_at_radius(
    dg: &DiscriminantGroup,
    z: Option<&DomainPoint>,
    tau: &SiegelPoint,
    radius: f64,
) -> Result<ThetaValue> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidInput(format!("radius must be non-negative, got {radius}")));
    }
    ThetaSetup::new(dg, z, tau)?.sum(radius)
}

/// The action of a generator word on ℍ^d with its metaplectic square root.
#[derive(Clone, Debug)]
pub struct WordAction {
    /// σ_k(g) as [[a, b], [c, d]] for each embedding.
    pub matrices: Vec<[[f64; 2]; 2]>,
    /// φ(τ) with φ(τ)² = N(cτ + d).
    pub phi: Complex64,
    pub image: SiegelPoint,
}

fn mat_mul(x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]
}

fn letter_matrix(field: &FieldSpec, letter: &Letter, k: usize) -> [[f64; 2]; 2] {
    match letter {
        Letter::T(b) => [[1.0, field.embed_k(b, k)], [0.0, 1.0]],
        Letter::S => [[0.0, -1.0], [1.0, 0.0]],
        Letter::N => [[1.0, 0.0], [0.0, 1.0]],
        Letter::Z => [[-1.0, 0.0], [0.0, -1.0]],
        Letter::M(e) => {
            let x = field.embed_k(e, k);
            [[x, 0.0], [0.0, 1.0 / x]]
        }
    }
}

fn letter_phi(letter: &Letter, tau: &[Complex64]) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    match letter {
        Letter::T(_) | Letter::M(_) => one,
        Letter::S => tau.iter().map(|t| t.sqrt()).product(),
        Letter::N => -one,
        Letter::Z => Complex64::i().powu(tau.len() as u32),
    }
}

/// Applies the word letter by letter from the right, multiplying the
/// principal-branch square roots in cocycle order, and checks
/// φ(τ)² = N(cτ + d) for the composite.
pub fn act_on_siegel(field: &FieldSpec, word: &GeneratorWord, tau: &SiegelPoint) -> Result<WordAction> {
    word.validate(field)?;
    let d = field.degree();
    if tau.degree() != d {
        return Err(Error::InvalidInput("τ and the field differ in degree".into()));
    }
    let mut cur: Vec<Complex64> = tau.tau().to_vec();
    let mut phi = Complex64::new(1.0, 0.0);
    let mut mats = vec![[[1.0, 0.0], [0.0, 1.0]]; d];
    for letter in word.0.iter().rev() {
        phi *= letter_phi(letter, &cur);
        for k in 0..d {
            let g = letter_matrix(field, letter, k);
            let t = cur[k];
            cur[k] = (t * g[0][0] + g[0][1]) / (t * g[1][0] + g[1][1]);
            mats[k] = mat_mul(&g, &mats[k]);
        }
    }
    let norm: Complex64 = (0..d)
        .map(|k| tau.tau()[k] * mats[k][1][0] + mats[k][1][1])
        .product();
    let dev = (phi * phi - norm).norm() / norm.norm().max(1e-300);
    if !(dev <= 1e-9) {
        return Err(Error::Branch(format!("φ² differs from N(cτ + d) by {dev:.3e}")));
    }
    Ok(WordAction {
        matrices: mats,
        phi,
        image: SiegelPoint::new(cur)?,
    })
}

/// Outcome of comparing Θ(γτ) with the transformed Θ(τ).
#[derive(Clone, Debug)]
pub struct TransformCheck {
    /// ‖Θ(γτ) − (c_1τ_1 + d_1)^{−q} φ(τ)^ℓ ρ_L(γ) Θ(τ)‖_∞.
    pub residual: f64,
    pub at_image: ThetaValue,
    pub at_point: ThetaValue,
    pub predicted: Vec<Complex64>,
    pub phi: Complex64,
}

/// Residual of the transformation law of Θ under the word γ.
pub fn transform_residual(
    dg: &DiscriminantGroup,
    word: &GeneratorWord,
    z: Option<&DomainPoint>,
    tau: &SiegelPoint,
    policy: &EvalPolicy,
) -> Result<TransformCheck> {
    let space = dg.lattice().space();
    let q1 = check_signature(space, z)? as i32;
    let action = act_on_siegel(space.field(), word, tau)?;
    let rho = word_matrix(dg, word)?;
    let at_point = siegel_theta(dg, z, tau, policy)?;
    let at_image = siegel_theta(dg, z, &action.image, policy)?;
    let g1 = action.matrices[0];
    let j1 = tau.tau()[0] * g1[1][0] + g1[1][1];
    let factor = j1.powi(-q1) * action.phi.powu(space.rank() as u32);
    let predicted: Vec<Complex64> = rho.apply(&at_point.components).into_iter().map(|x| x * factor).collect();
    let residual = at_image
        .components
        .iter()
        .zip(&predicted)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(TransformCheck {
        residual,
        at_image,
        at_point,
        predicted,
        phi: action.phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn policy(tol: f64) -> EvalPolicy {
        EvalPolicy {
            rel_tol: tol,
            ..EvalPolicy::default()
        }
    }

    #[test]
    fn a1_theta_matches_jacobi_inversion() {
        // Σ_n e^{−2π n² v} two ways: direct, and v^{−1/2}/√2 Σ e^{−π n²/(2v)}.
        let l = examples::rational_lattice(&[&[2]], false).unwrap();
        let dg = l.discriminant_group().unwrap();
        for v in [0.7, 1.0, 1.6] {
            let tau = SiegelPoint::from_parts(&[0.0], &[v]).unwrap();
            let th = siegel_theta(&dg, None, &tau, &policy(1e-13)).unwrap();
            let direct: f64 = (-40i64..=40).map(|n| (-TWO_PI * (n * n) as f64 * v).exp()).sum();
            let dual: f64 = (-40i64..=40)
                .map(|n| (-std::f64::consts::PI * (n * n) as f64 / (2.0 * v)).exp())
                .sum::<f64>()
                / (2.0 * v).sqrt();
            assert!((th.components[0].re - direct).abs() < 1e-12);
            assert!((th.components[0].re - dual).abs() < 1e-12);
            assert!(th.components[0].im.abs() < 1e-14);
        }
    }

    #[test]
    fn only_zero_survives_small_radius() {
        let l = examples::split_rank3().unwrap();
        let dg = l.discriminant_group().unwrap();
        let space = l.space().clone();
        let frame = std::sync::Arc::new(crate::domain::IsotropicFrame::find(&space).unwrap());
        let z = DomainPoint::on_reference_ray(frame, &[0.1], 1.0).unwrap();
        let tau = SiegelPoint::from_parts(&[0.2], &[1.3]).unwrap();
        let th = siegel_theta_at_radius(&dg, Some(&z), &tau, 1e-3).unwrap();
        assert_eq!(th.points, 1);
        assert_eq!(th.components[0], Complex64::new(1.3, 0.0));
        assert_eq!(th.components[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn word_action_square_root_consistency() {
        let f = FieldSpec::rationals();
        let tau = SiegelPoint::from_parts(&[0.3], &[0.8]).unwrap();
        let w = GeneratorWord::new(vec![Letter::S, Letter::T(f.one()), Letter::S]);
        let a = act_on_siegel(&f, &w, &tau).unwrap();
        // S T S τ = −1/(−1/τ + 1) = τ/(1 − τ)
        let t = tau.tau()[0];
        let expect = t / (Complex64::new(1.0, 0.0) - t);
        assert!((a.image.tau()[0] - expect).norm() < 1e-14);
        let j = t * a.matrices[0][1][0] + a.matrices[0][1][1];
        assert!((a.phi * a.phi - j).norm() < 1e-14);
    }
}
