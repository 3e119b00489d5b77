//! Automorphic Green functions Φ_{m,μ}(z, s) as lattice sums of the
//! hypergeometric kernel φ(λ, z, s), with a tail model for the slowly
//! convergent part and the regularized value at s₀ = n/2.
//!
//! Terms are organised by P = Q(λ_{1z⊥}) ≥ m₁. The sum carries a smooth
//! cutoff χ(P/R) (1 below R, 0 above 2R), so every quantity is a smooth
//! function of z away from the special divisor. The points of {Q(λ) = m}
//! grow like c·P^{n/2}; the density c is fitted from the enumerated points
//! and the remainder Σ (1 − χ) φ is replaced by the matching integral. The
//! far part of that integral is a hypergeometric series in m₁/(2R) which
//! carries the simple pole at s₀ in closed form.

use num_complex::Complex64;

use crate::domain::{majorant_gram, majorant_split, DomainPoint};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::lattice::{DiscriminantGroup, Enumerator};
use crate::par;
use crate::qmat::{self, Rat};
use crate::specfun::{digamma, gauss_2f1, gauss_2f1_balanced_near_one, reglift_g, EvalPolicy};
use crate::whittaker::{DiscriminantForm, WhittakerForm};

/// Evaluation parameters for Φ_{m,μ}.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenParams {
    pub s: f64,
    /// Cutoff scale R on Q(λ_{1z⊥}); terms up to 2R are summed.
    pub truncation_radius: f64,
    /// Terms with 1 − w below this are reported as singular.
    pub singular_threshold: f64,
    pub pole_steps: Vec<f64>,
    /// Largest accepted RMS misfit of the pole fit, relative to the
    /// largest sample.
    pub fit_tolerance: f64,
}

impl GreenParams {
    pub fn new(s: f64, truncation_radius: f64) -> Self {
        GreenParams {
            s,
            truncation_radius,
            singular_threshold: 1e-6,
            pole_steps: vec![0.1, 0.05, 0.025],
            fit_tolerance: 1e-3,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.singular_threshold > 0.0 && self.singular_threshold < 1e-2) {
            return Err(Error::InvalidInput(format!(
                "singular threshold {} outside (0, 1e-2)",
                self.singular_threshold
            )));
        }
        if !(self.truncation_radius.is_finite() && self.truncation_radius > 0.0) {
            return Err(Error::InvalidInput("truncation radius must be positive".into()));
        }
        Ok(())
    }
}

/// A term with w > 1 − δ.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularTerm {
    /// λ in coordinates of the ambient space (flattened).
    pub lambda: Vec<Rat>,
    pub w: f64,
    pub one_minus_w: f64,
    /// Q(λ_{1z⊥}).
    pub q_perp: f64,
    /// Q(λ_{1z}) ≤ 0.
    pub q_neg: f64,
    /// φ(λ, z, s) as included in the sum (times the cutoff, which is 1 here).
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreenValue {
    /// Cutoff sum plus the tail model.
    pub value: f64,
    /// Σ χ(P/R) φ(λ, z, s) alone.
    pub truncated_sum: f64,
    /// |tail model|: what the cutoff sum misses.
    pub tail_estimate: f64,
    pub truncation_radius: f64,
    pub singular_terms: Vec<SingularTerm>,
    pub regularization_applied: bool,
    /// Number of λ with Q(λ) = m and P ≤ 2R.
    pub terms: usize,
    /// Fitted c in #{P ≤ t} ≈ c t^{n/2}.
    pub density: f64,
}

/// The value at s₀.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizedValue {
    /// Constant term with every singular φ replaced by g_n(w) + log Q(λ_{1z⊥}).
    pub regular_part: f64,
    /// Constant term with the singular terms left in.
    pub raw: f64,
    /// Number of stripped log|Q(λ_{1z})| terms.
    pub log_terms: usize,
    /// Residue at s₀ predicted by the tail model: 2 c m₁^{n/2}.
    pub residue: f64,
    pub singular_terms: Vec<SingularTerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleFit {
    pub constant: f64,
    pub residue: f64,
    /// RMS misfit of the samples.
    pub residual: f64,
}

/// φ at s₀ = n/2 through the decomposition g_n(w) − log(1 − w).
fn phi_at_s0(w: f64, one_minus_w: f64, n: u32) -> Result<f64> {
    Ok(reglift_g(n, w.min(1.0))? - one_minus_w.ln())
}

/// Γ(s/2 + n/4)/Γ(s+1) w^{s/2+n/4} F(s/2+n/4, s/2−n/4+1, s+1; w), summed
/// as a hypergeometric series.
pub fn phi_hypergeometric(w: f64, s: f64, n: u32, policy: &EvalPolicy) -> Result<f64> {
    let nf = n as f64;
    let sigma = s / 2.0 + nf / 4.0;
    if w == 0.0 {
        return Ok(0.0);
    }
    let f = gauss_2f1(sigma, s / 2.0 - nf / 4.0 + 1.0, s + 1.0, w, policy)?;
    Ok((ln_gamma_ratio(sigma, s + 1.0) + sigma * w.ln()).exp() * f)
}

fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    libm::lgamma(a) - libm::lgamma(b)
}

/// The kernel φ as a function of w = Q(λ₁)/Q(λ_{1z⊥}); `one_minus_w` is
/// passed separately so that it keeps full relative precision near the
/// divisor. At s = s₀ the value is g_n(w) − log(1 − w).
pub fn phi_kernel(w: f64, one_minus_w: f64, s: f64, n: u32, policy: &EvalPolicy) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("the kernel needs n ≥ 1".into()));
    }
    if !(w > 0.0) || w > 1.0 + 1e-12 || one_minus_w < -1e-12 {
        return Err(Error::InvalidInput(format!(
            "w = {w} outside (0, 1]: the enumeration or the geometry is inconsistent"
        )));
    }
    let s0 = n as f64 / 2.0;
    if (s - s0).abs() <= 1e-14 * (1.0 + s0) {
        return phi_at_s0(w, one_minus_w.max(0.0), n);
    }
    if one_minus_w <= 0.0 {
        return Ok(f64::INFINITY);
    }
    if one_minus_w <= 0.5 {
        // c = a + b: the logarithmic connection formula in 1 − w
        let nf = n as f64;
        let sigma = s / 2.0 + nf / 4.0;
        let f = gauss_2f1_balanced_near_one(sigma, s / 2.0 - nf / 4.0 + 1.0, one_minus_w, policy)?;
        return Ok((ln_gamma_ratio(sigma, s + 1.0) + sigma * w.min(1.0).ln()).exp() * f);
    }
    phi_hypergeometric(w, s, n, policy)
}

/// φ(λ, z, s) for a vector λ (flattened ambient coordinates) with Q(λ)
/// totally positive. n is read off the signature.
pub fn phi_term(
    dg: &DiscriminantGroup,
    lambda: &[Rat],
    z: &DomainPoint,
    s: f64,
    policy: &EvalPolicy,
) -> Result<f64> {
    let space = dg.lattice().space();
    let n = lift_n(dg)?;
    let lam1 = space.embed_vector(lambda, 0);
    let (q_perp, q_neg) = z.split_embedded(&lam1);
    let m1 = q_perp + q_neg;
    if !(m1 > 0.0) {
        return Err(Error::InvalidInput("Q(λ) must be totally positive".into()));
    }
    phi_kernel(m1 / q_perp, -q_neg / q_perp, s, n, policy)
}

fn lift_n(dg: &DiscriminantGroup) -> Result<u32> {
    let space = dg.lattice().space();
    if !space.is_admissible() {
        return Err(Error::NotAdmissible(
            "Green functions need signature (n, 2) at σ_1 and definite elsewhere".into(),
        ));
    }
    let (p, _) = space.signatures()[0];
    if p == 0 {
        return Err(Error::NotAdmissible("Green functions need n ≥ 1".into()));
    }
    Ok(p as u32)
}

/// Smooth step: 1 on (−∞, 1], 0 on [2, ∞).
fn cutoff(x: f64) -> f64 {
    if x <= 1.0 {
        return 1.0;
    }
    if x >= 2.0 {
        return 0.0;
    }
    let t = x - 1.0;
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    b / (a + b)
}

/// Bump on [1/16, 2] used to fit the point density.
fn bump(x: f64) -> f64 {
    cutoff(x) - cutoff(16.0 * x)
}

/// Composite Simpson rule.
fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a)? + f(b)?;
    for i in 1..n {
        let wgt = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += wgt * f(a + i as f64 * h)?;
    }
    Ok(s * h / 3.0)
}

const QUAD_POINTS: usize = 400;

#[derive(Clone, Debug)]
struct Term {
    w: f64,
    one_minus_w: f64,
    q_perp: f64,
    q_neg: f64,
    chi: f64,
}

/// The enumerated terms of Φ_{m,μ} at one point z, reusable for any s.
#[derive(Clone, Debug)]
pub struct GreenSum {
    n: u32,
    m1: f64,
    radius: f64,
    terms: Vec<Term>,
    /// (index into `terms`, λ) for 1 − w < δ.
    singular: Vec<(usize, Vec<Rat>)>,
    density: f64,
    max_w: f64,
    max_w_discrepancy: f64,
}

impl GreenSum {
    /// Enumerates λ ∈ μ + L with Q(λ) = m and Q(λ_{1z⊥}) ≤ 2R.
    pub fn new(
        dg: &DiscriminantGroup,
        mu: usize,
        m: &FieldElement,
        z: &DomainPoint,
        params: &GreenParams,
        policy: &EvalPolicy,
    ) -> Result<Self> {
        params.validate()?;
        let lat = dg.lattice();
        let space = lat.space();
        if !lat.is_even() {
            return Err(Error::NotEven("Green functions need an even lattice".into()));
        }
        let n = lift_n(dg)?;
        DiscriminantForm::from_group(dg).check_index(m, mu)?;
        let field = space.field();
        let d = field.degree();
        let mk = field.embed(m);
        let m1 = mk[0];
        let rest: f64 = mk[1..].iter().sum();
        let radius = params.truncation_radius;
        if radius < 2.0 * m1 {
            return Err(Error::InvalidInput(format!(
                "truncation radius {radius} is below 2m₁ = {}",
                2.0 * m1
            )));
        }

        let basis = qmat::mat_to_f64(lat.basis());
        let maj = majorant_gram(space, z, &vec![1.0; d]);
        let maj_l = sandwich(&basis, &maj);
        let en = Enumerator::new(&maj_l, dg.rep_coords(mu))?.with_max_points(f64::INFINITY);
        let level = en.level_set(lat, m)?;
        let maj_y = en.pull_quadratic(&maj_l);

        // (λ₁, Re w) and (λ₁, Im w) as functionals of lattice coordinates.
        let g1 = z.frame().gram();
        let e1 = space.embedding_matrix(0);
        let functional = |v: &[f64]| -> Vec<f64> {
            let gv: Vec<f64> = g1.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
            let ev: Vec<f64> = e1.iter().map(|row| row.iter().zip(&gv).map(|(a, b)| a * b).sum()).collect();
            basis.iter().map(|row| row.iter().zip(&ev).map(|(a, b)| a * b).sum()).collect()
        };
        let re: Vec<f64> = z.w().iter().map(|c| c.re).collect();
        let im: Vec<f64> = z.w().iter().map(|c| c.im).collect();
        let yy = -z.y_norm2();
        let lx = en.pull_linear(&functional(&re));
        let ly = en.pull_linear(&functional(&im));
        let lin = |(g, off): &(Vec<f64>, f64), y: &[i64]| -> f64 {
            g.iter().zip(y).map(|(a, &b)| a * b as f64).sum::<f64>() + off
        };

        // maj = 2P − m₁ + Σ_{k≥2} m_k on the level set; the form is 2·maj.
        let pmax = 2.0 * radius;
        let bound = 2.0 * (2.0 * pmax - m1 + rest);
        let r = lat.rank_z() as f64;
        let outer = en.count_bound(bound).powf((r - 1.0) / r);
        if outer > policy.max_points {
            return Err(Error::Budget(format!(
                "about {outer:.3e} enumeration steps for radius {radius}"
            )));
        }
        let delta = params.singular_threshold;
        let shards = en.map_shards(
            bound,
            Some(&level),
            || (Vec::new(), Vec::new()),
            |acc: &mut (Vec<(f64, f64, f64, f64, f64)>, Vec<(usize, Vec<i64>)>), y| {
                let a = lin(&lx, y);
                let b = lin(&ly, y);
                let q_neg = (a * a + b * b) / (2.0 * yy);
                let p = m1 - q_neg;
                if p > pmax {
                    return;
                }
                let maj1 = 0.5 * maj_y.eval(y) - rest;
                let w_alt = 2.0 * m1 / (m1 + maj1);
                let omw = -q_neg / p;
                if omw < delta {
                    acc.1.push((acc.0.len(), y.to_vec()));
                }
                acc.0.push((m1 / p, omw, p, q_neg, w_alt));
            },
        )?;
        let mut terms = Vec::new();
        let mut singular = Vec::new();
        let mut max_w: f64 = 0.0;
        let mut max_w_discrepancy: f64 = 0.0;
        for (ts, sing) in shards {
            let base = terms.len();
            for (i, y) in sing {
                let lam = qmat::vec_mul(&en.point(&y), lat.basis());
                singular.push((base + i, lam));
            }
            for (w, omw, p, q_neg, w_alt) in ts {
                max_w = max_w.max(w);
                max_w_discrepancy = max_w_discrepancy.max((w - w_alt).abs());
                terms.push(Term {
                    w,
                    one_minus_w: omw,
                    q_perp: p,
                    q_neg,
                    chi: cutoff(p / radius),
                });
            }
        }
        if singular.len() > 1000 {
            return Err(Error::InvalidInput(format!(
                "{} terms inside the singular window",
                singular.len()
            )));
        }
        let nf = n as f64;
        let counted: f64 = terms.iter().map(|t| bump(t.q_perp / radius)).sum();
        let model = simpson(0.0625, 2.0, 16 * QUAD_POINTS, |x| {
            Ok(bump(x) * 0.5 * nf * x.powf(0.5 * nf - 1.0))
        })?;
        let density = counted / (model * radius.powf(0.5 * nf));
        Ok(GreenSum {
            n,
            m1,
            radius,
            terms,
            singular,
            density,
            max_w,
            max_w_discrepancy,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s0(&self) -> f64 {
        self.n as f64 / 2.0
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Fitted c in #{P ≤ t} ≈ c t^{n/2}.
    pub fn density(&self) -> f64 {
        self.density
    }

    /// Largest w over the enumerated terms.
    pub fn max_w(&self) -> f64 {
        self.max_w
    }

    /// Largest |m₁/Q(λ_{1z⊥}) − 2m₁/(m₁ + Q(λ_{1z⊥}) − Q(λ_{1z}))|, the second
    /// ratio computed from the majorant.
    pub fn max_w_discrepancy(&self) -> f64 {
        self.max_w_discrepancy
    }

    /// (w, 1 − w) of every term, in summation order.
    pub fn ratios(&self) -> Vec<(f64, f64)> {
        self.terms.iter().map(|t| (t.w, t.one_minus_w)).collect()
    }

    fn singular_terms(&self, contributions: &[f64]) -> Vec<SingularTerm> {
        self.singular
            .iter()
            .map(|(i, lam)| {
                let t = &self.terms[*i];
                SingularTerm {
                    lambda: lam.clone(),
                    w: t.w,
                    one_minus_w: t.one_minus_w,
                    q_perp: t.q_perp,
                    q_neg: t.q_neg,
                    contribution: contributions[*i],
                }
            })
            .collect()
    }

    fn kernel_values(&self, s: f64, policy: &EvalPolicy) -> Result<Vec<f64>> {
        let n = self.n;
        par::map_slice(&self.terms, |t| phi_kernel(t.w, t.one_minus_w, s, n, policy))
            .into_iter()
            .collect()
    }

    fn cutoff_sum(&self, values: &[f64]) -> f64 {
        self.terms.iter().zip(values).map(|(t, v)| t.chi * v).sum()
    }

    /// ∫_R^{2R} (1 − χ(P/R)) (m₁/P)^σ F(m₁/P) P^{n/2−1} dP.
    fn mid_integral(&self, s: f64, policy: &EvalPolicy) -> Result<f64> {
        let nf = self.n as f64;
        let sigma = s / 2.0 + nf / 4.0;
        let (b, c) = (s / 2.0 - nf / 4.0 + 1.0, s + 1.0);
        let r = self.radius;
        let m1 = self.m1;
        let inner = simpson(1.0, 2.0, QUAD_POINTS, |x| {
            let w = m1 / (r * x);
            Ok((1.0 - cutoff(x)) * w.powf(sigma) * gauss_2f1(sigma, b, c, w, policy)? * x.powf(0.5 * nf - 1.0))
        })?;
        Ok(r.powf(0.5 * nf) * inner)
    }

    /// Σ_{j≥1} a_j(s) w₀^{j+e}/(j+e) with the hypergeometric coefficients a_j
    /// and e = (s − s₀)/2.
    fn far_series(&self, s: f64, policy: &EvalPolicy) -> Result<f64> {
        let nf = self.n as f64;
        let (a, b, c) = (s / 2.0 + nf / 4.0, s / 2.0 - nf / 4.0 + 1.0, s + 1.0);
        let e = (s - self.s0()) / 2.0;
        let w0 = self.m1 / (2.0 * self.radius);
        let mut coef = 1.0;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for j in 0..policy.max_terms as usize {
            let jf = j as f64;
            coef *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0));
            pow *= w0;
            let term = coef * pow / (jf + 1.0 + e);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                return Ok(sum * w0.powf(e));
            }
        }
        Err(Error::Convergence("tail series".into()))
    }

    /// Tail model Σ_{P} (1 − χ(P/R)) φ against the density c (n/2) P^{n/2−1}.
    fn tail_model(&self, s: f64, policy: &EvalPolicy) -> Result<f64> {
        if self.density == 0.0 {
            return Ok(0.0);
        }
        let nf = self.n as f64;
        let sigma = s / 2.0 + nf / 4.0;
        let e = (s - self.s0()) / 2.0;
        let w0 = self.m1 / (2.0 * self.radius);
        let pref = ln_gamma_ratio(sigma, s + 1.0).exp() * self.density * 0.5 * nf;
        let far = self.m1.powf(0.5 * nf) * (w0.powf(e) / e + self.far_series(s, policy)?);
        Ok(pref * (self.mid_integral(s, policy)? + far))
    }

    /// Φ at s > s₀.
    pub fn at(&self, s: f64, policy: &EvalPolicy) -> Result<GreenValue> {
        if !(s > self.s0()) {
            return Err(Error::InvalidInput(format!(
                "the series needs s > s₀ = {}, got {s}",
                self.s0()
            )));
        }
        let values = self.kernel_values(s, policy)?;
        let truncated_sum = self.cutoff_sum(&values);
        let tail = self.tail_model(s, policy)?;
        Ok(GreenValue {
            value: truncated_sum + tail,
            truncated_sum,
            tail_estimate: tail.abs(),
            truncation_radius: self.radius,
            singular_terms: self.singular_terms(&values),
            regularization_applied: false,
            terms: self.terms.len(),
            density: self.density,
        })
    }

    /// Residue of the tail model at s₀.
    pub fn residue(&self) -> f64 {
        2.0 * self.density * self.m1.powf(self.n as f64 / 2.0)
    }

    /// Constant term of the Laurent expansion at s₀, from the tail model's
    /// closed-form expansion.
    pub fn regularized(&self, policy: &EvalPolicy) -> Result<RegularizedValue> {
        let n = self.n;
        let nf = n as f64;
        let s0 = self.s0();
        let values = self.kernel_values(s0, policy)?;
        let mut regular_values = values.clone();
        for (i, _) in &self.singular {
            let t = &self.terms[*i];
            regular_values[*i] = reglift_g(n, t.w.min(1.0))? + t.q_perp.ln();
        }
        let mut finite = 0.0;
        if self.density != 0.0 {
            // K(s) = Γ(σ)/Γ(s+1) c (n/2) m₁^{n/2}; K(s₀) = c m₁^{n/2}.
            let k0 = self.density * self.m1.powf(0.5 * nf);
            let k1 = k0 * (0.5 * digamma(0.5 * nf) - digamma(0.5 * nf + 1.0));
            let w0 = self.m1 / (2.0 * self.radius);
            finite = self.density * self.mid_integral(s0, policy)?
                + k0 * (w0.ln() + self.far_series(s0, policy)?)
                + 2.0 * k1;
        }
        Ok(RegularizedValue {
            regular_part: self.cutoff_sum(&regular_values) + finite,
            raw: self.cutoff_sum(&values) + finite,
            log_terms: self.singular.len(),
            residue: self.residue(),
            singular_terms: self.singular_terms(&values),
        })
    }
}

fn sandwich(b: &[Vec<f64>], a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let r = b.len();
    let q = a.len();
    let ba: Vec<Vec<f64>> = b
        .iter()
        .map(|row| (0..q).map(|j| (0..q).map(|i| row[i] * a[i][j]).sum()).collect())
        .collect();
    (0..r)
        .map(|p| (0..r).map(|t| (0..q).map(|j| ba[p][j] * b[t][j]).sum()).collect())
        .collect()
}

/// Φ_{m,μ}(z, s) for s > s₀.
pub fn green_eval(
    dg: &DiscriminantGroup,
    mu: usize,
    m: &FieldElement,
    z: &DomainPoint,
    params: &GreenParams,
    policy: &EvalPolicy,
) -> Result<GreenValue> {
    GreenSum::new(dg, mu, m, z, params, policy)?.at(params.s, policy)
}

/// Regularized value at s₀ with the terms near the divisor made bounded.
pub fn green_regularized_at_point(
    dg: &DiscriminantGroup,
    mu: usize,
    m: &FieldElement,
    z: &DomainPoint,
    params: &GreenParams,
    policy: &EvalPolicy,
) -> Result<RegularizedValue> {
    GreenSum::new(dg, mu, m, z, params, policy)?.regularized(policy)
}

/// Least squares fit of y ≈ c + A/ε.
pub fn fit_pole(samples: &[(f64, f64)]) -> Result<PoleFit> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("the pole fit needs two samples".into()));
    }
    if samples.iter().any(|&(e, _)| !(e > 0.0)) {
        return Err(Error::InvalidInput("pole steps must be positive".into()));
    }
    let k = samples.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(e, y) in samples {
        let x = 1.0 / e;
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    let det = k * sxx - sx * sx;
    if det.abs() <= 1e-300 {
        return Err(Error::InvalidInput("pole steps must be distinct".into()));
    }
    let residue = (k * sxy - sx * sy) / det;
    let constant = (sy - residue * sx) / k;
    let ss: f64 = samples
        .iter()
        .map(|&(e, y)| (y - constant - residue / e).powi(2))
        .sum();
    Ok(PoleFit {
        constant,
        residue,
        residual: (ss / k).sqrt(),
    })
}

impl GreenSum {
    /// Fit c + A/ε to Φ(s₀ + ε) over `steps`.
    pub fn pole_fit(&self, steps: &[f64], tolerance: f64, policy: &EvalPolicy) -> Result<PoleFit> {
        let samples = steps
            .iter()
            .map(|&e| Ok((e, self.at(self.s0() + e, policy)?.value)))
            .collect::<Result<Vec<_>>>()?;
        let fit = fit_pole(&samples)?;
        let scale = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
        let threshold = tolerance * scale;
        if fit.residual > threshold {
            return Err(Error::FitResidual {
                residual: fit.residual,
                threshold,
            });
        }
        Ok(fit)
    }
}

/// Constant term and residue at s₀ from the ε-grid in `params.pole_steps`.
pub fn pole_extrapolate(
    dg: &DiscriminantGroup,
    mu: usize,
    m: &FieldElement,
    z: &DomainPoint,
    params: &GreenParams,
    policy: &EvalPolicy,
) -> Result<PoleFit> {
    GreenSum::new(dg, mu, m, z, params, policy)?.pole_fit(&params.pole_steps, params.fit_tolerance, policy)
}

/// Φ(z, s, f) = Σ c(m, μ) Φ_{m,μ}(z, s). The coefficients must be real.
pub fn green_linear(
    f: &WhittakerForm,
    dg: &DiscriminantGroup,
    z: &DomainPoint,
    params: &GreenParams,
    policy: &EvalPolicy,
) -> Result<GreenValue> {
    let mut out = GreenValue {
        value: 0.0,
        truncated_sum: 0.0,
        tail_estimate: 0.0,
        truncation_radius: params.truncation_radius,
        singular_terms: Vec::new(),
        regularization_applied: false,
        terms: 0,
        density: 0.0,
    };
    for t in f.terms() {
        let c = real_coefficient(t.c)?;
        let g = green_eval(dg, t.mu, &t.m, z, params, policy)?;
        out.value += c * g.value;
        out.truncated_sum += c * g.truncated_sum;
        out.tail_estimate += c.abs() * g.tail_estimate;
        out.terms += g.terms;
        out.density += c * g.density;
        out.singular_terms.extend(g.singular_terms.into_iter().map(|mut s| {
            s.contribution *= c;
            s
        }));
    }
    Ok(out)
}

fn real_coefficient(c: Complex64) -> Result<f64> {
    if c.im != 0.0 {
        return Err(Error::InvalidInput(format!(
            "Green functions need real coefficients, got {c}"
        )));
    }
    Ok(c.re)
}

/// One row of a scan along a path in the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub t: f64,
    pub s: f64,
    pub value: f64,
    pub regular_part: f64,
    pub tail_estimate: f64,
    pub n_singular_terms: usize,
}

/// Φ along z(t) for the given parameter values: `value` at `params.s`,
/// `regular_part` at s₀. The regular part subtracts −log|Q(λ_{1z})| for the
/// same set of λ at every point: those flagged as singular anywhere on the
/// path. A per-point set would jump where λ crosses the threshold.
pub fn green_scan(
    dg: &DiscriminantGroup,
    mu: usize,
    m: &FieldElement,
    path: impl Fn(f64) -> Result<DomainPoint>,
    ts: &[f64],
    params: &GreenParams,
    policy: &EvalPolicy,
) -> Result<Vec<ScanRow>> {
    let space = dg.lattice().space();
    let mut points = Vec::with_capacity(ts.len());
    let mut flagged: Vec<Vec<Rat>> = Vec::new();
    for &t in ts {
        let z = path(t)?;
        let sum = GreenSum::new(dg, mu, m, &z, params, policy)?;
        let reg = sum.regularized(policy)?;
        let v = sum.at(params.s, policy)?;
        for st in &reg.singular_terms {
            if !flagged.contains(&st.lambda) {
                flagged.push(st.lambda.clone());
            }
        }
        points.push((t, z, reg, v));
    }
    Ok(points
        .into_iter()
        .map(|(t, z, reg, v)| {
            let extra: f64 = flagged
                .iter()
                .filter(|lam| !reg.singular_terms.iter().any(|st| &st.lambda == *lam))
                .map(|lam| majorant_split(space, lam, &z).q_neg.abs().ln())
                .sum();
            ScanRow {
                t,
                s: params.s,
                value: v.value,
                regular_part: reg.regular_part + extra,
                tail_estimate: v.tail_estimate,
                n_singular_terms: reg.log_terms,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_is_a_partition() {
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(2.5), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
        for x in [0.6, 0.9, 1.3, 1.7] {
            assert!((0.0..=1.0).contains(&bump(x)));
        }
    }

    #[test]
    fn simpson_integrates_cubics() {
        let v = simpson(0.0, 2.0, 10, |x| Ok(x * x * x)).unwrap();
        assert!((v - 4.0).abs() < 1e-13);
    }

    #[test]
    fn fit_recovers_exact_model() {
        let samples: Vec<_> = [0.1, 0.05, 0.025].iter().map(|&e| (e, 3.0 + 0.7 / e)).collect();
        let f = fit_pole(&samples).unwrap();
        assert!((f.constant - 3.0).abs() < 1e-8 && (f.residue - 0.7).abs() < 1e-8);
    }
}
