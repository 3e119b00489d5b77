//! Totally real number fields given by a monic integer polynomial and an
//! integral basis.
//!
//! Elements are stored as rational coordinates on the integral basis
//! ω_1..ω_d. Real embeddings are isolated exactly (Sturm sequences) and
//! refined by bisection, so signs of elements can be certified.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qmat::{self, QMat, Rat};

/// Element of F in coordinates on the integral basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement(pub Vec<Rat>);

impl FieldElement {
    pub fn zero(d: usize) -> Self {
        FieldElement(vec![Rat::zero(); d])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        FieldElement(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        FieldElement(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        FieldElement(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, q: &Rat) -> Self {
        FieldElement(self.0.iter().map(|a| a * q).collect())
    }

    /// True when every coordinate is an integer (element of O_F).
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }
}

/// Rational isolating interval [lo, hi] of a real root.
#[derive(Clone, Debug)]
struct RootInterval {
    lo: Rat,
    hi: Rat,
}

/// A totally real number field with a fixed integral basis and an ordering
/// of its real embeddings.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    poly: Vec<Rat>,
    poly_int: Vec<BigInt>,
    degree: usize,
    /// Row i: ω_i in the power basis.
    basis: QMat,
    basis_inv: QMat,
    /// mult[i][j] = coordinates of ω_i ω_j.
    mult: Vec<Vec<Vec<Rat>>>,
    one: FieldElement,
    traces: Vec<Rat>,
    trace_matrix: QMat,
    discriminant: BigInt,
    codifferent: QMat,
    roots: Vec<RootInterval>,
    omega_f64: Vec<Vec<f64>>,
    precision_digits: u32,
}

fn trim(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

fn poly_deriv(p: &[Rat]) -> Vec<Rat> {
    if p.len() <= 1 {
        return vec![Rat::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rat::from_integer(BigInt::from(k)))
        .collect()
}

fn poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let f = &r[dr] / &lead;
        for k in 0..=db {
            let t = &f * &b[k];
            r[dr - db + k] -= t;
        }
        r.pop();
        trim(&mut r);
        if r.len() <= db {
            break;
        }
    }
    if r.is_empty() {
        r.push(Rat::zero());
    }
    r
}

fn is_zero_poly(p: &[Rat]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn sign_changes(seq: &[Vec<Rat>], x: &Rat) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| {
            let v = poly_eval(p, x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|s| *s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Bound on |g(x) - g(m)| for x in [m - h, m + h].
fn deriv_bound(g: &[Rat], m: &Rat, h: &Rat) -> Rat {
    let r = m.abs() + h;
    let mut bound = Rat::zero();
    let mut rp = Rat::one();
    for (k, c) in g.iter().enumerate().skip(1) {
        bound += c.abs() * Rat::from_integer(BigInt::from(k)) * &rp;
        rp *= &r;
    }
    bound * h
}

impl FieldSpec {
    /// Build a field from monic integer polynomial coefficients (constant
    /// term first), an integral basis given as rows of power-basis
    /// coordinates, and the index (into the ascending real roots) of the
    /// distinguished embedding σ_1.
    pub fn new(
        poly: &[BigInt],
        integral_basis: &QMat,
        sigma1_root_index: usize,
        precision_digits: u32,
    ) -> Result<Self> {
        if poly.len() < 2 {
            return Err(Error::InvalidInput("polynomial must have degree >= 1".into()));
        }
        if !poly.last().unwrap().is_one() {
            return Err(Error::InvalidInput("polynomial must be monic".into()));
        }
        let d = poly.len() - 1;
        let p: Vec<Rat> = poly.iter().cloned().map(Rat::from_integer).collect();
        if integral_basis.len() != d || integral_basis.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput(format!(
                "integral basis must be a {d}x{d} matrix"
            )));
        }
        if sigma1_root_index >= d {
            return Err(Error::InvalidInput(format!(
                "sigma1_root_index {sigma1_root_index} out of range for degree {d}"
            )));
        }

        let roots = isolate_roots(&p, d)?;
        let basis_inv = qmat::inverse(integral_basis)
            .map_err(|_| Error::BasisNotRing("basis vectors are linearly dependent".into()))?;

        let mut spec = FieldSpec {
            poly: p,
            poly_int: poly.to_vec(),
            degree: d,
            basis: integral_basis.clone(),
            basis_inv,
            mult: Vec::new(),
            one: FieldElement::zero(d),
            traces: Vec::new(),
            trace_matrix: Vec::new(),
            discriminant: BigInt::zero(),
            codifferent: Vec::new(),
            roots: Vec::new(),
            omega_f64: Vec::new(),
            precision_digits,
        };

        // structure constants
        let mut mult = vec![vec![Vec::new(); d]; d];
        for i in 0..d {
            for j in 0..d {
                let prod = spec.power_mul(&spec.basis[i], &spec.basis[j]);
                let c = qmat::vec_mul(&prod, &spec.basis_inv);
                if c.iter().any(|x| !x.is_integer()) {
                    return Err(Error::BasisNotRing(format!(
                        "product of basis elements {i} and {j} is not integral"
                    )));
                }
                mult[i][j] = c;
            }
        }
        spec.mult = mult;
        let mut e1 = vec![Rat::zero(); d];
        e1[0] = Rat::one();
        let one = qmat::vec_mul(&e1, &spec.basis_inv);
        if one.iter().any(|x| !x.is_integer()) {
            return Err(Error::BasisNotRing("1 is not in the span of the basis".into()));
        }
        spec.one = FieldElement(one);

        // traces of the power basis by Newton's identities
        let power_sums = newton_power_sums(&spec.poly, d);
        spec.traces = (0..d)
            .map(|i| qmat::dot(&spec.basis[i], &power_sums))
            .collect();
        let mut tm = qmat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                tm[a][b] = qmat::dot(&spec.mult[a][b], &spec.traces);
            }
        }
        let disc = qmat::det(&tm);
        spec.discriminant = disc.to_integer();
        spec.codifferent = qmat::inverse(&tm)?;
        spec.trace_matrix = tm;

        // order embeddings: sigma1 first, the remaining ascending
        let mut ordered = Vec::with_capacity(d);
        ordered.push(roots[sigma1_root_index].clone());
        for (k, r) in roots.iter().enumerate() {
            if k != sigma1_root_index {
                ordered.push(r.clone());
            }
        }
        let target = Rat::new(
            BigInt::one(),
            num_traits::pow(BigInt::from(10), precision_digits as usize + 10),
        );
        for r in ordered.iter_mut() {
            spec.refine(r, &target);
        }
        spec.roots = ordered;
        spec.omega_f64 = (0..d)
            .map(|k| {
                (0..d)
                    .map(|a| {
                        let mut e = FieldElement::zero(d);
                        e.0[a] = Rat::one();
                        qmat::to_f64(&spec.embed_rational(&e, k))
                    })
                    .collect()
            })
            .collect();
        Ok(spec)
    }

    /// The field of rational numbers.
    pub fn rationals() -> Self {
        FieldSpec::new(
            &[BigInt::zero(), BigInt::one()],
            &qmat::identity(1),
            0,
            50,
        )
        .expect("Q is a field")
    }

    /// Q(√D) for squarefree D > 1 with its maximal order basis, σ_1(√D) > 0.
    pub fn real_quadratic(dsf: i64) -> Result<Self> {
        let poly = [BigInt::from(-dsf), BigInt::zero(), BigInt::one()];
        let basis = if dsf.rem_euclid(4) == 1 {
            vec![
                vec![qmat::rat(1), qmat::rat(0)],
                vec![qmat::ratio(1, 2), qmat::ratio(1, 2)],
            ]
        } else {
            qmat::identity(2)
        };
        FieldSpec::new(&poly, &basis, 1, 50)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn polynomial(&self) -> &[BigInt] {
        &self.poly_int
    }

    pub fn integral_basis(&self) -> &QMat {
        &self.basis
    }

    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }

    /// Discriminant det[tr(ω_a ω_b)].
    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// Matrix [tr(ω_a ω_b)].
    pub fn trace_matrix(&self) -> &QMat {
        &self.trace_matrix
    }

    /// Rows: the trace-dual basis of the inverse different, in ω-coordinates.
    pub fn codifferent_basis(&self) -> Vec<FieldElement> {
        self.codifferent.iter().cloned().map(FieldElement).collect()
    }

    pub fn one(&self) -> FieldElement {
        self.one.clone()
    }

    pub fn from_rational(&self, q: &Rat) -> FieldElement {
        self.one.scale(q)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(&qmat::rat(n))
    }

    /// The basis element ω_a.
    pub fn basis_element(&self, a: usize) -> FieldElement {
        let mut e = FieldElement::zero(self.degree);
        e.0[a] = Rat::one();
        e
    }

    /// Element from power-basis coordinates.
    pub fn from_power_basis(&self, p: &[Rat]) -> FieldElement {
        let mut v = p.to_vec();
        v.resize(self.degree, Rat::zero());
        FieldElement(qmat::vec_mul(&v, &self.basis_inv))
    }

    pub fn to_power_basis(&self, x: &FieldElement) -> Vec<Rat> {
        qmat::vec_mul(&x.0, &self.basis)
    }

    fn power_mul(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let d = self.degree;
        let mut prod = vec![Rat::zero(); 2 * d];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                prod[i + j] += ai * bj;
            }
        }
        // reduce modulo the monic polynomial
        for k in (d..2 * d).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for t in 0..d {
                let s = &c * &self.poly[t];
                prod[k - d + t] -= s;
            }
        }
        prod.truncate(d);
        prod
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let d = self.degree;
        let mut out = vec![Rat::zero(); d];
        for i in 0..d {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y.0[j].is_zero() {
                    continue;
                }
                let c = &x.0[i] * &y.0[j];
                for k in 0..d {
                    if !self.mult[i][j][k].is_zero() {
                        out[k] += &c * &self.mult[i][j][k];
                    }
                }
            }
        }
        FieldElement(out)
    }

    /// Matrix of multiplication by x: column j holds the coordinates of x ω_j.
    pub fn regular_representation(&self, x: &FieldElement) -> QMat {
        let d = self.degree;
        let mut m = qmat::zeros(d, d);
        for j in 0..d {
            let prod = self.mul(x, &self.basis_element(j));
            for k in 0..d {
                m[k][j] = prod.0[k].clone();
            }
        }
        m
    }

    pub fn trace(&self, x: &FieldElement) -> Rat {
        qmat::dot(&x.0, &self.traces)
    }

    pub fn norm(&self, x: &FieldElement) -> Rat {
        qmat::det(&self.regular_representation(x))
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        let m = self.regular_representation(x);
        let minv = qmat::inverse(&m)
            .map_err(|_| Error::Singular("element is not invertible".into()))?;
        // x * y = 1  <=>  M y = one
        let y: Vec<Rat> = minv.iter().map(|row| qmat::dot(row, &self.one.0)).collect();
        Ok(FieldElement(y))
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// Membership in the inverse different: tr(x ω_a) ∈ Z for all a.
    pub fn in_codifferent(&self, x: &FieldElement) -> bool {
        (0..self.degree).all(|a| self.trace(&self.mul(x, &self.basis_element(a))).is_integer())
    }

    /// Representative of x modulo the inverse different, with coordinates on
    /// the trace-dual basis in [0, 1).
    pub fn reduce_mod_codifferent(&self, x: &FieldElement) -> FieldElement {
        let mut out = FieldElement::zero(self.degree);
        for a in 0..self.degree {
            let t = self.trace(&self.mul(x, &self.basis_element(a)));
            let f = qmat::frac(&t);
            if f.is_zero() {
                continue;
            }
            for b in 0..self.degree {
                out.0[b] += &f * &self.codifferent[a][b];
            }
        }
        out
    }

    fn refine(&self, r: &mut RootInterval, target: &Rat) {
        if r.lo == r.hi {
            return;
        }
        let s_lo = poly_eval(&self.poly, &r.lo).signum();
        while &r.hi - &r.lo > *target {
            let mid = (&r.lo + &r.hi) / Rat::from_integer(BigInt::from(2));
            let v = poly_eval(&self.poly, &mid);
            if v.is_zero() {
                r.lo = mid.clone();
                r.hi = mid;
                return;
            }
            if v.signum() == s_lo {
                r.lo = mid;
            } else {
                r.hi = mid;
            }
        }
    }

    /// High-precision rational approximation of σ_k(x).
    pub fn embed_rational(&self, x: &FieldElement, k: usize) -> Rat {
        let r = &self.roots[k];
        let mid = (&r.lo + &r.hi) / Rat::from_integer(BigInt::from(2));
        poly_eval(&self.to_power_basis(x), &mid)
    }

    /// σ_k(x) in double precision, computed from the rational approximation.
    pub fn embed_exactish(&self, x: &FieldElement, k: usize) -> f64 {
        qmat::to_f64(&self.embed_rational(x, k))
    }

    /// All real embeddings of x in double precision.
    pub fn embed(&self, x: &FieldElement) -> Vec<f64> {
        (0..self.degree).map(|k| self.embed_k(x, k)).collect()
    }

    /// σ_k(x) in double precision from the stored embeddings of the basis.
    pub fn embed_k(&self, x: &FieldElement, k: usize) -> f64 {
        x.0.iter()
            .zip(&self.omega_f64[k])
            .map(|(c, w)| qmat::to_f64(c) * w)
            .sum()
    }

    /// σ_k(ω_a) for all k, a.
    pub fn basis_embeddings(&self) -> &[Vec<f64>] {
        &self.omega_f64
    }

    /// σ_k(θ) where θ is the root of the defining polynomial.
    pub fn root(&self, k: usize) -> f64 {
        let r = &self.roots[k];
        qmat::to_f64(&((&r.lo + &r.hi) / Rat::from_integer(BigInt::from(2))))
    }

    /// Certified sign of σ_k(x): -1, 0 or 1.
    pub fn sign_at(&self, x: &FieldElement, k: usize) -> Result<i32> {
        if x.is_zero() {
            return Ok(0);
        }
        let g = self.to_power_basis(x);
        let mut r = self.roots[k].clone();
        let two = Rat::from_integer(BigInt::from(2));
        let max_bits = 4 * (self.precision_digits as u64 + 10) * 4;
        for _ in 0..max_bits {
            let mid = (&r.lo + &r.hi) / &two;
            let h = (&r.hi - &r.lo) / &two;
            let v = poly_eval(&g, &mid);
            let bound = deriv_bound(&g, &mid, &h);
            if v.abs() > bound {
                return Ok(if v.is_positive() { 1 } else { -1 });
            }
            // bisect once more
            let target = (&r.hi - &r.lo) / &two;
            self.refine(&mut r, &target);
            if r.lo == r.hi {
                let v = poly_eval(&g, &r.lo);
                return Ok(if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                });
            }
        }
        Err(Error::SignNotCertifiable { embedding: k })
    }

    /// Certified signs at every embedding.
    pub fn signs(&self, x: &FieldElement) -> Result<Vec<i32>> {
        (0..self.degree).map(|k| self.sign_at(x, k)).collect()
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> Result<bool> {
        Ok(self.signs(x)?.iter().all(|&s| s > 0))
    }
}

fn newton_power_sums(p: &[Rat], d: usize) -> Vec<Rat> {
    // x^d + a_{d-1} x^{d-1} + ... + a_0; e-coefficients c_k = a_{d-k}
    let c = |k: usize| p[d - k].clone();
    let mut s = vec![Rat::zero(); d];
    s[0] = Rat::from_integer(BigInt::from(d));
    for k in 1..d {
        let mut v = -c(k) * Rat::from_integer(BigInt::from(k));
        for i in 1..k {
            v -= c(i) * &s[k - i];
        }
        s[k] = v;
    }
    s
}

fn isolate_roots(p: &[Rat], d: usize) -> Result<Vec<RootInterval>> {
    let mut seq = vec![p.to_vec(), poly_deriv(p)];
    loop {
        let n = seq.len();
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        if is_zero_poly(&r) {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    if seq.last().unwrap().len() > 1 {
        return Err(Error::NotSquarefree);
    }
    let bound = Rat::one()
        + p[..d]
            .iter()
            .fold(Rat::zero(), |acc, c| if c.abs() > acc { c.abs() } else { acc });
    let lo = -bound.clone();
    let hi = bound;
    let total = sign_changes(&seq, &lo) - sign_changes(&seq, &hi);
    if total < d {
        return Err(Error::NotTotallyReal(format!(
            "only {total} of {d} roots are real"
        )));
    }
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi)];
    let two = Rat::from_integer(BigInt::from(2));
    while let Some((a, b)) = stack.pop() {
        let cnt = sign_changes(&seq, &a) - sign_changes(&seq, &b);
        if cnt == 0 {
            continue;
        }
        if cnt == 1 {
            out.push(RootInterval { lo: a, hi: b });
            continue;
        }
        let mid = (&a + &b) / &two;
        if poly_eval(p, &mid).is_zero() {
            if d > 1 {
                return Err(Error::InvalidInput(
                    "polynomial has a rational root and is reducible".into(),
                ));
            }
            out.push(RootInterval { lo: mid.clone(), hi: mid });
            continue;
        }
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    // exact rational roots sitting on an interval endpoint (degree one)
    if d == 1 && out.len() == 1 {
        let r = -p[0].clone();
        out[0] = RootInterval { lo: r.clone(), hi: r };
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    if out.len() != d {
        return Err(Error::NotTotallyReal("root isolation failed".into()));
    }
    Ok(out)
}

/// Convenience: build a rational field element list from integer tuples.
pub fn elem(f: &FieldSpec, coords: &[(i64, i64)]) -> FieldElement {
    assert_eq!(coords.len(), f.degree());
    FieldElement(coords.iter().map(|&(p, q)| qmat::ratio(p, q)).collect())
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub fn rat_to_string(q: &BigRational) -> String {
    q.to_string()
}
