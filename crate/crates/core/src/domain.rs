//! The hermitean symmetric domain attached to V at σ_1.
//!
//! A frame is a pair of isotropic vectors a, b ∈ V_{σ_1} with (a, b) = 1
//! together with a basis of V₀ = V_{σ_1} ∩ a^⊥ ∩ b^⊥. A point z ∈ V₀ ⊗ C
//! with Q(Im z) < 0 gives the isotropic line spanned by
//! w(z) = z + a − Q(z) b. All geometry here is in f64.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::lattice::{OFLattice, QuadraticSpace};
use crate::qmat::{self, QMat, Rat};

const FRAME_TOL: f64 = 1e-10;

fn bil(g: &[Vec<f64>], x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, row) in g.iter().enumerate() {
        let mut t = 0.0;
        for (j, gij) in row.iter().enumerate() {
            t += gij * y[j];
        }
        s += x[i] * t;
    }
    s
}

fn bil_c(g: &[Vec<f64>], x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (i, row) in g.iter().enumerate() {
        let mut t = Complex64::new(0.0, 0.0);
        for (j, gij) in row.iter().enumerate() {
            t += y[j] * *gij;
        }
        s += x[i] * t;
    }
    s
}

fn bil_rc(g: &[Vec<f64>], x: &[f64], y: &[Complex64]) -> Complex64 {
    let xc: Vec<Complex64> = x.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    bil_c(g, &xc, y)
}

/// Isotropic frame (a, b, V₀) at σ_1.
#[derive(Clone, Debug)]
pub struct IsotropicFrame {
    gram: Vec<Vec<f64>>,
    a: Vec<f64>,
    b: Vec<f64>,
    v0_basis: Vec<Vec<f64>>,
    v0_gram: Vec<Vec<f64>>,
    v0_gram_inv: DMatrix<f64>,
    /// A vector of V₀ of negative norm, in V₀-coordinates; the domain
    /// component is the one with (Im z, neg_dir) < 0.
    neg_dir: Vec<f64>,
}

impl IsotropicFrame {
    /// Builds a frame from the eigen-decomposition of the σ_1 Gram matrix:
    /// a = (p + q)/2, b = p − q for unit vectors p, q of norm +1 and −1.
    pub fn find(space: &QuadraticSpace) -> Result<Self> {
        let g = space.gram_embedded(0).to_vec();
        let l = g.len();
        let m = DMatrix::from_fn(l, l, |i, j| g[i][j]);
        let eig = SymmetricEigen::new(m);
        let mut idx: Vec<usize> = (0..l).collect();
        idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let negatives: Vec<usize> = idx.iter().copied().filter(|&i| eig.eigenvalues[i] < 0.0).collect();
        let positives: Vec<usize> = idx.iter().rev().copied().filter(|&i| eig.eigenvalues[i] > 0.0).collect();
        if negatives.len() != 2 || positives.is_empty() {
            return Err(Error::NotAdmissible(format!(
                "σ_1 signature ({}, {}) has no hermitean domain; need (n, 2) with n ≥ 1",
                positives.len(),
                negatives.len()
            )));
        }
        let unit = |i: usize| -> Vec<f64> {
            let s = eig.eigenvalues[i].abs().sqrt();
            (0..l).map(|r| eig.eigenvectors[(r, i)] / s).collect()
        };
        let p = unit(positives[0]);
        let q = unit(negatives[0]);
        let a: Vec<f64> = p.iter().zip(&q).map(|(x, y)| (x + y) / 2.0).collect();
        let b: Vec<f64> = p.iter().zip(&q).map(|(x, y)| x - y).collect();
        let mut v0: Vec<Vec<f64>> = positives[1..].iter().map(|&i| unit(i)).collect();
        v0.push(unit(negatives[1]));
        Self::new(g, a, b, Some(v0))
    }

    /// Frame from explicit vectors. Without `v0_basis` a basis of the
    /// complement of span(a, b) is produced by projecting the standard basis.
    pub fn new(
        gram: Vec<Vec<f64>>,
        a: Vec<f64>,
        b: Vec<f64>,
        v0_basis: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let l = gram.len();
        if a.len() != l || b.len() != l {
            return Err(Error::InvalidInput(format!("frame vectors must have length {l}")));
        }
        let scale = gram.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0)
            * a.iter().chain(&b).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0).powi(2);
        let qa = bil(&gram, &a, &a) / 2.0;
        let qb = bil(&gram, &b, &b) / 2.0;
        let ab = bil(&gram, &a, &b);
        if qa.abs() > FRAME_TOL * scale || qb.abs() > FRAME_TOL * scale || (ab - 1.0).abs() > FRAME_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "frame must satisfy Q(a) = Q(b) = 0, (a, b) = 1; got {qa:e}, {qb:e}, {ab}"
            )));
        }
        let v0 = match v0_basis {
            Some(v) => v,
            None => complement_basis(&gram, &a, &b),
        };
        if v0.len() + 2 != l {
            return Err(Error::InvalidInput(format!("V₀ basis must have {} vectors", l - 2)));
        }
        for v in &v0 {
            if v.len() != l
                || bil(&gram, v, &a).abs() > FRAME_TOL * scale
                || bil(&gram, v, &b).abs() > FRAME_TOL * scale
            {
                return Err(Error::InvalidInput("V₀ basis must be orthogonal to a and b".into()));
            }
        }
        let n = v0.len();
        let v0_gram: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| bil(&gram, &v0[i], &v0[j])).collect())
            .collect();
        let vg = DMatrix::from_fn(n, n, |i, j| v0_gram[i][j]);
        let v0_gram_inv = vg
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("V₀ basis is degenerate".into()))?;
        let eig = SymmetricEigen::new(vg);
        let negs: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] < 0.0).collect();
        if negs.len() != 1 {
            return Err(Error::NotAdmissible(format!(
                "V₀ must have signature (n−1, 1); found {} negative directions",
                negs.len()
            )));
        }
        let mut neg_dir: Vec<f64> = (0..n).map(|r| eig.eigenvectors[(r, negs[0])]).collect();
        // deterministic orientation: largest coordinate positive
        let big = neg_dir.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if big < 0.0 {
            neg_dir.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(IsotropicFrame {
            gram,
            a,
            b,
            v0_basis: v0,
            v0_gram,
            v0_gram_inv,
            neg_dir,
        })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn v0_basis(&self) -> &[Vec<f64>] {
        &self.v0_basis
    }

    /// Gram matrix of V₀ in the chosen basis.
    pub fn v0_gram(&self) -> &[Vec<f64>] {
        &self.v0_gram
    }

    /// The σ_1 Gram matrix.
    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    pub fn n(&self) -> usize {
        self.gram.len() - 2
    }

    /// A V₀-coordinate vector y with Q(y) < 0 on the chosen component,
    /// normalized to Q(y) = −1/2.
    pub fn reference_direction(&self) -> Vec<f64> {
        let q = self.v0_q_real(&self.neg_dir);
        self.neg_dir.iter().map(|x| x / (-2.0 * q).sqrt()).collect()
    }

    fn v0_q_real(&self, y: &[f64]) -> f64 {
        bil(&self.v0_gram, y, y) / 2.0
    }

    /// Embeds V₀-coordinates into V_{σ_1}.
    pub fn v0_vector(&self, z: &[Complex64]) -> Vec<Complex64> {
        let l = self.gram.len();
        let mut out = vec![Complex64::new(0.0, 0.0); l];
        for (zi, v) in z.iter().zip(&self.v0_basis) {
            for r in 0..l {
                out[r] += zi * v[r];
            }
        }
        out
    }

    /// The point of the domain whose isotropic line is spanned by w.
    pub fn point_from_line(self: &Arc<Self>, w: &[Complex64]) -> Result<DomainPoint> {
        let j = bil_rc(&self.gram, &self.b, w);
        if j.norm() == 0.0 {
            return Err(Error::OutsideDomain("line is orthogonal to b".into()));
        }
        let w: Vec<Complex64> = w.iter().map(|x| x / j).collect();
        // z_i from the V₀ Gram system (w, v_j) = Σ_i z_i (v_i, v_j)
        let n = self.n();
        let rhs: Vec<Complex64> = self.v0_basis.iter().map(|v| bil_rc(&self.gram, v, &w)).collect();
        let z: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|k| rhs[k] * self.v0_gram_inv[(i, k)]).sum())
            .collect();
        DomainPoint::new(self.clone(), z)
    }
}

/// Basis of {a, b}^⊥ from the projected standard vectors x − (x,b)a − (x,a)b.
fn complement_basis(gram: &[Vec<f64>], a: &[f64], b: &[f64]) -> Vec<Vec<f64>> {
    let l = gram.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..l {
        let mut e = vec![0.0; l];
        e[i] = 1.0;
        let xb = bil(gram, &e, b);
        let xa = bil(gram, &e, a);
        let x: Vec<f64> = (0..l).map(|r| e[r] - xb * a[r] - xa * b[r]).collect();
        // keep x if it is independent of what we have (Gram–Schmidt in the
        // Euclidean metric only for the rank test)
        let mut r = x.clone();
        for u in &out {
            let uu: f64 = u.iter().map(|t| t * t).sum();
            let ru: f64 = r.iter().zip(u).map(|(p, q)| p * q).sum();
            for k in 0..l {
                r[k] -= ru / uu * u[k];
            }
        }
        if r.iter().map(|t| t * t).sum::<f64>().sqrt() > 1e-8 {
            out.push(r);
        }
        if out.len() + 2 == l {
            break;
        }
    }
    out
}

/// A point z of the domain in V₀-coordinates with the cached isotropic
/// vector w(z) and |Y|² = −(Im w, Im w).
#[derive(Clone, Debug)]
pub struct DomainPoint {
    frame: Arc<IsotropicFrame>,
    z: Vec<Complex64>,
    w: Vec<Complex64>,
    y_norm2: f64,
}

impl DomainPoint {
    pub fn new(frame: Arc<IsotropicFrame>, z: Vec<Complex64>) -> Result<Self> {
        if z.len() != frame.n() {
            return Err(Error::InvalidInput(format!(
                "point needs {} coordinates, got {}",
                frame.n(),
                z.len()
            )));
        }
        let y: Vec<f64> = z.iter().map(|c| c.im).collect();
        let qy = frame.v0_q_real(&y);
        if !(qy < 0.0) {
            return Err(Error::OutsideDomain(format!("Q(Im z) = {qy} is not negative")));
        }
        if bil(&frame.v0_gram, &y, &frame.neg_dir) >= 0.0 {
            return Err(Error::Orientation("Im z lies in the opposite cone component".into()));
        }
        let zv = frame.v0_vector(&z);
        let qz = bil_c(&frame.gram, &zv, &zv) / 2.0;
        let w: Vec<Complex64> = (0..zv.len())
            .map(|r| zv[r] + frame.a[r] - qz * frame.b[r])
            .collect();
        let im: Vec<f64> = w.iter().map(|c| c.im).collect();
        let y_norm2 = -bil(&frame.gram, &im, &im);
        Ok(DomainPoint { frame, z, w, y_norm2 })
    }

    /// The point z = x + i·t·y₀ for the frame's reference direction y₀.
    pub fn on_reference_ray(frame: Arc<IsotropicFrame>, x: &[f64], t: f64) -> Result<Self> {
        let y0 = frame.reference_direction();
        let z = x.iter().zip(&y0).map(|(&xr, &yr)| Complex64::new(xr, t * yr)).collect();
        Self::new(frame, z)
    }

    pub fn frame(&self) -> &Arc<IsotropicFrame> {
        &self.frame
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn w(&self) -> &[Complex64] {
        &self.w
    }

    /// |Y|² = −(Y, Y) for Y = Im w(z).
    pub fn y_norm2(&self) -> f64 {
        self.y_norm2
    }

    /// Residuals (|Q(w)|, (w, w̄)) of the defining conditions.
    pub fn check(&self) -> (f64, f64) {
        let g = &self.frame.gram;
        let qw = bil_c(g, &self.w, &self.w).norm() / 2.0;
        let wbar: Vec<Complex64> = self.w.iter().map(|c| c.conj()).collect();
        (qw, bil_c(g, &self.w, &wbar).re)
    }

    /// Splits λ₁ ∈ V_{σ_1} into the components along and orthogonal to the
    /// negative plane spanned by Re w, Im w: returns (Q(λ_{1z⊥}), Q(λ_{1z})).
    pub fn split_embedded(&self, lam1: &[f64]) -> (f64, f64) {
        let g = &self.frame.gram;
        let x: Vec<f64> = self.w.iter().map(|c| c.re).collect();
        let y: Vec<f64> = self.w.iter().map(|c| c.im).collect();
        let yy = bil(g, &y, &y);
        let lx = bil(g, lam1, &x);
        let ly = bil(g, lam1, &y);
        let q_neg = (lx * lx + ly * ly) / (2.0 * yy);
        let q1 = bil(g, lam1, lam1) / 2.0;
        (q1 - q_neg, q_neg)
    }

    /// Real ℓ×ℓ matrix A₁ with λ^T A₁ λ = 2 (Q(λ_{z⊥}) − Q(λ_z)) at σ_1.
    pub fn majorant_gram_sigma1(&self) -> Vec<Vec<f64>> {
        let g = &self.frame.gram;
        let l = g.len();
        let x: Vec<f64> = self.w.iter().map(|c| c.re).collect();
        let y: Vec<f64> = self.w.iter().map(|c| c.im).collect();
        let yy = bil(g, &y, &y);
        let gx: Vec<f64> = (0..l).map(|i| (0..l).map(|j| g[i][j] * x[j]).sum()).collect();
        let gy: Vec<f64> = (0..l).map(|i| (0..l).map(|j| g[i][j] * y[j]).sum()).collect();
        (0..l)
            .map(|i| (0..l).map(|j| g[i][j] - 2.0 * (gx[i] * gx[j] + gy[i] * gy[j]) / yy).collect())
            .collect()
    }
}

/// Q-values of λ relative to z: `q_perp[k]` is Q(λ_{z⊥}) at σ_1 and
/// Q_k(σ_k λ) for k ≥ 2; `q_neg` is Q(λ_{1z}) ≤ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorantSplit {
    pub q_perp: Vec<f64>,
    pub q_neg: f64,
}

impl MajorantSplit {
    /// Σ_k v_k q_perp[k] − v_1 q_neg: the exponent of the Gaussian weight
    /// divided by 2π.
    pub fn majorant(&self, v: &[f64]) -> f64 {
        self.q_perp.iter().zip(v).map(|(q, vk)| q * vk).sum::<f64>() - v[0] * self.q_neg
    }
}

/// Splits a lattice vector (flattened coordinates) relative to z.
pub fn majorant_split(space: &QuadraticSpace, lambda: &[Rat], z: &DomainPoint) -> MajorantSplit {
    let d = space.field().degree();
    let mut q_perp = Vec::with_capacity(d);
    let lam1 = space.embed_vector(lambda, 0);
    let (p1, q_neg) = z.split_embedded(&lam1);
    q_perp.push(p1);
    for k in 1..d {
        let lk = space.embed_vector(lambda, k);
        q_perp.push(bil(space.gram_embedded(k), &lk, &lk) / 2.0);
    }
    MajorantSplit { q_perp, q_neg }
}

/// Matrix A on flattened coordinates with x^T A x = 2 Σ_k v_k maj_k(x), where
/// maj_1 = Q(x_{z⊥}) − Q(x_z) and maj_k = Q_k for k ≥ 2.
pub fn majorant_gram(space: &QuadraticSpace, z: &DomainPoint, v: &[f64]) -> Vec<Vec<f64>> {
    let d = space.field().degree();
    let r = space.qdim();
    let mut out = vec![vec![0.0; r]; r];
    for k in 0..d {
        let ak: Vec<Vec<f64>> = if k == 0 {
            z.majorant_gram_sigma1()
        } else {
            space.gram_embedded(k).to_vec()
        };
        let e = space.embedding_matrix(k);
        let l = ak.len();
        // E A E^T
        let ea: Vec<Vec<f64>> = e
            .iter()
            .map(|row| (0..l).map(|j| (0..l).map(|i| row[i] * ak[i][j]).sum()).collect())
            .collect();
        for p in 0..r {
            for q in 0..r {
                let s: f64 = (0..l).map(|j| ea[p][j] * e[q][j]).sum();
                out[p][q] += v[k] * s;
            }
        }
    }
    out
}

/// |Y|^{weight}: the factor turning |Ψ(z)| into the Petersson norm of a
/// form of the given weight.
pub fn petersson_factor(z: &DomainPoint, weight: f64) -> f64 {
    z.y_norm2().powf(weight / 2.0)
}

/// An F-linear isometry of V given by its matrix on F-coordinates
/// (acting on column vectors).
#[derive(Clone, Debug)]
pub struct Isometry {
    space: Arc<QuadraticSpace>,
    mat: Vec<Vec<FieldElement>>,
}

impl Isometry {
    /// Checks γ^T G γ = G exactly.
    pub fn new(space: Arc<QuadraticSpace>, mat: Vec<Vec<FieldElement>>) -> Result<Self> {
        let l = space.rank();
        let f = space.field();
        if mat.len() != l || mat.iter().any(|r| r.len() != l) {
            return Err(Error::InvalidInput(format!("isometry must be {l}×{l}")));
        }
        let g = space.gram();
        for i in 0..l {
            for j in 0..l {
                let mut s = FieldElement::zero(f.degree());
                for p in 0..l {
                    for q in 0..l {
                        let t = f.mul(&f.mul(&mat[p][i], &g[p][q]), &mat[q][j]);
                        s = s.add(&t);
                    }
                }
                if s != g[i][j] {
                    return Err(Error::InvalidInput(format!(
                        "matrix does not preserve the quadratic form (entry {i},{j})"
                    )));
                }
            }
        }
        Ok(Isometry { space, mat })
    }

    /// Isometry with rational entries.
    pub fn from_rational(space: Arc<QuadraticSpace>, m: &QMat) -> Result<Self> {
        let f = space.field().clone();
        let mat = m
            .iter()
            .map(|r| r.iter().map(|x| f.from_rational(x)).collect())
            .collect();
        Self::new(space, mat)
    }

    pub fn matrix(&self) -> &[Vec<FieldElement>] {
        &self.mat
    }

    /// γ applied to a flattened vector.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        let f = self.space.field();
        let x = self.space.to_field_coords(v);
        let l = x.len();
        let y: Vec<FieldElement> = (0..l)
            .map(|i| {
                (0..l).fold(FieldElement::zero(f.degree()), |acc, j| {
                    acc.add(&f.mul(&self.mat[i][j], &x[j]))
                })
            })
            .collect();
        self.space.from_field_coords(&y)
    }

    /// True if γL = L.
    pub fn preserves(&self, lat: &OFLattice) -> bool {
        let fwd = lat.basis().iter().all(|b| lat.contains(&self.apply(b)));
        let image: QMat = lat.basis().iter().map(|b| self.apply(b)).collect();
        fwd && qmat::det(&image).abs() == qmat::det(lat.basis()).abs()
    }

    /// σ_k(γ) as a real matrix.
    pub fn embedded(&self, k: usize) -> Vec<Vec<f64>> {
        let f = self.space.field();
        self.mat
            .iter()
            .map(|r| r.iter().map(|x| f.embed_k(x, k)).collect())
            .collect()
    }
}

/// j(γ, z) = (γ w(z), b) and the image point γz, defined by
/// γ w(z) = j(γ, z) w(γz).
pub fn automorphy_j(gamma: &Isometry, z: &DomainPoint) -> Result<(Complex64, DomainPoint)> {
    let g1 = gamma.embedded(0);
    let w = z.w();
    let gw: Vec<Complex64> = g1
        .iter()
        .map(|row| row.iter().zip(w).map(|(a, x)| x * *a).sum())
        .collect();
    let frame = z.frame();
    let j = bil_rc(frame.gram(), frame.b(), &gw);
    let image = frame.point_from_line(&gw)?;
    Ok((j, image))
}
