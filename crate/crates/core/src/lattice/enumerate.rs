//! Fincke–Pohst enumeration of shifted lattice points in an ellipsoid.
//!
//! Points are p = x + c with x ∈ Z^r in lattice coordinates and a fixed
//! rational shift c (a coset representative). The quadratic form is
//! LLL-preconditioned: x = y U with U unimodular, and the search runs over y.
//! Work is split into shards by the value of the last y-coordinate; shard
//! results come back in increasing order of that value, which makes any
//! subsequent sum independent of the thread count.

use num_integer::Roots;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::lattice::{lll, DiscriminantGroup, OFLattice};
use crate::par;
use crate::qmat::{self, QMat, Rat};

/// Quadratic polynomial y ↦ y A y^T + 2 b·y + k in enumeration coordinates.
#[derive(Clone, Debug)]
pub struct QuadraticInY {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub k: f64,
}

impl QuadraticInY {
    pub fn eval(&self, y: &[i64]) -> f64 {
        let mut s = self.k;
        for i in 0..y.len() {
            let yi = y[i] as f64;
            let mut t = 2.0 * self.b[i];
            for j in 0..y.len() {
                t += self.a[i][j] * y[j] as f64;
            }
            s += yi * t;
        }
        s
    }
}

/// Exact integer quadratic with a target value: (y A y^T + 2 b·y + k) == t.
#[derive(Clone, Debug)]
struct IntQuadratic {
    a: Vec<Vec<i128>>,
    b: Vec<i128>,
    k: i128,
    target: i128,
}

impl IntQuadratic {
    fn eval(&self, y: &[i64]) -> i128 {
        let mut s = self.k;
        for i in 0..y.len() {
            let yi = y[i] as i128;
            let mut t = 2 * self.b[i];
            for j in 0..y.len() {
                t += self.a[i][j] * y[j] as i128;
            }
            s += yi * t;
        }
        s
    }

    fn holds(&self, y: &[i64]) -> bool {
        self.eval(y) == self.target
    }
}

/// Exact level-set constraint Q(p) = m, solved for the innermost coordinate.
#[derive(Clone, Debug)]
pub struct LevelSet {
    trace: IntQuadratic,
    coords: Vec<IntQuadratic>,
}

/// Lattice-point enumerator for a fixed positive definite form and shift.
#[derive(Clone, Debug)]
pub struct Enumerator {
    r: usize,
    u: Vec<Vec<i64>>,
    /// Shift in lattice coordinates.
    shift: Vec<Rat>,
    /// Shift in enumeration coordinates.
    shift_y: Vec<f64>,
    q_diag: Vec<f64>,
    q_off: Vec<Vec<f64>>,
    det: f64,
    max_points: f64,
}

fn to_i128(x: &Rat) -> Result<i128> {
    x.to_integer()
        .to_i128()
        .ok_or_else(|| Error::Budget("exact arithmetic exceeds 128 bits".into()))
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let s = (n as u128).sqrt() as i128;
    (s * s == n).then_some(s)
}

impl Enumerator {
    /// `m` is the positive definite form in lattice coordinates (value
    /// p m p^T), `shift` the rational offset c.
    pub fn new(m: &[Vec<f64>], shift: &[Rat]) -> Result<Self> {
        let r = m.len();
        if shift.len() != r {
            return Err(Error::InvalidInput("shift has wrong length".into()));
        }
        let u = lll::lll_gram(m);
        let mut mr = vec![vec![0.0; r]; r];
        for i in 0..r {
            for j in 0..r {
                let mut s = 0.0;
                for a in 0..r {
                    if u[i][a] == 0 {
                        continue;
                    }
                    for b in 0..r {
                        s += u[i][a] as f64 * m[a][b] * u[j][b] as f64;
                    }
                }
                mr[i][j] = s;
            }
        }
        // Cholesky in Fincke–Pohst form
        let mut q = mr.clone();
        let scale = (0..r).map(|i| mr[i][i].abs()).fold(0.0, f64::max).max(1e-300);
        for i in 0..r {
            if q[i][i] <= 1e-13 * scale {
                return Err(Error::InvalidInput("majorant is not positive definite".into()));
            }
            for j in i + 1..r {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..r {
                for l in k..r {
                    q[k][l] -= q[k][i] * q[i][l];
                }
            }
        }
        let q_diag: Vec<f64> = (0..r).map(|i| q[i][i]).collect();
        let q_off: Vec<Vec<f64>> = (0..r)
            .map(|i| (0..r).map(|j| if j > i { q[i][j] } else { 0.0 }).collect())
            .collect();
        let det = q_diag.iter().product();
        let u_rat: QMat = u
            .iter()
            .map(|row| row.iter().map(|&v| qmat::rat(v)).collect())
            .collect();
        let uinv = qmat::inverse(&u_rat)?;
        let shift_y: Vec<f64> = qmat::vec_mul(shift, &uinv).iter().map(qmat::to_f64).collect();
        Ok(Enumerator {
            r,
            u,
            shift: shift.to_vec(),
            shift_y,
            q_diag,
            q_off,
            det,
            max_points: 5e8,
        })
    }

    /// Cap on the predicted number of visited points.
    pub fn with_max_points(mut self, n: f64) -> Self {
        self.max_points = n;
        self
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// Determinant of the form.
    pub fn det(&self) -> f64 {
        self.det
    }

    /// Half the diameter of the Babai cell of the reduced basis: every point
    /// of space is within this distance of some lattice point.
    pub fn covering_radius_bound(&self) -> f64 {
        0.5 * self.q_diag.iter().sum::<f64>().sqrt()
    }

    /// Upper bound for the number of points with form value ≤ t.
    pub fn count_bound(&self, t: f64) -> f64 {
        let rr = self.r as f64;
        let vol = std::f64::consts::PI.powf(rr / 2.0) / crate::specfun::gamma(rr / 2.0 + 1.0);
        vol * (t.max(0.0).sqrt() + self.covering_radius_bound()).powf(rr) / self.det.sqrt()
    }

    /// Integer lattice coordinates x = y U.
    pub fn lattice_coords(&self, y: &[i64]) -> Vec<i64> {
        let mut x = vec![0i64; self.r];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0 {
                continue;
            }
            for j in 0..self.r {
                x[j] += yi * self.u[i][j];
            }
        }
        x
    }

    /// The point p = x + c in lattice coordinates.
    pub fn point(&self, y: &[i64]) -> Vec<Rat> {
        self.lattice_coords(y)
            .iter()
            .zip(&self.shift)
            .map(|(&x, c)| qmat::rat(x) + c)
            .collect()
    }

    /// Linear functional p ↦ g·p in enumeration coordinates: (U g, g·c).
    pub fn pull_linear(&self, g: &[f64]) -> (Vec<f64>, f64) {
        let ug = (0..self.r)
            .map(|i| (0..self.r).map(|j| self.u[i][j] as f64 * g[j]).sum())
            .collect();
        let off = self.shift.iter().zip(g).map(|(c, x)| qmat::to_f64(c) * x).sum();
        (ug, off)
    }

    /// Quadratic p ↦ p A p^T in enumeration coordinates.
    pub fn pull_quadratic(&self, a: &[Vec<f64>]) -> QuadraticInY {
        let r = self.r;
        let c: Vec<f64> = self.shift.iter().map(qmat::to_f64).collect();
        let ua: Vec<Vec<f64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| (0..r).map(|t| self.u[i][t] as f64 * a[t][j]).sum())
                    .collect()
            })
            .collect();
        let qa = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| (0..r).map(|t| ua[i][t] * self.u[j][t] as f64).sum())
                    .collect()
            })
            .collect();
        let b = (0..r).map(|i| (0..r).map(|t| ua[i][t] * c[t]).sum()).collect();
        let k = (0..r)
            .map(|s| (0..r).map(|t| c[s] * a[s][t] * c[t]).sum::<f64>())
            .sum();
        QuadraticInY { a: qa, b, k }
    }

    fn pull_exact(&self, a: &QMat, target: &Rat) -> Result<IntQuadratic> {
        let r = self.r;
        let u: QMat = self
            .u
            .iter()
            .map(|row| row.iter().map(|&v| qmat::rat(v)).collect())
            .collect();
        let ua = qmat::mul(&u, a);
        let qa = qmat::mul(&ua, &qmat::transpose(&u));
        let b: Vec<Rat> = ua.iter().map(|row| qmat::dot(row, &self.shift)).collect();
        let k = qmat::bilinear(&self.shift, a, &self.shift);
        let den = qmat::common_denominator(
            qa.iter()
                .flatten()
                .chain(b.iter())
                .chain(std::iter::once(&k))
                .chain(std::iter::once(target)),
        );
        let dr = Rat::from_integer(den);
        let mut ai = vec![vec![0i128; r]; r];
        for i in 0..r {
            for j in 0..r {
                ai[i][j] = to_i128(&(&qa[i][j] * &dr))?;
            }
        }
        Ok(IntQuadratic {
            a: ai,
            b: b.iter().map(|x| to_i128(&(x * &dr))).collect::<Result<_>>()?,
            k: to_i128(&(&k * &dr))?,
            target: to_i128(&(target * &dr))?,
        })
    }

    /// Constraint Q(λ) = m for λ = (x + c)·basis of `lat`.
    pub fn level_set(&self, lat: &OFLattice, m: &FieldElement) -> Result<LevelSet> {
        let space = lat.space();
        let f = space.field();
        let half = qmat::ratio(1, 2);
        let scale = |a: &QMat| -> QMat {
            a.iter().map(|r| r.iter().map(|x| x * &half).collect()).collect()
        };
        let bt = qmat::transpose(lat.basis());
        let trace = self.pull_exact(&scale(lat.tr_gram()), &f.trace(m))?;
        let coords = space
            .coord_forms()
            .iter()
            .zip(&m.0)
            .map(|(form, mc)| {
                let g = qmat::mul(&qmat::mul(lat.basis(), form), &bt);
                self.pull_exact(&scale(&g), mc)
            })
            .collect::<Result<_>>()?;
        Ok(LevelSet { trace, coords })
    }

    /// Visit every point with form value ≤ bound (and on the level set, when
    /// given). Returns one accumulator per shard, ordered by shard.
    pub fn map_shards<T, I, F>(
        &self,
        bound: f64,
        level: Option<&LevelSet>,
        init: I,
        visit: F,
    ) -> Result<Vec<T>>
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(&mut T, &[i64]) + Sync + Send,
    {
        if bound < 0.0 || self.r == 0 {
            return Ok(Vec::new());
        }
        let predicted = self.count_bound(bound);
        if predicted > self.max_points {
            return Err(Error::Budget(format!(
                "about {predicted:.3e} lattice points inside the bound"
            )));
        }
        let bound = bound * (1.0 + 1e-10) + 1e-12;
        let r = self.r;
        let top = r - 1;
        let (lo, hi) = self.range(top, 0.0, bound, &vec![0; r]);
        if r == 1 {
            let mut acc = init();
            let mut y = vec![0i64];
            match level {
                Some(ls) => {
                    for v in self.solve_innermost(ls, &mut y, lo, hi) {
                        y[0] = v;
                        visit(&mut acc, &y);
                    }
                }
                None => {
                    for v in lo..=hi {
                        y[0] = v;
                        visit(&mut acc, &y);
                    }
                }
            }
            return Ok(vec![acc]);
        }
        let values: Vec<i64> = if hi >= lo { (lo..=hi).collect() } else { Vec::new() };
        let out = par::map_slice(&values, |&v| {
            let mut acc = init();
            let mut y = vec![0i64; r];
            y[top] = v;
            let center = -self.shift_y[top];
            let z = v as f64 - center;
            let partial = self.q_diag[top] * z * z;
            self.recurse(top - 1, &mut y, partial, bound, level, &mut acc, &visit);
            acc
        });
        Ok(out)
    }

    fn center(&self, i: usize, y: &[i64]) -> f64 {
        let mut s = self.shift_y[i];
        for j in i + 1..self.r {
            s += self.q_off[i][j] * (y[j] as f64 + self.shift_y[j]);
        }
        -s
    }

    fn range(&self, i: usize, partial: f64, bound: f64, y: &[i64]) -> (i64, i64) {
        let rem = bound - partial;
        if rem < 0.0 {
            return (1, 0);
        }
        let c = self.center(i, y);
        let rad = (rem / self.q_diag[i]).sqrt();
        ((c - rad - 1e-9).ceil() as i64, (c + rad + 1e-9).floor() as i64)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<T, F>(
        &self,
        i: usize,
        y: &mut [i64],
        partial: f64,
        bound: f64,
        level: Option<&LevelSet>,
        acc: &mut T,
        visit: &F,
    ) where
        F: Fn(&mut T, &[i64]),
    {
        let (lo, hi) = self.range(i, partial, bound, y);
        if hi < lo {
            return;
        }
        if i == 0 {
            match level {
                Some(ls) => {
                    for v in self.solve_innermost(ls, y, lo, hi) {
                        y[0] = v;
                        visit(acc, y);
                    }
                }
                None => {
                    for v in lo..=hi {
                        y[0] = v;
                        visit(acc, y);
                    }
                }
            }
            return;
        }
        let c = self.center(i, y);
        for v in lo..=hi {
            y[i] = v;
            let z = v as f64 - c;
            self.recurse(i - 1, y, partial + self.q_diag[i] * z * z, bound, level, acc, visit);
        }
    }

    /// Integer solutions y_0 ∈ [lo, hi] of the level constraint, given the
    /// other coordinates.
    fn solve_innermost(&self, ls: &LevelSet, y: &mut [i64], lo: i64, hi: i64) -> Vec<i64> {
        let q = &ls.trace;
        let r = self.r;
        let alpha = q.a[0][0];
        let mut beta = 2 * q.b[0];
        for j in 1..r {
            beta += 2 * q.a[0][j] * y[j] as i128;
        }
        y[0] = 0;
        let gamma = q.eval(y) - q.target;
        let mut cands: Vec<i64> = Vec::new();
        if alpha != 0 {
            let disc = beta * beta - 4 * alpha * gamma;
            if let Some(s) = isqrt(disc) {
                for num in [-beta - s, -beta + s] {
                    if num % (2 * alpha) == 0 {
                        cands.push((num / (2 * alpha)) as i64);
                    }
                }
            }
        } else if beta != 0 {
            if gamma % beta == 0 {
                cands.push((-gamma / beta) as i64);
            }
        } else if gamma == 0 {
            cands.extend(lo..=hi);
        }
        cands.sort_unstable();
        cands.dedup();
        cands.retain(|&v| {
            if v < lo || v > hi {
                return false;
            }
            y[0] = v;
            ls.trace.holds(y) && ls.coords.iter().all(|c| c.holds(y))
        });
        cands
    }

    /// All points (lattice coordinates of x) with form value ≤ bound, in
    /// enumeration order.
    pub fn collect(&self, bound: f64, level: Option<&LevelSet>) -> Result<Vec<Vec<i64>>> {
        let shards = self.map_shards(bound, level, Vec::new, |acc: &mut Vec<Vec<i64>>, y| {
            acc.push(y.to_vec())
        })?;
        Ok(shards.into_iter().flatten().collect())
    }
}

/// Vectors λ ∈ μ + L with majorant value ≤ bound (exactly confirmed against
/// a direct evaluation of the form), as lattice coordinates p = x + μ.
pub fn enumerate_majorant(
    dg: &DiscriminantGroup,
    coset: usize,
    majorant: &[Vec<f64>],
    bound: f64,
) -> Result<Vec<Vec<Rat>>> {
    let en = Enumerator::new(majorant, dg.rep_coords(coset))?;
    let form = en.pull_quadratic(majorant);
    let ys = en.collect(bound, None)?;
    Ok(ys
        .into_iter()
        .filter(|y| form.eval(y) <= bound * (1.0 + 1e-12) + 1e-12)
        .map(|y| en.point(&y))
        .collect())
}
