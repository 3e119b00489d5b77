//! Smith normal form over the integers with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;

/// Result of `smith`: `u * a * v == diag(d)` with `d[i] | d[i+1]`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IMat,
    pub v: IMat,
    pub d: Vec<BigInt>,
}

fn ident(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn row_addmul(m: &mut IMat, dst: usize, src: usize, f: &BigInt) {
    let (a, b) = if dst < src {
        let (x, y) = m.split_at_mut(src);
        (&mut x[dst], &y[0])
    } else {
        let (x, y) = m.split_at_mut(dst);
        (&mut y[0], &x[src])
    };
    for (t, s) in a.iter_mut().zip(b.iter()) {
        *t += f * s;
    }
}

fn col_addmul(m: &mut IMat, dst: usize, src: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] += f * s;
    }
}

fn col_swap(m: &mut IMat, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// Smith normal form of a square integer matrix.
pub fn smith(a: &IMat) -> Smith {
    let n = a.len();
    let mut m = a.clone();
    let mut u = ident(n);
    let mut v = ident(n);
    for t in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !m[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            m.swap(t, pi);
            u.swap(t, pi);
            col_swap(&mut m, t, pj);
            col_swap(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..n {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = -m[i][t].div_floor(&m[t][t]);
                row_addmul(&mut m, i, t, &q);
                row_addmul(&mut u, i, t, &q);
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = -m[t][j].div_floor(&m[t][t]);
                col_addmul(&mut m, j, t, &q);
                col_addmul(&mut v, j, t, &q);
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let mut bad = None;
            'outer: for i in t + 1..n {
                for j in t + 1..n {
                    if !(&m[i][j] % &m[t][t]).is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    row_addmul(&mut m, t, i, &one);
                    row_addmul(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let d = (0..n).map(|i| m[i][i].clone()).collect();
    Smith { u, v, d }
}
