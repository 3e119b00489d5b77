//! Dense matrices over the rationals, used for exact lattice bookkeeping.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;
pub type QMat = Vec<Vec<Rat>>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn zeros(r: usize, c: usize) -> QMat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn identity(n: usize) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn transpose(a: &QMat) -> QMat {
    if a.is_empty() {
        return Vec::new();
    }
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn mul(a: &QMat, b: &QMat) -> QMat {
    let r = a.len();
    let k = b.len();
    let c = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(r, c);
    for i in 0..r {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..c {
                if !b[t][j].is_zero() {
                    out[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    out
}

/// Row vector times matrix.
pub fn vec_mul(v: &[Rat], a: &QMat) -> Vec<Rat> {
    let c = if a.is_empty() { 0 } else { a[0].len() };
    let mut out = vec![Rat::zero(); c];
    for (t, vt) in v.iter().enumerate() {
        if vt.is_zero() {
            continue;
        }
        for j in 0..c {
            if !a[t][j].is_zero() {
                out[j] += vt * &a[t][j];
            }
        }
    }
    out
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// x^T A y.
pub fn bilinear(x: &[Rat], a: &QMat, y: &[Rat]) -> Rat {
    let ay: Vec<Rat> = a.iter().map(|row| dot(row, y)).collect();
    dot(x, &ay)
}

pub fn det(a: &QMat) -> Rat {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Rat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if p != col {
            m.swap(p, col);
            d = -d;
        }
        let piv = m[col][col].clone();
        d *= &piv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &piv;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    d
}

pub fn inverse(a: &QMat) -> Result<QMat> {
    let n = a.len();
    let mut m: QMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Singular("matrix is not invertible".into()))?;
        m.swap(p, col);
        let piv = m[col][col].clone();
        for c in 0..2 * n {
            m[col][c] = &m[col][c] / &piv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..2 * n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn is_integral(m: &QMat) -> bool {
    m.iter().all(|r| r.iter().all(|x| x.is_integer()))
}

pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator overflow f64: scale down
        let n = x.numer().bits() as i64;
        let d = x.denom().bits() as i64;
        let shift = (n - d).max(0) as u64;
        let scaled = x / Rat::from_integer(BigInt::one() << shift);
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

pub fn mat_to_f64(m: &QMat) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(to_f64).collect()).collect()
}

/// Least common multiple of all denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Parse "p", "p/q" or a decimal string such as "-0.25".
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rat::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip_abs.is_empty() { "0" } else { ip_abs }, fp);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rat::new(n, d);
        return Some(if neg { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(Rat::from_integer)
}

pub fn abs_max(m: &QMat) -> Rat {
    m.iter()
        .flat_map(|r| r.iter())
        .fold(Rat::zero(), |acc, x| if x.abs() > acc { x.abs() } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a = vec![
            vec![rat(2), rat(1), rat(0)],
            vec![rat(1), rat(3), rat(1)],
            vec![rat(0), rat(1), rat(4)],
        ];
        let inv = inverse(&a).unwrap();
        assert_eq!(mul(&a, &inv), identity(3));
        assert_eq!(det(&a), rat(18));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse_rat("-0.25"), Some(ratio(-1, 4)));
        assert_eq!(parse_rat("7"), Some(rat(7)));
        assert_eq!(parse_rat("1/0"), None);
    }
}
