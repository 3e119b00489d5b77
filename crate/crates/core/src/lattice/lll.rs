//! LLL reduction of a positive definite Gram matrix (floating point), used to
//! precondition enumeration.

/// Returns a unimodular integer matrix `u` (rows are the new basis vectors in
/// terms of the old ones) such that `u m u^T` is LLL-reduced with δ = 0.99.
pub fn lll_gram(m: &[Vec<f64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    if n <= 1 {
        return u;
    }
    let gram_of = |u: &Vec<Vec<i64>>| -> Vec<Vec<f64>> {
        let mut g = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for a in 0..n {
                    if u[i][a] == 0 {
                        continue;
                    }
                    let mut t = 0.0;
                    for b in 0..n {
                        t += m[a][b] * u[j][b] as f64;
                    }
                    s += u[i][a] as f64 * t;
                }
                g[i][j] = s;
                g[j][i] = s;
            }
        }
        g
    };
    let gso = |g: &Vec<Vec<f64>>| -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut mu = vec![vec![0.0; n]; n];
        let mut bstar = vec![0.0; n];
        for i in 0..n {
            for j in 0..i {
                let mut s = g[i][j];
                for k in 0..j {
                    s -= mu[j][k] * mu[i][k] * bstar[k];
                }
                mu[i][j] = s / bstar[j];
            }
            let mut s = g[i][i];
            for k in 0..i {
                s -= mu[i][k] * mu[i][k] * bstar[k];
            }
            bstar[i] = s;
        }
        (mu, bstar)
    };
    let delta = 0.99;
    let mut k = 1;
    let mut iterations = 0usize;
    while k < n && iterations < 100_000 {
        iterations += 1;
        let g = gram_of(&u);
        let (mu, _) = gso(&g);
        // size-reduce b_k
        let mut changed = false;
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                for a in 0..n {
                    u[k][a] -= qi * u[j][a];
                }
                changed = true;
            }
        }
        let (mu, bstar) = if changed { gso(&gram_of(&u)) } else { gso(&g) };
        if bstar[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_skewed_basis() {
        // basis (1, 0), (100, 1) of Z^2 with the standard form
        let m = vec![vec![1.0, 100.0], vec![100.0, 10001.0]];
        let u = lll_gram(&m);
        let mut g = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        g[i][j] += u[i][a] as f64 * m[a][b] * u[j][b] as f64;
                    }
                }
            }
        }
        assert_eq!(g[0][0], 1.0);
        assert_eq!(g[1][1], 1.0);
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        assert_eq!(det.abs(), 1);
    }
}
