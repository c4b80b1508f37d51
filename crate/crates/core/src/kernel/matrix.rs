//! Determinants of small matrices with polynomial entries.

use std::sync::Arc;

use super::poly::Polynomial;

/// Fraction-free Gaussian elimination (Bareiss); every division is exact.
pub fn det_bareiss(vars: &Arc<[String]>, matrix: &[Vec<Polynomial>]) -> Polynomial {
    let n = matrix.len();
    if n == 0 {
        return Polynomial::one(vars);
    }
    let mut m: Vec<Vec<Polynomial>> = matrix.to_vec();
    let mut negate = false;
    let mut prev = Polynomial::one(vars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return Polynomial::zero(vars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss quotients are exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}
