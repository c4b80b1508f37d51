//! Resultants and subresultants with respect to one variable of a
//! multivariate polynomial ring.

use super::matrix::det_bareiss;
use super::poly::{Monomial, Polynomial};
use super::KernelError;

fn degree(p: &Polynomial, var: usize) -> Option<u32> {
    if p.is_zero() {
        None
    } else {
        p.degree_in(var)
    }
}

fn var_power(p: &Polynomial, var: usize, e: u32) -> Polynomial {
    let mut m = Monomial::one(p.nvars());
    m.0[var] = e;
    Polynomial::term(p.vars(), m, num_traits::One::one())
}

/// Pseudo-remainder of `a` by `b` in `var`: `lc(b)^(deg a - deg b + 1) * a mod b`.
pub fn pseudo_remainder(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let db = degree(b, var).expect("nonzero divisor");
    let lcb = b.lead_coefficient_in(var);
    let da = match degree(a, var) {
        Some(d) => d,
        None => return a.clone(),
    };
    if da < db {
        return a.clone();
    }
    let mut e = da - db + 1;
    let mut r = a.clone();
    while let Some(dr) = degree(&r, var) {
        if dr < db {
            break;
        }
        let t = &r.lead_coefficient_in(var) * &var_power(&r, var, dr - db);
        r = &(&lcb * &r) - &(&t * b);
        e -= 1;
    }
    &lcb.pow(e) * &r
}

fn exact(num: &Polynomial, den: &Polynomial) -> Polynomial {
    num.div_exact(den).expect("subresultant quotient is exact")
}

/// Resultant of `p` and `q` with respect to variable `var`, computed with the
/// subresultant pseudo-remainder sequence. Agrees with the Sylvester
/// determinant.
pub fn resultant(p: &Polynomial, q: &Polynomial, var: usize) -> Result<Polynomial, KernelError> {
    if !p.same_ring(q) {
        return Err(KernelError::VariableMismatch { expected: p.vars().join(","), found: q.vars().join(",") });
    }
    let name = p.vars().get(var).cloned().unwrap_or_default();
    let (dp, dq) = match (degree(p, var), degree(q, var)) {
        (Some(a), Some(b)) if a > 0 && b > 0 => (a, b),
        _ => return Err(KernelError::DegreeZero(name)),
    };
    let vars = p.vars();
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut s_neg = false;
    if dp < dq {
        std::mem::swap(&mut a, &mut b);
        if dp % 2 == 1 && dq % 2 == 1 {
            s_neg = true;
        }
    }
    let mut g = Polynomial::one(vars);
    let mut h = Polynomial::one(vars);
    loop {
        let da = degree(&a, var).expect("nonzero");
        let db = degree(&b, var).expect("nonzero");
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s_neg = !s_neg;
        }
        let r = pseudo_remainder(&a, &b, var);
        a = b;
        b = exact(&r, &(&g * &h.pow(delta)));
        g = a.lead_coefficient_in(var);
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => exact(&g.pow(delta), &h.pow(delta - 1)),
        };
        match degree(&b, var) {
            None => return Ok(Polynomial::zero(vars)),
            Some(0) => break,
            Some(_) => {}
        }
    }
    let da = degree(&a, var).expect("nonzero");
    // b is free of var here
    let res = if da == 1 { b } else { exact(&b.pow(da), &h.pow(da - 1)) };
    Ok(if s_neg { -res } else { res })
}

/// Sylvester matrix of `p` (degree m) and `q` (degree n) in `var`; rows are
/// n shifts of `p` followed by m shifts of `q`, columns by decreasing power.
pub fn sylvester_matrix(p: &Polynomial, q: &Polynomial, var: usize) -> Vec<Vec<Polynomial>> {
    let cp = p.coefficients_in(var);
    let cq = q.coefficients_in(var);
    let m = cp.len() - 1;
    let n = cq.len() - 1;
    let size = m + n;
    let zero = Polynomial::zero(p.vars());
    let mut rows = Vec::with_capacity(size);
    for k in 0..n {
        let mut row = vec![zero.clone(); size];
        for (j, c) in cp.iter().rev().enumerate() {
            row[k + j] = c.clone();
        }
        rows.push(row);
    }
    for k in 0..m {
        let mut row = vec![zero.clone(); size];
        for (j, c) in cq.iter().rev().enumerate() {
            row[k + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// The `j`-th subresultant polynomial of `p`, `q` in `var`, as a
/// determinant polynomial of the truncated Sylvester matrix. Its degree in
/// `var` is at most `j`; `S_0` is the resultant.
pub fn subresultant(p: &Polynomial, q: &Polynomial, var: usize, j: usize) -> Result<Polynomial, KernelError> {
    let name = p.vars().get(var).cloned().unwrap_or_default();
    let (m, n) = match (degree(p, var), degree(q, var)) {
        (Some(a), Some(b)) if a > 0 && b > 0 => (a as usize, b as usize),
        _ => return Err(KernelError::DegreeZero(name)),
    };
    if j >= m.min(n) {
        return Err(KernelError::InvalidWindow(format!("subresultant index {j} must be below min degree {}", m.min(n))));
    }
    let cp = p.coefficients_in(var);
    let cq = q.coefficients_in(var);
    let zero = Polynomial::zero(p.vars());
    let cols = m + n - j;
    let mut rows = Vec::new();
    // row for x^k * p, k = n-j-1 .. 0, laid out by decreasing power x^(cols-1) .. x^0
    for k in (0..n - j).rev() {
        let mut row = vec![zero.clone(); cols];
        for (e, c) in cp.iter().enumerate() {
            row[cols - 1 - (e + k)] = c.clone();
        }
        rows.push(row);
    }
    for k in (0..m - j).rev() {
        let mut row = vec![zero.clone(); cols];
        for (e, c) in cq.iter().enumerate() {
            row[cols - 1 - (e + k)] = c.clone();
        }
        rows.push(row);
    }
    let size = rows.len();
    let mut out = Polynomial::zero(p.vars());
    for i in 0..=j {
        let col = cols - 1 - i;
        let mat: Vec<Vec<Polynomial>> = rows
            .iter()
            .map(|r| {
                let mut sel: Vec<Polynomial> = r[..size - 1].to_vec();
                sel.push(r[col].clone());
                sel
            })
            .collect();
        let d = det_bareiss(p.vars(), &mat);
        out = &out + &(&d * &var_power(p, var, i as u32));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::poly::var_list;

    fn e(s: &str, v: &[&str]) -> Polynomial {
        Polynomial::parse(s, &var_list(v)).unwrap()
    }

    #[test]
    fn small_resultants() {
        let v = ["z", "a"];
        assert_eq!(resultant(&e("z^2 - a", &v), &e("z", &v), 0).unwrap(), e("-a", &v));
        assert!(resultant(&e("z - 1", &v), &e("z - 1", &v), 0).unwrap().is_zero());
        assert!(matches!(resultant(&e("a", &v), &e("z", &v), 0), Err(KernelError::DegreeZero(_))));
    }

    #[test]
    fn cusp_resultant() {
        let v = ["z", "t", "l"];
        let r = resultant(&e("z^3 + t*z - l", &v), &e("3*z^2 + t", &v), 0).unwrap();
        assert_eq!(r, e("4*t^3 + 27*l^2", &v));
    }

    #[test]
    fn subresultant_zero_is_resultant() {
        let v = ["w", "u"];
        let p = e("w^2 + u*w - 3", &v);
        let q = e("2*w^3 - u^2*w + 1", &v);
        assert_eq!(subresultant(&p, &q, 0, 0).unwrap(), resultant(&p, &q, 0).unwrap());
    }

    #[test]
    fn first_subresultant_gives_common_root() {
        // common root w = 2 when u = 1
        let v = ["w", "u"];
        let p = e("w^2 - u - 3", &v);
        let q = e("w^2 - 3*w + u + 1", &v);
        let s1 = subresultant(&p, &q, 0, 1).unwrap();
        let one = crate::kernel::Rational::from_integer(1.into());
        let s = s1.substitute(1, &one);
        let c = s.coefficients_in(0);
        let root = -c[0].constant_term() / c[1].constant_term();
        assert_eq!(root, crate::kernel::Rational::from_integer(2.into()));
    }
}
