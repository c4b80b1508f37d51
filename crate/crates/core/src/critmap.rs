//! Critical-locus equations of an unfolding, the projection to parameter
//! space in chart coordinates, and the jacobian/hessian identity.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::matrix::det_bareiss;
use crate::kernel::univariate::sign;
use crate::kernel::{var_list, Polynomial, Rational};
use crate::milnor::Unfolding;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CritError {
    #[error("germ has order {0}; the critical system needs order at least 3")]
    OrderTooLow(u32),
    #[error("critical equation {0} is not of the form t_i + (terms free of t_1..t_n)")]
    NotLinearInParameters(usize),
    #[error("hessian determinant vanishes: degenerate critical point")]
    DegeneratePoint,
    #[error("jacobian block structure violated at entry ({0}, {1})")]
    BlockStructure(usize, usize),
}

#[derive(Clone, Debug)]
pub struct CriticalSystem {
    /// `∂F/∂z_i` over the unfolding variables.
    pub equations: Vec<Polynomial>,
    /// Chart coordinates `(z_1..z_n, t_{n+1}..t_{μ-1})` on the critical locus.
    pub chart_vars: Arc<[String]>,
    /// The `μ-1` components of the projection in chart coordinates.
    pub chart_map: Vec<Polynomial>,
}

#[derive(Clone, Debug)]
pub struct HessianData {
    pub h_matrix: Vec<Vec<Polynomial>>,
    pub h: Polynomial,
}

/// Both sides of `jac(p∘ν) = (-1)^n h_z(F)` in chart coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct JacobianProof {
    pub n: usize,
    pub jacobian: String,
    pub signed_hessian: String,
    pub holds: bool,
    #[serde(skip)]
    pub lhs: Polynomial,
    #[serde(skip)]
    pub rhs: Polynomial,
}

pub fn chart_vars(u: &Unfolding) -> Arc<[String]> {
    let n = u.n();
    let names: Vec<String> = u.vars().iter().enumerate().filter(|(k, _)| *k < n || *k >= 2 * n).map(|(_, s)| s.clone()).collect();
    var_list(&names)
}

/// Sets up `∂F/∂z_i = 0` and solves it for `t_1..t_n`.
pub fn critical_system(u: &Unfolding) -> Result<CriticalSystem, CritError> {
    let n = u.n();
    if u.analysis.order < 3 {
        return Err(CritError::OrderTooLow(u.analysis.order));
    }
    let cv = chart_vars(u);
    let equations: Vec<Polynomial> = (0..n).map(|i| u.big_f.derivative(i)).collect();
    let mut chart_map = Vec::with_capacity(u.num_params());
    for (i, eq) in equations.iter().enumerate() {
        let rest = eq - &Polynomial::var(u.vars(), u.param_index(i));
        let rest = rest.restrict(&cv).map_err(|_| CritError::NotLinearInParameters(i))?;
        chart_map.push(-rest);
    }
    for k in n..u.num_params() {
        chart_map.push(Polynomial::var(&cv, k));
    }
    Ok(CriticalSystem { equations, chart_vars: cv, chart_map })
}

/// Hessian of `F` in the `z` variables.
pub fn hessian(u: &Unfolding) -> HessianData {
    let n = u.n();
    let h_matrix: Vec<Vec<Polynomial>> =
        (0..n).map(|i| (0..n).map(|j| u.big_f.derivative(i).derivative(j)).collect()).collect();
    let h = det_bareiss(u.vars(), &h_matrix);
    HessianData { h_matrix, h }
}

/// Checks the jacobian/hessian identity as an exact polynomial equation.
///
/// The jacobian matrix of the chart map is built in full; its lower rows
/// must be `(0 | I)`, so its determinant is that of the upper-left block.
pub fn verify_jacobian_identity(u: &Unfolding) -> Result<JacobianProof, CritError> {
    let cs = critical_system(u)?;
    let n = u.n();
    let m = cs.chart_map.len();
    let jac: Vec<Vec<Polynomial>> = cs.chart_map.iter().map(|c| (0..m).map(|k| c.derivative(k)).collect()).collect();
    for (j, row) in jac.iter().enumerate().skip(n) {
        for (k, e) in row.iter().enumerate() {
            let want = if j == k { Polynomial::one(&cs.chart_vars) } else { Polynomial::zero(&cs.chart_vars) };
            if *e != want {
                return Err(CritError::BlockStructure(j, k));
            }
        }
    }
    let block: Vec<Vec<Polynomial>> = jac[..n].iter().map(|r| r[..n].to_vec()).collect();
    let lhs = det_bareiss(&cs.chart_vars, &block);
    let h = hessian(u).h;
    let h = h.restrict(&cs.chart_vars).expect("hessian is free of t_1..t_n when g_i = z_i");
    let rhs = if n % 2 == 1 { -h } else { h };
    Ok(JacobianProof { n, jacobian: lhs.to_string(), signed_hessian: rhs.to_string(), holds: lhs == rhs, lhs, rhs })
}

/// `sign(h) = (-1)^index`, the sign relation at a nondegenerate point.
pub fn sign_relation_check(h_value: &Rational, morse_index: usize, n: usize) -> Result<bool, CritError> {
    if h_value.is_zero() {
        return Err(CritError::DegeneratePoint);
    }
    debug_assert!(morse_index <= n);
    let jac_sign = if n % 2 == 1 { -sign(h_value) } else { sign(h_value) };
    let expected = if (n + morse_index) % 2 == 0 { 1 } else { -1 };
    Ok(jac_sign == expected)
}

/// Sign-only variant used with interval-certified hessian signs.
pub fn sign_relation_holds(h_sign: i32, morse_index: usize) -> bool {
    h_sign != 0 && h_sign == if morse_index % 2 == 0 { 1 } else { -1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{rational, Budget};
    use crate::milnor::unfold_expr;

    fn unf(s: &str) -> Unfolding {
        unfold_expr(s, &Budget::default()).unwrap()
    }

    #[test]
    fn systems() {
        let cs = critical_system(&unf("z^3")).unwrap();
        assert_eq!(cs.equations[0].to_string(), "3*z^2 + t1");
        assert_eq!(cs.chart_map[0].to_string(), "-3*z^2");
        let cs = critical_system(&unf("z^4")).unwrap();
        assert_eq!(cs.chart_map.iter().map(|p| p.to_string()).collect::<Vec<_>>(), ["-4*z^3 - 2*z*t2", "t2"]);
        let cs = critical_system(&unf("z^3 + w^3")).unwrap();
        let got: Vec<_> = cs.chart_map.iter().map(|p| p.to_string()).collect();
        assert_eq!(got, ["-3*z^2 - w*t3", "-z*t3 - 3*w^2", "t3"]);
    }

    #[test]
    fn identities() {
        let p = verify_jacobian_identity(&unf("z^3")).unwrap();
        assert!(p.holds);
        assert_eq!(p.jacobian, "-6*z");
        let p = verify_jacobian_identity(&unf("z^3 + w^3")).unwrap();
        assert!(p.holds);
        assert_eq!(p.jacobian, "36*z*w - t3^2");
    }

    #[test]
    fn sign_relation() {
        assert!(sign_relation_check(&rational(6, 1), 0, 1).unwrap());
        assert!(sign_relation_check(&rational(-6, 1), 1, 1).unwrap());
        assert!(!sign_relation_check(&rational(5, 1), 1, 2).unwrap());
        assert!(sign_relation_check(&rational(0, 1), 0, 1).is_err());
    }
}
