//! Milnor number, Jacobian-algebra cobasis and miniversal unfolding of a germ.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::kernel::groebner::standard_monomials;
use crate::kernel::poly::format_monomial;
use crate::kernel::{groebner_basis, normal_form, var_list, Budget, KernelError, Monomial, MonomialOrder, Polynomial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MilnorError {
    #[error("germ has a nonzero constant term")]
    ConstantTerm,
    #[error("origin is not a critical point: d/d{0} has a nonzero constant term")]
    NotCritical(String),
    #[error("critical point is not isolated (Milnor number is infinite)")]
    NotIsolated,
    #[error("order-2 germ with signature ({0}, {1}); strip the nondegenerate quadratic part first")]
    OrderTooLow(usize, usize),
    #[error("variable name {0} collides with the unfolding parameters")]
    ReservedName(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Validated germ together with its Milnor data.
#[derive(Clone, Debug)]
pub struct GermAnalysis {
    pub f: Polynomial,
    pub n: usize,
    /// Order of vanishing at the origin.
    pub order: u32,
    pub mu: usize,
    /// Standard monomials of the local Jacobian algebra, sorted by degree
    /// and then decreasing lexicographically; `cobasis[0]` is 1.
    pub cobasis: Vec<Monomial>,
    pub jac_gb: Vec<Polynomial>,
    /// Positive and negative inertia of the quadratic part.
    pub signature: (usize, usize),
}

#[derive(Serialize)]
pub struct AnalysisRecord {
    pub germ: String,
    pub variables: Vec<String>,
    pub mu: usize,
    pub order: u32,
    pub cobasis: Vec<String>,
    pub signature: [usize; 2],
    pub jacobian_basis: Vec<String>,
}

impl GermAnalysis {
    pub fn vars(&self) -> &Arc<[String]> {
        self.f.vars()
    }

    pub fn cobasis_strings(&self) -> Vec<String> {
        self.cobasis
            .iter()
            .map(|m| {
                let s = format_monomial(self.vars(), m);
                if s.is_empty() {
                    "1".to_string()
                } else {
                    s
                }
            })
            .collect()
    }

    pub fn record(&self) -> AnalysisRecord {
        AnalysisRecord {
            germ: self.f.to_string(),
            variables: self.vars().to_vec(),
            mu: self.mu,
            order: self.order,
            cobasis: self.cobasis_strings(),
            signature: [self.signature.0, self.signature.1],
            jacobian_basis: self.jac_gb.iter().map(|g| g.to_string()).collect(),
        }
    }
}

fn cobasis_order(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    a.degree().cmp(&b.degree()).then_with(|| b.0.cmp(&a.0))
}

/// Local Jacobian algebra data: reduced basis and staircase.
fn local_algebra(partials: &[Polynomial], budget: &Budget) -> Result<(Vec<Polynomial>, Vec<Monomial>), MilnorError> {
    let order = MonomialOrder::Grevlex;
    let gb = groebner_basis(partials, &order, budget)?;
    let stairs = standard_monomials(&gb, &order).ok_or(MilnorError::NotIsolated)?;
    let vars = partials[0].vars().clone();
    let n = vars.len();
    let global = stairs.len();
    let primary = (0..n).try_fold(true, |acc, i| -> Result<bool, MilnorError> {
        let p = Polynomial::var(&vars, i).pow(global.max(1) as u32);
        Ok(acc && normal_form(&p, &gb, &order)?.is_zero())
    })?;
    if primary {
        return Ok((gb, stairs));
    }
    // other critical points exist: localise by adding powers of the maximal ideal
    // until J + m^N = J + m^(N+1)
    let with_power = |k: u32| -> Result<(Vec<Polynomial>, Vec<Monomial>), MilnorError> {
        let mut gens = partials.to_vec();
        gens.extend(monomials_of_degree(n, k).into_iter().map(|m| Polynomial::term(&vars, m, Rational::from_integer(1.into()))));
        let gb = groebner_basis(&gens, &order, budget)?;
        let st = standard_monomials(&gb, &order).ok_or(MilnorError::NotIsolated)?;
        Ok((gb, st))
    };
    let mut prev = with_power(1)?;
    for k in 2..=(global as u32 + 2) {
        let next = with_power(k)?;
        if next.1.len() == prev.1.len() {
            return Ok(prev);
        }
        prev = next;
    }
    Ok(prev)
}

fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    if n == 0 {
        return if d == 0 { vec![Monomial(vec![])] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials_of_degree(n - 1, d - first) {
            rest.0.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Inertia `(positive, negative)` of a symmetric rational matrix, by
/// congruence diagonalisation.
pub fn inertia(mut a: Vec<Vec<Rational>>) -> (usize, usize) {
    let n = a.len();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // row/col k += row/col j makes the pivot 2*a[k][j]
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][k] += v;
                }
            } else {
                continue;
            }
        }
        let d = a[k][k].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &d;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        for i in k + 1..n {
            a[k][i] = Rational::zero();
            a[i][k] = Rational::zero();
        }
    }
    (pos, neg)
}

fn quadratic_signature(f: &Polynomial) -> (usize, usize) {
    let n = f.nvars();
    let q = f.homogeneous_part(2);
    let half = Rational::new(1.into(), 2.into());
    let mut a = vec![vec![Rational::zero(); n]; n];
    for (m, c) in q.terms() {
        let idx: Vec<usize> = (0..n).filter(|&i| m.0[i] > 0).collect();
        match idx.as_slice() {
            [i] => a[*i][*i] = c.clone(),
            [i, j] => {
                a[*i][*j] = c * &half;
                a[*j][*i] = c * &half;
            }
            _ => unreachable!("degree-2 monomial"),
        }
    }
    inertia(a)
}

/// Validates `f` at the origin and computes its Milnor data.
pub fn analyze_germ(f: &Polynomial, budget: &Budget) -> Result<GermAnalysis, MilnorError> {
    if !f.constant_term().is_zero() {
        return Err(MilnorError::ConstantTerm);
    }
    let n = f.nvars();
    let partials: Vec<Polynomial> = (0..n).map(|i| f.derivative(i)).collect();
    for (i, p) in partials.iter().enumerate() {
        if !p.constant_term().is_zero() {
            return Err(MilnorError::NotCritical(f.vars()[i].clone()));
        }
    }
    if f.is_zero() || n == 0 {
        return Err(MilnorError::NotIsolated);
    }
    let (jac_gb, mut cobasis) = local_algebra(&partials, budget)?;
    cobasis.sort_by(cobasis_order);
    let order = f.order().expect("nonzero germ");
    Ok(GermAnalysis {
        f: f.clone(),
        n,
        order,
        mu: cobasis.len(),
        cobasis,
        jac_gb,
        signature: quadratic_signature(f),
    })
}

/// `F(z, t) = f(z) + Σ t_k g_k(z)` over the variables `z_1..z_n, t_1..t_{μ-1}`.
#[derive(Clone, Debug)]
pub struct Unfolding {
    pub analysis: GermAnalysis,
    /// Cobasis without the constant 1; the first `n` are `z_1..z_n` when
    /// the germ has order at least 3.
    pub deformation_monomials: Vec<Monomial>,
    /// The unfolding polynomial over `[z.., t1..]`.
    pub big_f: Polynomial,
}

#[derive(Serialize)]
pub struct UnfoldingRecord {
    pub germ: String,
    pub mu: usize,
    pub parameters: Vec<String>,
    pub deformation_monomials: Vec<String>,
    pub unfolding: String,
}

impl Unfolding {
    pub fn n(&self) -> usize {
        self.analysis.n
    }

    pub fn mu(&self) -> usize {
        self.analysis.mu
    }

    pub fn num_params(&self) -> usize {
        self.deformation_monomials.len()
    }

    /// Variables `[z.., t1..]` of the unfolding.
    pub fn vars(&self) -> &Arc<[String]> {
        self.big_f.vars()
    }

    pub fn germ_vars(&self) -> &Arc<[String]> {
        self.analysis.vars()
    }

    /// Index of parameter `t_{k+1}` in [`Unfolding::vars`].
    pub fn param_index(&self, k: usize) -> usize {
        self.n() + k
    }

    pub fn param_names(&self) -> Vec<String> {
        self.vars()[self.n()..].to_vec()
    }

    /// `F_t` as a polynomial in the germ variables.
    pub fn specialize(&self, t: &[Rational]) -> Polynomial {
        assert_eq!(t.len(), self.num_params(), "parameter dimension");
        let vals: Vec<(usize, Rational)> = t.iter().enumerate().map(|(k, v)| (self.param_index(k), v.clone())).collect();
        self.big_f
            .substitute_many(&vals)
            .restrict(self.germ_vars())
            .expect("parameters were substituted")
    }

    pub fn record(&self) -> UnfoldingRecord {
        let gv = self.germ_vars();
        UnfoldingRecord {
            germ: self.analysis.f.to_string(),
            mu: self.mu(),
            parameters: self.param_names(),
            deformation_monomials: self.deformation_monomials.iter().map(|m| format_monomial(gv, m)).collect(),
            unfolding: self.big_f.to_string(),
        }
    }
}

/// Builds the miniversal unfolding from the cobasis.
///
/// Germs of order 2 are rejected unless they are Morse (μ = 1, in which
/// case the unfolding is `f` itself with no parameters).
pub fn miniversal_unfolding(a: &GermAnalysis) -> Result<Unfolding, MilnorError> {
    if a.order <= 2 && a.mu > 1 {
        return Err(MilnorError::OrderTooLow(a.signature.0, a.signature.1));
    }
    let n = a.n;
    let params: Vec<String> = (1..a.mu).map(|k| format!("t{k}")).collect();
    for v in a.vars().iter() {
        if params.contains(v) || v == "lambda" {
            return Err(MilnorError::ReservedName(v.clone()));
        }
    }
    let mut names: Vec<String> = a.vars().to_vec();
    names.extend(params);
    let vars = var_list(&names);

    let deformation_monomials: Vec<Monomial> = a.cobasis.iter().filter(|m| !m.is_one()).cloned().collect();
    if a.order >= 3 {
        for (i, g) in deformation_monomials.iter().take(n).enumerate() {
            debug_assert_eq!(*g, Monomial::var(n, i), "linear monomials lead the cobasis");
        }
    }
    let one = Rational::from_integer(1.into());
    let mut big_f = a.f.embed(&vars)?;
    for (k, g) in deformation_monomials.iter().enumerate() {
        let mut m = g.0.clone();
        m.resize(vars.len(), 0);
        m[n + k] = 1;
        big_f = &big_f + &Polynomial::term(&vars, Monomial(m), one.clone());
    }
    Ok(Unfolding { analysis: a.clone(), deformation_monomials, big_f })
}

/// Parses and analyses a germ in one step (variables in order of appearance).
pub fn unfold_expr(expr: &str, budget: &Budget) -> Result<Unfolding, MilnorError> {
    let f = Polynomial::parse_auto(expr)?;
    let a = analyze_germ(&f, budget)?;
    miniversal_unfolding(&a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analyze(s: &str) -> Result<GermAnalysis, MilnorError> {
        analyze_germ(&Polynomial::parse_auto(s).unwrap(), &Budget::default())
    }

    #[test]
    fn cusp_germ() {
        let a = analyze("z^3").unwrap();
        assert_eq!((a.mu, a.order, a.signature), (2, 3, (0, 0)));
        assert_eq!(a.cobasis_strings(), ["1", "z"]);
        assert_eq!(a.jac_gb.iter().map(|g| g.to_string()).collect::<Vec<_>>(), ["z^2"]);
    }

    #[test]
    fn d4_type_germ() {
        let a = analyze("z^3 + w^3").unwrap();
        assert_eq!(a.mu, 4);
        assert_eq!(a.cobasis_strings(), ["1", "z", "w", "z*w"]);
        assert_eq!(a.signature, (0, 0));
    }

    #[test]
    fn morse_and_rejections() {
        let a = analyze("z^2 - w^2").unwrap();
        assert_eq!((a.mu, a.signature), (1, (1, 1)));
        assert_eq!(a.cobasis_strings(), ["1"]);
        assert!(matches!(analyze("z^2*w"), Err(MilnorError::NotIsolated)));
        assert!(matches!(analyze("z + z^3"), Err(MilnorError::NotCritical(_))));
        assert!(matches!(analyze("1 + z^3"), Err(MilnorError::ConstantTerm)));
    }

    #[test]
    fn signature_with_cross_terms() {
        // z*w is a hyperbolic plane; the z^2 - 2 u^2 part adds (1, 1)
        let a = analyze("z*w + u^2 - 2*v^2 + z^3").unwrap();
        assert_eq!(a.signature, (2, 2));
    }

    #[test]
    fn local_number_ignores_distant_critical_points() {
        // z^3 - z^2 has critical points at 0 (Morse) and 2/3
        let a = analyze("z^3 - z^2").unwrap();
        assert_eq!(a.mu, 1);
        let b = analyze("z^4 - z^3").unwrap();
        assert_eq!(b.mu, 2);
    }

    #[test]
    fn unfoldings() {
        let b = Budget::default();
        assert_eq!(unfold_expr("z^3", &b).unwrap().big_f.to_string(), "z^3 + z*t1");
        assert_eq!(unfold_expr("z^4", &b).unwrap().big_f.to_string(), "z^4 + z^2*t2 + z*t1");
        let u = unfold_expr("z^3 + w^3", &b).unwrap();
        assert_eq!(u.big_f.to_string(), "z^3 + z*w*t3 + w^3 + z*t1 + w*t2");
        let u = unfold_expr("z^2", &b).unwrap();
        assert_eq!(u.num_params(), 0);
        assert!(matches!(unfold_expr("z^2 + z^3*w + w^3", &b), Err(MilnorError::OrderTooLow(..))));
    }
}
