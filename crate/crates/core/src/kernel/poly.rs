//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::order::MonomialOrder;
use super::{KernelError, Rational};

/// Exponent vector over a declared variable list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// A polynomial over an ordered list of named variables.
///
/// Terms are kept in a map from exponent vector to nonzero coefficient, so
/// two equal polynomials always have identical representations.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, Rational>,
}

pub fn var_list<S: AsRef<str>>(names: &[S]) -> Arc<[String]> {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

impl Polynomial {
    pub fn zero(vars: &Arc<[String]>) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Arc<[String]>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Arc<[String]>, c: Rational) -> Self {
        Self::term(vars, Monomial::one(vars.len()), c)
    }

    pub fn from_int(vars: &Arc<[String]>, c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(vars: &Arc<[String]>, i: usize) -> Self {
        Self::term(vars, Monomial::var(vars.len(), i), Rational::one())
    }

    pub fn term(vars: &Arc<[String]>, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.0.len(), vars.len(), "monomial arity does not match variable list");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { vars: vars.clone(), terms }
    }

    pub fn from_terms<I>(vars: &Arc<[String]>, it: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn same_ring(&self, other: &Polynomial) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one(self.nvars()))
    }

    /// Maximal total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Order of vanishing at the origin (minimal total degree of a term).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[i]).max()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn add_scaled_term_product(&mut self, c: &Rational, m: &Monomial, q: &Polynomial) {
        for (qm, qc) in &q.terms {
            self.add_term(m.mul(qm), c * qc);
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Polynomial {
        let mut p = Self::zero(&self.vars);
        p.add_scaled_term_product(c, m, self);
        p
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[i] -= 1;
                p.add_term(m2, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        p
    }

    /// Full evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars());
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `value` for variable `i`; the variable list is unchanged.
    pub fn substitute(&self, i: usize, value: &Rational) -> Polynomial {
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut m2 = m.clone();
            m2.0[i] = 0;
            let f = if e == 0 { c.clone() } else { c * num_traits::pow(value.clone(), e as usize) };
            p.add_term(m2, f);
        }
        p
    }

    pub fn substitute_many(&self, values: &[(usize, Rational)]) -> Polynomial {
        values.iter().fold(self.clone(), |p, (i, v)| p.substitute(*i, v))
    }

    /// Replaces variable `i` by the polynomial `q` (same ring).
    pub fn compose(&self, i: usize, q: &Polynomial) -> Polynomial {
        assert!(self.same_ring(q));
        let deg = self.degree_in(i).unwrap_or(0);
        let mut powers = vec![Self::one(&self.vars)];
        for k in 1..=deg as usize {
            let next = &powers[k - 1] * q;
            powers.push(next);
        }
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i] as usize;
            let mut m2 = m.clone();
            m2.0[i] = 0;
            p.add_scaled_term_product(c, &m2, &powers[e]);
        }
        p
    }

    /// Coefficients as a polynomial in variable `i`: entry `k` multiplies `x_i^k`.
    pub fn coefficients_in(&self, i: usize) -> Vec<Polynomial> {
        let deg = match self.degree_in(i) {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut out = vec![Self::zero(&self.vars); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[i] as usize;
            let mut m2 = m.clone();
            m2.0[i] = 0;
            out[e].add_term(m2, c.clone());
        }
        out
    }

    /// Leading coefficient with respect to variable `i` (a polynomial free of `x_i`).
    pub fn lead_coefficient_in(&self, i: usize) -> Polynomial {
        self.coefficients_in(i).pop().unwrap_or_else(|| Self::zero(&self.vars))
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(&a.0 .0, &b.0 .0))
    }

    pub fn leading_monomial(&self, order: &MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    /// Terms in decreasing order.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(&b.0 .0, &a.0 .0));
        v
    }

    pub fn make_monic(&self, order: &MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Sum of the terms of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        assert!(self.same_ring(d));
        if d.is_zero() {
            return None;
        }
        let order = MonomialOrder::Grevlex;
        let (dm, dc) = d.leading_term(&order).map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        while let Some((rm, rc)) = rem.leading_term(&order).map(|(m, c)| (m.clone(), c.clone())) {
            if !dm.divides(&rm) {
                return None;
            }
            let qm = dm.quotient_of(&rm);
            let qc = rc / &dc;
            rem.add_scaled_term_product(&(-qc.clone()), &qm, d);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Re-expresses the polynomial over `target`, matching variables by name.
    pub fn embed(&self, target: &Arc<[String]>) -> Result<Polynomial, KernelError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| KernelError::VariableMismatch {
                expected: target.join(","),
                found: self.vars.join(","),
            })?;
        let mut p = Self::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (k, &x) in m.0.iter().enumerate() {
                e[map[k]] = x;
            }
            p.add_term(Monomial(e), c.clone());
        }
        Ok(p)
    }

    /// Re-expresses over `target`, dropping variables that do not occur.
    pub fn restrict(&self, target: &Arc<[String]>) -> Result<Polynomial, KernelError> {
        let mut p = Self::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (k, &x) in m.0.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let j = target.iter().position(|t| *t == self.vars[k]).ok_or_else(|| {
                    KernelError::VariableMismatch { expected: target.join(","), found: self.vars.join(",") }
                })?;
                e[j] = x;
            }
            p.add_term(Monomial(e), c.clone());
        }
        Ok(p)
    }

    pub fn parse(src: &str, vars: &Arc<[String]>) -> Result<Polynomial, KernelError> {
        super::parse::parse_polynomial(src, vars)
    }

    /// Parses with the variable list inferred in order of first appearance.
    pub fn parse_auto(src: &str) -> Result<Polynomial, KernelError> {
        let names = super::parse::identifiers(src)?;
        let vars = var_list(&names);
        super::parse::parse_polynomial(src, &vars)
    }
}

fn check_ring(a: &Polynomial, b: &Polynomial) {
    assert!(a.same_ring(b), "polynomials over different variable lists: [{}] vs [{}]", a.vars.join(","), b.vars.join(","));
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        check_ring(self, rhs);
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        check_ring(self, rhs);
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), -c.clone());
        }
        p
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        check_ring(self, rhs);
        let mut p = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            p.add_scaled_term_product(c, m, rhs);
        }
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Renders a monomial as `x^2*y`; the empty string for 1.
pub fn format_monomial(vars: &[String], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (v, &e) in vars.iter().zip(&m.0) {
        match e {
            0 => {}
            1 => parts.push(v.clone()),
            _ => parts.push(format!("{v}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    /// Terms appear by decreasing total degree, ties broken lexicographically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| b.0 .0.cmp(&a.0 .0)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = format_monomial(&self.vars, m);
            if mono.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in [{}]", self, self.vars.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, v: &[&str]) -> Polynomial {
        Polynomial::parse(s, &var_list(v)).unwrap()
    }

    #[test]
    fn display_orders_by_degree() {
        let f = p("27*lambda^2 + 4*t1^3", &["lambda", "t1"]);
        assert_eq!(f.to_string(), "4*t1^3 + 27*lambda^2");
        assert_eq!(p("1 - z", &["z"]).to_string(), "-z + 1");
        assert_eq!(p("3/2*z*w - w^2", &["z", "w"]).to_string(), "3/2*z*w - w^2");
    }

    #[test]
    fn exact_division() {
        let a = p("z^2 - w^2", &["z", "w"]);
        let b = p("z + w", &["z", "w"]);
        assert_eq!(a.div_exact(&b).unwrap(), p("z - w", &["z", "w"]));
        assert!(p("z^2 + 1", &["z", "w"]).div_exact(&b).is_none());
    }

    #[test]
    fn compose_and_substitute() {
        let f = p("z^2 + w", &["z", "w"]);
        let g = f.compose(0, &p("w + 1", &["z", "w"]));
        assert_eq!(g, p("w^2 + 3*w + 1", &["z", "w"]));
        let h = f.substitute(1, &Rational::from_integer(3.into()));
        assert_eq!(h, p("z^2 + 3", &["z", "w"]));
    }

    #[test]
    fn embed_and_restrict() {
        let f = p("z*t1", &["z", "t1"]);
        let big = var_list(&["z", "w", "t1"]);
        let g = f.embed(&big).unwrap();
        assert_eq!(g.to_string(), "z*t1");
        let back = g.restrict(&var_list(&["z", "t1"])).unwrap();
        assert_eq!(back, f);
        assert!(g.restrict(&var_list(&["z"])).is_err());
    }
}
