//! Dense univariate polynomials over the rationals and certified real root
//! isolation by Sturm sequences.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::{Monomial, Polynomial};
use super::{KernelError, Rational};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// Reads a polynomial that only involves variable `var`.
    pub fn from_polynomial(p: &Polynomial, var: usize) -> Result<Self, KernelError> {
        let deg = p.degree_in(var).unwrap_or(0) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (m, c) in p.terms() {
            if m.0.iter().enumerate().any(|(k, &e)| k != var && e > 0) {
                return Err(KernelError::NotUnivariate(p.to_string()));
            }
            coeffs[m.0[var] as usize] = c.clone();
        }
        Ok(Self::new(coeffs))
    }

    pub fn to_polynomial(&self, vars: &std::sync::Arc<[String]>, var: usize) -> Polynomial {
        Polynomial::from_terms(
            vars,
            self.coeffs.iter().enumerate().map(|(k, c)| {
                let mut m = Monomial::one(vars.len());
                m.0[var] = k as u32;
                (m, c.clone())
            }),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> i32 {
        sign(&self.eval(x))
    }

    pub fn derivative(&self) -> UniPoly {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * rat(k as i64)).collect())
    }

    pub fn scale(&self, c: &Rational) -> UniPoly {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeffs.get(k).cloned().unwrap_or_default() + other.coeffs.get(k).cloned().unwrap_or_default()).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        let lc = d.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `self = c * Π factors[i]^(i+1)`,
    /// factors monic, squarefree and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<UniPoly> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        loop {
            let g = b.gcd(&d);
            out.push(g.clone());
            b = b.div_rem(&g).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&g).0;
            d = c.sub(&b.derivative());
        }
        while out.last().is_some_and(|p| p.degree() == Some(0)) {
            out.pop();
        }
        out
    }

    pub fn squarefree_part(&self) -> UniPoly {
        self.squarefree_decomposition().iter().fold(Self::constant(Rational::one()), |acc, f| acc.mul(f))
    }

    /// Cauchy bound: every complex root has modulus below the result.
    pub fn root_bound(&self) -> Rational {
        let lc = self.lead().abs();
        let m = self.coeffs[..self.coeffs.len().saturating_sub(1)].iter().map(|c| c.abs() / &lc).max().unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    /// Number of real roots counted without multiplicity.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let s = Sturm::new(&self.squarefree_part());
        s.variations_at_neg_infinity() - s.variations_at_pos_infinity()
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = super::poly::var_list(&["x"]);
        write!(f, "{}", self.to_polynomial(&vars, 0))
    }
}

pub(crate) fn sign(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut v = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

/// Sturm sequence of a squarefree polynomial.
pub struct Sturm {
    seq: Vec<UniPoly>,
}

impl Sturm {
    pub fn new(p: &UniPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            // scaling by a positive constant keeps the sign pattern
            let r = if r.is_zero() { r } else { r.scale(&(-r.lead().abs().recip())) };
            seq.push(r);
        }
        seq.pop();
        Sturm { seq }
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        variations(self.seq.iter().map(|p| p.sign_at(x)))
    }

    pub fn variations_at_pos_infinity(&self) -> usize {
        variations(self.seq.iter().map(|p| sign(&p.lead())))
    }

    pub fn variations_at_neg_infinity(&self) -> usize {
        variations(self.seq.iter().map(|p| {
            let s = sign(&p.lead());
            if p.degree().unwrap_or(0) % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Distinct roots in the open interval `(lo, hi)`; neither endpoint may be a root.
    pub fn count_open(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo) - self.variations_at(hi)
    }
}

/// An interval containing exactly one distinct real root of the polynomial it
/// was isolated from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsolatingInterval {
    #[serde(serialize_with = "crate::kernel::ser_rational")]
    pub lo: Rational,
    #[serde(serialize_with = "crate::kernel::ser_rational")]
    pub hi: Rational,
    pub multiplicity: u32,
}

impl IsolatingInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rat(2)
    }

    /// Shrinks the interval to at most `width`; `p` must be the polynomial
    /// it was isolated from.
    pub fn refine(&mut self, p: &UniPoly, width: &Rational) {
        let sq = p.squarefree_part();
        refine_simple(&sq, &mut self.lo, &mut self.hi, width);
    }
}

/// Bisection on a polynomial with a single simple root in `(lo, hi)` and
/// nonzero values at both endpoints.
pub(crate) fn refine_simple(q: &UniPoly, lo: &mut Rational, hi: &mut Rational, width: &Rational) {
    let mut slo = q.sign_at(lo);
    debug_assert!(slo != 0 && q.sign_at(hi) != 0);
    while &(&*hi - &*lo) > width {
        let mid = (&*lo + &*hi) / rat(2);
        let sm = q.sign_at(&mid);
        if sm == 0 {
            let quarter = (&*hi - &*lo) / rat(4);
            *lo = &mid - &quarter;
            *hi = &mid + &quarter;
            slo = q.sign_at(lo);
        } else if sm == slo {
            *lo = mid;
        } else {
            *hi = mid;
        }
    }
}

fn isolate_open(s: &Sturm, q: &UniPoly, lo: Rational, hi: Rational, out: &mut Vec<(Rational, Rational)>) {
    let c = s.count_open(&lo, &hi);
    if c == 0 {
        return;
    }
    if c == 1 {
        out.push((lo, hi));
        return;
    }
    let mut mid = (&lo + &hi) / rat(2);
    let mut k = 3;
    while q.sign_at(&mid) == 0 {
        // q has finitely many roots; some point of lo + (hi-lo)/k avoids them
        mid = &lo + (&hi - &lo) / rat(k);
        k += 1;
    }
    isolate_open(s, q, lo, mid.clone(), out);
    isolate_open(s, q, mid, hi, out);
}

/// Neighbourhood of the exact root `x` of squarefree `q` containing no other root.
fn isolate_exact_root(s: &Sturm, q: &UniPoly, x: &Rational, mut h: Rational) -> (Rational, Rational) {
    loop {
        let (a, b) = (x - &h, x + &h);
        if q.sign_at(&a) != 0 && q.sign_at(&b) != 0 && s.count_open(&a, &b) == 1 {
            return (a, b);
        }
        h /= rat(2);
    }
}

/// One isolating interval per distinct real root of `p` in the closed
/// window `[lo, hi]`, sorted increasingly, with multiplicities.
pub fn isolate_real_roots(p: &UniPoly, lo: &Rational, hi: &Rational) -> Result<Vec<IsolatingInterval>, KernelError> {
    if p.is_zero() {
        return Err(KernelError::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(KernelError::InvalidWindow(format!("[{lo}, {hi}]")));
    }
    let factors = p.squarefree_decomposition();
    if factors.is_empty() {
        return Ok(Vec::new());
    }
    let s_poly = factors.iter().fold(UniPoly::constant(Rational::one()), |a, f| a.mul(f));
    let sturm = Sturm::new(&s_poly);

    let half = (hi - lo) / rat(2);
    let mut raw: Vec<(Rational, Rational)> = Vec::new();
    let mut a = lo.clone();
    let mut b = hi.clone();
    if s_poly.sign_at(lo) == 0 {
        let (x, y) = isolate_exact_root(&sturm, &s_poly, lo, half.clone());
        a = y.clone();
        raw.push((x, y));
    }
    let mut tail = None;
    if s_poly.sign_at(hi) == 0 {
        let (x, y) = isolate_exact_root(&sturm, &s_poly, hi, half);
        b = x.clone();
        tail = Some((x, y));
    }
    if a < b {
        isolate_open(&sturm, &s_poly, a, b, &mut raw);
    }
    raw.extend(tail);

    let mut out = Vec::with_capacity(raw.len());
    for (x, y) in raw {
        let mult = factors
            .iter()
            .position(|f| f.degree().unwrap_or(0) > 0 && Sturm::new(f).count_open(&x, &y) == 1)
            .expect("each isolated root belongs to one square-free factor");
        out.push(IsolatingInterval { lo: x, hi: y, multiplicity: mult as u32 + 1 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        rat(n)
    }

    #[test]
    fn sqrt_two() {
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        let roots = isolate_real_roots(&p, &r(-2), &r(2)).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|i| i.multiplicity == 1));
        let mut first = roots[0].clone();
        first.refine(&p, &Rational::new(1.into(), 1_000_000.into()));
        let m = first.midpoint();
        assert!((m + Rational::new(14142136.into(), 10_000_000.into())).abs() < Rational::new(1.into(), 100_000.into()));
    }

    #[test]
    fn double_root_and_no_roots() {
        let roots = isolate_real_roots(&UniPoly::from_ints(&[0, 0, 1]), &r(-1), &r(1)).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert!(roots[0].lo < r(0) && roots[0].hi > r(0));
        assert!(isolate_real_roots(&UniPoly::from_ints(&[1, 0, 1]), &r(-10), &r(10)).unwrap().is_empty());
        assert!(matches!(isolate_real_roots(&UniPoly::zero(), &r(0), &r(1)), Err(KernelError::ZeroPolynomial)));
    }

    #[test]
    fn roots_on_window_boundary() {
        // (x-1)(x+1)x on [-1, 1]
        let p = UniPoly::from_ints(&[0, -1, 0, 1]);
        let roots = isolate_real_roots(&p, &r(-1), &r(1)).unwrap();
        assert_eq!(roots.len(), 3);
        for w in roots.windows(2) {
            assert!(w[0].hi <= w[1].lo);
        }
    }

    #[test]
    fn squarefree_decomposition_multiplicities() {
        // (x-1)^3 (x+2)
        let a = UniPoly::from_ints(&[-1, 1]);
        let b = UniPoly::from_ints(&[2, 1]);
        let p = a.mul(&a).mul(&a).mul(&b);
        let f = p.squarefree_decomposition();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0], b);
        assert_eq!(f[1], UniPoly::from_ints(&[1]));
        assert_eq!(f[2], a);
        let roots = isolate_real_roots(&p, &r(-5), &r(5)).unwrap();
        assert_eq!(roots.iter().map(|i| i.multiplicity).collect::<Vec<_>>(), vec![1, 3]);
    }
}
