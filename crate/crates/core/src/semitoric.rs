//! Value semigroups of plane branches, the binomial ideal of the monomial
//! curve, toric embedded resolution by unimodular subdivision, and
//! overweight deformations.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::kernel::{
    format_rational, groebner_basis, var_list, Budget, KernelError, Monomial, MonomialOrder, Polynomial, Rational,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiError {
    #[error("empty generator list")]
    Empty,
    #[error("generators must be positive")]
    NonPositive,
    #[error("generators have gcd {0}, not 1")]
    GcdNotOne(u64),
    #[error("not a branch: {0}")]
    NotABranch(String),
    #[error("semigroup has a single generator; its ideal is zero")]
    NoRelations,
    #[error("non-binomial element in toric basis: {0}")]
    NonBinomialElement(String),
    #[error("ambient dimension {0} exceeds 3")]
    DimensionTooLarge(usize),
    #[error("regularization exceeded {0} subdivision steps")]
    RegularizationBudget(usize),
    #[error("precision {precision} too small; need at least {required}")]
    TruncationInsufficient { precision: usize, required: usize },
    #[error("embedding series {index} has order {found:?}, expected {expected}")]
    OrderMismatch { index: usize, expected: u64, found: Option<u32> },
    #[error("not a weighted-homogeneous binomial: {0}")]
    NotHomogeneous(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

// ---------------------------------------------------------------- semigroups

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumericalSemigroup {
    pub minimal_generators: Vec<u64>,
    pub conductor: u64,
    /// `apery[r]` is the least element congruent to `r` modulo `γ_0`.
    pub apery: Vec<u64>,
}

impl NumericalSemigroup {
    pub fn multiplicity(&self) -> u64 {
        self.minimal_generators[0]
    }

    /// Number of generators minus one.
    pub fn g(&self) -> usize {
        self.minimal_generators.len() - 1
    }

    pub fn frobenius(&self) -> i64 {
        self.conductor as i64 - 1
    }

    pub fn contains(&self, x: u64) -> bool {
        x >= self.apery[(x % self.multiplicity()) as usize]
    }

    pub fn gaps(&self) -> Vec<u64> {
        (0..self.conductor).filter(|&x| !self.contains(x)).collect()
    }

    /// Elements below the conductor.
    pub fn sporadic(&self) -> Vec<u64> {
        (0..self.conductor).filter(|&x| self.contains(x)).collect()
    }
}

impl fmt::Display for NumericalSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.minimal_generators.iter().map(|x| x.to_string()).collect();
        write!(f, "<{}>", g.join(","))
    }
}

fn representable(target: u64, gens: &[u64]) -> bool {
    let n = target as usize;
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for x in 1..=n {
        reach[x] = gens.iter().any(|&g| g as usize <= x && reach[x - g as usize]);
    }
    reach[n]
}

pub fn semigroup_from_generators(gens: &[u64]) -> Result<NumericalSemigroup, SemiError> {
    if gens.is_empty() {
        return Err(SemiError::Empty);
    }
    if gens.contains(&0) {
        return Err(SemiError::NonPositive);
    }
    let d = gens.iter().fold(0u64, |a, &b| a.gcd(&b));
    if d != 1 {
        return Err(SemiError::GcdNotOne(d));
    }
    let mut sorted = gens.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut minimal: Vec<u64> = Vec::new();
    for &g in &sorted {
        if !representable(g, &minimal) {
            minimal.push(g);
        }
    }
    let m = minimal[0];
    // shortest paths on residues mod m
    let mut apery = vec![u64::MAX; m as usize];
    apery[0] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, 0usize))]);
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > apery[r] {
            continue;
        }
        for &g in &minimal[1..] {
            let nd = d + g;
            let nr = (nd % m) as usize;
            if nd < apery[nr] {
                apery[nr] = nd;
                heap.push(Reverse((nd, nr)));
            }
        }
    }
    let frob = apery.iter().map(|&w| w as i64 - m as i64).max().unwrap_or(-1);
    Ok(NumericalSemigroup { minimal_generators: minimal, conductor: (frob + 1) as u64, apery })
}

// ---------------------------------------------------------------- branches

/// `x = t^β0`, `y = Σ c_j t^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneBranch {
    pub beta0: u32,
    pub y: Vec<(u32, Rational)>,
}

fn t_ring() -> Arc<[String]> {
    var_list(&["t"])
}

fn univariate_terms(p: &Polynomial) -> Vec<(u32, Rational)> {
    let mut v: Vec<(u32, Rational)> = p.terms().map(|(m, c)| (m.0[0], c.clone())).collect();
    v.sort_by_key(|(e, _)| *e);
    v
}

impl PlaneBranch {
    pub fn new(beta0: u32, y: Vec<(u32, Rational)>) -> Result<Self, SemiError> {
        let mut y: Vec<(u32, Rational)> = y.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        y.sort_by_key(|(e, _)| *e);
        if beta0 == 0 {
            return Err(SemiError::NotABranch("x(t) must vanish at t = 0".into()));
        }
        if let Some((e, _)) = y.first() {
            if *e < beta0 {
                return Err(SemiError::NotABranch(format!("ord y = {e} is below ord x = {beta0}")));
            }
        }
        if y.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(SemiError::InvalidInput("repeated exponent in y(t)".into()));
        }
        Ok(PlaneBranch { beta0, y })
    }

    /// Parses `"t^4, t^6 + t^7"`.
    pub fn parse(src: &str) -> Result<Self, SemiError> {
        let parts: Vec<&str> = src.split(',').collect();
        if parts.len() != 2 {
            return Err(SemiError::InvalidInput(format!("expected \"x(t), y(t)\", got {src:?}")));
        }
        let ring = t_ring();
        let x = Polynomial::parse(parts[0], &ring)?;
        let y = Polynomial::parse(parts[1], &ring)?;
        let xt = univariate_terms(&x);
        match xt.as_slice() {
            [(e, c)] if c.is_one() => PlaneBranch::new(*e, univariate_terms(&y)),
            _ => Err(SemiError::NotABranch(format!("x(t) = {x} is not of the form t^b"))),
        }
    }

    pub fn x_poly(&self) -> Polynomial {
        let r = t_ring();
        Polynomial::term(&r, Monomial(vec![self.beta0]), Rational::one())
    }

    pub fn y_poly(&self) -> Polynomial {
        let r = t_ring();
        Polynomial::from_terms(&r, self.y.iter().map(|(e, c)| (Monomial(vec![*e]), c.clone())))
    }

    /// `(β0; β1, …, βg)`, read off the support of `y` by gcd descent.
    pub fn characteristic_exponents(&self) -> Result<Vec<u64>, SemiError> {
        let mut out = vec![self.beta0 as u64];
        let mut e = self.beta0 as u64;
        for (j, _) in &self.y {
            if e == 1 {
                break;
            }
            let j = *j as u64;
            if j % e != 0 {
                out.push(j);
                e = e.gcd(&j);
            }
        }
        if e != 1 {
            return Err(SemiError::NotABranch(format!("gcd chain stops at {e}; the parametrization is not primitive")));
        }
        Ok(out)
    }

    /// Generators `β̄_i` of the value semigroup.
    pub fn semigroup_generators(&self) -> Result<Vec<u64>, SemiError> {
        let beta = self.characteristic_exponents()?;
        if beta.len() == 1 {
            return Ok(vec![1]);
        }
        let mut e = vec![beta[0]];
        for b in &beta[1..] {
            let last = *e.last().unwrap();
            e.push(last.gcd(b));
        }
        let mut bar = vec![beta[0], beta[1]];
        for i in 1..beta.len() - 1 {
            let n_i = e[i - 1] / e[i];
            bar.push(n_i * bar[i] + beta[i + 1] - beta[i]);
        }
        Ok(bar)
    }
}

impl fmt::Display for PlaneBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x_poly(), self.y_poly())
    }
}

pub fn branch_semigroup(b: &PlaneBranch) -> Result<NumericalSemigroup, SemiError> {
    semigroup_from_generators(&b.semigroup_generators()?)
}

/// Embedding series `ξ_0 = x`, `ξ_1`, …, `ξ_g` of a branch with their
/// expressions in `U_0..U_g`; `ord ξ_i = β̄_i`.
#[derive(Clone, Debug)]
pub struct Semiroot {
    pub expression: Polynomial,
    pub series: Polynomial,
}

fn u_ring(g: usize) -> Arc<[String]> {
    let names: Vec<String> = (0..=g).map(|i| format!("U{i}")).collect();
    var_list(&names)
}

fn t_order_lead(p: &Polynomial) -> Option<(u32, Rational)> {
    p.terms().map(|(m, c)| (m.0[0], c.clone())).min_by_key(|(e, _)| *e)
}

/// Exponents `m` with `Σ m_i bar_i = v` and `0 ≤ m_i < n_i` for `i ≥ 1`.
fn standard_representation(v: u64, bar: &[u64], n: &[u64]) -> Option<Vec<u32>> {
    fn rec(v: u64, i: usize, bar: &[u64], n: &[u64], m: &mut Vec<u32>) -> bool {
        if i == 0 {
            if v % bar[0] == 0 {
                m[0] = (v / bar[0]) as u32;
                return true;
            }
            return false;
        }
        for k in 0..n[i] {
            if k * bar[i] > v {
                break;
            }
            m[i] = k as u32;
            if rec(v - k * bar[i], i - 1, bar, n, m) {
                return true;
            }
        }
        m[i] = 0;
        false
    }
    let mut m = vec![0; bar.len()];
    rec(v, bar.len() - 1, bar, n, &mut m).then_some(m)
}

pub fn semiroots(b: &PlaneBranch) -> Result<Vec<Semiroot>, SemiError> {
    let bar = b.semigroup_generators()?;
    let g = bar.len() - 1;
    let ur = u_ring(g);
    let x = b.x_poly();
    let mut out = vec![Semiroot { expression: Polynomial::var(&ur, 0), series: x.clone() }];
    if g == 0 {
        return Ok(out);
    }
    let beta = b.characteristic_exponents()?;
    let mut e = vec![beta[0]];
    for bt in &beta[1..] {
        let last = *e.last().unwrap();
        e.push(last.gcd(bt));
    }
    let n: Vec<u64> = (0..=g).map(|i| if i == 0 { 0 } else { e[i - 1] / e[i] }).collect();
    for k in 1..=g {
        let (mut expr, mut h) = if k == 1 {
            (Polynomial::var(&ur, 1), b.y_poly())
        } else {
            let p = &out[k - 1];
            (p.expression.pow(n[k - 1] as u32), p.series.pow(n[k - 1] as u32))
        };
        for _ in 0..10_000 {
            let (v, c) = t_order_lead(&h).ok_or_else(|| SemiError::NotABranch("semiroot vanishes identically".into()))?;
            let v = v as u64;
            if v == bar[k] {
                break;
            }
            if v > bar[k] {
                return Err(SemiError::NotABranch(format!("semiroot {k} overshoots order {}", bar[k])));
            }
            let m = standard_representation(v, &bar[..k], &n[..k])
                .ok_or_else(|| SemiError::NotABranch(format!("order {v} not reachable while building semiroot {k}")))?;
            let mut prod = Polynomial::one(&t_ring());
            for (i, &mi) in m.iter().enumerate() {
                prod = &prod * &out[i].series.pow(mi);
            }
            let (_, pc) = t_order_lead(&prod).expect("nonzero product");
            let q = c / pc;
            h = &h - &prod.scale(&q);
            let mut full = m;
            full.resize(g + 1, 0);
            let mono = Polynomial::term(&ur, Monomial(full), q);
            expr = &expr - &mono;
        }
        out.push(Semiroot { expression: expr, series: h });
    }
    Ok(out)
}

// ---------------------------------------------------------------- toric ideal

#[derive(Clone, Debug, Serialize)]
pub struct Binomial {
    pub lhs: Vec<u32>,
    #[serde(serialize_with = "crate::kernel::ser_rational")]
    pub coefficient: Rational,
    pub rhs: Vec<u32>,
    pub degree: u64,
}

#[derive(Clone, Debug)]
pub struct ToricIdeal {
    pub weights: Vec<u64>,
    pub binomials: Vec<Binomial>,
    pub generators: Vec<Polynomial>,
}

#[derive(Serialize)]
pub struct ToricIdealRecord {
    pub weights: Vec<u64>,
    pub generators: Vec<String>,
    pub binomials: Vec<Binomial>,
}

pub fn monomial_weight(e: &[u32], w: &[u64]) -> u64 {
    e.iter().zip(w).map(|(&a, &b)| a as u64 * b).sum()
}

impl ToricIdeal {
    pub fn vars(&self) -> &Arc<[String]> {
        self.generators[0].vars()
    }

    /// Substitutes `U_i ↦ T^{γ_i}` into every generator.
    pub fn vanishes_on_curve(&self) -> bool {
        self.generators.iter().all(|p| {
            let mut acc: std::collections::BTreeMap<u64, Rational> = Default::default();
            for (m, c) in p.terms() {
                *acc.entry(monomial_weight(&m.0, &self.weights)).or_insert_with(Rational::zero) += c;
            }
            acc.values().all(|c| c.is_zero())
        })
    }

    pub fn contains_generator(&self, p: &Polynomial) -> bool {
        self.generators.iter().any(|g| g == p || *g == -p.clone())
    }

    pub fn record(&self) -> ToricIdealRecord {
        ToricIdealRecord {
            weights: self.weights.clone(),
            generators: self.generators.iter().map(|p| p.to_string()).collect(),
            binomials: self.binomials.clone(),
        }
    }
}

pub fn toric_order(weights: &[u64]) -> MonomialOrder {
    MonomialOrder::Elimination { block: 0, weights: weights.to_vec() }
}

pub fn toric_ideal(gamma: &NumericalSemigroup, budget: &Budget) -> Result<ToricIdeal, SemiError> {
    let g = gamma.g();
    if g == 0 {
        return Err(SemiError::NoRelations);
    }
    let w = &gamma.minimal_generators;
    let mut names = vec!["T".to_string()];
    names.extend((0..=g).map(|i| format!("U{i}")));
    let big = var_list(&names);
    let gens: Vec<Polynomial> = (0..=g)
        .map(|i| {
            let t = Polynomial::term(&big, Monomial::var(g + 2, 0), Rational::one()).pow(w[i] as u32);
            &Polynomial::var(&big, i + 1) - &t
        })
        .collect();
    let order = MonomialOrder::Elimination { block: 1, weights: w.clone() };
    let gb = groebner_basis(&gens, &order, budget)?;
    let ur = u_ring(g);
    let inner = toric_order(w);
    let mut generators = Vec::new();
    let mut binomials = Vec::new();
    for p in gb.iter().filter(|p| p.degree_in(0).unwrap_or(0) == 0) {
        let q = p.restrict(&ur)?.make_monic(&inner);
        let terms = q.sorted_terms(&inner);
        let ok = terms.len() == 2 && {
            let (a, b) = (&terms[0], &terms[1]);
            monomial_weight(&a.0 .0, w) == monomial_weight(&b.0 .0, w) && (b.1 + Rational::one()).is_zero()
        };
        if !ok {
            return Err(SemiError::NonBinomialElement(q.to_string()));
        }
        binomials.push(Binomial {
            lhs: terms[0].0 .0.clone(),
            coefficient: -terms[1].1.clone(),
            rhs: terms[1].0 .0.clone(),
            degree: monomial_weight(&terms[0].0 .0, w),
        });
        generators.push(q);
    }
    Ok(ToricIdeal { weights: w.clone(), binomials, generators })
}

// ---------------------------------------------------------------- fans

pub type Ray = Vec<i64>;
pub type Cone = Vec<Ray>;

pub const MAX_SUBDIVISIONS: usize = 10_000;
const MAX_PARALLELEPIPED: i64 = 50_000_000;

/// Determinant of the matrix whose columns are `cols` (dimension ≤ 3).
pub fn det(cols: &[Ray]) -> i64 {
    match cols.len() {
        1 => cols[0][0],
        2 => cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1],
        3 => {
            let (a, b, c) = (&cols[0], &cols[1], &cols[2]);
            a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1]) + c[0] * (a[1] * b[2] - a[2] * b[1])
        }
        d => panic!("det in dimension {d}"),
    }
}

/// `adj(V) · v`, so that `V⁻¹ v = adj(V) v / det V`.
fn adj_apply(cols: &[Ray], v: &[i64]) -> Vec<i64> {
    // Cramer: i-th entry is det with column i replaced by v
    (0..cols.len())
        .map(|i| {
            let mut m = cols.to_vec();
            m[i] = v.to_vec();
            det(&m)
        })
        .collect()
}

/// Coordinates of `v` in the basis `cols`, as `(numerators, denominator > 0)`.
pub fn cone_coordinates(cols: &[Ray], v: &[i64]) -> (Vec<i64>, i64) {
    let d = det(cols);
    let s = d.signum();
    (adj_apply(cols, v).into_iter().map(|x| x * s).collect(), d.abs())
}

fn canonical(fan: &mut Vec<Cone>) {
    for c in fan.iter_mut() {
        c.sort();
    }
    fan.sort();
    fan.dedup();
}

fn star_subdivide(fan: Vec<Cone>, p: &[i64]) -> Vec<Cone> {
    let mut out = Vec::with_capacity(fan.len() + 2);
    for cone in fan {
        let (mu, _) = cone_coordinates(&cone, p);
        if mu.iter().any(|&x| x < 0) || cone.iter().any(|r| r == p) {
            out.push(cone);
            continue;
        }
        for (i, &m) in mu.iter().enumerate() {
            if m > 0 {
                let mut c = cone.clone();
                c[i] = p.to_vec();
                out.push(c);
            }
        }
    }
    out
}

/// Nonzero lattice point of the half-open fundamental parallelepiped with
/// the least height `Σ λ_i`, ties broken lexicographically.
fn parallelepiped_pivot(cone: &Cone) -> Option<Ray> {
    let d = cone.len();
    let hi: Vec<i64> = (0..d).map(|k| cone.iter().map(|r| r[k].max(0)).sum()).collect();
    let lo: Vec<i64> = (0..d).map(|k| cone.iter().map(|r| r[k].min(0)).sum()).collect();
    let volume: i64 = hi.iter().zip(&lo).map(|(h, l)| h - l + 1).product();
    if volume > MAX_PARALLELEPIPED {
        return None;
    }
    let mut best: Option<(i64, Ray)> = None;
    let mut p = lo.clone();
    loop {
        if p.iter().any(|&x| x != 0) {
            let (mu, den) = cone_coordinates(cone, &p);
            if mu.iter().all(|&x| (0..den).contains(&x)) {
                let h: i64 = mu.iter().sum();
                if best.as_ref().is_none_or(|(bh, bp)| (h, &p) < (*bh, bp)) {
                    best = Some((h, p.clone()));
                }
            }
        }
        let mut k = d;
        loop {
            if k == 0 {
                return best.map(|(_, p)| p);
            }
            k -= 1;
            if p[k] < hi[k] {
                p[k] += 1;
                break;
            }
            p[k] = lo[k];
        }
    }
}

/// Fan, distinguished chart and exponent vector `a = V⁻¹γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionCertificate {
    pub cones: Vec<Cone>,
    pub chart: usize,
    pub a: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateCheck {
    pub determinants: Vec<i64>,
    pub all_unimodular: bool,
    pub gamma_is_ray: bool,
    pub a_matches: bool,
    pub a_transverse: bool,
    pub valid: bool,
}

pub fn resolve_monomial_curve(gamma: &NumericalSemigroup, max_steps: usize) -> Result<ResolutionCertificate, SemiError> {
    let d = gamma.minimal_generators.len();
    if d > 3 {
        return Err(SemiError::DimensionTooLarge(d));
    }
    let g: Ray = gamma.minimal_generators.iter().map(|&x| x as i64).collect();
    let orthant: Cone = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    let mut fan = star_subdivide(vec![orthant], &g);
    canonical(&mut fan);
    let mut steps = 0;
    while let Some(bad) = fan.iter().find(|c| det(c).abs() > 1) {
        if steps >= max_steps {
            return Err(SemiError::RegularizationBudget(max_steps));
        }
        let p = parallelepiped_pivot(bad).ok_or(SemiError::RegularizationBudget(steps))?;
        fan = star_subdivide(fan, &p);
        canonical(&mut fan);
        steps += 1;
    }
    let chart = fan.iter().position(|c| c.contains(&g)).expect("gamma is a ray after the first subdivision");
    let (num, den) = cone_coordinates(&fan[chart], &g);
    let a = num.into_iter().map(|x| x / den).collect();
    Ok(ResolutionCertificate { cones: fan, chart, a })
}

impl ResolutionCertificate {
    pub fn check(&self, gamma: &NumericalSemigroup) -> CertificateCheck {
        let g: Ray = gamma.minimal_generators.iter().map(|&x| x as i64).collect();
        let determinants: Vec<i64> = self.cones.iter().map(|c| det(c)).collect();
        let all_unimodular = determinants.iter().all(|d| d.abs() == 1);
        let chart = self.cones.get(self.chart);
        let gamma_is_ray = chart.is_some_and(|c| c.contains(&g));
        let a_matches = chart.is_some_and(|c| {
            let (num, den) = cone_coordinates(c, &g);
            den != 0 && num.iter().zip(&self.a).all(|(n, a)| *n == a * den)
        });
        let a_transverse = self.a.iter().filter(|&&x| x == 1).count() == 1 && self.a.iter().all(|&x| x == 0 || x == 1);
        let valid = all_unimodular && gamma_is_ray && a_matches && a_transverse;
        CertificateCheck { determinants, all_unimodular, gamma_is_ray, a_matches, a_transverse, valid }
    }

    /// How many cones contain `v` in their interior and on their boundary.
    pub fn locate(&self, v: &[i64]) -> (usize, usize) {
        let mut interior = 0;
        let mut boundary = 0;
        for c in &self.cones {
            let (mu, _) = cone_coordinates(c, v);
            if mu.iter().all(|&x| x > 0) {
                interior += 1;
            } else if mu.iter().all(|&x| x >= 0) {
                boundary += 1;
            }
        }
        (interior, boundary)
    }

    /// `V⁻¹` of the chart cone, rows indexed by chart coordinate.
    pub fn chart_inverse(&self) -> Result<Vec<Vec<i64>>, SemiError> {
        let c = self.cones.get(self.chart).ok_or_else(|| SemiError::InvalidCertificate("chart index out of range".into()))?;
        let d = det(c);
        if d.abs() != 1 {
            return Err(SemiError::InvalidCertificate(format!("chart determinant {d}")));
        }
        let n = c.len();
        let cols: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let e: Vec<i64> = (0..n).map(|j| i64::from(i == j)).collect();
                cone_coordinates(c, &e).0
            })
            .collect();
        Ok((0..n).map(|j| (0..n).map(|i| cols[i][j]).collect()).collect())
    }
}

// ---------------------------------------------------------------- strict transform

/// Power series truncated to `len()` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Series(pub Vec<Rational>);

impl Series {
    pub fn one(prec: usize) -> Self {
        let mut c = vec![Rational::zero(); prec];
        if prec > 0 {
            c[0] = Rational::one();
        }
        Series(c)
    }

    /// Coefficients of `p(t) / t^shift` up to `prec` terms.
    pub fn from_shifted(p: &Polynomial, shift: u32, prec: usize) -> Self {
        let mut c = vec![Rational::zero(); prec];
        for (m, v) in p.terms() {
            let e = m.0[0];
            if e >= shift && ((e - shift) as usize) < prec {
                c[(e - shift) as usize] = v.clone();
            }
        }
        Series(c)
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.0.len().min(o.0.len());
        let mut c = vec![Rational::zero(); n];
        for (i, a) in self.0.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        Series(c)
    }

    /// Inverse of a unit.
    pub fn inv(&self) -> Series {
        let n = self.0.len();
        let a0 = self.0[0].clone();
        assert!(!a0.is_zero(), "series is not a unit");
        let mut c = vec![Rational::zero(); n];
        c[0] = a0.recip();
        for k in 1..n {
            let mut s = Rational::zero();
            for j in 1..=k {
                s += &self.0[j] * &c[k - j];
            }
            c[k] = -s / &a0;
        }
        Series(c)
    }

    pub fn powi(&self, e: i64) -> Series {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut out = Series::one(self.0.len());
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformReport {
    pub chart: Cone,
    pub inverse: Vec<Vec<i64>>,
    pub precision: usize,
    pub expected: Vec<i64>,
    pub orders: Vec<i64>,
    /// Coefficients of `y_j / t^{ord}` up to the available precision.
    pub units: Vec<Vec<String>>,
    pub pass: bool,
}

pub fn default_precision(gamma: &NumericalSemigroup) -> usize {
    gamma.conductor as usize + 10
}

/// Monomial change of coordinates of the chart applied to the embedding
/// series `ξ` (polynomials in `t`).
pub fn verify_strict_transform(
    gamma: &NumericalSemigroup,
    xi: &[Polynomial],
    cert: &ResolutionCertificate,
    precision: usize,
) -> Result<TransformReport, SemiError> {
    let w = &gamma.minimal_generators;
    if xi.len() != w.len() {
        return Err(SemiError::InvalidInput(format!("{} embedding series for {} generators", xi.len(), w.len())));
    }
    let maxw = *w.iter().max().unwrap() as usize;
    if precision < maxw + 2 {
        return Err(SemiError::TruncationInsufficient { precision, required: maxw + 2 });
    }
    let inverse = cert.chart_inverse()?;
    let mut units = Vec::new();
    for (i, x) in xi.iter().enumerate() {
        let ord = t_order_lead(x).map(|(e, _)| e);
        if ord != Some(w[i] as u32) {
            return Err(SemiError::OrderMismatch { index: i, expected: w[i], found: ord });
        }
        units.push(Series::from_shifted(x, w[i] as u32, precision - w[i] as usize));
    }
    let prec = precision - maxw;
    let units: Vec<Series> = units.into_iter().map(|s| Series(s.0[..prec].to_vec())).collect();
    let mut orders = Vec::new();
    let mut out_units = Vec::new();
    for row in &inverse {
        let ord: i64 = row.iter().zip(w).map(|(&e, &g)| e * g as i64).sum();
        let mut u = Series::one(prec);
        for (s, &e) in units.iter().zip(row) {
            u = u.mul(&s.powi(e));
        }
        orders.push(ord);
        out_units.push(u);
    }
    let transverse_ok = cert.a.iter().zip(&out_units).all(|(&a, u)| a != 1 || !u.0[0].is_zero());
    let pass = orders == cert.a && transverse_ok;
    Ok(TransformReport {
        chart: cert.cones[cert.chart].clone(),
        inverse,
        precision,
        expected: cert.a.clone(),
        orders,
        units: out_units.iter().map(|u| u.0.iter().map(format_rational).collect()).collect(),
        pass,
    })
}

/// Embedding series of the monomial curve `ξ_i = t^{γ_i}`.
pub fn monomial_curve(gamma: &NumericalSemigroup) -> Vec<Polynomial> {
    let r = t_ring();
    gamma.minimal_generators.iter().map(|&g| Polynomial::term(&r, Monomial(vec![g as u32]), Rational::one())).collect()
}

// ---------------------------------------------------------------- weights

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Weight {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Weight::Finite(w) => s.serialize_u64(*w),
            Weight::Infinite => s.serialize_str("inf"),
        }
    }
}

pub fn weight(p: &Polynomial, weights: &[u64]) -> Weight {
    p.terms().map(|(m, _)| monomial_weight(&m.0, weights)).min().map_or(Weight::Infinite, Weight::Finite)
}

/// Terms of minimal weight.
pub fn initial_form(p: &Polynomial, weights: &[u64]) -> Polynomial {
    match weight(p, weights) {
        Weight::Infinite => p.clone(),
        Weight::Finite(w0) => Polynomial::from_terms(
            p.vars(),
            p.terms().filter(|(m, _)| monomial_weight(&m.0, weights) == w0).map(|(m, c)| (m.clone(), c.clone())),
        ),
    }
}

#[derive(Clone, Debug)]
pub struct OverweightDeformation {
    pub weights: Vec<u64>,
    pub series: Vec<Polynomial>,
    pub expected_initials: Vec<Polynomial>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OverweightVerdict {
    pub series: String,
    pub expected: String,
    pub initial_form: String,
    pub initial_weight: Weight,
    /// Least weight among the remaining terms.
    pub deformation_weight: Weight,
    pub pass: bool,
}

fn is_homogeneous_binomial(b: &Polynomial, weights: &[u64]) -> bool {
    let ws: Vec<u64> = b.terms().map(|(m, _)| monomial_weight(&m.0, weights)).collect();
    ws.len() == 2 && ws[0] == ws[1]
}

pub fn overweight_check(d: &OverweightDeformation) -> Result<Vec<OverweightVerdict>, SemiError> {
    if d.series.len() != d.expected_initials.len() {
        return Err(SemiError::InvalidInput(format!(
            "{} series against {} expected binomials",
            d.series.len(),
            d.expected_initials.len()
        )));
    }
    if d.weights.contains(&0) {
        return Err(SemiError::NonPositive);
    }
    let mut out = Vec::new();
    for (s, b) in d.series.iter().zip(&d.expected_initials) {
        if !is_homogeneous_binomial(b, &d.weights) {
            return Err(SemiError::NotHomogeneous(b.to_string()));
        }
        out.push(verdict(s, b, &d.weights));
    }
    Ok(out)
}

fn verdict(s: &Polynomial, b: &Polynomial, weights: &[u64]) -> OverweightVerdict {
    let init = initial_form(s, weights);
    let rest = s - &init;
    let wb = weight(b, weights);
    let wi = weight(s, weights);
    let wr = weight(&rest, weights);
    let pass = init == *b && wr > wb;
    OverweightVerdict {
        series: s.to_string(),
        expected: b.to_string(),
        initial_form: init.to_string(),
        initial_weight: wi,
        deformation_weight: wr,
        pass,
    }
}

/// Checks a series against whichever generator of `ideal` matches its
/// initial form up to sign.
pub fn overweight_against_ideal(s: &Polynomial, ideal: &ToricIdeal) -> OverweightVerdict {
    let init = initial_form(s, &ideal.weights);
    let target = ideal
        .generators
        .iter()
        .find(|g| **g == init || **g == -init.clone())
        .cloned()
        .map(|g| if g == init { g } else { -g });
    match target {
        Some(b) => verdict(s, &b, &ideal.weights),
        None => {
            let mut v = verdict(s, &init, &ideal.weights);
            v.expected = "none".into();
            v.pass = false;
            v
        }
    }
}

pub fn parse_weights(src: &str) -> Result<Vec<u64>, SemiError> {
    src.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| SemiError::InvalidInput(format!("bad weight {s:?}"))))
        .collect()
}

/// Parses a series in `U0..Ug` with `g + 1 = weights.len()`.
pub fn parse_series(src: &str, weights: &[u64]) -> Result<Polynomial, SemiError> {
    Ok(Polynomial::parse(src, &u_ring(weights.len() - 1))?)
}
