//! Critical points of `F_t` at parameter points: certified location,
//! Morse index, counts `N_i`, the alternating sum, degree scans, the Euler
//! fiber relation and the no-critical-point probe.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::interval::eval_interval;
use crate::kernel::resultant::subresultant;
use crate::kernel::{isolate_real_roots, rational, resultant, KernelError, Polynomial, RatInterval, Rational, UniPoly};
use crate::milnor::Unfolding;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("unsupported dimension n = {0} (supported: 1, 2)")]
    UnsupportedDimension(usize),
    #[error("parameter vector has {found} entries, expected {expected}")]
    ParameterDimension { expected: usize, found: usize },
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("critical point outside the box: {0}")]
    BoxEscape(String),
    #[error("alternating sum {found} at sample {sample} disagrees with {expected}")]
    InconsistentDegree { expected: i64, found: i64, sample: u64 },
    #[error("only {accepted} accepted samples after {draws} draws")]
    InsufficientAcceptance { accepted: usize, draws: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl MorseError {
    /// Errors that mean "resample", as opposed to hard failures.
    pub fn is_rejection(&self) -> bool {
        matches!(self, MorseError::DegenerateParameter(_) | MorseError::BoxEscape(_))
    }
}

#[derive(Clone, Debug)]
pub struct MorseConfig {
    /// Half side `r` of the working box `[-r, r]^n`.
    pub box_radius: Rational,
    /// Target width of critical-value enclosures.
    pub value_width: Rational,
}

impl Default for MorseConfig {
    fn default() -> Self {
        MorseConfig { box_radius: rational(4, 1), value_width: Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 40)) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub location: Vec<RatInterval>,
    pub value: RatInterval,
    pub index: usize,
    pub hessian_det_sign: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct MorseReport {
    #[serde(serialize_with = "crate::kernel::ser_rational_vec")]
    pub t: Vec<Rational>,
    pub points: Vec<CriticalPoint>,
    pub counts: Vec<usize>,
    pub alt_sum: i64,
    pub degree: i64,
    pub excellent: bool,
}

/// Located critical points plus the univariate elimination polynomial that
/// certifies them.
#[derive(Clone, Debug)]
pub struct Located {
    pub points: Vec<CriticalPoint>,
    pub elimination: UniPoly,
    pub real_roots: usize,
}

fn two_pow(k: u32) -> Rational {
    Rational::from_integer(num_bigint::BigInt::one() << k)
}

/// `t_k = δ·m_k / 2^16` with `m_k` uniform in `[-2^16, 2^16]`; sample `index`
/// uses its own ChaCha stream so results do not depend on evaluation order.
pub fn sample_parameter(dim: usize, delta: &Rational, seed: u64, index: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let den = Rational::from_integer(65536.into());
    (0..dim)
        .map(|_| {
            let m: i64 = rng.random_range(-65536..=65536);
            delta * Rational::from_integer(m.into()) / &den
        })
        .collect()
}

pub fn check_parameter(u: &Unfolding, t: &[Rational]) -> Result<(), MorseError> {
    if t.len() != u.num_params() {
        return Err(MorseError::ParameterDimension { expected: u.num_params(), found: t.len() });
    }
    Ok(())
}

/// All real critical points of `F_t` in `[-r, r]^n`, each certified simple.
pub fn critical_points(u: &Unfolding, t: &[Rational], cfg: &MorseConfig) -> Result<Vec<CriticalPoint>, MorseError> {
    Ok(locate(u, t, cfg)?.points)
}

pub fn locate(u: &Unfolding, t: &[Rational], cfg: &MorseConfig) -> Result<Located, MorseError> {
    check_parameter(u, t)?;
    if !cfg.box_radius.is_positive() {
        return Err(MorseError::InvalidInput("box radius must be positive".into()));
    }
    let f = u.specialize(t);
    match u.n() {
        1 => locate_1d(&f, cfg),
        2 => locate_2d(&f, cfg),
        n => Err(MorseError::UnsupportedDimension(n)),
    }
}

fn interval_of(lo: &Rational, hi: &Rational) -> RatInterval {
    RatInterval::new(lo.clone(), hi.clone())
}

fn locate_1d(f: &Polynomial, cfg: &MorseConfig) -> Result<Located, MorseError> {
    let r = &cfg.box_radius;
    let d = UniPoly::from_polynomial(&f.derivative(0), 0)?;
    if d.is_zero() {
        return Err(MorseError::DegenerateParameter("F_t is constant".into()));
    }
    if d.degree() == Some(0) {
        return Ok(Located { points: Vec::new(), elimination: d, real_roots: 0 });
    }
    let bound = d.root_bound() + Rational::one();
    let all = isolate_real_roots(&d, &-&bound, &bound)?;
    if let Some(iv) = all.iter().find(|iv| iv.multiplicity > 1) {
        return Err(MorseError::DegenerateParameter(format!("multiple critical point near {}", iv.midpoint())));
    }
    let inside = isolate_real_roots(&d, &-r, r)?;
    if inside.len() != all.len() {
        return Err(MorseError::BoxEscape(format!("{} of {} real critical points lie outside [-{r}, {r}]", all.len() - inside.len(), all.len())));
    }
    let mut points = Vec::with_capacity(inside.len());
    for mut iv in inside {
        // d changes sign across a simple root, so the sign at the right end is sign(F'')
        let s = d.sign_at(&iv.hi);
        let mut w = cfg.value_width.clone();
        let value = loop {
            iv.refine(&d, &w);
            let v = eval_interval(f, &[interval_of(&iv.lo, &iv.hi)]);
            if v.width() <= cfg.value_width {
                break v;
            }
            w /= two_pow(8);
        };
        points.push(CriticalPoint {
            location: vec![interval_of(&iv.lo, &iv.hi)],
            value,
            index: if s > 0 { 0 } else { 1 },
            hessian_det_sign: s,
        });
    }
    Ok(Located { real_roots: all.len(), points, elimination: d })
}

const SHEARS: [(i64, i64); 10] = [(1, 1), (2, 1), (-1, 1), (3, 1), (1, 2), (-2, 1), (5, 1), (1, 3), (-3, 1), (7, 1)];

struct Projection {
    c: Rational,
    r: UniPoly,
    /// Linear polynomial `s1·w + s0` in the sheared coordinates whose root is `w` at each solution.
    s1: Polynomial,
    s0: Polynomial,
}

/// Shears `z = u - c·w` until the resultant in `w` is square-free with
/// constant leading coefficients, which certifies every complex solution is
/// simple and has its own `u`.
fn project(p: &Polynomial, q: &Polynomial) -> Result<Projection, MorseError> {
    let vars = p.vars().clone();
    let (z, w) = (Polynomial::var(&vars, 0), Polynomial::var(&vars, 1));
    let mut last = String::from("no shear tried");
    for (a, b) in SHEARS {
        let c = rational(a, b);
        let shear = &z - &w.scale(&c);
        let (pc, qc) = (p.compose(0, &shear), q.compose(0, &shear));
        let (dp, dq) = (pc.degree_in(1).unwrap_or(0), qc.degree_in(1).unwrap_or(0));
        if dp == 0 || dq == 0 || !pc.lead_coefficient_in(1).is_constant() || !qc.lead_coefficient_in(1).is_constant() {
            last = format!("shear {c}: nonconstant leading coefficient");
            continue;
        }
        let res = resultant(&pc, &qc, 1)?;
        if res.is_zero() {
            last = format!("shear {c}: common component");
            continue;
        }
        let r = UniPoly::from_polynomial(&res, 0)?;
        let dr = r.derivative();
        if r.degree().unwrap_or(0) > 0 && r.gcd(&dr).degree().unwrap_or(0) > 0 {
            last = format!("shear {c}: resultant not square-free");
            continue;
        }
        let lin = if dp.min(dq) == 1 {
            if dp == 1 { pc.clone() } else { qc.clone() }
        } else {
            subresultant(&pc, &qc, 1, 1)?
        };
        let co = lin.coefficients_in(1);
        if co.len() != 2 {
            last = format!("shear {c}: degenerate first subresultant");
            continue;
        }
        let s1u = UniPoly::from_polynomial(&co[1], 0)?;
        if r.degree().unwrap_or(0) > 0 && r.gcd(&s1u).degree().unwrap_or(0) > 0 {
            last = format!("shear {c}: subresultant vanishes at a solution");
            continue;
        }
        return Ok(Projection { c, r, s1: co[1].clone(), s0: co[0].clone() });
    }
    Err(MorseError::DegenerateParameter(last))
}

fn box_status(iv: &RatInterval, r: &Rational) -> Option<bool> {
    if iv.lo >= -r && &iv.hi <= r {
        Some(true)
    } else if &iv.lo > r || iv.hi < -r {
        Some(false)
    } else {
        None
    }
}

fn locate_2d(f: &Polynomial, cfg: &MorseConfig) -> Result<Located, MorseError> {
    let r = &cfg.box_radius;
    let (p, q) = (f.derivative(0), f.derivative(1));
    let proj = project(&p, &q)?;
    if proj.r.degree().unwrap_or(0) == 0 {
        return Ok(Located { points: Vec::new(), elimination: proj.r, real_roots: 0 });
    }
    let bound = proj.r.root_bound() + Rational::one();
    let roots = isolate_real_roots(&proj.r, &-&bound, &bound)?;
    let fzz = p.derivative(0);
    let fzw = p.derivative(1);
    let fww = q.derivative(1);
    let zero_iv = RatInterval::point(Rational::zero());
    let mut points = Vec::new();
    let mut escaped = 0usize;
    for mut iv in roots.clone() {
        let mut width = two_pow(20).recip();
        let mut done = None;
        for _ in 0..40 {
            iv.refine(&proj.r, &width);
            width /= two_pow(8);
            let iu = interval_of(&iv.lo, &iv.hi);
            let den = eval_interval(&proj.s1, &[iu.clone(), zero_iv.clone()]);
            let num = eval_interval(&proj.s0, &[iu.clone(), zero_iv.clone()]);
            let Some(wv) = num.div(&den) else { continue };
            let wv = wv.scale(&-Rational::one());
            let zv = iu.sub(&wv.scale(&proj.c));
            let (Some(zin), Some(win)) = (box_status(&zv, r), box_status(&wv, r)) else { continue };
            if !(zin && win) {
                done = Some(None);
                break;
            }
            let b = [zv.clone(), wv.clone()];
            let hzz = eval_interval(&fzz, &b);
            let det = hzz.mul(&eval_interval(&fww, &b)).sub(&eval_interval(&fzw, &b).powi(2));
            let ds = det.sign();
            if ds == 0 || (ds > 0 && hzz.sign() == 0) {
                continue;
            }
            let value = eval_interval(f, &b);
            if value.width() > cfg.value_width {
                continue;
            }
            let index = if ds < 0 { 1 } else if hzz.sign() > 0 { 0 } else { 2 };
            done = Some(Some(CriticalPoint { location: vec![zv, wv], value, index, hessian_det_sign: ds }));
            break;
        }
        match done {
            Some(Some(cp)) => points.push(cp),
            Some(None) => escaped += 1,
            None => return Err(MorseError::DegenerateParameter(format!("could not certify the solution over u near {}", iv.midpoint()))),
        }
    }
    if escaped > 0 {
        return Err(MorseError::BoxEscape(format!("{escaped} of {} real critical points lie outside [-{r}, {r}]^2", roots.len())));
    }
    debug_assert_eq!(points.len(), roots.len());
    Ok(Located { real_roots: roots.len(), points, elimination: proj.r })
}

/// Counts by index, alternating sum, degree and excellence.
pub fn morse_counts(t: &[Rational], points: Vec<CriticalPoint>, n: usize) -> MorseReport {
    let mut counts = vec![0usize; n + 1];
    for p in &points {
        counts[p.index] += 1;
    }
    let alt_sum: i64 = counts.iter().enumerate().map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
    let degree = if n % 2 == 0 { alt_sum } else { -alt_sum };
    let excellent = points
        .iter()
        .enumerate()
        .all(|(i, a)| points[i + 1..].iter().all(|b| !a.value.overlaps(&b.value)));
    MorseReport { t: t.to_vec(), points, counts, alt_sum, degree, excellent }
}

pub fn evaluate(u: &Unfolding, t: &[Rational], cfg: &MorseConfig) -> Result<MorseReport, MorseError> {
    let pts = critical_points(u, t, cfg)?;
    Ok(morse_counts(t, pts, u.n()))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Rejections {
    pub degenerate: usize,
    pub box_escape: usize,
    pub not_excellent: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub sample: u64,
    pub counts: Vec<usize>,
    pub alt_sum: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub requested: usize,
    pub draws: usize,
    pub accepted: usize,
    pub rejected: Rejections,
    pub alt_sum: i64,
    pub degree: i64,
    /// Keyed by the count vector `N_0,..,N_n`.
    pub histogram: BTreeMap<String, usize>,
    pub sign_violations: usize,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let n = self.rows.first().map(|r| r.counts.len()).unwrap_or(1);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["sample".to_string()];
        header.extend((0..n).map(|i| format!("N_{i}")));
        header.push("alt_sum".into());
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![r.sample.to_string()];
            rec.extend(r.counts.iter().map(|c| c.to_string()));
            rec.push(r.alt_sum.to_string());
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Maximum draws per requested accepted sample.
pub const DRAWS_PER_SAMPLE: usize = 20;

/// Evaluates seeded parameter draws `0, 1, ..` in parallel batches, in
/// index order, until `samples` are accepted.
pub fn degree_invariance_scan(u: &Unfolding, samples: usize, delta: &Rational, seed: u64, cfg: &MorseConfig) -> Result<ScanReport, MorseError> {
    if samples < 2 {
        return Err(MorseError::InvalidInput("samples must be at least 2".into()));
    }
    if !delta.is_positive() {
        return Err(MorseError::InvalidInput("delta must be positive".into()));
    }
    let max_draws = samples * DRAWS_PER_SAMPLE;
    let batch = rayon::current_num_threads().max(1) * 4;
    let mut report = ScanReport {
        requested: samples,
        draws: 0,
        accepted: 0,
        rejected: Rejections::default(),
        alt_sum: 0,
        degree: 0,
        histogram: BTreeMap::new(),
        sign_violations: 0,
        rows: Vec::new(),
    };
    let mut constant: Option<i64> = None;
    let mut next = 0usize;
    while report.accepted < samples && next < max_draws {
        let end = (next + batch).min(max_draws);
        let results: Vec<Result<MorseReport, MorseError>> = (next..end)
            .into_par_iter()
            .map(|i| evaluate(u, &sample_parameter(u.num_params(), delta, seed, i as u64), cfg))
            .collect();
        for (k, res) in results.into_iter().enumerate() {
            if report.accepted == samples {
                break;
            }
            let index = (next + k) as u64;
            report.draws += 1;
            let rep = match res {
                Ok(r) => r,
                Err(MorseError::DegenerateParameter(_)) => {
                    report.rejected.degenerate += 1;
                    continue;
                }
                Err(MorseError::BoxEscape(_)) => {
                    report.rejected.box_escape += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            if !rep.excellent {
                report.rejected.not_excellent += 1;
                continue;
            }
            match constant {
                None => constant = Some(rep.alt_sum),
                Some(c) if c != rep.alt_sum => {
                    return Err(MorseError::InconsistentDegree { expected: c, found: rep.alt_sum, sample: index })
                }
                _ => {}
            }
            report.sign_violations +=
                rep.points.iter().filter(|p| !crate::critmap::sign_relation_holds(p.hessian_det_sign, p.index)).count();
            let key = rep.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
            *report.histogram.entry(key).or_default() += 1;
            report.rows.push(ScanRow { sample: index, counts: rep.counts, alt_sum: rep.alt_sum });
            report.accepted += 1;
        }
        next = end;
    }
    if report.accepted < 2 {
        return Err(MorseError::InsufficientAcceptance { accepted: report.accepted, draws: report.draws });
    }
    report.alt_sum = constant.expect("accepted samples");
    report.degree = if u.n() % 2 == 0 { report.alt_sum } else { -report.alt_sum };
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerReport {
    #[serde(serialize_with = "crate::kernel::ser_rational_vec")]
    pub t: Vec<Rational>,
    pub vacuous: bool,
    pub lambda_above: String,
    pub lambda_below: String,
    pub epsilon: String,
    pub chi_above: usize,
    pub chi_below: usize,
    pub alt_sum: i64,
    pub holds: bool,
}

fn fiber_count(f: &UniPoly, lambda: &Rational, r: &Rational) -> Result<usize, MorseError> {
    let g = f.sub(&UniPoly::constant(lambda.clone()));
    if g.is_zero() {
        return Err(MorseError::DegenerateParameter("F_t is constant".into()));
    }
    if g.degree() == Some(0) {
        return Ok(0);
    }
    Ok(isolate_real_roots(&g, &-r, r)?.len())
}

/// For `n = 1`: compares the fiber cardinalities just above the largest and
/// just below the smallest critical value with twice the alternating sum.
///
/// `ε` is a tenth of the smallest positive gap among the critical values and
/// the boundary values `F_t(±r)`, so no boundary point of the box is crossed
/// between the two fibers and the extreme critical values.
pub fn euler_fiber_check(u: &Unfolding, t: &[Rational], cfg: &MorseConfig) -> Result<EulerReport, MorseError> {
    if u.n() != 1 {
        return Err(MorseError::UnsupportedDimension(u.n()));
    }
    let rep = evaluate(u, t, cfg)?;
    let f = UniPoly::from_polynomial(&u.specialize(t), 0)?;
    let r = &cfg.box_radius;
    if rep.points.is_empty() {
        let c = fiber_count(&f, &Rational::zero(), r)?;
        return Ok(EulerReport {
            t: t.to_vec(),
            vacuous: true,
            lambda_above: "0".into(),
            lambda_below: "0".into(),
            epsilon: "0".into(),
            chi_above: c,
            chi_below: c,
            alt_sum: 0,
            holds: true,
        });
    }
    let lo = rep.points.iter().map(|p| p.value.lo.clone()).min().expect("nonempty");
    let hi = rep.points.iter().map(|p| p.value.hi.clone()).max().expect("nonempty");
    let boundary = [f.eval(&-r), f.eval(r)];
    for b in &boundary {
        if b >= &lo && b <= &hi {
            return Err(MorseError::BoxEscape(format!("boundary value {b} lies between critical values")));
        }
    }
    let gaps: Vec<Rational> = rep
        .points
        .iter()
        .flat_map(|a| rep.points.iter().filter(|b| b.value.lo > a.value.hi).map(|b| &b.value.lo - &a.value.hi))
        .chain(boundary.iter().map(|b| if b > &hi { b - &hi } else { &lo - b }))
        .collect();
    let eps = gaps.into_iter().min().unwrap_or_else(Rational::one) / rational(10, 1);
    let above = &hi + &eps;
    let below = &lo - &eps;
    let chi_above = fiber_count(&f, &above, r)?;
    let chi_below = fiber_count(&f, &below, r)?;
    let holds = chi_above as i64 - chi_below as i64 == 2 * rep.alt_sum;
    Ok(EulerReport {
        t: t.to_vec(),
        vacuous: false,
        lambda_above: above.to_string(),
        lambda_below: below.to_string(),
        epsilon: eps.to_string(),
        chi_above,
        chi_below,
        alt_sum: rep.alt_sum,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HermanWitness {
    pub sample: u64,
    #[serde(serialize_with = "crate::kernel::ser_rational_vec")]
    pub t: Vec<Rational>,
    /// Univariate elimination polynomial with no real roots.
    pub elimination: String,
    pub real_roots: usize,
}

/// First seeded draw at which `F_t` has no real critical point at all.
pub fn herman_probe(u: &Unfolding, budget: usize, delta: &Rational, seed: u64, cfg: &MorseConfig) -> Result<Option<HermanWitness>, MorseError> {
    for i in 0..budget as u64 {
        let t = sample_parameter(u.num_params(), delta, seed, i);
        match locate(u, &t, cfg) {
            Ok(loc) if loc.real_roots == 0 => {
                debug_assert_eq!(loc.elimination.count_real_roots(), 0);
                return Ok(Some(HermanWitness { sample: i, t, elimination: loc.elimination.to_string(), real_roots: 0 }));
            }
            Ok(_) => {}
            Err(e) if e.is_rejection() => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}
