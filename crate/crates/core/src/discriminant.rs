//! Discriminant geometry: exact discriminants for one variable, Cerf traces
//! along parameter paths, Maxwell-set scanning, the equal-level search and
//! sampled slices of `D`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::critmap::hessian;
use crate::kernel::interval::eval_interval;
use crate::kernel::{isolate_real_roots, rational, resultant, var_list, KernelError, MonomialOrder, Polynomial, RatInterval, Rational, UniPoly};
use crate::milnor::Unfolding;
use crate::morselab::{evaluate, sample_parameter, CriticalPoint, MorseConfig, MorseError, MorseReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiscError {
    #[error("unsupported dimension n = {0}; this operation needs n = 1")]
    UnsupportedDimension(usize),
    #[error("path breakpoint {0} lies outside the parameter box")]
    PathOutsideBox(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// `res_z(F - λ, ∂F/∂z)` over `(λ, t_1, ..)`, made primitive over the
/// integers with the lex-leading term of the top `λ`-coefficient positive.
#[derive(Clone, Debug)]
pub struct DiscriminantCurve {
    pub poly: Polynomial,
}

#[derive(Serialize)]
pub struct DiscriminantRecord {
    pub variables: Vec<String>,
    pub discriminant: String,
    pub lambda_degree: u32,
}

impl DiscriminantCurve {
    pub fn record(&self) -> DiscriminantRecord {
        DiscriminantRecord {
            variables: self.poly.vars().to_vec(),
            discriminant: self.poly.to_string(),
            lambda_degree: self.poly.degree_in(0).unwrap_or(0),
        }
    }

    pub fn eval(&self, lambda: &Rational, t: &[Rational]) -> Rational {
        let mut pt = vec![lambda.clone()];
        pt.extend_from_slice(t);
        self.poly.eval(&pt)
    }

    /// Whether the interval extension on `λ ∈ lambda`, fixed `t`, contains 0.
    pub fn meets(&self, lambda: &RatInterval, t: &[Rational]) -> bool {
        let mut b = vec![lambda.clone()];
        b.extend(t.iter().cloned().map(RatInterval::point));
        eval_interval(&self.poly, &b).contains_zero()
    }
}

fn primitive_normalized(p: &Polynomial) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    let den = p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let scaled = p.scale(&Rational::from_integer(den));
    let g = scaled.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
    let mut out = scaled.scale(&Rational::new(BigInt::one(), g));
    let top = out.lead_coefficient_in(0);
    let (_, c) = top.leading_term(&MonomialOrder::Lex).expect("nonzero");
    if c.is_negative() {
        out = -out;
    }
    out
}

pub fn exact_discriminant_1d(u: &Unfolding) -> Result<DiscriminantCurve, DiscError> {
    if u.n() != 1 {
        return Err(DiscError::UnsupportedDimension(u.n()));
    }
    let mut names = vec![u.vars()[0].clone(), "lambda".to_string()];
    names.extend(u.param_names());
    let big = var_list(&names);
    // reorder [z, t..] into [z, lambda, t..]
    let f = Polynomial::from_terms(
        &big,
        u.big_f.terms().map(|(m, c)| {
            let mut e = vec![m.0[0], 0];
            e.extend_from_slice(&m.0[1..]);
            (crate::kernel::Monomial(e), c.clone())
        }),
    );
    let lam = Polynomial::var(&big, 1);
    let r = resultant(&(&f - &lam), &f.derivative(0), 0)?;
    let target = var_list(&names[1..]);
    let r = r.restrict(&target)?;
    Ok(DiscriminantCurve { poly: primitive_normalized(&r) })
}

#[derive(Clone, Debug)]
pub struct CerfConfig {
    pub morse: MorseConfig,
    /// Parameter box radius δ that path breakpoints must respect.
    pub delta: Rational,
    /// Witness threshold for |h| at a birth or death.
    pub hessian_tol: f64,
    pub max_halvings: usize,
}

impl Default for CerfConfig {
    fn default() -> Self {
        CerfConfig { morse: MorseConfig::default(), delta: rational(1, 1), hessian_tol: 1e-6, max_halvings: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Birth,
    Death,
    Crossing,
    Maxwell,
    Unresolved,
}

#[derive(Clone, Debug, Serialize)]
pub struct CerfEvent {
    /// First step after the event.
    pub step: usize,
    pub s: f64,
    pub kind: EventKind,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hessian_witness: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CerfSample {
    pub step: usize,
    pub s: f64,
    pub status: &'static str,
    pub counts: Vec<usize>,
    pub values: Vec<f64>,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CerfTrace {
    pub path: Vec<Vec<String>>,
    pub steps: usize,
    pub samples: Vec<CerfSample>,
    pub events: Vec<CerfEvent>,
    /// Critical-value curves as `(s, λ)` polylines.
    pub curves: Vec<Vec<(f64, f64)>>,
}

fn path_point(path: &[Vec<Rational>], s: &Rational) -> Vec<Rational> {
    let segs = path.len() - 1;
    let x = s * Rational::from_integer(segs.into());
    let j = x.floor().to_integer().to_usize().unwrap_or(0).min(segs - 1);
    let frac = x - Rational::from_integer(j.into());
    path[j].iter().zip(&path[j + 1]).map(|(a, b)| a + (b - a) * &frac).collect()
}

fn f64_of(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn loc_mid(p: &CriticalPoint) -> Vec<f64> {
    p.location.iter().map(|i| i.mid_f64()).collect()
}

/// Injective nearest-neighbour matching of `small` into `large` among
/// points of equal index; `None` when some choice is ambiguous.
fn match_points(small: &[CriticalPoint], large: &[CriticalPoint]) -> Option<Vec<usize>> {
    let dist = |a: &CriticalPoint, b: &CriticalPoint| {
        let dv = (a.value.mid_f64() - b.value.mid_f64()).abs();
        let dl: f64 = loc_mid(a).iter().zip(loc_mid(b)).map(|(x, y)| (x - y).abs()).sum();
        dv + dl
    };
    let mut used = vec![false; large.len()];
    let mut out = Vec::with_capacity(small.len());
    for a in small {
        let mut cands: Vec<(f64, usize)> =
            large.iter().enumerate().filter(|(j, b)| !used[*j] && b.index == a.index).map(|(j, b)| (dist(a, b), j)).collect();
        cands.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (d1, j) = *cands.first()?;
        if let Some((d2, _)) = cands.get(1) {
            if *d2 < 2.0 * d1 {
                return None;
            }
        }
        used[j] = true;
        out.push(j);
    }
    Some(out)
}

/// One birth or death: counts differ by one in two adjacent indices.
fn birth_death(a: &[usize], b: &[usize]) -> Option<(EventKind, usize)> {
    let diff: Vec<i64> = a.iter().zip(b).map(|(x, y)| *y as i64 - *x as i64).collect();
    let nz: Vec<usize> = (0..diff.len()).filter(|&i| diff[i] != 0).collect();
    match nz.as_slice() {
        [i, j] if *j == i + 1 && diff[*i] == diff[*j] && diff[*i].abs() == 1 => {
            Some((if diff[*i] > 0 { EventKind::Birth } else { EventKind::Death }, *i))
        }
        _ => None,
    }
}

struct Tracer<'a> {
    u: &'a Unfolding,
    path: &'a [Vec<Rational>],
    cfg: &'a CerfConfig,
    h: Polynomial,
}

enum Eval {
    Good(MorseReport),
    Degenerate,
    Escape,
}

impl Tracer<'_> {
    fn eval(&self, s: &Rational) -> Result<Eval, DiscError> {
        let t = path_point(self.path, s);
        match evaluate(self.u, &t, &self.cfg.morse) {
            Ok(r) => Ok(Eval::Good(r)),
            Err(MorseError::DegenerateParameter(_)) => Ok(Eval::Degenerate),
            Err(MorseError::BoxEscape(_)) => Ok(Eval::Escape),
            Err(e) => Err(e.into()),
        }
    }

    fn h_at(&self, t: &[Rational], p: &CriticalPoint) -> f64 {
        let mut pt: Vec<Rational> = p.location.iter().map(|i| i.midpoint()).collect();
        pt.extend_from_slice(t);
        f64_of(&self.h.eval(&pt)).abs()
    }

    /// Bisects a birth/death bracket until the merging pair shows
    /// `|h| < tol`, or an exactly degenerate parameter is hit.
    fn locate_birth_death(&self, mut sa: Rational, ra: &MorseReport, mut sb: Rational, rb: &MorseReport) -> Result<(f64, f64), DiscError> {
        let (mut ca, cb) = (ra.counts.clone(), rb.counts.clone());
        let mut best = f64::INFINITY;
        let more = if ra.points.len() > rb.points.len() { ra } else { rb };
        let tm = path_point(self.path, if ra.points.len() > rb.points.len() { &sa } else { &sb });
        for p in &more.points {
            best = best.min(self.h_at(&tm, p));
        }
        for _ in 0..80 {
            if best < self.cfg.hessian_tol {
                break;
            }
            let mid = (&sa + &sb) / rational(2, 1);
            match self.eval(&mid)? {
                Eval::Degenerate => {
                    return Ok((f64_of(&mid), 0.0));
                }
                Eval::Escape => break,
                Eval::Good(r) => {
                    let t = path_point(self.path, &mid);
                    if r.counts == ca {
                        sa = mid;
                        ca = r.counts.clone();
                    } else if r.counts == cb {
                        sb = mid;
                    } else {
                        break;
                    }
                    if r.points.len() == more.points.len() {
                        best = r.points.iter().map(|p| self.h_at(&t, p)).fold(f64::INFINITY, f64::min);
                    }
                }
            }
        }
        Ok((f64_of(&((&sa + &sb) / rational(2, 1))), best))
    }
}

struct Curve {
    pts: Vec<(f64, f64)>,
}

/// Traces critical values along the piecewise-linear path through `path`
/// at `s = k/steps`, reporting births, deaths, crossings and Maxwell
/// crossings.
pub fn cerf_trace(u: &Unfolding, path: &[Vec<Rational>], steps: usize, cfg: &CerfConfig) -> Result<CerfTrace, DiscError> {
    if steps < 2 {
        return Err(DiscError::InvalidInput("steps must be at least 2".into()));
    }
    if path.is_empty() {
        return Err(DiscError::InvalidInput("empty path".into()));
    }
    for (k, p) in path.iter().enumerate() {
        if p.len() != u.num_params() {
            return Err(MorseError::ParameterDimension { expected: u.num_params(), found: p.len() }.into());
        }
        if p.iter().any(|x| x.abs() > cfg.delta) {
            return Err(DiscError::PathOutsideBox(k));
        }
    }
    let path: Vec<Vec<Rational>> = if path.len() == 1 { vec![path[0].clone(), path[0].clone()] } else { path.to_vec() };
    let tr = Tracer { u, path: &path, cfg, h: hessian(u).h };

    let ss: Vec<Rational> = (0..=steps).map(|k| rational(k as i64, steps as i64)).collect();
    let evals: Vec<Result<Eval, DiscError>> = ss.par_iter().map(|s| tr.eval(s)).collect();
    let mut samples = Vec::with_capacity(ss.len());
    let mut good: Vec<(usize, Rational, MorseReport)> = Vec::new();
    for (k, e) in evals.into_iter().enumerate() {
        let s = f64_of(&ss[k]);
        match e? {
            Eval::Good(r) => {
                samples.push(CerfSample {
                    step: k,
                    s,
                    status: "ok",
                    counts: r.counts.clone(),
                    values: r.points.iter().map(|p| p.value.mid_f64()).collect(),
                    indices: r.points.iter().map(|p| p.index).collect(),
                });
                good.push((k, ss[k].clone(), r));
            }
            Eval::Degenerate => samples.push(CerfSample { step: k, s, status: "degenerate", counts: vec![], values: vec![], indices: vec![] }),
            Eval::Escape => samples.push(CerfSample { step: k, s, status: "escape", counts: vec![], values: vec![], indices: vec![] }),
        }
    }

    let mut events = Vec::new();
    let mut curves: Vec<Curve> = Vec::new();
    // active[i] = curve carrying point i of the previous good report
    let mut active: Vec<usize> = Vec::new();
    let mut signs: HashMap<(usize, usize), i32> = HashMap::new();
    let mut prev: Option<(usize, Rational, MorseReport)> = None;

    let start_all = |r: &MorseReport, s: f64, curves: &mut Vec<Curve>| -> Vec<usize> {
        r.points
            .iter()
            .map(|p| {
                curves.push(Curve { pts: vec![(s, p.value.mid_f64())] });
                curves.len() - 1
            })
            .collect()
    };

    for (k, s, r) in good {
        let sf = f64_of(&s);
        let Some((_, ps, pr)) = prev.take() else {
            active = start_all(&r, sf, &mut curves);
            prev = Some((k, s, r));
            continue;
        };
        // refine between the previous good sample and this one until each
        // consecutive pair is matchable
        let chain = refine_chain(&tr, (ps.clone(), pr.clone()), (s.clone(), r.clone()), 0)?;
        let Some(chain) = chain else {
            events.push(CerfEvent { step: k, s: (f64_of(&ps) + sf) / 2.0, kind: EventKind::Unresolved, indices: vec![], values: vec![], hessian_witness: None });
            active = start_all(&r, sf, &mut curves);
            signs.clear();
            prev = Some((k, s, r));
            continue;
        };
        let mut cur_s = ps;
        let mut cur = pr;
        for (ns, nr) in chain {
            let nsf = f64_of(&ns);
            if nr.points.len() == cur.points.len() {
                let m = match_points(&cur.points, &nr.points).expect("checked by refine_chain");
                let mut next_active = vec![usize::MAX; nr.points.len()];
                for (i, &j) in m.iter().enumerate() {
                    next_active[j] = active[i];
                    curves[active[i]].pts.push((nsf, nr.points[j].value.mid_f64()));
                }
                active = next_active;
            } else {
                let (kind, _) = birth_death(&cur.counts, &nr.counts).expect("checked by refine_chain");
                let (small, large, small_is_prev) =
                    if cur.points.len() < nr.points.len() { (&cur, &nr, true) } else { (&nr, &cur, false) };
                let m = match_points(&small.points, &large.points).expect("checked by refine_chain");
                let (es, wit) = tr.locate_birth_death(cur_s.clone(), &cur, ns.clone(), &nr)?;
                let unmatched: Vec<usize> = (0..large.points.len()).filter(|j| !m.contains(j)).collect();
                events.push(CerfEvent {
                    step: k,
                    s: es,
                    kind,
                    indices: unmatched.iter().map(|&j| large.points[j].index).collect(),
                    values: unmatched.iter().map(|&j| large.points[j].value.mid_f64()).collect(),
                    hessian_witness: Some(wit),
                });
                let mut next_active = vec![usize::MAX; nr.points.len()];
                if small_is_prev {
                    for (i, &j) in m.iter().enumerate() {
                        next_active[j] = active[i];
                        curves[active[i]].pts.push((nsf, nr.points[j].value.mid_f64()));
                    }
                    for j in unmatched {
                        curves.push(Curve { pts: vec![(nsf, nr.points[j].value.mid_f64())] });
                        next_active[j] = curves.len() - 1;
                    }
                } else {
                    for (i, &j) in m.iter().enumerate() {
                        next_active[i] = active[j];
                        curves[active[j]].pts.push((nsf, nr.points[i].value.mid_f64()));
                    }
                }
                active = next_active;
            }
            // value-order swaps among curves alive on both sides
            let lows = two_lowest(&nr);
            for a in 0..nr.points.len() {
                for b in a + 1..nr.points.len() {
                    let (ca, cb) = (active[a], active[b]);
                    let key = if ca < cb { (ca, cb) } else { (cb, ca) };
                    let (pa, pb) = if ca < cb { (&nr.points[a], &nr.points[b]) } else { (&nr.points[b], &nr.points[a]) };
                    let sg = value_sign(pa, pb);
                    if sg == 0 {
                        continue;
                    }
                    if let Some(old) = signs.insert(key, sg) {
                        if old != sg {
                            let before = two_lowest(&cur);
                            let idx = [pa.index, pb.index];
                            let both_min = idx == [0, 0];
                            let pair_low = lows.contains(&a) && lows.contains(&b) && before.len() == 2;
                            let kind = if both_min && pair_low { EventKind::Maxwell } else { EventKind::Crossing };
                            events.push(CerfEvent {
                                step: k,
                                s: (f64_of(&cur_s) + nsf) / 2.0,
                                kind,
                                indices: idx.to_vec(),
                                values: vec![pa.value.mid_f64(), pb.value.mid_f64()],
                                hessian_witness: None,
                            });
                        }
                    }
                }
            }
            cur_s = ns;
            cur = nr;
        }
        prev = Some((k, s, r));
    }
    events.sort_by(|a, b| a.s.total_cmp(&b.s));
    Ok(CerfTrace {
        path: path.iter().map(|p| p.iter().map(|x| x.to_string()).collect()).collect(),
        steps,
        samples,
        events,
        curves: curves.into_iter().map(|c| c.pts).collect(),
    })
}

fn value_sign(a: &CriticalPoint, b: &CriticalPoint) -> i32 {
    if a.value.hi < b.value.lo {
        -1
    } else if b.value.hi < a.value.lo {
        1
    } else {
        0
    }
}

/// Positions of the two lowest critical values when both are minima.
fn two_lowest(r: &MorseReport) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..r.points.len()).collect();
    idx.sort_by(|&a, &b| r.points[a].value.lo.cmp(&r.points[b].value.lo));
    idx.truncate(2);
    if idx.len() == 2 && idx.iter().all(|&i| r.points[i].index == 0) {
        idx
    } else {
        Vec::new()
    }
}

fn clean_step(a: &MorseReport, b: &MorseReport) -> bool {
    if a.points.len() == b.points.len() {
        a.counts == b.counts && match_points(&a.points, &b.points).is_some()
    } else if birth_death(&a.counts, &b.counts).is_some() {
        let (small, large) = if a.points.len() < b.points.len() { (a, b) } else { (b, a) };
        match_points(&small.points, &large.points).is_some()
    } else {
        false
    }
}

type Chain = Vec<(Rational, MorseReport)>;

/// Intermediate good reports after `a` up to and including `b` such that
/// each consecutive pair is clean, or `None` after too many halvings.
fn refine_chain(tr: &Tracer, a: (Rational, MorseReport), b: (Rational, MorseReport), depth: usize) -> Result<Option<Chain>, DiscError> {
    if clean_step(&a.1, &b.1) {
        return Ok(Some(vec![b]));
    }
    if depth >= tr.cfg.max_halvings {
        return Ok(None);
    }
    let width = &b.0 - &a.0;
    let mut mid = (&a.0 + &b.0) / rational(2, 1);
    let mut tries = 0;
    let rm = loop {
        match tr.eval(&mid)? {
            Eval::Good(r) => break r,
            _ if tries < 4 => {
                tries += 1;
                mid = &a.0 + &width * rational(2 * tries + 1, 4 * tries + 4);
            }
            _ => return Ok(None),
        }
    };
    let left = refine_chain(tr, a, (mid.clone(), rm.clone()), depth + 1)?;
    let Some(mut left) = left else { return Ok(None) };
    let right = refine_chain(tr, (mid, rm), b, depth + 1)?;
    let Some(right) = right else { return Ok(None) };
    left.extend(right);
    Ok(Some(left))
}

impl CerfTrace {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Rows `(step, s, λ_1.., index_1..)`, padded to the widest sample.
    pub fn to_csv(&self) -> String {
        let width = self.samples.iter().map(|s| s.values.len()).max().unwrap_or(0);
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["step".to_string(), "s".to_string()];
        header.extend((1..=width).map(|i| format!("lambda_{i}")));
        header.extend((1..=width).map(|i| format!("index_{i}")));
        w.write_record(&header).expect("in-memory write");
        for s in &self.samples {
            let mut rec = vec![s.step.to_string(), format!("{}", s.s)];
            let pad = |v: Vec<String>| -> Vec<String> {
                let mut v = v;
                v.resize(width, String::new());
                v
            };
            rec.extend(pad(s.values.iter().map(|x| format!("{x:.12}")).collect()));
            rec.extend(pad(s.indices.iter().map(|x| x.to_string()).collect()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    /// Critical values against the path parameter, events as circles.
    pub fn to_svg(&self) -> String {
        let (w, h, m) = (640.0, 400.0, 40.0);
        let vals = self.curves.iter().flatten().map(|p| p.1);
        let (mut lo, mut hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (-1.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 1.0;
            hi += 1.0;
        }
        let x = |s: f64| m + s * (w - 2.0 * m);
        let y = |v: f64| h - m - (v - lo) / (hi - lo) * (h - 2.0 * m);
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
        let _ = writeln!(out, r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##);
        let _ = writeln!(out, r##"<line x1="{m}" y1="{}" x2="{}" y2="{}" stroke="#000000"/>"##, h - m, w - m, h - m);
        let _ = writeln!(out, r##"<line x1="{m}" y1="{m}" x2="{m}" y2="{}" stroke="#000000"/>"##, h - m);
        for c in &self.curves {
            let pts: Vec<String> = c.iter().map(|&(s, v)| format!("{:.2},{:.2}", x(s), y(v))).collect();
            let _ = writeln!(out, r##"<polyline fill="none" stroke="#1f4e99" stroke-width="1.5" points="{}"/>"##, pts.join(" "));
        }
        for e in &self.events {
            let color = match e.kind {
                EventKind::Birth | EventKind::Death => "#c0392b",
                EventKind::Crossing => "#27ae60",
                EventKind::Maxwell => "#8e44ad",
                EventKind::Unresolved => "#7f8c8d",
            };
            let v = if e.values.is_empty() { lo } else { e.values.iter().sum::<f64>() / e.values.len() as f64 };
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#, x(e.s), y(v.clamp(lo, hi)));
        }
        out.push_str("</svg>\n");
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxwellPoint {
    pub segment: usize,
    #[serde(serialize_with = "crate::kernel::ser_rational_vec")]
    pub t: Vec<Rational>,
    /// The two witnessing minima.
    pub minima: Vec<CriticalPoint>,
    pub gap: f64,
}

fn lowest_min(r: &MorseReport) -> Option<usize> {
    (0..r.points.len()).filter(|&i| r.points[i].index == 0).min_by(|&a, &b| r.points[a].value.lo.cmp(&r.points[b].value.lo))
}

fn nearest(r: &MorseReport, loc: &[f64]) -> usize {
    (0..r.points.len())
        .min_by(|&a, &b| {
            let d = |i: usize| loc_mid(&r.points[i]).iter().zip(loc).map(|(x, y)| (x - y).abs()).sum::<f64>();
            d(a).total_cmp(&d(b))
        })
        .expect("nonempty")
}

/// Random segments in the parameter box, sampled at 32 points each; where
/// the global minimum jumps between two minima, bisect to equal levels.
pub fn maxwell_scan(u: &Unfolding, segments: usize, delta: &Rational, seed: u64, tol: f64, cfg: &MorseConfig) -> Result<Vec<MaxwellPoint>, DiscError> {
    let dim = u.num_params();
    let found: Vec<Result<Option<MaxwellPoint>, DiscError>> = (0..segments)
        .into_par_iter()
        .map(|seg| {
            let a = sample_parameter(dim, delta, seed, 2 * seg as u64);
            let b = sample_parameter(dim, delta, seed, 2 * seg as u64 + 1);
            let path = [a, b];
            let at = |s: &Rational| -> Result<Option<MorseReport>, DiscError> {
                match evaluate(u, &path_point(&path, s), cfg) {
                    Ok(r) => Ok(Some(r)),
                    Err(e) if e.is_rejection() => Ok(None),
                    Err(e) => Err(e.into()),
                }
            };
            let mut prev: Option<(Rational, MorseReport)> = None;
            for k in 0..=32 {
                let s = rational(k, 32);
                let Some(r) = at(&s)? else {
                    prev = None;
                    continue;
                };
                if r.counts[0] < 2 {
                    prev = None;
                    continue;
                }
                if let Some((ps, pr)) = prev.take() {
                    if pr.counts == r.counts {
                        let pm = lowest_min(&pr).expect("two minima");
                        let cm = lowest_min(&r).expect("two minima");
                        if nearest(&r, &loc_mid(&pr.points[pm])) != cm {
                            if let Some(p) = bisect_maxwell(&at, &path, (ps, pr), (s.clone(), r.clone()), tol)? {
                                return Ok(Some(MaxwellPoint { segment: seg, ..p }));
                            }
                        }
                    }
                }
                prev = Some((s, r));
            }
            Ok(None)
        })
        .collect();
    let mut out = Vec::new();
    for f in found {
        out.extend(f?);
    }
    Ok(out)
}

fn bisect_maxwell<F>(at: &F, path: &[Vec<Rational>], a: (Rational, MorseReport), b: (Rational, MorseReport), tol: f64) -> Result<Option<MaxwellPoint>, DiscError>
where
    F: Fn(&Rational) -> Result<Option<MorseReport>, DiscError>,
{
    let (mut sa, ra) = a;
    let (mut sb, _) = b;
    let anchor = loc_mid(&ra.points[lowest_min(&ra).expect("minimum")]);
    for _ in 0..200 {
        let mid = (&sa + &sb) / rational(2, 1);
        let Some(r) = at(&mid)? else { return Ok(None) };
        if r.counts != ra.counts {
            return Ok(None);
        }
        let low = two_lowest(&r);
        if low.len() != 2 {
            return Ok(None);
        }
        let gap = (r.points[low[0]].value.mid_f64() - r.points[low[1]].value.mid_f64()).abs();
        if gap < tol && f64_of(&(&sb - &sa)) < tol {
            let minima = vec![r.points[low[0]].clone(), r.points[low[1]].clone()];
            return Ok(Some(MaxwellPoint { segment: 0, t: path_point(path, &mid), minima, gap }));
        }
        let m = lowest_min(&r).expect("minimum");
        if nearest(&r, &anchor) == m {
            sa = mid;
        } else {
            sb = mid;
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct EqualLevelWitness {
    #[serde(serialize_with = "crate::kernel::ser_rational_vec")]
    pub t: Vec<Rational>,
    pub index: usize,
    pub values: Vec<f64>,
    pub spread: f64,
    /// Only one critical point of the requested index: coincidence is vacuous.
    pub singleton: bool,
    pub evaluations: usize,
}

/// Heuristic search for `t` where all index-`i` critical values coincide.
/// Starts from the seeded draw with the most index-`i` points, then runs
/// coordinate descent on the summed squared gaps followed by a
/// minimum-norm Gauss-Newton polish.
pub fn equal_level_search(
    u: &Unfolding,
    index: usize,
    budget: usize,
    tol: f64,
    delta: &Rational,
    seed: u64,
    cfg: &MorseConfig,
) -> Result<Option<EqualLevelWitness>, DiscError> {
    let dim = u.num_params();
    // half the draws are uniform in the box; for n = 1 the other half
    // prescribe μ-1 critical points near 0 (evenly spaced, jittered) and
    // solve for t, since the conditions F_t'(r_j) = 0 are linear in t
    let prescribed = |i: u64| -> Vec<Rational> {
        let rho = rational(1, 2 << (i % 3));
        let jitter = sample_parameter(dim, &(&rho / rational(10, 1)), seed ^ 0x9e37_79b9, i);
        let m = dim.max(2) as i64 - 1;
        let roots: Vec<Rational> =
            jitter.iter().enumerate().map(|(j, e)| &rho * rational(2 * j as i64 - m, m) + e).collect();
        let fz = u.analysis.f.derivative(0);
        let a: Vec<Vec<Rational>> =
            roots.iter().map(|r| u.deformation_monomials.iter().map(|g| g_prime_at(g, r)).collect()).collect();
        let b: Vec<Rational> = roots.iter().map(|r| -fz.eval(std::slice::from_ref(r))).collect();
        match solve_exact(a, b) {
            Some(t) => t.iter().map(snap).collect(),
            None => sample_parameter(dim, delta, seed, i),
        }
    };
    let draws: Vec<(Vec<Rational>, Result<MorseReport, MorseError>)> = (0..budget as u64)
        .into_par_iter()
        .map(|i| {
            let t = if i % 2 == 0 || u.n() != 1 { sample_parameter(dim, delta, seed, i) } else { prescribed(i) };
            if t.iter().any(|x| x.abs() > *delta) {
                return (t, Err(MorseError::BoxEscape("start outside the parameter box".into())));
            }
            let r = evaluate(u, &t, cfg);
            (t, r)
        })
        .collect();
    let mut best: Option<(Vec<Rational>, usize)> = None;
    let mut evaluations = draws.len();
    for (t, r) in draws {
        match r {
            Ok(r) => {
                let c = r.counts.get(index).copied().unwrap_or(0);
                if c > 0 && best.as_ref().is_none_or(|(_, b)| c > *b) {
                    best = Some((t, c));
                }
            }
            Err(e) if e.is_rejection() => {}
            Err(e) => return Err(e.into()),
        }
    }
    let Some((mut t, target)) = best else { return Ok(None) };
    let values_at = |t: &[Rational]| -> Option<Vec<f64>> {
        let r = evaluate(u, t, cfg).ok()?;
        if r.counts[index] != target {
            return None;
        }
        // points come in a stable location order, which keeps residuals smooth
        Some(r.points.iter().filter(|p| p.index == index).map(|p| p.value.mid_f64()).collect())
    };
    let spread = |v: &[f64]| {
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    };
    let objective = |v: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                s += (v[i] - v[j]).powi(2);
            }
        }
        s
    };
    let mut vals = values_at(&t).expect("start point was accepted");
    if target == 1 {
        return Ok(Some(EqualLevelWitness { t, index, values: vals, spread: 0.0, singleton: true, evaluations }));
    }
    let clamp = |x: Rational| -> Rational {
        if &x > delta {
            delta.clone()
        } else if x < -delta {
            -delta
        } else {
            x
        }
    };
    // coordinate descent, step scaled to the start point
    let mut step = snap(&(t.iter().map(|x| x.abs()).max().unwrap_or_else(|| delta.clone()) / rational(4, 1)));
    let min_step = Rational::new(1.into(), BigInt::one() << 30);
    let mut obj = objective(&vals);
    let cd_limit = evaluations + 40 * dim;
    while step > min_step && evaluations < cd_limit && spread(&vals) >= tol {
        let mut improved = false;
        for k in 0..dim {
            for dir in [1, -1] {
                let mut cand = t.clone();
                cand[k] = clamp(&cand[k] + &step * rational(dir, 1));
                evaluations += 1;
                if let Some(v) = values_at(&cand) {
                    let o = objective(&v);
                    if o < obj {
                        (t, vals, obj, improved) = (cand, v, o, true);
                        break;
                    }
                }
            }
        }
        if !improved {
            step /= rational(2, 1);
        }
    }
    // Gauss-Newton on residuals v_j - v_0, minimum-norm steps
    let hstep = 1e-7;
    for _ in 0..40 {
        if spread(&vals) < tol || evaluations >= budget * 40 {
            break;
        }
        let res: Vec<f64> = vals[1..].iter().map(|v| v - vals[0]).collect();
        let mut jac = vec![vec![0.0; dim]; res.len()];
        let mut ok = true;
        for k in 0..dim {
            let mut cand = t.clone();
            cand[k] += Rational::from_float(hstep).expect("finite");
            evaluations += 1;
            let Some(v) = values_at(&cand) else {
                ok = false;
                break;
            };
            for (j, row) in jac.iter_mut().enumerate() {
                row[k] = ((v[j + 1] - v[0]) - res[j]) / hstep;
            }
        }
        if !ok {
            break;
        }
        let Some(dx) = min_norm_step(&jac, &res) else { break };
        let mut scale = 1.0;
        let mut moved = false;
        for _ in 0..12 {
            let cand: Vec<Rational> = t
                .iter()
                .zip(&dx)
                .map(|(x, d)| clamp(x - Rational::from_float(d * scale).unwrap_or_else(Rational::zero)))
                .collect();
            evaluations += 1;
            if let Some(v) = values_at(&cand) {
                if objective(&v) < obj {
                    obj = objective(&v);
                    (t, vals) = (cand, v);
                    moved = true;
                    break;
                }
            }
            scale /= 2.0;
        }
        if !moved {
            break;
        }
    }
    let sp = spread(&vals);
    if sp >= tol {
        return Ok(None);
    }
    Ok(Some(EqualLevelWitness { t, index, values: vals, spread: sp, singleton: false, evaluations }))
}

/// Nearest multiple of 2^-40.
fn snap(x: &Rational) -> Rational {
    let s = Rational::from_integer(BigInt::one() << 40);
    (x * &s).round() / s
}

fn g_prime_at(g: &crate::kernel::Monomial, r: &Rational) -> Rational {
    let e = g.0[0];
    if e == 0 {
        Rational::zero()
    } else {
        Rational::from_integer(e.into()) * num_traits::pow(r.clone(), e as usize - 1)
    }
}

/// Exact Gaussian elimination for a square system; `None` if singular.
fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let v = &f * &a[c][k];
                    a[r][k] -= v;
                }
                let v = &f * &b[c];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// `dx = Jᵀ (J Jᵀ)⁻¹ r` by Gaussian elimination; `None` if singular.
fn min_norm_step(j: &[Vec<f64>], r: &[f64]) -> Option<Vec<f64>> {
    let m = r.len();
    let n = j.first()?.len();
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..m).map(|k| (0..n).map(|c| j[i][c] * j[k][c]).sum()).collect();
            row.push(r[i]);
            row
        })
        .collect();
    for c in 0..m {
        let p = (c..m).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        for i in 0..m {
            if i != c {
                let f = a[i][c] / a[c][c];
                for k in c..=m {
                    a[i][k] -= f * a[c][k];
                }
            }
        }
    }
    let y: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    Some((0..n).map(|c| (0..m).map(|i| j[i][c] * y[i]).sum()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Positive,
    Negative,
    On,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceCell {
    /// Real solutions of `F_t(z) = λ` in the box at the cell centre.
    pub count: usize,
    /// Sign of the discriminant at the cell centre.
    pub side: Side,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceGrid {
    pub axis: usize,
    pub lambda_range: [String; 2],
    pub t_range: [String; 2],
    pub grid: usize,
    /// `cells[row][col]`: rows follow λ upwards, columns follow the t axis.
    pub cells: Vec<Vec<SliceCell>>,
}

#[derive(Clone, Debug)]
pub struct SlicePlane {
    /// Parameter varied along the horizontal axis (0-based).
    pub axis: usize,
    /// Values of all parameters; the entry at `axis` is ignored.
    pub fixed: Vec<Rational>,
    pub lambda: (Rational, Rational),
    pub t: (Rational, Rational),
}

/// Classifies grid cells of a `(t_axis, λ)` plane by fiber count and side
/// of the exact discriminant (n = 1).
pub fn slice_sample(u: &Unfolding, plane: &SlicePlane, grid: usize, cfg: &MorseConfig) -> Result<SliceGrid, DiscError> {
    if u.n() != 1 {
        return Err(DiscError::UnsupportedDimension(u.n()));
    }
    if grid == 0 || plane.fixed.len() != u.num_params() || (u.num_params() > 0 && plane.axis >= u.num_params()) {
        return Err(DiscError::InvalidInput("grid must be positive and the plane must match the parameters".into()));
    }
    let disc = exact_discriminant_1d(u)?;
    let g = Rational::from_integer(grid.into());
    let centre = |lo: &Rational, hi: &Rational, i: usize| lo + (hi - lo) * (Rational::from_integer(i.into()) + rational(1, 2)) / &g;
    let r = &cfg.box_radius;
    let cells: Result<Vec<Vec<SliceCell>>, DiscError> = (0..grid)
        .into_par_iter()
        .map(|row| {
            let lam = centre(&plane.lambda.0, &plane.lambda.1, row);
            (0..grid)
                .map(|col| {
                    let mut t = plane.fixed.clone();
                    if !t.is_empty() {
                        t[plane.axis] = centre(&plane.t.0, &plane.t.1, col);
                    }
                    let f = UniPoly::from_polynomial(&u.specialize(&t), 0)?;
                    let gpoly = f.sub(&UniPoly::constant(lam.clone()));
                    let count = if gpoly.degree().unwrap_or(0) == 0 { 0 } else { isolate_real_roots(&gpoly, &-r, r)?.len() };
                    let d = disc.eval(&lam, &t);
                    let side = if d.is_zero() {
                        Side::On
                    } else if d.is_positive() {
                        Side::Positive
                    } else {
                        Side::Negative
                    };
                    Ok(SliceCell { count, side })
                })
                .collect()
        })
        .collect();
    Ok(SliceGrid {
        axis: plane.axis,
        lambda_range: [plane.lambda.0.to_string(), plane.lambda.1.to_string()],
        t_range: [plane.t.0.to_string(), plane.t.1.to_string()],
        grid,
        cells: cells?,
    })
}

impl SliceGrid {
    /// One rectangle per cell shaded by fiber count; cells on the negative
    /// side of the discriminant get a darker outline.
    pub fn to_svg(&self) -> String {
        const PALETTE: [&str; 8] = ["#f7fbff", "#c6dbef", "#6baed6", "#2171b5", "#08306b", "#fdae6b", "#e6550d", "#a63603"];
        let cell = (480 / self.grid.max(1)).max(1);
        let size = cell * self.grid;
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
        for (row, cells) in self.cells.iter().enumerate() {
            let y = size - (row + 1) * cell;
            for (col, c) in cells.iter().enumerate() {
                let fill = PALETTE[c.count.min(PALETTE.len() - 1)];
                let stroke = match c.side {
                    Side::Negative => r##" stroke="#444444" stroke-width="0.5""##,
                    Side::On => r##" stroke="#ff0000" stroke-width="1""##,
                    Side::Positive => "",
                };
                let _ = writeln!(out, r#"<rect x="{}" y="{y}" width="{cell}" height="{cell}" fill="{fill}"{stroke}/>"#, col * cell);
            }
        }
        out.push_str("</svg>\n");
        out
    }
}
