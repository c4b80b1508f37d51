//! Experiment manifests: a JSON description of a germ or branch, the stages
//! to run on it and the assertions the results must satisfy.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::critmap::verify_jacobian_identity;
use crate::discriminant::{cerf_trace, equal_level_search, exact_discriminant_1d, maxwell_scan, CerfConfig, EventKind};
use crate::kernel::parse::parse_rational;
use crate::kernel::{var_list, Budget, Polynomial, Rational};
use crate::milnor::{analyze_germ, miniversal_unfolding, Unfolding};
use crate::morselab::{degree_invariance_scan, euler_fiber_check, herman_probe, sample_parameter, MorseConfig};
use crate::semitoric::{
    branch_semigroup, default_precision, overweight_check, resolve_monomial_curve, semigroup_from_generators, semiroots,
    toric_ideal, verify_strict_transform, NumericalSemigroup, OverweightDeformation, PlaneBranch, MAX_SUBDIVISIONS,
};

pub const SCHEMA: &str = "singlab-manifest/1";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("manifest parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("manifest field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, kind: String, message: String },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl PipelineError {
    pub fn kind(&self) -> &str {
        match self {
            PipelineError::Parse { .. } => "ManifestParse",
            PipelineError::Schema { .. } => "ManifestSchema",
            PipelineError::Stage { kind, .. } => kind,
            PipelineError::Io { .. } => "Io",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            PipelineError::Parse { line, column, .. } => {
                obj["line"] = json!(line);
                obj["column"] = json!(column);
            }
            PipelineError::Schema { field, .. } => obj["field"] = json!(field),
            PipelineError::Stage { stage, .. } => obj["stage"] = json!(stage),
            PipelineError::Io { path, .. } => obj["path"] = json!(path),
        }
        json!({ "error": obj })
    }
}

/// Variant name of an error's `Debug` form, used as a stable error kind.
pub fn error_kind<E: std::fmt::Debug>(e: &E) -> String {
    let d = format!("{e:?}");
    let end = d.find(|c: char| !c.is_alphanumeric() && c != '_').unwrap_or(d.len());
    d[..end].to_string()
}

fn stage_err<E: std::fmt::Debug + std::fmt::Display>(stage: Stage, e: E) -> PipelineError {
    PipelineError::Stage { stage: stage.name().into(), kind: error_kind(&e), message: e.to_string() }
}

fn schema(field: &str, message: impl Into<String>) -> PipelineError {
    PipelineError::Schema { field: field.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Analyze,
    Unfold,
    VerifyIdentity,
    DegreeScan,
    EulerCheck,
    HermanProbe,
    Discriminant,
    Cerf,
    Maxwell,
    EqualLevel,
    Semigroup,
    ToricIdeal,
    ToricResolve,
    StrictTransform,
    Overweight,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Analyze => "analyze",
            Stage::Unfold => "unfold",
            Stage::VerifyIdentity => "verify-identity",
            Stage::DegreeScan => "degree-scan",
            Stage::EulerCheck => "euler-check",
            Stage::HermanProbe => "herman-probe",
            Stage::Discriminant => "discriminant",
            Stage::Cerf => "cerf",
            Stage::Maxwell => "maxwell",
            Stage::EqualLevel => "equal-level",
            Stage::Semigroup => "semigroup",
            Stage::ToricIdeal => "toric-ideal",
            Stage::ToricResolve => "toric-resolve",
            Stage::StrictTransform => "strict-transform",
            Stage::Overweight => "overweight",
        }
    }

    fn needs_germ(self) -> bool {
        !matches!(self, Stage::Semigroup | Stage::ToricIdeal | Stage::ToricResolve | Stage::StrictTransform | Stage::Overweight)
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub value_equality: Option<f64>,
    pub degeneracy_margin: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CerfSpec {
    pub path: Vec<Vec<Value>>,
    pub steps: usize,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub segments: Option<usize>,
    pub index: Option<usize>,
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverweightSpec {
    pub weights: Vec<u64>,
    pub series: Vec<String>,
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub report: Option<String>,
    pub samples_csv: Option<String>,
    pub svg: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_sum: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub herman: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cerf_events: Option<std::collections::BTreeMap<String, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semigroup: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toric_contains: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_valid: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_transform: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overweight: Option<Vec<bool>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub germ: Option<String>,
    #[serde(default)]
    pub variables: Option<Vec<String>>,
    #[serde(default)]
    pub box_radius: Option<Value>,
    #[serde(default)]
    pub delta: Option<Value>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub euler_samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub cerf: Option<CerfSpec>,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default)]
    pub branch: Option<String>,
    #[serde(default)]
    pub generators: Option<Vec<u64>>,
    #[serde(default)]
    pub overweight: Option<OverweightSpec>,
    #[serde(default)]
    pub assertions: Assertions,
    #[serde(default)]
    pub outputs: Outputs,
}

/// Manifest with every numeric field parsed and checked.
#[derive(Clone, Debug)]
pub struct Validated {
    pub manifest: Manifest,
    pub box_radius: Rational,
    pub delta: Rational,
    pub samples: usize,
    pub euler_samples: usize,
    pub seed: u64,
    pub value_tol: f64,
    pub degeneracy_tol: f64,
    pub cerf_path: Vec<Vec<Rational>>,
}

fn rational_field(field: &str, v: &Value) -> Result<Rational, PipelineError> {
    let text = match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(schema(field, "expected a number or a rational string such as \"1/4\"")),
    };
    parse_rational(&text).map_err(|e| schema(field, e.to_string()))
}

fn positive(field: &str, v: Option<&Value>, default: i64) -> Result<Rational, PipelineError> {
    let r = match v {
        Some(v) => rational_field(field, v)?,
        None => Rational::from_integer(default.into()),
    };
    if r <= Rational::from_integer(0.into()) {
        return Err(schema(field, format!("must be positive, got {r}")));
    }
    Ok(r)
}

pub fn parse_manifest(src: &str) -> Result<Validated, PipelineError> {
    let m: Manifest = serde_json::from_str(src)
        .map_err(|e| PipelineError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    validate(m)
}

pub fn validate(m: Manifest) -> Result<Validated, PipelineError> {
    if m.schema != SCHEMA {
        return Err(schema("schema", format!("unsupported schema {:?}; expected {SCHEMA:?}", m.schema)));
    }
    if m.stages.is_empty() {
        return Err(schema("stages", "at least one stage is required"));
    }
    let box_radius = positive("box_radius", m.box_radius.as_ref(), 4)?;
    let delta = positive("delta", m.delta.as_ref(), 1)?;
    let samples = m.samples.unwrap_or(100);
    if samples < 2 {
        return Err(schema("samples", "must be at least 2"));
    }
    let euler_samples = m.euler_samples.unwrap_or(20);
    if euler_samples == 0 {
        return Err(schema("euler_samples", "must be positive"));
    }
    let value_tol = m.tolerances.value_equality.unwrap_or(1e-8);
    if !(value_tol > 0.0) {
        return Err(schema("tolerances.value_equality", "must be positive"));
    }
    let degeneracy_tol = m.tolerances.degeneracy_margin.unwrap_or(1e-6);
    if !(degeneracy_tol > 0.0) {
        return Err(schema("tolerances.degeneracy_margin", "must be positive"));
    }
    if m.stages.iter().any(|s| s.needs_germ()) && m.germ.is_none() {
        return Err(schema("germ", "required by the requested stages"));
    }
    let mut cerf_path = Vec::new();
    if m.stages.contains(&Stage::Cerf) {
        let spec = m.cerf.as_ref().ok_or_else(|| schema("cerf", "required by stage cerf"))?;
        if spec.steps == 0 {
            return Err(schema("cerf.steps", "must be positive"));
        }
        for (i, p) in spec.path.iter().enumerate() {
            let pt = p
                .iter()
                .enumerate()
                .map(|(j, v)| rational_field(&format!("cerf.path[{i}][{j}]"), v))
                .collect::<Result<Vec<_>, _>>()?;
            cerf_path.push(pt);
        }
        if cerf_path.is_empty() {
            return Err(schema("cerf.path", "needs at least one breakpoint"));
        }
    }
    let semitoric = [Stage::Semigroup, Stage::ToricIdeal, Stage::ToricResolve, Stage::StrictTransform];
    if m.stages.iter().any(|s| semitoric.contains(s)) && m.branch.is_none() && m.generators.is_none() {
        return Err(schema("branch", "semitoric stages need `branch` or `generators`"));
    }
    if m.stages.contains(&Stage::StrictTransform) && m.branch.is_none() {
        return Err(schema("branch", "required by stage strict-transform"));
    }
    if m.stages.contains(&Stage::Overweight) && m.overweight.is_none() {
        return Err(schema("overweight", "required by stage overweight"));
    }
    Ok(Validated {
        seed: m.seed.unwrap_or(0),
        manifest: m,
        box_radius,
        delta,
        samples,
        euler_samples,
        value_tol,
        degeneracy_tol,
        cerf_path,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StageOutcome {
    pub stage: &'static str,
    pub result: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub expected: Value,
    pub found: Value,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub seed: u64,
    pub stages: Vec<StageOutcome>,
    pub assertions: Vec<AssertionOutcome>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub samples_csv: Option<String>,
    pub svg: Option<String>,
}

impl RunOutput {
    /// Canonical report bytes.
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Default)]
struct Found {
    mu: Option<Value>,
    identity: Option<Value>,
    alt_sum: Option<Value>,
    degree: Option<Value>,
    euler: Option<Value>,
    herman: Option<Value>,
    discriminant: Option<Value>,
    cerf_events: Option<Value>,
    semigroup: Option<Value>,
    toric: Option<Vec<Polynomial>>,
    certificate_valid: Option<Value>,
    strict_transform: Option<Value>,
    overweight: Option<Value>,
}

fn unfolding_of(v: &Validated, budget: &Budget) -> Result<Unfolding, PipelineError> {
    let src = v.manifest.germ.as_deref().expect("validated");
    let f = match &v.manifest.variables {
        Some(names) => Polynomial::parse(src, &var_list(names)),
        None => Polynomial::parse_auto(src),
    }
    .map_err(|e| schema("germ", e.to_string()))?;
    let a = analyze_germ(&f, budget).map_err(|e| stage_err(Stage::Analyze, e))?;
    miniversal_unfolding(&a).map_err(|e| stage_err(Stage::Unfold, e))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

pub fn run_manifest(v: &Validated, budget: &Budget) -> Result<RunOutput, PipelineError> {
    let m = &v.manifest;
    let morse = MorseConfig { box_radius: v.box_radius.clone(), ..MorseConfig::default() };
    let mut stages = Vec::new();
    let mut found = Found::default();
    let mut samples_csv = None;
    let mut svg = None;

    let unfolding = if m.stages.iter().any(|s| s.needs_germ()) { Some(unfolding_of(v, budget)?) } else { None };
    let branch = match &m.branch {
        Some(b) => Some(PlaneBranch::parse(b).map_err(|e| schema("branch", e.to_string()))?),
        None => None,
    };
    let mut semigroup: Option<NumericalSemigroup> = None;
    let mut certificate = None;

    for &stage in &m.stages {
        let err = |e: &dyn std::fmt::Display, kind: String| PipelineError::Stage {
            stage: stage.name().into(),
            kind,
            message: e.to_string(),
        };
        let result: Value = match stage {
            Stage::Analyze => {
                let u = unfolding.as_ref().expect("germ");
                found.mu = Some(json!(u.mu()));
                to_value(&u.analysis.record())
            }
            Stage::Unfold => to_value(&unfolding.as_ref().expect("germ").record()),
            Stage::VerifyIdentity => {
                let p = verify_jacobian_identity(unfolding.as_ref().expect("germ")).map_err(|e| stage_err(stage, e))?;
                found.identity = Some(json!(p.holds));
                to_value(&p)
            }
            Stage::DegreeScan => {
                let u = unfolding.as_ref().expect("germ");
                let r = degree_invariance_scan(u, v.samples, &v.delta, v.seed, &morse).map_err(|e| stage_err(stage, e))?;
                found.alt_sum = Some(json!(r.alt_sum));
                found.degree = Some(json!(r.degree));
                samples_csv = Some(r.to_csv());
                let mut val = to_value(&r);
                val.as_object_mut().expect("object").remove("rows");
                val
            }
            Stage::EulerCheck => {
                let u = unfolding.as_ref().expect("germ");
                let mut reports = Vec::new();
                let mut draws = 0u64;
                while reports.len() < v.euler_samples {
                    if draws as usize >= v.euler_samples * crate::morselab::DRAWS_PER_SAMPLE {
                        return Err(err(&format!("only {} accepted samples after {draws} draws", reports.len()), "InsufficientAcceptance".into()));
                    }
                    let t = sample_parameter(u.num_params(), &v.delta, v.seed, draws);
                    draws += 1;
                    match euler_fiber_check(u, &t, &morse) {
                        Ok(r) => reports.push(r),
                        Err(e) if e.is_rejection() => {}
                        Err(e) => return Err(stage_err(stage, e)),
                    }
                }
                let holds = reports.iter().filter(|r| r.holds).count();
                found.euler = Some(json!(holds == reports.len()));
                json!({ "draws": draws, "accepted": reports.len(), "holds": holds, "samples": reports })
            }
            Stage::HermanProbe => {
                let u = unfolding.as_ref().expect("germ");
                let w = herman_probe(u, v.samples, &v.delta, v.seed, &morse).map_err(|e| stage_err(stage, e))?;
                found.herman = Some(json!(w.is_some()));
                json!({ "budget": v.samples, "witness": w })
            }
            Stage::Discriminant => {
                let d = exact_discriminant_1d(unfolding.as_ref().expect("germ")).map_err(|e| stage_err(stage, e))?;
                let rec = d.record();
                found.discriminant = Some(json!(rec.discriminant));
                to_value(&rec)
            }
            Stage::Cerf => {
                let spec = m.cerf.as_ref().expect("validated");
                let cfg = CerfConfig { morse: morse.clone(), delta: v.delta.clone(), hessian_tol: v.degeneracy_tol, ..CerfConfig::default() };
                let tr = cerf_trace(unfolding.as_ref().expect("germ"), &v.cerf_path, spec.steps, &cfg).map_err(|e| stage_err(stage, e))?;
                let mut counts = serde_json::Map::new();
                for k in [EventKind::Birth, EventKind::Death, EventKind::Crossing, EventKind::Maxwell, EventKind::Unresolved] {
                    counts.insert(to_value(&k).as_str().expect("string").to_string(), json!(tr.count(k)));
                }
                found.cerf_events = Some(Value::Object(counts.clone()));
                svg = Some(tr.to_svg());
                json!({ "steps": tr.steps, "path": tr.path, "event_counts": counts, "events": tr.events })
            }
            Stage::Maxwell => {
                let segments = m.search.segments.unwrap_or(64);
                let pts = maxwell_scan(unfolding.as_ref().expect("germ"), segments, &v.delta, v.seed, v.value_tol, &morse)
                    .map_err(|e| stage_err(stage, e))?;
                json!({ "segments": segments, "points": pts })
            }
            Stage::EqualLevel => {
                let w = equal_level_search(
                    unfolding.as_ref().expect("germ"),
                    m.search.index.unwrap_or(0),
                    m.search.budget.unwrap_or(v.samples),
                    v.value_tol,
                    &v.delta,
                    v.seed,
                    &morse,
                )
                .map_err(|e| stage_err(stage, e))?;
                json!({ "witness": w })
            }
            Stage::Semigroup => {
                let s = semigroup_of(m, branch.as_ref()).map_err(|e| stage_err(stage, e))?;
                found.semigroup = Some(json!(s.minimal_generators));
                let mut val = to_value(&s);
                val["gaps"] = json!(s.gaps());
                if let Some(b) = &branch {
                    val["characteristic_exponents"] = json!(b.characteristic_exponents().map_err(|e| stage_err(stage, e))?);
                }
                semigroup = Some(s);
                val
            }
            Stage::ToricIdeal => {
                let s = ensure(&mut semigroup, m, branch.as_ref()).map_err(|e| stage_err(stage, e))?;
                let ideal = toric_ideal(&s, budget).map_err(|e| stage_err(stage, e))?;
                found.toric = Some(ideal.generators.clone());
                json!({ "ideal": ideal.record(), "vanishes_on_curve": ideal.vanishes_on_curve() })
            }
            Stage::ToricResolve => {
                let s = ensure(&mut semigroup, m, branch.as_ref()).map_err(|e| stage_err(stage, e))?;
                let c = resolve_monomial_curve(&s, MAX_SUBDIVISIONS).map_err(|e| stage_err(stage, e))?;
                let check = c.check(&s);
                found.certificate_valid = Some(json!(check.valid));
                let val = json!({ "certificate": c, "check": check });
                certificate = Some(c);
                val
            }
            Stage::StrictTransform => {
                let b = branch.as_ref().expect("validated");
                let s = ensure(&mut semigroup, m, Some(b)).map_err(|e| stage_err(stage, e))?;
                if certificate.is_none() {
                    certificate = Some(resolve_monomial_curve(&s, MAX_SUBDIVISIONS).map_err(|e| stage_err(stage, e))?);
                }
                let c = certificate.as_ref().expect("set");
                let roots = semiroots(b).map_err(|e| stage_err(stage, e))?;
                let xi: Vec<Polynomial> = roots.iter().map(|r| r.series.clone()).collect();
                let deformed = verify_strict_transform(&s, &xi, c, default_precision(&s)).map_err(|e| stage_err(stage, e))?;
                let mono = crate::semitoric::monomial_curve(&s);
                let monomial = verify_strict_transform(&s, &mono, c, default_precision(&s)).map_err(|e| stage_err(stage, e))?;
                found.strict_transform = Some(json!(deformed.pass && monomial.pass));
                json!({
                    "semiroots": roots.iter().map(|r| json!({ "expression": r.expression.to_string(), "series": r.series.to_string() })).collect::<Vec<_>>(),
                    "monomial_curve": monomial,
                    "branch": deformed,
                })
            }
            Stage::Overweight => {
                let spec = m.overweight.as_ref().expect("validated");
                let d = overweight_deformation(spec).map_err(|e| stage_err(stage, e))?;
                let verdicts = overweight_check(&d).map_err(|e| stage_err(stage, e))?;
                found.overweight = Some(json!(verdicts.iter().map(|x| x.pass).collect::<Vec<_>>()));
                json!({ "weights": spec.weights, "verdicts": verdicts })
            }
        };
        stages.push(StageOutcome { stage: stage.name(), result });
    }

    let assertions = check_assertions(&m.assertions, &found)?;
    let pass = assertions.iter().all(|a| a.pass);
    Ok(RunOutput {
        report: RunReport { schema: SCHEMA, name: m.name.clone(), seed: v.seed, stages, assertions, pass },
        samples_csv,
        svg,
    })
}

fn semigroup_of(m: &Manifest, branch: Option<&PlaneBranch>) -> Result<NumericalSemigroup, crate::semitoric::SemiError> {
    match (branch, &m.generators) {
        (Some(b), _) => branch_semigroup(b),
        (None, Some(g)) => semigroup_from_generators(g),
        (None, None) => unreachable!("validated"),
    }
}

fn ensure(
    slot: &mut Option<NumericalSemigroup>,
    m: &Manifest,
    branch: Option<&PlaneBranch>,
) -> Result<NumericalSemigroup, crate::semitoric::SemiError> {
    if slot.is_none() {
        *slot = Some(semigroup_of(m, branch)?);
    }
    Ok(slot.clone().expect("set"))
}

pub fn overweight_deformation(spec: &OverweightSpec) -> Result<OverweightDeformation, crate::semitoric::SemiError> {
    use crate::semitoric::parse_series;
    if spec.weights.is_empty() {
        return Err(crate::semitoric::SemiError::Empty);
    }
    let series = spec.series.iter().map(|s| parse_series(s, &spec.weights)).collect::<Result<Vec<_>, _>>()?;
    let expected = spec.expected.iter().map(|s| parse_series(s, &spec.weights)).collect::<Result<Vec<_>, _>>()?;
    Ok(OverweightDeformation { weights: spec.weights.clone(), series, expected_initials: expected })
}

fn check_assertions(a: &Assertions, f: &Found) -> Result<Vec<AssertionOutcome>, PipelineError> {
    let mut out = Vec::new();
    let mut cmp = |name: &str, expected: Option<Value>, found: &Option<Value>| -> Result<(), PipelineError> {
        if let Some(e) = expected {
            let got = found.clone().ok_or_else(|| schema(&format!("assertions.{name}"), "no stage produces this value"))?;
            out.push(AssertionOutcome { name: name.into(), pass: e == got, expected: e, found: got });
        }
        Ok(())
    };
    cmp("mu", a.mu.map(|x| json!(x)), &f.mu)?;
    cmp("identity", a.identity.map(|x| json!(x)), &f.identity)?;
    cmp("alt_sum", a.alt_sum.map(|x| json!(x)), &f.alt_sum)?;
    cmp("degree", a.degree.map(|x| json!(x)), &f.degree)?;
    cmp("euler", a.euler.map(|x| json!(x)), &f.euler)?;
    cmp("herman", a.herman.map(|x| json!(x)), &f.herman)?;
    cmp("discriminant", a.discriminant.as_ref().map(|x| json!(x)), &f.discriminant)?;
    cmp("semigroup", a.semigroup.as_ref().map(|x| json!(x)), &f.semigroup)?;
    cmp("certificate_valid", a.certificate_valid.map(|x| json!(x)), &f.certificate_valid)?;
    cmp("strict_transform", a.strict_transform.map(|x| json!(x)), &f.strict_transform)?;
    cmp("overweight", a.overweight.as_ref().map(|x| json!(x)), &f.overweight)?;
    if let Some(want) = &a.cerf_events {
        let got = f.cerf_events.clone().ok_or_else(|| schema("assertions.cerf_events", "no stage produces this value"))?;
        for (k, n) in want {
            let g = got.get(k).cloned().ok_or_else(|| schema("assertions.cerf_events", format!("unknown event kind {k:?}")))?;
            out.push(AssertionOutcome { name: format!("cerf_events.{k}"), pass: g == json!(n), expected: json!(n), found: g });
        }
    }
    if let Some(want) = &a.toric_contains {
        let got = f.toric.as_ref().ok_or_else(|| schema("assertions.toric_contains", "no stage produces this value"))?;
        let shown: Vec<String> = got.iter().map(|p| p.to_string()).collect();
        for w in want {
            let pass = got.first().is_some_and(|g0| {
                Polynomial::parse(w, g0.vars()).is_ok_and(|w| got.iter().any(|p| *p == w || *p == -w.clone()))
            });
            out.push(AssertionOutcome { name: format!("toric_contains {w}"), expected: json!(w), found: json!(shown), pass });
        }
    }
    Ok(out)
}

/// Runs a manifest file and writes its declared outputs next to it.
pub fn run_manifest_file(path: &Path, budget: &Budget) -> Result<RunOutput, PipelineError> {
    let io = |p: &Path, e: std::io::Error| PipelineError::Io { path: p.display().to_string(), message: e.to_string() };
    let src = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    let v = parse_manifest(&src)?;
    let out = run_manifest(&v, budget)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let o = &v.manifest.outputs;
    let writes = [
        (o.report.as_ref(), Some(out.report_json())),
        (o.samples_csv.as_ref(), out.samples_csv.clone()),
        (o.svg.as_ref(), out.svg.clone()),
    ];
    for (target, body) in writes {
        if let (Some(t), Some(b)) = (target, body) {
            let p = base.join(t);
            std::fs::write(&p, b).map_err(|e| io(&p, e))?;
        }
    }
    Ok(out)
}
