use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use singlab::critmap::verify_jacobian_identity;
use singlab::discriminant::{cerf_trace, equal_level_search, exact_discriminant_1d, maxwell_scan, CerfConfig};
use singlab::kernel::parse::parse_rational;
use singlab::kernel::{Budget, Polynomial, Rational};
use singlab::milnor::{analyze_germ, miniversal_unfolding, Unfolding};
use singlab::morselab::{degree_invariance_scan, euler_fiber_check, evaluate, herman_probe, sample_parameter, MorseConfig, DRAWS_PER_SAMPLE};
use singlab::pipeline::{error_kind, run_manifest_file};
use singlab::semitoric::{
    branch_semigroup, default_precision, monomial_curve, overweight_against_ideal, overweight_check, parse_series,
    parse_weights, resolve_monomial_curve, semigroup_from_generators, semiroots, toric_ideal, verify_strict_transform,
    OverweightDeformation, PlaneBranch, MAX_SUBDIVISIONS,
};

#[derive(Parser)]
#[command(name = "singlab", version, about = "Exact laboratory for unfoldings, real discriminants and toric resolution of branches")]
struct Cli {
    /// Seed for every randomized stage.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress normal output; the exit code still reports the outcome.
    #[arg(long, global = true)]
    quiet: bool,
    /// Half side of the working box in z.
    #[arg(long, global = true, default_value = "4")]
    radius: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Milnor number, cobasis and signature of a germ.
    Analyze { germ: String },
    /// Miniversal unfolding of a germ.
    Unfold { germ: String },
    /// Checks jac(p∘ν) = (-1)^n h as a polynomial identity.
    VerifyIdentity { germ: String },
    /// Critical points and Morse counts of F_t at one parameter.
    Morse {
        germ: String,
        /// Comma-separated parameter values.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Alternating Morse sum across random parameters.
    DegreeScan {
        germ: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value = "1")]
        delta: String,
        /// Write per-sample counts here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Fiber cardinalities above and below the critical values (n = 1).
    EulerCheck {
        germ: String,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value = "1")]
        delta: String,
    },
    /// Looks for a parameter with no real critical point.
    HermanProbe {
        germ: String,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        #[arg(long, default_value = "1")]
        delta: String,
    },
    /// Exact discriminant polynomial (n = 1).
    Discriminant {
        germ: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical values along a piecewise-linear parameter path.
    Cerf {
        germ: String,
        /// File with one breakpoint per line, coordinates comma-separated.
        #[arg(long)]
        path: PathBuf,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value = "1")]
        delta: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Parameters where the absolute minimum is attained twice.
    Maxwell {
        germ: String,
        #[arg(long, default_value_t = 64)]
        segments: usize,
        #[arg(long, default_value = "1")]
        delta: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Parameter where all critical values of one index coincide.
    EqualLevel {
        germ: String,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        #[arg(long, default_value = "1")]
        delta: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Value semigroup of a branch or of explicit generators.
    Semigroup {
        #[arg(long, conflicts_with = "generators")]
        branch: Option<String>,
        #[arg(long)]
        generators: Option<String>,
    },
    /// Binomial ideal of the monomial curve.
    ToricIdeal { generators: String },
    /// Unimodular fan resolving the monomial curve.
    ToricResolve {
        generators: String,
        /// Write the certificate here (`toric-resolve 4,6,13 --json cert.json`).
        cert_file: Option<PathBuf>,
        #[arg(long, conflicts_with = "cert_file")]
        cert: Option<PathBuf>,
        /// Also verify the strict transform of this branch.
        #[arg(long)]
        branch: Option<String>,
    },
    /// Weight-initial forms of series in U_0..U_g.
    Overweight {
        #[arg(long)]
        weights: String,
        #[arg(long = "series", required = true)]
        series: Vec<String>,
        /// Expected initial binomials, one per series; defaults to the toric ideal.
        #[arg(long = "expected")]
        expected: Vec<String>,
    },
    /// Runs an experiment manifest.
    Run { manifest: PathBuf },
}

struct Failure {
    kind: String,
    message: String,
}

impl<E: std::fmt::Debug + std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { kind: error_kind(&e), message: e.to_string() }
    }
}

fn fail(kind: &str, message: impl Into<String>) -> Failure {
    Failure { kind: kind.into(), message: message.into() }
}

struct Output {
    value: Value,
    text: String,
    pass: bool,
}

fn ok(value: Value, text: String) -> Result<Output, Failure> {
    Ok(Output { value, text, pass: true })
}

fn budget() -> Budget {
    match std::env::var("SINGLAB_BUDGET").ok().and_then(|s| s.parse::<usize>().ok()) {
        Some(n) => Budget::with_steps(n),
        None => Budget::default(),
    }
}

fn rat(field: &str, s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| fail("InvalidInput", format!("{field}: {e}")))
}

fn positive(field: &str, s: &str) -> Result<Rational, Failure> {
    let r = rat(field, s)?;
    if r <= Rational::from_integer(0.into()) {
        return Err(fail("InvalidInput", format!("{field} must be positive")));
    }
    Ok(r)
}

fn rat_list(field: &str, s: &str) -> Result<Vec<Rational>, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| rat(field, x)).collect()
}

fn unfolding(germ: &str, b: &Budget) -> Result<Unfolding, Failure> {
    let f = Polynomial::parse_auto(germ)?;
    let a = analyze_germ(&f, b)?;
    Ok(miniversal_unfolding(&a)?)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn write(path: &PathBuf, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| fail("Io", format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let b = budget();
    let morse = MorseConfig { box_radius: positive("radius", &cli.radius)?, ..MorseConfig::default() };
    match &cli.command {
        Command::Analyze { germ } => {
            let a = analyze_germ(&Polynomial::parse_auto(germ)?, &b)?;
            let r = a.record();
            let text = format!("mu = {}\ncobasis = {}\nsignature = {:?}", r.mu, r.cobasis.join(", "), r.signature);
            ok(to_value(&r), text)
        }
        Command::Unfold { germ } => {
            let u = unfolding(germ, &b)?;
            ok(to_value(&u.record()), format!("F = {}", u.big_f))
        }
        Command::VerifyIdentity { germ } => {
            let p = verify_jacobian_identity(&unfolding(germ, &b)?)?;
            let text = format!("jac = {}\n(-1)^n h = {}\n{}", p.jacobian, p.signed_hessian, if p.holds { "PASS" } else { "FAIL" });
            Ok(Output { value: to_value(&p), text, pass: p.holds })
        }
        Command::Morse { germ, t } => {
            let u = unfolding(germ, &b)?;
            let r = evaluate(&u, &rat_list("t", t)?, &morse)?;
            let text = format!("counts = {:?}\nalt_sum = {}\nexcellent = {}", r.counts, r.alt_sum, r.excellent);
            ok(to_value(&r), text)
        }
        Command::DegreeScan { germ, samples, delta, csv } => {
            let u = unfolding(germ, &b)?;
            let r = degree_invariance_scan(&u, *samples, &positive("delta", delta)?, cli.seed, &morse)?;
            if let Some(p) = csv {
                write(p, &r.to_csv())?;
            }
            let text = format!(
                "accepted = {} of {} draws\nalt_sum = {}\ndegree = {}\nsign violations = {}",
                r.accepted, r.draws, r.alt_sum, r.degree, r.sign_violations
            );
            let pass = r.sign_violations == 0;
            let mut v = to_value(&r);
            v.as_object_mut().expect("object").remove("rows");
            Ok(Output { value: v, text, pass })
        }
        Command::EulerCheck { germ, t, samples, delta } => {
            let u = unfolding(germ, &b)?;
            let mut reports = Vec::new();
            if let Some(t) = t {
                reports.push(euler_fiber_check(&u, &rat_list("t", t)?, &morse)?);
            } else {
                let delta = positive("delta", delta)?;
                let mut i = 0u64;
                while reports.len() < *samples {
                    if i as usize >= samples * DRAWS_PER_SAMPLE {
                        return Err(fail("InsufficientAcceptance", format!("{} accepted after {i} draws", reports.len())));
                    }
                    match euler_fiber_check(&u, &sample_parameter(u.num_params(), &delta, cli.seed, i), &morse) {
                        Ok(r) => reports.push(r),
                        Err(e) if e.is_rejection() => {}
                        Err(e) => return Err(e.into()),
                    }
                    i += 1;
                }
            }
            let holds = reports.iter().filter(|r| r.holds).count();
            let text = reports
                .iter()
                .map(|r| format!("chi_above = {}, chi_below = {}, alt_sum = {}: {}", r.chi_above, r.chi_below, r.alt_sum, if r.holds { "PASS" } else { "FAIL" }))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output { value: json!({ "holds": holds, "samples": reports }), text, pass: holds == reports.len() })
        }
        Command::HermanProbe { germ, budget: n, delta } => {
            let u = unfolding(germ, &b)?;
            let w = herman_probe(&u, *n, &positive("delta", delta)?, cli.seed, &morse)?;
            let text = match &w {
                Some(w) => format!("sample {}: no real critical point; elimination {}", w.sample, w.elimination),
                None => format!("every one of {n} draws has a real critical point"),
            };
            ok(json!({ "budget": n, "witness": w }), text)
        }
        Command::Discriminant { germ, out } => {
            let d = exact_discriminant_1d(&unfolding(germ, &b)?)?;
            let r = d.record();
            if let Some(p) = out {
                write(p, &format!("{}\n", r.discriminant))?;
            }
            let text = r.discriminant.clone();
            ok(to_value(&r), text)
        }
        Command::Cerf { germ, path, steps, delta, svg, csv } => {
            let u = unfolding(germ, &b)?;
            let src = std::fs::read_to_string(path).map_err(|e| fail("Io", format!("{}: {e}", path.display())))?;
            let pts = src
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| rat_list("path", l))
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = CerfConfig { morse, delta: positive("delta", delta)?, ..CerfConfig::default() };
            let tr = cerf_trace(&u, &pts, *steps, &cfg)?;
            if let Some(p) = svg {
                write(p, &tr.to_svg())?;
            }
            if let Some(p) = csv {
                write(p, &tr.to_csv())?;
            }
            let text = tr
                .events
                .iter()
                .map(|e| format!("step {} s = {:.6}: {:?} {:?}", e.step, e.s, e.kind, e.indices))
                .collect::<Vec<_>>()
                .join("\n");
            let mut v = to_value(&tr);
            v.as_object_mut().expect("object").remove("curves");
            ok(v, if text.is_empty() { "no events".into() } else { text })
        }
        Command::Maxwell { germ, segments, delta, tol } => {
            let u = unfolding(germ, &b)?;
            let pts = maxwell_scan(&u, *segments, &positive("delta", delta)?, cli.seed, *tol, &morse)?;
            let text = pts
                .iter()
                .map(|p| format!("segment {}: t = ({}), gap {:.3e}", p.segment, p.t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "), p.gap))
                .collect::<Vec<_>>()
                .join("\n");
            ok(json!({ "segments": segments, "points": pts }), if text.is_empty() { "no Maxwell points".into() } else { text })
        }
        Command::EqualLevel { germ, index, budget: n, delta, tol } => {
            let u = unfolding(germ, &b)?;
            let w = equal_level_search(&u, *index, *n, *tol, &positive("delta", delta)?, cli.seed, &morse)?;
            let text = match &w {
                Some(w) => format!("{} values of index {} within {:.3e}", w.values.len(), w.index, w.spread),
                None => "no witness found".into(),
            };
            Ok(Output { pass: w.is_some(), value: json!({ "witness": w }), text })
        }
        Command::Semigroup { branch, generators } => {
            let (s, beta) = match (branch, generators) {
                (Some(br), _) => {
                    let p = PlaneBranch::parse(br)?;
                    (branch_semigroup(&p)?, Some(p.characteristic_exponents()?))
                }
                (None, Some(g)) => (semigroup_from_generators(&parse_weights(g)?)?, None),
                (None, None) => return Err(fail("InvalidInput", "give --branch or --generators")),
            };
            let mut v = to_value(&s);
            v["gaps"] = json!(s.gaps());
            if let Some(beta) = &beta {
                v["characteristic_exponents"] = json!(beta);
            }
            ok(v, format!("{s}\nconductor = {}\ngaps = {:?}", s.conductor, s.gaps()))
        }
        Command::ToricIdeal { generators } => {
            let s = semigroup_from_generators(&parse_weights(generators)?)?;
            let i = toric_ideal(&s, &b)?;
            let text = i.generators.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n");
            ok(to_value(&i.record()), text)
        }
        Command::ToricResolve { generators, cert_file, cert, branch } => {
            let cert = cert_file.as_ref().or(cert.as_ref());
            let s = semigroup_from_generators(&parse_weights(generators)?)?;
            let c = resolve_monomial_curve(&s, MAX_SUBDIVISIONS)?;
            let check = c.check(&s);
            if let Some(p) = cert {
                write(p, &format!("{}\n", serde_json::to_string_pretty(&c).expect("serializable")))?;
            }
            let mut pass = check.valid;
            let mut v = json!({ "certificate": c, "check": check });
            let mut text = format!("{} cones, chart {:?}, a = {:?}, valid = {}", c.cones.len(), c.cones[c.chart], c.a, check.valid);
            let mono = verify_strict_transform(&s, &monomial_curve(&s), &c, default_precision(&s))?;
            pass &= mono.pass;
            v["monomial_curve"] = to_value(&mono);
            if let Some(br) = branch {
                let p = PlaneBranch::parse(br)?;
                if branch_semigroup(&p)? != s {
                    return Err(fail("InvalidInput", "branch semigroup differs from the given generators"));
                }
                let xi: Vec<Polynomial> = semiroots(&p)?.into_iter().map(|r| r.series).collect();
                let r = verify_strict_transform(&s, &xi, &c, default_precision(&s))?;
                pass &= r.pass;
                text.push_str(&format!("\nstrict transform orders {:?}: {}", r.orders, if r.pass { "PASS" } else { "FAIL" }));
                v["branch"] = to_value(&r);
            }
            Ok(Output { value: v, text, pass })
        }
        Command::Overweight { weights, series, expected } => {
            let w = parse_weights(weights)?;
            let polys = series.iter().map(|s| parse_series(s, &w)).collect::<Result<Vec<_>, _>>()?;
            let verdicts = if expected.is_empty() {
                let ideal = toric_ideal(&semigroup_from_generators(&w)?, &b)?;
                polys.iter().map(|p| overweight_against_ideal(p, &ideal)).collect()
            } else {
                let exp = expected.iter().map(|s| parse_series(s, &w)).collect::<Result<Vec<_>, _>>()?;
                overweight_check(&OverweightDeformation { weights: w.clone(), series: polys, expected_initials: exp })?
            };
            let text = verdicts
                .iter()
                .map(|v| format!("{}: initial {} (weight {}), rest weight {}: {}", v.series, v.initial_form, v.initial_weight, v.deformation_weight, if v.pass { "PASS" } else { "FAIL" }))
                .collect::<Vec<_>>()
                .join("\n");
            let pass = verdicts.iter().all(|v| v.pass);
            Ok(Output { value: json!({ "weights": w, "verdicts": verdicts }), text, pass })
        }
        Command::Run { manifest } => match run_manifest_file(manifest, &b) {
            Ok(out) => {
                let text = out
                    .report
                    .assertions
                    .iter()
                    .map(|a| format!("{}: {}", a.name, if a.pass { "PASS" } else { "FAIL" }))
                    .collect::<Vec<_>>()
                    .join("\n");
                let pass = out.report.pass;
                Ok(Output { value: to_value(&out.report), text, pass })
            }
            Err(e) => Err(Failure { kind: e.kind().to_string(), message: e.to_string() }),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if !cli.quiet {
                let body = if cli.json { serde_json::to_string_pretty(&out.value).expect("serializable") } else { out.text };
                // A closed pipe on stdout is not an error of ours.
                let _ = writeln!(std::io::stdout().lock(), "{body}");
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            let obj = json!({ "error": { "kind": f.kind, "message": f.message } });
            eprintln!("{obj}");
            ExitCode::from(2)
        }
    }
}
