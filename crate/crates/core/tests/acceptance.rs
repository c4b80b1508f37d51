//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach stdout.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use singlab::critmap::{hessian, sign_relation_check, sign_relation_holds, verify_jacobian_identity};
use singlab::discriminant::{cerf_trace, exact_discriminant_1d, maxwell_scan, CerfConfig, EventKind};
use singlab::kernel::interval::eval_interval;
use singlab::kernel::{rational, Budget, Monomial, Polynomial, RatInterval, Rational};
use singlab::milnor::{analyze_germ, unfold_expr, Unfolding};
use singlab::morselab::{degree_invariance_scan, euler_fiber_check, evaluate, herman_probe, sample_parameter, MorseConfig};
use singlab::pipeline::{parse_manifest, run_manifest};
use singlab::semitoric::{
    branch_semigroup, default_precision, monomial_curve, overweight_check, parse_series, resolve_monomial_curve,
    semiroots, toric_ideal, verify_strict_transform, weight, OverweightDeformation, PlaneBranch, Weight,
    MAX_SUBDIVISIONS,
};

type Outcome = Result<String, String>;

fn unf(s: &str) -> Result<Unfolding, String> {
    unfold_expr(s, &Budget::default()).map_err(|e| format!("{s}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit), || format!("took {:.2?}, limit {limit} s", elapsed))
}

// ---------------------------------------------------------------- 1

/// Monomials `z^i w^j` of degree below `bound` outside the monomial ideal.
fn staircase(gens: &[Vec<u32>], nvars: usize, bound: u32) -> usize {
    let mut count = 0;
    let mut e = vec![0u32; nvars];
    loop {
        if !gens.iter().any(|g| g.iter().zip(&e).all(|(a, b)| a <= b)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == nvars {
                return count;
            }
            e[i] += 1;
            if e.iter().sum::<u32>() < bound {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

fn milnor_numbers() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for k in 1..=7u32 {
        let f = Polynomial::parse_auto(&format!("z^{}", k + 1)).map_err(|e| e.to_string())?;
        let mu = analyze_germ(&f, &Budget::default()).map_err(|e| e.to_string())?.mu;
        let oracle = staircase(&[vec![k]], 1, 64);
        ensure(mu == k as usize && oracle == k as usize, || format!("z^{}: mu {mu}, staircase {oracle}", k + 1))?;
        cases += 1;
    }
    for a in 2..=5u32 {
        for b in 2..=5u32 {
            let f = Polynomial::parse_auto(&format!("z^{a} + w^{b}")).map_err(|e| e.to_string())?;
            let mu = analyze_germ(&f, &Budget::default()).map_err(|e| e.to_string())?.mu;
            let oracle = staircase(&[vec![a - 1, 0], vec![0, b - 1]], 2, 64);
            let want = ((a - 1) * (b - 1)) as usize;
            ensure(mu == want && oracle == want, || format!("z^{a}+w^{b}: mu {mu}, staircase {oracle}, formula {want}"))?;
            cases += 1;
        }
    }
    within(start.elapsed(), 5)?;
    Ok(format!("{cases} germs in {:.2?}", start.elapsed()))
}

// ---------------------------------------------------------------- 2

fn jacobian_identity() -> Outcome {
    let start = Instant::now();
    let corpus = ["z^3", "z^4", "z^5", "z^6", "z^7", "z^3 + w^3", "z^3 + w^4"];
    for g in corpus {
        let p = verify_jacobian_identity(&unf(g)?).map_err(|e| format!("{g}: {e}"))?;
        ensure(p.holds && p.lhs == p.rhs, || format!("{g}: {} != {}", p.jacobian, p.signed_hessian))?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!("{} germs exact in {:.2?}", corpus.len(), start.elapsed()))
}

// ---------------------------------------------------------------- 3

const MORSE_CORPUS: &[&str] = &["z^3", "z^4", "z^5", "z^6", "z^3 + w^3", "z^3 + w^4"];

fn sign_relation() -> Outcome {
    let cfg = MorseConfig::default();
    let delta = rational(1, 1);
    let mut points = 0;
    let mut violations = 0;
    for g in MORSE_CORPUS {
        let u = unf(g)?;
        let h = hessian(&u).h;
        let mut accepted = 0;
        let mut draw = 0u64;
        while accepted < 100 {
            if draw > 2000 {
                return Err(format!("{g}: only {accepted} accepted in {draw} draws"));
            }
            let t = sample_parameter(u.num_params(), &delta, 3, draw);
            draw += 1;
            let rep = match evaluate(&u, &t, &cfg) {
                Ok(r) => r,
                Err(e) if e.is_rejection() => continue,
                Err(e) => return Err(format!("{g}: {e}")),
            };
            accepted += 1;
            for p in &rep.points {
                let mut at: Vec<Rational> = p.location.iter().map(|iv| iv.midpoint()).collect();
                at.extend(t.iter().cloned());
                let hv = h.eval(&at);
                let exact = sign_relation_check(&hv, p.index, u.n()).unwrap_or(false);
                if !exact || !sign_relation_holds(p.hessian_det_sign, p.index) {
                    violations += 1;
                }
                points += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("{points} critical points, 0 violations"))
}

// ---------------------------------------------------------------- 4, 5

fn degree_invariance() -> Outcome {
    let cfg = MorseConfig::default();
    let mut parts = Vec::new();
    for (g, want) in [("z^3", 0), ("z^4", 1), ("z^5", 0), ("z^6", 1), ("z^3 + w^3", 0)] {
        let u = unf(g)?;
        let r = degree_invariance_scan(&u, 100, &rational(1, 1), 17, &cfg).map_err(|e| format!("{g}: {e}"))?;
        let all: BTreeSet<i64> = r.rows.iter().map(|x| x.alt_sum).collect();
        ensure(r.accepted >= 100 && all.len() == 1 && r.alt_sum == want, || {
            format!("{g}: accepted {}, alt sums {all:?}, want {want}", r.accepted)
        })?;
        parts.push(format!("{g}:{}", r.alt_sum));
    }
    Ok(parts.join(" "))
}

fn trivial_families() -> Outcome {
    let cfg = MorseConfig::default();
    let mut parts = Vec::new();
    for g in ["z^3", "z^3 + w^3"] {
        let u = unf(g)?;
        let r = degree_invariance_scan(&u, 100, &rational(1, 1), 29, &cfg).map_err(|e| format!("{g}: {e}"))?;
        ensure(r.degree == 0, || format!("{g}: degree {}", r.degree))?;
        let w = herman_probe(&u, 100, &rational(1, 1), 29, &cfg).map_err(|e| format!("{g}: {e}"))?;
        let w = w.ok_or_else(|| format!("{g}: no critical-point-free parameter in 100 samples"))?;
        parts.push(format!("{g}: degree 0, witness at sample {}", w.sample));
    }
    Ok(parts.join("; "))
}

// ---------------------------------------------------------------- 6

fn euler_relation() -> Outcome {
    let cfg = MorseConfig::default();
    let mut total = 0;
    for g in ["z^3", "z^4", "z^5", "z^6"] {
        let u = unf(g)?;
        let mut accepted = 0;
        let mut draw = 0u64;
        while accepted < 20 {
            if draw > 500 {
                return Err(format!("{g}: only {accepted} accepted"));
            }
            let t = sample_parameter(u.num_params(), &rational(1, 1), 13, draw);
            draw += 1;
            let r = match euler_fiber_check(&u, &t, &cfg) {
                Ok(r) => r,
                Err(e) if e.is_rejection() => continue,
                Err(e) => return Err(format!("{g}: {e}")),
            };
            ensure(r.holds, || format!("{g}: chi {} - {} vs 2*{}", r.chi_above, r.chi_below, r.alt_sum))?;
            accepted += 1;
        }
        total += accepted;
    }
    Ok(format!("{total} samples, exact"))
}

// ---------------------------------------------------------------- 7

fn discriminant_a2() -> Outcome {
    let u = unf("z^3")?;
    let disc = exact_discriminant_1d(&u).map_err(|e| e.to_string())?;
    let text = format!("{}\n", disc.poly);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/a2_discriminant.txt");
    let golden = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    ensure(text == golden, || format!("got {text:?}, golden {golden:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let z0: f64 = rng.random_range(-1.0..1.0);
        let t1 = -3.0 * z0 * z0;
        let lambda = z0 * z0 * z0 + t1 * z0;
        let pad = |x: f64| RatInterval::new(Rational::from_float(x - 1e-9).unwrap(), Rational::from_float(x + 1e-9).unwrap());
        ensure(eval_interval(&disc.poly, &[pad(lambda), pad(t1)]).contains_zero(), || format!("z0 = {z0} misses"))?;
    }
    Ok("golden byte-exact; 1000 degenerate points certified".into())
}

// ---------------------------------------------------------------- 8

fn cerf_and_maxwell() -> Outcome {
    let u = unf("z^3")?;
    let path = vec![vec![rational(-1, 1)], vec![rational(1, 1)]];
    let trace = cerf_trace(&u, &path, 200, &CerfConfig::default()).map_err(|e| e.to_string())?;
    let deaths: Vec<_> = trace.events.iter().filter(|e| e.kind == EventKind::Death).collect();
    ensure(deaths.len() == 1 && trace.events.len() == 1, || format!("events {:?}", trace.events))?;
    let w = deaths[0].hessian_witness.unwrap_or(f64::INFINITY);
    ensure(w < 1e-6, || format!("hessian witness {w}"))?;

    let a3 = unf("z^4")?;
    let pts = maxwell_scan(&a3, 16, &rational(1, 1), 5, 1e-8, &MorseConfig::default()).map_err(|e| e.to_string())?;
    ensure(!pts.is_empty(), || "no Maxwell point".into())?;
    let worst = pts.iter().map(|p| p.t[0].to_f64().unwrap().abs()).fold(0.0, f64::max);
    ensure(worst < 1e-8, || format!("|t1| up to {worst:e}"))?;
    ensure(pts.iter().all(|p| p.minima.iter().all(|m| m.index == 0)), || "non-minimum witness".into())?;
    Ok(format!("one death, |h| = {w:.1e}; {} Maxwell points, max |t1| = {worst:.1e}", pts.len()))
}

// ---------------------------------------------------------------- 9

fn semitoric() -> Outcome {
    let start = Instant::now();
    let b = PlaneBranch::parse("t^4, t^6 + t^7").map_err(|e| e.to_string())?;
    let s = branch_semigroup(&b).map_err(|e| e.to_string())?;
    ensure(s.minimal_generators == [4, 6, 13], || format!("semigroup {s}"))?;

    // Orders of x^a y^b combinations, reduced by leading order.
    let bound = s.conductor as usize + 12;
    let series = |a: usize, bb: usize| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); bound];
        for k in 0..=bb {
            let e = 4 * a + 6 * bb + k;
            if e < bound {
                out[e] = Rational::from_integer(num_integer::binomial(bb as i64, k as i64).into());
            }
        }
        out
    };
    let mut pivots: Vec<Option<Vec<Rational>>> = vec![None; bound];
    for a in 0..bound / 4 + 1 {
        for bb in 0..bound / 6 + 1 {
            let mut r = series(a, bb);
            while let Some(k) = r.iter().position(|c| !c.is_zero()) {
                match &pivots[k] {
                    Some(p) => {
                        let f = &r[k] / &p[k];
                        for (x, y) in r.iter_mut().zip(p) {
                            *x -= &f * y;
                        }
                    }
                    None => {
                        pivots[k] = Some(r);
                        break;
                    }
                }
            }
        }
    }
    for (k, p) in pivots.iter().enumerate() {
        ensure(p.is_some() == s.contains(k as u64), || format!("order {k} disagrees with the oracle"))?;
    }

    let ideal = toric_ideal(&s, &Budget::default()).map_err(|e| e.to_string())?;
    for g in ["U1^2 - U0^3", "U2^2 - U0^5*U1"] {
        let p = parse_series(g, &[4, 6, 13]).map_err(|e| e.to_string())?;
        ensure(ideal.contains_generator(&p), || format!("{g} missing from the ideal"))?;
    }
    let cert = resolve_monomial_curve(&s, MAX_SUBDIVISIONS).map_err(|e| e.to_string())?;
    let chk = cert.check(&s);
    ensure(chk.valid && chk.all_unimodular && chk.gamma_is_ray, || format!("certificate {chk:?}"))?;
    ensure(cert.a.iter().filter(|&&x| x == 1).count() == 1, || format!("a = {:?}", cert.a))?;
    let prec = default_precision(&s);
    let mono = verify_strict_transform(&s, &monomial_curve(&s), &cert, prec).map_err(|e| e.to_string())?;
    let xi: Vec<Polynomial> = semiroots(&b).map_err(|e| e.to_string())?.into_iter().map(|r| r.series).collect();
    let branch = verify_strict_transform(&s, &xi, &cert, prec).map_err(|e| e.to_string())?;
    ensure(mono.pass && branch.pass, || format!("strict transform monomial {} branch {}", mono.pass, branch.pass))?;
    within(start.elapsed(), 30)?;
    Ok(format!("{s}, {} cones, a = {:?}, {:.2?}", cert.cones.len(), cert.a, start.elapsed()))
}

// ---------------------------------------------------------------- 10

fn overweight() -> Outcome {
    let w = vec![4u64, 6, 13];
    let parse = |s: &str| parse_series(s, &w).map_err(|e| e.to_string());
    let b = parse("U1^2 - U0^3")?;
    let mut verdicts = Vec::new();
    for (s, want) in [("U1^2 - U0^3 + U2", true), ("U1^2 - U0^3 + U0", false), ("U1^2 - U0^3", true)] {
        let d = OverweightDeformation { weights: w.clone(), series: vec![parse(s)?], expected_initials: vec![b.clone()] };
        let v = overweight_check(&d).map_err(|e| e.to_string())?;
        ensure(v[0].pass == want, || format!("{s}: {}", v[0].pass))?;
        verdicts.push(if want { "PASS" } else { "FAIL" });
    }
    let zero = Polynomial::zero(b.vars());
    ensure(weight(&zero, &w) == Weight::Infinite, || "weight(0) is finite".into())?;
    let u2 = Polynomial::term(b.vars(), Monomial(vec![0, 0, 1]), rational(1, 1));
    ensure(weight(&u2, &w) == Weight::Finite(13), || "weight(U2) != 13".into())?;
    Ok(format!("{}; weight(0) = inf", verdicts.join(" ")))
}

// ---------------------------------------------------------------- 11

fn reproducibility() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../manifests");
    let mut names: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    ensure(!names.is_empty(), || "no manifests".into())?;
    for p in &names {
        let src = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
        let runs: Vec<(String, Option<String>, Option<String>)> = (0..2)
            .map(|_| {
                let v = parse_manifest(&src).map_err(|e| e.to_string())?;
                let out = run_manifest(&v, &Budget::default()).map_err(|e| e.to_string())?;
                Ok((out.report_json(), out.samples_csv, out.svg))
            })
            .collect::<Result<_, String>>()?;
        ensure(runs[0] == runs[1], || format!("{} differs between runs", p.display()))?;
    }
    Ok(format!("{} manifests byte-identical", names.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("milnor numbers", milnor_numbers),
        ("jacobian identity", jacobian_identity),
        ("sign relation", sign_relation),
        ("degree invariance", degree_invariance),
        ("trivial families and herman probe", trivial_families),
        ("euler fiber relation", euler_relation),
        ("A2 discriminant", discriminant_a2),
        ("cerf death and maxwell set", cerf_and_maxwell),
        ("semitoric pipeline", semitoric),
        ("overweight verdicts", overweight),
        ("manifest reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}) [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
