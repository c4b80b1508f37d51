use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use singlab::critmap::{hessian, sign_relation_check};
use singlab::discriminant::exact_discriminant_1d;
use singlab::kernel::interval::eval_interval;
use singlab::kernel::{isolate_real_roots, rational, Budget, RatInterval, Rational, UniPoly};
use singlab::milnor::{unfold_expr, Unfolding};
use singlab::morselab::{critical_points, evaluate, sample_parameter, MorseConfig};

const CORPUS: &[&str] = &["z^3", "z^4", "z^5", "z^6", "z^3 + w^3", "z^3 + w^4"];

fn unf(s: &str) -> Unfolding {
    unfold_expr(s, &Budget::default()).unwrap()
}

fn to_rat(x: f64) -> Rational {
    Rational::from_float(x).unwrap()
}

/// Morse index from f64 eigenvalues of the hessian at `z`.
fn float_index(u: &Unfolding, t: &[Rational], z: &[f64]) -> usize {
    let f = u.specialize(t);
    let n = u.n();
    let pt: Vec<Rational> = z.iter().map(|&x| to_rat(x)).collect();
    let second = |i: usize, j: usize| f.derivative(i).derivative(j).eval(&pt).to_f64().unwrap();
    match n {
        1 => usize::from(second(0, 0) < 0.0),
        2 => {
            let (a, b, d) = (second(0, 0), second(0, 1), second(1, 1));
            let tr = a + d;
            let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
            [(tr - disc) / 2.0, (tr + disc) / 2.0].iter().filter(|&&e| e < 0.0).count()
        }
        _ => unreachable!(),
    }
}

#[test]
fn index_and_sign_oracles() {
    let cfg = MorseConfig::default();
    let delta = rational(1, 1);
    for germ in CORPUS {
        let u = unf(germ);
        let h = hessian(&u).h;
        let mut accepted = 0;
        let mut draw = 0;
        while accepted < 40 {
            let t = sample_parameter(u.num_params(), &delta, 23, draw);
            draw += 1;
            let pts = match critical_points(&u, &t, &cfg) {
                Ok(p) => p,
                Err(e) if e.is_rejection() => continue,
                Err(e) => panic!("{germ}: {e}"),
            };
            accepted += 1;
            for p in &pts {
                let mid: Vec<Rational> = p.location.iter().map(|iv| iv.midpoint()).collect();
                let z: Vec<f64> = mid.iter().map(|x| x.to_f64().unwrap()).collect();
                assert_eq!(float_index(&u, &t, &z), p.index, "{germ} at {z:?}");
                let mut full = mid.clone();
                full.extend(t.iter().cloned());
                let hv = h.eval(&full);
                assert_eq!(if hv > Rational::zero() { 1 } else { -1 }, p.hessian_det_sign, "{germ}");
                assert!(sign_relation_check(&hv, p.index, u.n()).unwrap(), "{germ}");
            }
        }
        assert!(draw < 400, "{germ}: too many rejections");
    }
}

#[test]
fn alternating_sums() {
    let cfg = MorseConfig::default();
    for (germ, want) in [("z^3", 0), ("z^4", 1), ("z^5", 0), ("z^6", 1), ("z^3 + w^3", 0)] {
        let u = unf(germ);
        for i in 0..30 {
            let t = sample_parameter(u.num_params(), &rational(1, 1), 7, i);
            match evaluate(&u, &t, &cfg) {
                Ok(r) => assert_eq!(r.alt_sum, want, "{germ}"),
                Err(e) => assert!(e.is_rejection(), "{germ}: {e}"),
            }
        }
    }
}

/// Numeric degenerate points: choose `z0` and the free parameters, solve the
/// linear coefficient so that `z0` is a double root.
#[test]
fn degenerate_points_lie_on_discriminant() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for germ in ["z^3", "z^4", "z^5"] {
        let u = unf(germ);
        let disc = exact_discriminant_1d(&u).unwrap();
        let k = u.num_params();
        assert_eq!(u.deformation_monomials[0].0, vec![1]);
        for _ in 0..1000 {
            let z0: f64 = rng.random_range(-1.5..1.5);
            let mut t: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
            t[0] = 0.0;
            let rest = |t: &[f64], z: f64| -> (f64, f64) {
                let mut v = z.powi(u.mu() as i32 + 1);
                let mut d = (u.mu() as f64 + 1.0) * z.powi(u.mu() as i32);
                for (j, m) in u.deformation_monomials.iter().enumerate() {
                    let e = m.0[0] as i32;
                    v += t[j] * z.powi(e);
                    if e > 0 {
                        d += t[j] * e as f64 * z.powi(e - 1);
                    }
                }
                (v, d)
            };
            t[0] = -rest(&t, z0).1;
            let lambda = rest(&t, z0).0;
            let pad = |x: f64| RatInterval::new(to_rat(x - 1e-9), to_rat(x + 1e-9));
            let mut boxes = vec![pad(lambda)];
            boxes.extend(t.iter().map(|&x| pad(x)));
            assert!(eval_interval(&disc.poly, &boxes).contains_zero(), "{germ}: z0 = {z0}, t = {t:?}");
        }
    }
}

fn refine(p: &UniPoly, mut lo: Rational, mut hi: Rational, width: &Rational) -> RatInterval {
    if p.eval(&lo).is_zero() {
        return RatInterval::point(lo);
    }
    if p.eval(&hi).is_zero() {
        return RatInterval::point(hi);
    }
    let slo = p.sign_at(&lo);
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / rational(2, 1);
        let s = p.sign_at(&mid);
        if s == 0 {
            return RatInterval::point(mid);
        }
        if s == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RatInterval::new(lo, hi)
}

/// Points of the zero set, solved for `λ`, are critical values of `F_t`.
#[test]
fn discriminant_zero_set_gives_multiple_roots() {
    let cfg = MorseConfig::default();
    let width = rational(1, 1 << 40);
    for germ in ["z^3", "z^4"] {
        let u = unf(germ);
        let disc = exact_discriminant_1d(&u).unwrap();
        let mut checked = 0;
        let mut draw = 0;
        while checked < 1000 {
            let t = sample_parameter(u.num_params(), &rational(1, 1), 41, draw);
            draw += 1;
            let subs: Vec<(usize, Rational)> = t.iter().cloned().enumerate().map(|(i, x)| (i + 1, x)).collect();
            let lam = UniPoly::from_polynomial(&disc.poly.substitute_many(&subs), 0).unwrap().squarefree_part();
            if lam.degree().unwrap_or(0) == 0 {
                continue;
            }
            let bound = lam.root_bound();
            let roots = isolate_real_roots(&lam, &-&bound, &bound).unwrap();
            if roots.is_empty() {
                continue;
            }
            let pts = match critical_points(&u, &t, &cfg) {
                Ok(p) => p,
                Err(e) if e.is_rejection() => continue,
                Err(e) => panic!("{germ}: {e}"),
            };
            for r in roots {
                let iv = refine(&lam, r.lo, r.hi, &width);
                assert!(pts.iter().any(|p| p.value.overlaps(&iv)), "{germ}: t = {t:?}");
                checked += 1;
            }
        }
    }
}
