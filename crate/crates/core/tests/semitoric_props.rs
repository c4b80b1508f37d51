use std::collections::BTreeSet;

use num_traits::{One, Zero};
use proptest::prelude::*;

use singlab::kernel::{rational, Budget, Monomial, Polynomial, Rational};
use singlab::semitoric::{
    branch_semigroup, monomial_curve, overweight_check, parse_series, resolve_monomial_curve, semigroup_from_generators,
    toric_ideal, verify_strict_transform, weight, NumericalSemigroup, OverweightDeformation, PlaneBranch, Weight,
    MAX_SUBDIVISIONS,
};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Sums of generators, by breadth-first closure below `limit`.
fn brute_members(gens: &[u64], limit: u64) -> BTreeSet<u64> {
    let mut seen = BTreeSet::from([0u64]);
    let mut frontier = vec![0u64];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = x + g;
            if y < limit && seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

fn gens_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(2u64..24, 2..5).prop_filter("gcd 1", |v| v.iter().fold(0, |a, &b| gcd(a, b)) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn membership_matches_subset_sums(gens in gens_strategy()) {
        let s = semigroup_from_generators(&gens).unwrap();
        let limit = 3 * s.conductor.max(1);
        let brute = brute_members(&gens, limit);
        for x in 0..limit {
            prop_assert_eq!(s.contains(x), brute.contains(&x), "x = {}", x);
        }
        prop_assert!(s.conductor == 0 || !brute.contains(&(s.conductor - 1)));
        for &g in &s.minimal_generators {
            prop_assert!(brute.contains(&g));
            let decomposable = brute.iter().any(|&a| a > 0 && a < g && brute.contains(&(g - a)));
            prop_assert!(!decomposable, "{} is not minimal", g);
        }
    }
}

// ---------------------------------------------------------------- intersection orders

type Ser = Vec<Rational>;

fn ser_mul(a: &Ser, b: &Ser) -> Ser {
    let n = a.len();
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Leading `t`-orders reachable by linear combinations of `x^a y^b` whose
/// weight is below `bound`, all series truncated at `bound`.
fn intersection_orders(beta0: u32, y: &[(u32, Rational)], bound: usize) -> BTreeSet<usize> {
    let mut xs = vec![Rational::zero(); bound];
    xs[beta0 as usize] = Rational::one();
    let mut ys = vec![Rational::zero(); bound];
    for (e, c) in y {
        if (*e as usize) < bound {
            ys[*e as usize] = c.clone();
        }
    }
    let mut one = vec![Rational::zero(); bound];
    one[0] = Rational::one();
    let ord_y = y[0].0 as usize;
    let mut rows: Vec<Ser> = Vec::new();
    let mut xa = one.clone();
    for a in 0.. {
        if a * beta0 as usize >= bound {
            break;
        }
        let mut m = xa.clone();
        for b in 0.. {
            if a * beta0 as usize + b * ord_y >= bound {
                break;
            }
            rows.push(m.clone());
            m = ser_mul(&m, &ys);
        }
        xa = ser_mul(&xa, &xs);
    }
    // Row echelon form keyed by the leading order.
    let mut pivots: Vec<Option<Ser>> = vec![None; bound];
    for mut r in rows {
        while let Some(k) = r.iter().position(|c| !c.is_zero()) {
            match &pivots[k] {
                Some(p) => {
                    let f = &r[k] / &p[k];
                    for (ri, pi) in r.iter_mut().zip(p) {
                        *ri -= &f * pi;
                    }
                }
                None => {
                    pivots[k] = Some(r);
                    break;
                }
            }
        }
    }
    pivots.iter().enumerate().filter(|(_, p)| p.is_some()).map(|(k, _)| k).collect()
}

#[test]
fn branch_semigroup_matches_intersection_orders() {
    for (src, gens) in [
        ("t^2, t^3", vec![2, 3]),
        ("t^4, t^6 + t^7", vec![4, 6, 13]),
        ("t, t^2", vec![1]),
        ("t^3, t^5", vec![3, 5]),
        ("t^4, t^6 + t^9", vec![4, 6, 15]),
        ("t^6, t^9 + t^10", vec![6, 9, 19]),
        ("t^4, t^6 + 2*t^7 - t^8", vec![4, 6, 13]),
    ] {
        let b = PlaneBranch::parse(src).unwrap();
        let s = branch_semigroup(&b).unwrap();
        assert_eq!(s.minimal_generators, gens, "{src}");
        let bound = s.conductor as usize + 12;
        let orders = intersection_orders(b.beta0, &b.y, bound);
        let expected: BTreeSet<usize> = (0..bound as u64).filter(|&x| s.contains(x)).map(|x| x as usize).collect();
        assert_eq!(orders, expected, "{src}");
    }
}

// ---------------------------------------------------------------- toric ideal

fn eval_at_powers(p: &Polynomial, weights: &[u64], base: i64) -> Rational {
    let point: Vec<Rational> = weights.iter().map(|&w| rational(base, 1).pow(w as i32)).collect();
    p.eval(&point)
}

#[test]
fn toric_generators_vanish_on_curve() {
    for gens in [vec![2, 3], vec![3, 5], vec![4, 6, 13], vec![3, 4, 5], vec![5, 7, 11], vec![4, 5, 6, 7], vec![6, 9, 19]] {
        let s = semigroup_from_generators(&gens).unwrap();
        let ideal = toric_ideal(&s, &Budget::default()).unwrap();
        assert!(ideal.vanishes_on_curve());
        for p in &ideal.generators {
            for base in [2, 3, -5] {
                assert!(eval_at_powers(p, &gens, base).is_zero(), "{p} at {base}");
            }
        }
        for b in &ideal.binomials {
            let l: u64 = b.lhs.iter().zip(&gens).map(|(&e, &w)| e as u64 * w).sum();
            let r: u64 = b.rhs.iter().zip(&gens).map(|(&e, &w)| e as u64 * w).sum();
            assert_eq!(l, r);
            assert_eq!(l, b.degree);
        }
    }
}

// ---------------------------------------------------------------- fans

fn resolve(gens: &[u64]) -> (NumericalSemigroup, singlab::semitoric::ResolutionCertificate) {
    let s = semigroup_from_generators(gens).unwrap();
    let cert = resolve_monomial_curve(&s, MAX_SUBDIVISIONS).unwrap();
    (s, cert)
}

const FAN_CORPUS: &[&[u64]] = &[&[2, 3], &[2, 5], &[3, 7], &[5, 8], &[4, 6, 13], &[3, 4, 5], &[5, 7, 11], &[6, 9, 19]];

#[test]
fn certificates_are_valid() {
    for gens in FAN_CORPUS {
        let (s, cert) = resolve(gens);
        let chk = cert.check(&s);
        assert!(chk.valid, "{gens:?}: {chk:?}");
        assert!(chk.determinants.iter().all(|d| d.abs() == 1));
        let g: Vec<i64> = gens.iter().map(|&x| x as i64).collect();
        assert!(cert.cones[cert.chart].contains(&g));
        assert_eq!(cert.a.iter().filter(|&&x| x == 1).count(), 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fan_covers_orthant(which in 0..FAN_CORPUS.len(), raw in prop::collection::vec(0i64..97, 3)) {
        let gens = FAN_CORPUS[which];
        let v: Vec<i64> = raw[..gens.len()].to_vec();
        prop_assume!(v.iter().any(|&x| x != 0));
        let (_, cert) = resolve(gens);
        let (interior, boundary) = cert.locate(&v);
        prop_assert!((interior == 1 && boundary == 0) || (interior == 0 && boundary >= 1), "{:?}: {} {}", v, interior, boundary);
    }
}

#[test]
fn monomial_curve_units_are_one() {
    for gens in FAN_CORPUS {
        let (s, cert) = resolve(gens);
        let rep = verify_strict_transform(&s, &monomial_curve(&s), &cert, singlab::semitoric::default_precision(&s)).unwrap();
        assert!(rep.pass, "{gens:?}");
        assert_eq!(rep.orders, cert.a);
        for u in &rep.units {
            assert_eq!(u[0], "1");
            assert!(u[1..].iter().all(|c| c == "0"), "{gens:?}: {u:?}");
        }
    }
}

// ---------------------------------------------------------------- overweight

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn overweight_ignores_coefficients(
        monos in prop::collection::btree_set(prop::collection::vec(0u32..4, 3), 0..5),
        coeffs in prop::collection::vec((-9i64..10, 1i64..7), 5),
        scales in prop::collection::vec((-9i64..10, 1i64..7), 5),
    ) {
        let w = [4u64, 6, 13];
        let b = parse_series("U1^2 - U0^3", &w).unwrap();
        let vars = b.vars().clone();
        let base: BTreeSet<Vec<u32>> = b.terms().map(|(m, _)| m.0.clone()).collect();
        let monos: Vec<Vec<u32>> = monos.into_iter().filter(|m| !base.contains(m)).collect();
        let build = |extra: &[(i64, i64)]| {
            let mut s = b.clone();
            for (m, (c, k)) in monos.iter().zip(coeffs.iter().zip(extra)) {
                let c = if c.0 == 0 { rational(1, c.1) } else { rational(c.0, c.1) };
                let k = if k.0 == 0 { rational(-1, k.1) } else { rational(k.0, k.1) };
                s = &s + &Polynomial::term(&vars, Monomial(m.clone()), c * k);
            }
            s
        };
        let ones = vec![(1, 1); 5];
        let verdict = |s: Polynomial| {
            overweight_check(&OverweightDeformation { weights: w.to_vec(), series: vec![s], expected_initials: vec![b.clone()] })
                .unwrap()[0]
                .pass
        };
        let plain = build(&ones);
        let expect = monos.iter().all(|m| m.iter().zip(&w).map(|(&e, &x)| e as u64 * x).sum::<u64>() > 12);
        prop_assert_eq!(verdict(plain), expect);
        prop_assert_eq!(verdict(build(&scales)), expect);
    }
}

#[test]
fn weight_of_zero_is_infinite() {
    let w = [4u64, 6, 13];
    let z = parse_series("0", &w).unwrap();
    assert_eq!(weight(&z, &w), Weight::Infinite);
    assert!(Weight::Finite(u64::MAX) < Weight::Infinite);
}
