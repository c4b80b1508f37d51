//! Milnor numbers against a linear-algebra oracle that does not use
//! Gröbner bases: the dimension of `Q[z,w]_{<N}` modulo the span of all
//! monomial multiples of the partials, truncated at degree `N`.

use num_traits::Zero;
use proptest::prelude::*;

use singlab::kernel::{Budget, Polynomial, Rational};
use singlab::milnor::{analyze_germ, miniversal_unfolding, unfold_expr};

fn monomials(nvars: usize, below: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|m: Vec<u32>| (0..below).map(move |e| [m.clone(), vec![e]].concat()))
            .collect();
    }
    out.retain(|m| m.iter().sum::<u32>() < below);
    out
}

fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let piv = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &piv;
                for k in c..cols {
                    let d = &f * &rows[r][k];
                    rows[i][k] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

fn oracle_mu(f: &Polynomial, n_trunc: u32) -> usize {
    let nv = f.nvars();
    let basis = monomials(nv, n_trunc);
    let index = |m: &[u32]| basis.iter().position(|b| b == m);
    let mut rows = Vec::new();
    for i in 0..nv {
        let d = f.derivative(i);
        for m in &basis {
            let mut row = vec![Rational::zero(); basis.len()];
            for (mono, c) in d.terms() {
                let e: Vec<u32> = mono.0.iter().zip(m).map(|(a, b)| a + b).collect();
                if let Some(k) = index(&e) {
                    row[k] += c;
                }
            }
            rows.push(row);
        }
    }
    basis.len() - rank(rows)
}

fn mu(expr: &str) -> usize {
    analyze_germ(&Polynomial::parse_auto(expr).unwrap(), &Budget::default()).unwrap().mu
}

#[test]
fn a_k_series() {
    for k in 1..=7usize {
        let e = format!("z^{}", k + 1);
        assert_eq!(mu(&e), k);
        assert_eq!(oracle_mu(&Polynomial::parse_auto(&e).unwrap(), k as u32 + 2), k);
    }
}

#[test]
fn non_diagonal_germs() {
    for (e, want) in [("z^2*w + w^4", 5), ("z^3 + w^4", 6), ("z^3 + z*w^3", 7), ("z^3 + w^5", 8), ("z^2*w + w^3", 4)] {
        let f = Polynomial::parse_auto(e).unwrap();
        assert_eq!(mu(e), want, "{e}");
        assert_eq!(oracle_mu(&f, want as u32 + 2), want, "oracle {e}");
    }
}

#[test]
fn unfolding_shape() {
    let u = unfold_expr("z^3 + w^4", &Budget::default()).unwrap();
    assert_eq!(u.num_params(), u.mu() - 1);
    let zero = vec![Rational::zero(); u.num_params()];
    assert_eq!(u.specialize(&zero), Polynomial::parse_auto("z^3 + w^4").unwrap());
    let a = analyze_germ(&Polynomial::parse_auto("z^2 + w^2").unwrap(), &Budget::default()).unwrap();
    assert_eq!(miniversal_unfolding(&a).unwrap().num_params(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn brieskorn_pham(a in 2u32..=5, b in 2u32..=5) {
        let e = format!("z^{a} + w^{b}");
        let want = ((a - 1) * (b - 1)) as usize;
        prop_assert_eq!(mu(&e), want);
        prop_assert_eq!(oracle_mu(&Polynomial::parse_auto(&e).unwrap(), a + b), want);
    }

    /// μ does not see a linear change of coordinates.
    #[test]
    fn coordinate_invariance(a in 2u32..=4, b in 2u32..=4, c in -2i64..=2) {
        let e = format!("z^{a} + (w + {c}*z)^{b}");
        prop_assert_eq!(mu(&e), ((a - 1) * (b - 1)) as usize);
    }
}
