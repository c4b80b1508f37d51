//! Buchberger's algorithm with the product and chain criteria.

use super::order::MonomialOrder;
use super::poly::{Monomial, Polynomial};
use super::{KernelError, Rational};

/// Caps on symbolic work. Exceeding either returns
/// [`KernelError::BudgetExceeded`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Number of S-polynomial reductions.
    pub max_steps: usize,
    /// Number of terms any intermediate polynomial may carry.
    pub max_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps: 20_000, max_terms: 100_000 }
    }
}

impl Budget {
    pub fn with_steps(max_steps: usize) -> Self {
        Budget { max_steps, ..Budget::default() }
    }
}

fn check_vars(gens: &[Polynomial], p: &Polynomial) -> Result<(), KernelError> {
    for g in gens {
        if !g.same_ring(p) {
            return Err(KernelError::VariableMismatch { expected: p.vars().join(","), found: g.vars().join(",") });
        }
    }
    Ok(())
}

/// Fully reduces `p` by `basis` (which need not be a Gröbner basis).
fn reduce(p: &Polynomial, basis: &[(Monomial, Polynomial)], order: &MonomialOrder, budget: &Budget) -> Result<Polynomial, KernelError> {
    let mut rem = p.clone();
    let mut out = Polynomial::zero(p.vars());
    while let Some((m, c)) = rem.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
        if rem.num_terms() > budget.max_terms {
            return Err(KernelError::BudgetExceeded(format!("intermediate polynomial exceeded {} terms", budget.max_terms)));
        }
        match basis.iter().find(|(lm, _)| lm.divides(&m)) {
            Some((lm, g)) => {
                // basis elements are monic
                let q = lm.quotient_of(&m);
                rem.add_scaled_term_product(&-c, &q, g);
            }
            None => {
                let t = Polynomial::term(p.vars(), m.clone(), c.clone());
                rem = &rem - &t;
                out = &out + &t;
            }
        }
    }
    Ok(out)
}

/// Remainder of `p` modulo the ideal generated by the Gröbner basis `basis`.
pub fn normal_form(p: &Polynomial, basis: &[Polynomial], order: &MonomialOrder) -> Result<Polynomial, KernelError> {
    check_vars(basis, p)?;
    let keyed: Vec<(Monomial, Polynomial)> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let g = g.make_monic(order);
            (g.leading_monomial(order).expect("nonzero").clone(), g)
        })
        .collect();
    reduce(p, &keyed, order, &Budget { max_steps: usize::MAX, max_terms: usize::MAX })
}

fn s_polynomial(f: &Polynomial, fm: &Monomial, g: &Polynomial, gm: &Monomial) -> Polynomial {
    let l = fm.lcm(gm);
    let one = Rational::from_integer(1.into());
    let a = f.mul_monomial(&fm.quotient_of(&l), &one);
    let b = g.mul_monomial(&gm.quotient_of(&l), &one);
    &a - &b
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Reduced Gröbner basis of the ideal generated by `generators`.
///
/// Elements are monic and sorted by increasing leading monomial. Pairs are
/// processed by smallest lcm, ties broken by index, so the output is a
/// deterministic function of the input.
pub fn groebner_basis(generators: &[Polynomial], order: &MonomialOrder, budget: &Budget) -> Result<Vec<Polynomial>, KernelError> {
    let first = generators.first().ok_or(KernelError::EmptyInput)?;
    check_vars(generators, first)?;

    let mut basis: Vec<(Monomial, Polynomial)> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut steps = 0usize;

    let push = |basis: &mut Vec<(Monomial, Polynomial)>, pairs: &mut Vec<Pair>, g: Polynomial| {
        let g = g.make_monic(order);
        let lm = g.leading_monomial(order).expect("nonzero").clone();
        let j = basis.len();
        for (i, (im, _)) in basis.iter().enumerate() {
            pairs.push(Pair { i, j, lcm: im.lcm(&lm) });
        }
        basis.push((lm, g));
    };

    for g in generators {
        let r = reduce(g, &basis, order, budget)?;
        if !r.is_zero() {
            push(&mut basis, &mut pairs, r);
        }
    }

    while !pairs.is_empty() {
        let (best, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| order.cmp(&a.lcm.0, &b.lcm.0).then((a.i, a.j).cmp(&(b.i, b.j))))
            .expect("nonempty");
        let pair = pairs.swap_remove(best);
        let (fm, f) = &basis[pair.i];
        let (gm, g) = &basis[pair.j];

        if fm.coprime(gm) {
            continue;
        }
        // chain criterion: some k with lm_k | lcm and both (i,k), (j,k) already treated
        let pending = |a: usize, b: usize| {
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            pairs.iter().any(|p| p.i == a && p.j == b)
        };
        let chain = basis.iter().enumerate().any(|(k, (km, _))| {
            k != pair.i && k != pair.j && km.divides(&pair.lcm) && !pending(pair.i, k) && !pending(pair.j, k)
        });
        if chain {
            continue;
        }

        steps += 1;
        if steps > budget.max_steps {
            return Err(KernelError::BudgetExceeded(format!("Buchberger exceeded {} reduction steps", budget.max_steps)));
        }
        let s = s_polynomial(f, fm, g, gm);
        let r = reduce(&s, &basis, order, budget)?;
        if !r.is_zero() {
            push(&mut basis, &mut pairs, r);
        }
    }

    interreduce(basis, order, budget)
}

fn interreduce(basis: Vec<(Monomial, Polynomial)>, order: &MonomialOrder, budget: &Budget) -> Result<Vec<Polynomial>, KernelError> {
    // keep elements whose leading monomial is not divisible by another's
    let mut minimal: Vec<(Monomial, Polynomial)> = Vec::new();
    for (k, (m, g)) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(l, (lm, _))| {
            l != k && lm.divides(m) && (lm != m || l < k)
        });
        if !redundant {
            minimal.push((m.clone(), g.clone()));
        }
    }
    minimal.sort_by(|a, b| order.cmp(&a.0 .0, &b.0 .0));
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let (m, g) = &minimal[k];
        let others: Vec<(Monomial, Polynomial)> =
            minimal.iter().enumerate().filter(|(l, _)| *l != k).map(|(_, x)| x.clone()).collect();
        let lead = Polynomial::term(g.vars(), m.clone(), Rational::from_integer(1.into()));
        let tail = g - &lead;
        let tail = reduce(&tail, &others, order, budget)?;
        out.push(&lead + &tail);
    }
    Ok(out)
}

/// True when the standard monomials of the ideal form a finite set.
pub fn is_zero_dimensional(basis: &[Polynomial], order: &MonomialOrder) -> bool {
    let Some(first) = basis.first() else { return false };
    let n = first.nvars();
    (0..n).all(|i| {
        basis.iter().any(|g| {
            g.leading_monomial(order)
                .map(|m| m.0.iter().enumerate().all(|(k, &e)| (k == i) == (e > 0)))
                .unwrap_or(false)
        })
    })
}

/// Monomials not divisible by any leading monomial of `basis`, or `None`
/// if that set is infinite.
pub fn standard_monomials(basis: &[Polynomial], order: &MonomialOrder) -> Option<Vec<Monomial>> {
    if basis.iter().any(|g| g.is_constant() && !g.is_zero()) {
        return Some(Vec::new());
    }
    if !is_zero_dimensional(basis, order) {
        return None;
    }
    let n = basis[0].nvars();
    let leads: Vec<Monomial> = basis.iter().filter_map(|g| g.leading_monomial(order).cloned()).collect();
    // each pure power x_i^{b_i} bounds the exponent of x_i
    let bounds: Vec<u32> = (0..n)
        .map(|i| {
            leads
                .iter()
                .filter(|m| m.0.iter().enumerate().all(|(k, &e)| (k == i) == (e > 0)))
                .map(|m| m.0[i])
                .min()
                .expect("zero-dimensional")
        })
        .collect();
    let mut out = Vec::new();
    let mut e = vec![0u32; n];
    loop {
        let m = Monomial(e.clone());
        if !leads.iter().any(|l| l.divides(&m)) {
            out.push(m);
        }
        let mut k = 0;
        loop {
            if k == n {
                return Some(out);
            }
            e[k] += 1;
            if e[k] < bounds[k] {
                break;
            }
            e[k] = 0;
            k += 1;
        }
    }
}

/// Ideal membership against a Gröbner basis.
pub fn in_ideal(p: &Polynomial, basis: &[Polynomial], order: &MonomialOrder) -> Result<bool, KernelError> {
    Ok(normal_form(p, basis, order)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::poly::var_list;

    fn p(s: &str, v: &[&str]) -> Polynomial {
        Polynomial::parse(s, &var_list(v)).unwrap()
    }

    #[test]
    fn principal_ideals() {
        for order in [MonomialOrder::Grevlex, MonomialOrder::Lex, MonomialOrder::elimination(1)] {
            let gb = groebner_basis(&[p("z", &["z"])], &order, &Budget::default()).unwrap();
            assert_eq!(gb, vec![p("z", &["z"])]);
        }
        let gb = groebner_basis(&[p("3*z^2", &["z"])], &MonomialOrder::Grevlex, &Budget::default()).unwrap();
        assert_eq!(gb, vec![p("z^2", &["z"])]);
    }

    #[test]
    fn jacobian_of_z3_plus_w3_at_zero_parameter() {
        let v = ["z", "w", "t3"];
        let gens = [p("3*z^2 + t3*w", &v), p("3*w^2 + t3*z", &v)];
        let t0 = Rational::from_integer(0.into());
        let spec: Vec<_> = gens.iter().map(|g| g.substitute(2, &t0)).collect();
        let gb = groebner_basis(&spec, &MonomialOrder::Grevlex, &Budget::default()).unwrap();
        assert_eq!(gb, vec![p("w^2", &v), p("z^2", &v)]);
    }

    #[test]
    fn normal_forms() {
        let v = ["z", "w"];
        let g = [p("z^2", &v)];
        let o = MonomialOrder::Grevlex;
        assert!(normal_form(&p("z^3", &v), &g, &o).unwrap().is_zero());
        assert_eq!(normal_form(&p("1 + z", &v), &g, &o).unwrap(), p("1 + z", &v));
        let g2 = [p("z^2", &v), p("w^2", &v)];
        assert!(normal_form(&p("z*w*z", &v), &g2, &o).unwrap().is_zero());
        assert!(normal_form(&p("z", &["z"]), &g, &o).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let v = ["x", "y", "z"];
        let gens = [p("x^3 - y*z + 1", &v), p("y^3 - x*z - 2", &v), p("z^3 - x*y + 3", &v)];
        let err = groebner_basis(&gens, &MonomialOrder::Lex, &Budget::with_steps(2)).unwrap_err();
        assert!(matches!(err, KernelError::BudgetExceeded(_)));
    }

    #[test]
    fn staircase_counts() {
        let v = ["z", "w"];
        let gb = vec![p("w^2", &v), p("z^2", &v)];
        let st = standard_monomials(&gb, &MonomialOrder::Grevlex).unwrap();
        assert_eq!(st.len(), 4);
        assert!(standard_monomials(&[p("z*w", &v)], &MonomialOrder::Grevlex).is_none());
    }
}
