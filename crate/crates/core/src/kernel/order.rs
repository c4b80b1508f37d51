use std::cmp::Ordering;

/// Monomial orders used by the symbolic layer.
///
/// All orders are total, compatible with multiplication, and have `1` as
/// the minimal monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic.
    Grevlex,
    /// Pure lexicographic, first variable most significant.
    Lex,
    /// Block order eliminating the first `block` variables.
    ///
    /// The eliminated block is compared by total degree and then reverse
    /// lexicographically. Remaining variables are compared by weighted
    /// degree (`weights`, all ones when empty), ties broken
    /// lexicographically starting from the last variable.
    Elimination { block: usize, weights: Vec<u64> },
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    pub fn elimination(block: usize) -> Self {
        MonomialOrder::Elimination { block, weights: Vec::new() }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Grevlex => grevlex(a, b),
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::Elimination { block, weights } => {
                let k = (*block).min(a.len());
                grevlex(&a[..k], &b[..k]).then_with(|| {
                    let (ra, rb) = (&a[k..], &b[k..]);
                    let w = |e: &[u32]| -> u64 {
                        e.iter().enumerate().map(|(i, &x)| x as u64 * weights.get(i).copied().unwrap_or(1)).sum()
                    };
                    w(ra).cmp(&w(rb)).then_with(|| {
                        for (x, y) in ra.iter().zip(rb).rev() {
                            if x != y {
                                return x.cmp(y);
                            }
                        }
                        Ordering::Equal
                    })
                })
            }
        }
    }
}
