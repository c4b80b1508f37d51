//! Closed intervals with rational endpoints.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::poly::Polynomial;
use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatInterval {
    #[serde(serialize_with = "crate::kernel::ser_rational")]
    pub lo: Rational,
    #[serde(serialize_with = "crate::kernel::ser_rational")]
    pub hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    /// -1, +1, or 0 when the interval straddles zero.
    pub fn sign(&self) -> i32 {
        if self.lo.is_positive() {
            1
        } else if self.hi.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn overlaps(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn mul(&self, o: &RatInterval) -> RatInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("four").clone();
        let hi = c.iter().max().expect("four").clone();
        RatInterval { lo, hi }
    }

    pub fn scale(&self, c: &Rational) -> RatInterval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    /// Quotient, or `None` when the divisor contains zero.
    pub fn div(&self, o: &RatInterval) -> Option<RatInterval> {
        if o.contains_zero() {
            return None;
        }
        let inv = RatInterval { lo: o.hi.recip(), hi: o.lo.recip() };
        Some(self.mul(&inv))
    }

    pub fn powi(&self, e: u32) -> RatInterval {
        if e == 0 {
            return RatInterval::point(Rational::from_integer(1.into()));
        }
        let a = num_traits::pow(self.lo.clone(), e as usize);
        let b = num_traits::pow(self.hi.clone(), e as usize);
        if e % 2 == 1 {
            RatInterval { lo: a, hi: b }
        } else if self.contains_zero() {
            RatInterval { lo: Rational::zero(), hi: a.max(b) }
        } else {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            RatInterval { lo, hi }
        }
    }
}

/// Natural interval extension of `p` on a box (one interval per variable).
pub fn eval_interval(p: &Polynomial, boxes: &[RatInterval]) -> RatInterval {
    assert_eq!(boxes.len(), p.nvars());
    let mut acc = RatInterval::point(Rational::zero());
    for (m, c) in p.terms() {
        let mut t = RatInterval::point(c.clone());
        for (b, &e) in boxes.iter().zip(&m.0) {
            if e > 0 {
                t = t.mul(&b.powi(e));
            }
        }
        acc = acc.add(&t);
    }
    acc
}
