//! Semirings over natural-log weights.
//!
//! [`LogWeight`] adds paths with log-sum-exp and is what total-weight
//! (forward) computations use. [`TropicalWeight`] keeps the maximum instead,
//! turning the same shortest-distance machinery into a Viterbi search.

use core::fmt;

use crate::math;

pub trait Semiring: Copy + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn plus(self, rhs: Self) -> Self;
    fn times(self, rhs: Self) -> Self;

    fn is_zero(self) -> bool {
        self == Self::zero()
    }
}

/// A natural-log probability. `-inf` is the semiring zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO: Self = Self(f64::NEG_INFINITY);
    pub const ONE: Self = Self(0.0);

    /// Panics in debug builds on NaN or `+inf`.
    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan(), "log weight is NaN");
        debug_assert!(value != f64::INFINITY, "log weight is +inf");
        Self(value)
    }

    pub fn from_prob(p: f64) -> Self {
        Self::new(math::ln(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_prob(self) -> f64 {
        math::exp(self.0)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Semiring for LogWeight {
    fn zero() -> Self {
        Self::ZERO
    }

    fn one() -> Self {
        Self::ONE
    }

    fn plus(self, rhs: Self) -> Self {
        let (hi, lo) = if self.0 >= rhs.0 { (self.0, rhs.0) } else { (rhs.0, self.0) };
        if lo == f64::NEG_INFINITY {
            return Self(hi);
        }
        Self(hi + math::ln_1p(math::exp(lo - hi)))
    }

    fn times(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl fmt::Display for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Max-plus over log values.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct TropicalWeight(f64);

impl TropicalWeight {
    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan(), "tropical weight is NaN");
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Semiring for TropicalWeight {
    fn zero() -> Self {
        Self(f64::NEG_INFINITY)
    }

    fn one() -> Self {
        Self(0.0)
    }

    fn plus(self, rhs: Self) -> Self {
        if rhs.0 > self.0 {
            rhs
        } else {
            self
        }
    }

    fn times(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl From<LogWeight> for TropicalWeight {
    fn from(w: LogWeight) -> Self {
        Self(w.0)
    }
}

impl From<TropicalWeight> for LogWeight {
    fn from(w: TropicalWeight) -> Self {
        Self(w.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w() -> impl Strategy<Value = LogWeight> {
        prop_oneof![
            9 => (-30.0f64..5.0).prop_map(LogWeight::new),
            1 => Just(LogWeight::ZERO),
        ]
    }

    fn close(a: LogWeight, b: LogWeight) -> bool {
        a == b || (a.value() - b.value()).abs() <= 1e-12
    }

    #[test]
    fn identities() {
        let a = LogWeight::new(-1.25);
        assert_eq!(a.plus(LogWeight::ZERO), a);
        assert_eq!(LogWeight::ZERO.plus(a), a);
        assert_eq!(a.times(LogWeight::ONE), a);
        assert_eq!(a.times(LogWeight::ZERO), LogWeight::ZERO);
        assert_eq!(LogWeight::ZERO.plus(LogWeight::ZERO), LogWeight::ZERO);
    }

    #[test]
    fn plus_of_probabilities() {
        let s = LogWeight::from_prob(0.3).plus(LogWeight::from_prob(0.7));
        assert!(s.value().abs() < 1e-15);
    }

    #[test]
    fn tropical_keeps_max() {
        let a = TropicalWeight::new(-2.0);
        let b = TropicalWeight::new(-0.5);
        assert_eq!(a.plus(b), b);
        assert_eq!(a.times(b).value(), -2.5);
    }

    proptest! {
        #[test]
        fn times_is_exact_addition(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            prop_assert_eq!(LogWeight::new(a).times(LogWeight::new(b)).value(), a + b);
        }

        #[test]
        fn plus_commutes_and_associates(a in w(), b in w(), c in w()) {
            prop_assert!(close(a.plus(b), b.plus(a)));
            prop_assert!(close(a.plus(b).plus(c), a.plus(b.plus(c))));
        }

        #[test]
        fn times_distributes(a in w(), b in w(), c in w()) {
            prop_assert!(close(a.times(b.plus(c)), a.times(b).plus(a.times(c))));
        }
    }
}
