//! Scalar abstraction shared by every metric and valuation computation.
//!
//! The library is written against [`Scalar`] so that the same code runs on
//! exact rationals (the default, see [`crate::Rational`]) and on big
//! rationals when intermediate values outgrow `i64`. An `f64` impl is
//! provided for quick exploratory runs; equality-based checks are only
//! meaningful on exact types.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

pub trait Scalar: Clone + PartialOrd + Num + Signed + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// True when arithmetic on this type is exact.
    const EXACT: bool;

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the scalar type")
    }

    /// Parses `"p/q"`, `"p"` or (for floats) a decimal literal.
    fn parse(s: &str) -> Option<Self>;

    /// Canonical text form used in JSON files.
    fn render(&self) -> String {
        self.to_string()
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Ratio<i64> {
    const EXACT: bool = true;

    fn parse(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl Scalar for Ratio<BigInt> {
    const EXACT: bool = true;

    fn parse(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            return Some(n / d);
        }
        s.parse().ok()
    }
}
