//! Log-scale absolute values and the absolute value of integers in each
//! characteristic regime.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Scalar;

/// `log|x|` for `x` in `[0, ∞)`; `NegInf` is the log of zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LogAbs<T> {
    NegInf,
    Finite(T),
}

impl<T: Scalar> LogAbs<T> {
    pub fn zero() -> Self {
        LogAbs::Finite(T::zero())
    }

    pub fn finite(v: T) -> Self {
        LogAbs::Finite(v)
    }

    pub fn from_int(n: i64) -> Self {
        LogAbs::Finite(T::from_int(n))
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, LogAbs::NegInf)
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            LogAbs::Finite(v) => Some(v),
            LogAbs::NegInf => None,
        }
    }

    pub fn into_value(self) -> Option<T> {
        match self {
            LogAbs::Finite(v) => Some(v),
            LogAbs::NegInf => None,
        }
    }

    /// `log|x^k|` for an integer `k >= 0`; `log|0^0|` is taken to be 0.
    pub fn scale(&self, k: i64) -> Self {
        match self {
            LogAbs::Finite(v) => LogAbs::Finite(v.clone() * T::from_int(k)),
            LogAbs::NegInf if k == 0 => Self::zero(),
            LogAbs::NegInf => {
                assert!(k > 0, "negative power of zero");
                LogAbs::NegInf
            }
        }
    }

    /// Adds a finite offset (multiplication by a nonzero constant).
    pub fn shift(&self, by: &T) -> Self {
        match self {
            LogAbs::Finite(v) => LogAbs::Finite(v.clone() + by.clone()),
            LogAbs::NegInf => LogAbs::NegInf,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn is_le_zero(&self) -> bool {
        match self {
            LogAbs::NegInf => true,
            LogAbs::Finite(v) => *v <= T::zero(),
        }
    }

    pub fn render(&self) -> String {
        match self {
            LogAbs::NegInf => "-inf".to_string(),
            LogAbs::Finite(v) => v.render(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "-inf" {
            Some(LogAbs::NegInf)
        } else {
            T::parse(s).map(LogAbs::Finite)
        }
    }
}

impl<T: Scalar> PartialOrd for LogAbs<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (LogAbs::NegInf, LogAbs::NegInf) => Some(Ordering::Equal),
            (LogAbs::NegInf, LogAbs::Finite(_)) => Some(Ordering::Less),
            (LogAbs::Finite(_), LogAbs::NegInf) => Some(Ordering::Greater),
            (LogAbs::Finite(a), LogAbs::Finite(b)) => a.partial_cmp(b),
        }
    }
}

/// Logarithm of a product.
impl<T: Scalar> Add for LogAbs<T> {
    type Output = LogAbs<T>;

    fn add(self, rhs: Self) -> Self::Output {
        match (self, rhs) {
            (LogAbs::Finite(a), LogAbs::Finite(b)) => LogAbs::Finite(a + b),
            _ => LogAbs::NegInf,
        }
    }
}

impl<T: Scalar> fmt::Display for LogAbs<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<T: Scalar> Serialize for LogAbs<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de, T: Scalar> Deserialize<'de> for LogAbs<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        LogAbs::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad log-abs value {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SettingError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("characteristic pair ({char_k}, {res_char}) is impossible")]
    BadPair { char_k: u64, res_char: u64 },
    #[error("mixed characteristic needs a strictly negative log|p|")]
    BadLogP,
    #[error("cannot parse setting {0:?}; expected equichar0, equicharP:<p> or mixed:<p>:<log p>")]
    Parse(String),
}

/// The characteristic pair `(char k, char k̃)` with the normalization of `log|p|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSetting<T> {
    char_k: u64,
    res_char: u64,
    log_p: Option<T>,
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl<T: Scalar> ResidueSetting<T> {
    pub fn new(char_k: u64, res_char: u64, log_p: Option<T>) -> Result<Self, SettingError> {
        for c in [char_k, res_char] {
            if c != 0 && !is_prime(c) {
                return Err(SettingError::NotPrime(c));
            }
        }
        match (char_k, res_char) {
            (0, 0) => Ok(Self {
                char_k,
                res_char,
                log_p: None,
            }),
            (0, _) => match log_p {
                Some(l) if l < T::zero() => Ok(Self {
                    char_k,
                    res_char,
                    log_p: Some(l),
                }),
                _ => Err(SettingError::BadLogP),
            },
            (p, q) if p == q => Ok(Self {
                char_k,
                res_char,
                log_p: None,
            }),
            _ => Err(SettingError::BadPair { char_k, res_char }),
        }
    }

    pub fn equichar_zero() -> Self {
        Self {
            char_k: 0,
            res_char: 0,
            log_p: None,
        }
    }

    pub fn equichar_p(p: u64) -> Result<Self, SettingError> {
        Self::new(p, p, None)
    }

    pub fn mixed(p: u64, log_p: T) -> Result<Self, SettingError> {
        Self::new(0, p, Some(log_p))
    }

    pub fn char_k(&self) -> u64 {
        self.char_k
    }

    pub fn res_char(&self) -> u64 {
        self.res_char
    }

    pub fn log_p(&self) -> Option<&T> {
        self.log_p.as_ref()
    }

    pub fn is_mixed(&self) -> bool {
        self.char_k == 0 && self.res_char != 0
    }

    /// `log|n|` for the valuation of `k` restricted to the integers.
    pub fn int_abs(&self, n: i64) -> LogAbs<T> {
        if n == 0 {
            return LogAbs::NegInf;
        }
        match (self.char_k, self.res_char) {
            (0, 0) => LogAbs::zero(),
            (0, p) => {
                let v = p_adic_order(n.unsigned_abs(), p);
                let log_p = self.log_p.clone().expect("mixed setting carries log|p|");
                LogAbs::Finite(log_p * T::from_int(v as i64))
            }
            (p, _) => {
                if n.unsigned_abs().is_multiple_of(p) {
                    LogAbs::NegInf
                } else {
                    LogAbs::zero()
                }
            }
        }
    }
}

fn p_adic_order(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

impl<T: Scalar> fmt::Display for ResidueSetting<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.char_k, self.res_char, &self.log_p) {
            (0, 0, _) => write!(f, "equichar0"),
            (0, p, Some(l)) => write!(f, "mixed:{p}:{}", l.render()),
            (p, _, _) => write!(f, "equicharP:{p}"),
        }
    }
}

impl<T: Scalar> FromStr for ResidueSetting<T> {
    type Err = SettingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SettingError::Parse(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["equichar0"] => Ok(Self::equichar_zero()),
            ["equicharP", p] => Self::equichar_p(p.parse().map_err(|_| bad())?),
            ["mixed", p, l] => Self::mixed(p.parse().map_err(|_| bad())?, T::parse(l).ok_or_else(bad)?),
            _ => Err(bad()),
        }
    }
}

impl<T: Scalar> Serialize for ResidueSetting<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ResidueSetting<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn settings() -> Vec<ResidueSetting<Rational>> {
        vec![
            ResidueSetting::equichar_zero(),
            ResidueSetting::mixed(2, q(-1, 1)).unwrap(),
            ResidueSetting::mixed(3, q(-1, 2)).unwrap(),
            ResidueSetting::equichar_p(3).unwrap(),
            ResidueSetting::equichar_p(2).unwrap(),
        ]
    }

    #[test]
    fn int_abs_examples() {
        let mixed = ResidueSetting::mixed(2, q(-1, 1)).unwrap();
        assert_eq!(mixed.int_abs(12), LogAbs::Finite(q(-2, 1)));
        assert_eq!(ResidueSetting::<Rational>::equichar_zero().int_abs(7), LogAbs::zero());
        assert_eq!(
            ResidueSetting::<Rational>::equichar_p(3).unwrap().int_abs(9),
            LogAbs::NegInf
        );
        assert_eq!(
            ResidueSetting::<Rational>::equichar_p(3).unwrap().int_abs(10),
            LogAbs::zero()
        );
        for s in settings() {
            assert_eq!(s.int_abs(0), LogAbs::NegInf);
            assert_eq!(s.int_abs(1), LogAbs::zero());
            assert_eq!(s.int_abs(-1), LogAbs::zero());
        }
    }

    #[test]
    fn neg_inf_absorbs_and_is_bottom() {
        let a = LogAbs::Finite(q(-5, 1));
        assert_eq!(LogAbs::NegInf + a.clone(), LogAbs::NegInf);
        assert!(LogAbs::NegInf < a);
        assert!(LogAbs::<Rational>::NegInf <= LogAbs::NegInf);
    }

    #[test]
    fn setting_validation() {
        assert_eq!(
            ResidueSetting::<Rational>::new(2, 3, None),
            Err(SettingError::BadPair { char_k: 2, res_char: 3 })
        );
        assert_eq!(
            ResidueSetting::<Rational>::new(0, 4, Some(q(-1, 1))),
            Err(SettingError::NotPrime(4))
        );
        assert_eq!(
            ResidueSetting::<Rational>::mixed(2, q(0, 1)),
            Err(SettingError::BadLogP)
        );
        assert!(ResidueSetting::<Rational>::new(0, 2, None).is_err());
    }

    #[test]
    fn setting_text_round_trip() {
        for s in settings() {
            let text = s.to_string();
            assert_eq!(text.parse::<ResidueSetting<Rational>>().unwrap(), s);
        }
        assert!("mixed:2".parse::<ResidueSetting<Rational>>().is_err());
    }

    #[test]
    fn log_abs_text() {
        assert_eq!(LogAbs::<Rational>::parse("-inf"), Some(LogAbs::NegInf));
        assert_eq!(LogAbs::<Rational>::parse("-3/4").unwrap().render(), "-3/4");
        let json = serde_json::to_string(&LogAbs::Finite(q(1, 2))).unwrap();
        assert_eq!(json, "\"1/2\"");
    }

    proptest! {
        #[test]
        fn int_abs_is_multiplicative(m in -300i64..300, n in -300i64..300, which in 0usize..5) {
            let s = &settings()[which];
            prop_assert_eq!(s.int_abs(m * n), s.int_abs(m) + s.int_abs(n));
        }

        #[test]
        fn int_abs_is_ultrametric(m in -300i64..300, n in -300i64..300, which in 0usize..5) {
            let s = &settings()[which];
            let (a, b, c) = (s.int_abs(m), s.int_abs(n), s.int_abs(m + n));
            prop_assert!(c <= a.clone().max(b.clone()));
            if a != b {
                prop_assert_eq!(c, a.max(b));
            }
        }
    }
}
