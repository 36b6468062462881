//! Minimal skeletons of double covers `E → P¹` by elliptic curves, read off
//! from the characteristics and `|j|`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::special::{Lengths, SpecialType};
use crate::valuation::{LogAbs, ResidueSetting, SettingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EllipticError {
    #[error("invalid setting: {0}")]
    InvalidSetting(String),
}

impl From<SettingError> for EllipticError {
    fn from(e: SettingError) -> Self {
        EllipticError::InvalidSetting(e.to_string())
    }
}

/// The characteristics together with `log|j|`; `NegInf` encodes `j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticInput<T> {
    pub setting: ResidueSetting<T>,
    pub log_j: LogAbs<T>,
}

impl<T: Scalar> EllipticInput<T> {
    pub fn new(setting: ResidueSetting<T>, log_j: LogAbs<T>) -> Self {
        Self { setting, log_j }
    }

    pub fn j_zero(setting: ResidueSetting<T>) -> Self {
        Self {
            setting,
            log_j: LogAbs::NegInf,
        }
    }

    /// From raw characteristics as given on the command line.
    pub fn from_chars(char_k: u64, res_char: u64, log_p: Option<T>, log_j: LogAbs<T>) -> Result<Self, EllipticError> {
        let log_p = if char_k == 0 && res_char != 0 { log_p } else { None };
        Ok(Self::new(ResidueSetting::new(char_k, res_char, log_p)?, log_j))
    }

    pub fn is_j_zero(&self) -> bool {
        self.log_j.is_neg_inf()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Good,
    Bad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionKind {
    #[serde(rename = "ordinary")]
    Ordinary,
    #[serde(rename = "supersingular")]
    Supersingular,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionKind::Ordinary => "ordinary",
            ReductionKind::Supersingular => "supersingular",
            ReductionKind::NotApplicable => "n/a",
        })
    }
}

/// Type, inner lengths and reduction of the minimal skeleton. Only the
/// length classes present in the type are set.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SkeletonReport<T> {
    #[serde(rename = "type")]
    pub special_type: SpecialType,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt")]
    pub l0: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt")]
    pub l1: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt")]
    pub l3: Option<T>,
    pub reduction: Reduction,
    pub reduction_type: ReductionKind,
    pub setting: ResidueSetting<T>,
}

fn ser_opt<T: Scalar, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.render()),
        None => s.serialize_none(),
    }
}

impl<T: Scalar> SkeletonReport<T> {
    /// Lengths for [`crate::special::metric_lift`], absent classes as 0.
    pub fn lengths(&self) -> Lengths<T> {
        let get = |l: &Option<T>| l.clone().unwrap_or_else(T::zero);
        Lengths::new(get(&self.l0), get(&self.l1), get(&self.l3))
    }

    /// `l1 + 3·l3`, the quantity fixed to `−log|2|` in the mixed case.
    pub fn mixed_sum(&self) -> T {
        let l = self.lengths();
        l.l1 + l.l3 * T::from_int(3)
    }
}

pub fn classify_elliptic<T: Scalar>(input: &EllipticInput<T>) -> Result<SkeletonReport<T>, EllipticError> {
    use ReductionKind::*;
    use SpecialType::*;
    let setting = &input.setting;
    let half = |v: &T| v.clone() / T::from_int(2);
    let report = |t, l0, l1, l3, reduction, kind| SkeletonReport {
        special_type: t,
        l0,
        l1,
        l3,
        reduction,
        reduction_type: kind,
        setting: setting.clone(),
    };
    let log_j = input.log_j.value();
    let big = log_j.filter(|v| **v > T::zero());
    if setting.res_char() != 2 {
        return Ok(match big {
            Some(v) => report(TB, Some(half(v)), None, None, Reduction::Bad, NotApplicable),
            None => report(TG, None, None, None, Reduction::Good, NotApplicable),
        });
    }
    if setting.char_k() == 2 {
        return Ok(match log_j {
            Some(v) if *v > T::zero() => report(WB, Some(half(v)), None, None, Reduction::Bad, NotApplicable),
            Some(v) if v.is_zero() => report(WO, None, None, None, Reduction::Good, Ordinary),
            Some(v) => report(
                WS,
                None,
                None,
                Some(-v.clone() / T::from_int(24)),
                Reduction::Good,
                Supersingular,
            ),
            None => report(WSS, None, None, None, Reduction::Good, Supersingular),
        });
    }
    let log2 = setting
        .int_abs(2)
        .into_value()
        .filter(|v| *v < T::zero())
        .ok_or_else(|| EllipticError::InvalidSetting(format!("{setting} has no finite negative log|2|")))?;
    let log256 = log2.clone() * T::from_int(8);
    Ok(match log_j {
        Some(v) if *v > T::zero() => report(MB, Some(half(v)), Some(-log2), None, Reduction::Bad, NotApplicable),
        Some(v) if v.is_zero() => report(MO, None, Some(-log2), None, Reduction::Good, Ordinary),
        Some(v) if *v > log256 => {
            let l1 = v.clone() / T::from_int(8) - log2;
            let l3 = -v.clone() / T::from_int(24);
            report(MS, None, Some(l1), Some(l3), Reduction::Good, Supersingular)
        }
        _ => report(
            MSS,
            None,
            None,
            Some(-log2 / T::from_int(3)),
            Reduction::Good,
            Supersingular,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{metric_lift, CharClass};
    use crate::{Rational, SettingQ};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn mixed2() -> SettingQ {
        SettingQ::mixed(2, q(-1, 1)).unwrap()
    }

    fn run(setting: SettingQ, log_j: Option<Rational>) -> SkeletonReport<Rational> {
        let input = match log_j {
            Some(v) => EllipticInput::new(setting, LogAbs::Finite(v)),
            None => EllipticInput::j_zero(setting),
        };
        classify_elliptic(&input).unwrap()
    }

    #[test]
    fn examples() {
        let ms = run(mixed2(), Some(q(-4, 1)));
        assert_eq!(ms.special_type, SpecialType::MS);
        assert_eq!((ms.l1, ms.l3), (Some(q(1, 2)), Some(q(1, 6))));
        let tg = run(SettingQ::mixed(3, q(-1, 1)).unwrap(), Some(q(-3, 1)));
        assert_eq!(tg.special_type, SpecialType::TG);
        assert_eq!((tg.l0, tg.l1, tg.l3), (None, None, None));
        assert_eq!(
            run(SettingQ::equichar_p(2).unwrap(), None).special_type,
            SpecialType::WSS
        );
        let mo = run(mixed2(), Some(q(0, 1)));
        assert_eq!((mo.special_type, mo.l1), (SpecialType::MO, Some(q(1, 1))));
    }

    #[test]
    fn json_shape() {
        let ms = run(mixed2(), Some(q(-4, 1)));
        let v = serde_json::to_value(&ms).unwrap();
        assert_eq!(v["type"], "MS");
        assert_eq!(v["l1"], "1/2");
        assert_eq!(v["l3"], "1/6");
        assert!(v.get("l0").is_none());
        assert_eq!(v["reduction"], "good");
        assert_eq!(v["reduction_type"], "supersingular");
    }

    #[test]
    fn mixed_transitions_are_monotone() {
        let order = [SpecialType::MB, SpecialType::MO, SpecialType::MS, SpecialType::MSS];
        let mut last = 0;
        for k in (-400..=400).rev() {
            let r = run(mixed2(), Some(q(k, 40)));
            let pos = order.iter().position(|t| *t == r.special_type).unwrap();
            assert!(pos >= last, "log|j| = {k}/40 went back to {}", r.special_type);
            last = pos;
            if r.special_type.class() == CharClass::Mixed && r.special_type != SpecialType::MB {
                assert_eq!(r.mixed_sum(), q(1, 1));
            }
        }
        assert_eq!(run(mixed2(), Some(q(-8, 1))).special_type, SpecialType::MSS);
        assert_eq!(run(mixed2(), Some(q(-799, 100))).special_type, SpecialType::MS);
        assert_eq!(run(mixed2(), None).special_type, SpecialType::MSS);
    }

    #[test]
    fn outputs_are_liftable() {
        let settings = [
            SettingQ::equichar_zero(),
            SettingQ::equichar_p(3).unwrap(),
            SettingQ::mixed(3, q(-2, 1)).unwrap(),
            mixed2(),
            SettingQ::mixed(2, q(-1, 3)).unwrap(),
            SettingQ::equichar_p(2).unwrap(),
        ];
        for s in settings {
            for k in -30..=30 {
                for log_j in [Some(q(k, 3)), None] {
                    let r = run(s.clone(), log_j);
                    let lift = metric_lift(r.special_type, &r.lengths(), &s);
                    assert!(lift.is_ok(), "{} in {s}: {lift:?}", r.special_type);
                }
            }
        }
    }

    #[test]
    fn bad_settings() {
        assert!(EllipticInput::<Rational>::from_chars(2, 3, None, LogAbs::zero()).is_err());
        assert!(EllipticInput::<Rational>::from_chars(0, 2, None, LogAbs::zero()).is_err());
        assert!(EllipticInput::from_chars(0, 2, Some(q(-1, 1)), LogAbs::zero()).is_ok());
    }
}
