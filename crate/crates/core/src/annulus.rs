//! Multiplicity and the different along the skeleton of an annulus, computed
//! from a Laurent series `h(t) = Σ h_i t^i` describing the covering.
//!
//! Coordinates: `x = log|t|`; the reference point is `x = 0`. Profiles
//! report slopes in increasing `x`. The slope `s` of a [`DifferentReport`]
//! is taken along the inward branch (decreasing `x`) at the reference
//! point, so it is the negative of the profile slope just left of 0.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::pm_func::{tropical_eval, PmError, PmFunction};
use crate::scalar::Scalar;
use crate::valuation::{LogAbs, ResidueSetting};
use crate::Verdict;

pub use crate::pm_func::ValuedSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnulusError {
    #[error("series is empty")]
    EmptySeries,
    #[error("series is constant")]
    ConstantSeries,
    #[error("derivative vanishes: the map is not generically étale")]
    InseparableSeries,
    #[error("computed different exceeds 1 at {0}; the series does not model a covering there")]
    InvalidModel(String),
    #[error("triple cannot be realized: {0}")]
    UnrealizableTriple(String),
    #[error(transparent)]
    Pm(#[from] PmError),
}

/// Drops the constant term and rescales so that `max_i log|h_i| = 0`.
pub fn normalize<T: Scalar>(series: &ValuedSeries<T>) -> Result<ValuedSeries<T>, AnnulusError> {
    let rest: Vec<(i64, T)> = series
        .terms()
        .iter()
        .filter(|(i, _)| **i != 0)
        .map(|(i, v)| (*i, v.clone()))
        .collect();
    let top = rest
        .iter()
        .map(|(_, v)| v.clone())
        .reduce(T::max_of)
        .ok_or(AnnulusError::ConstantSeries)?;
    Ok(ValuedSeries::from_finite(
        rest.into_iter().map(|(i, v)| (i, v - top.clone())),
    )?)
}

pub fn is_normalized<T: Scalar>(series: &ValuedSeries<T>) -> bool {
    !series.terms().contains_key(&0) && series.terms().values().cloned().reduce(T::max_of) == Some(T::zero())
}

/// Local form `|x| = |h_m|·|t|^m` of the map near a point of the skeleton.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ImageLaw<T> {
    /// Dominant index towards smaller radii (minimal achiever).
    pub m: i64,
    pub log_coeff: LogAbs<T>,
    /// Dominant index towards larger radii (maximal achiever).
    pub outward_m: i64,
    pub outward_log_coeff: LogAbs<T>,
}

pub fn skeleton_image_law<T: Scalar>(series: &ValuedSeries<T>, at_log_r: &T) -> Result<ImageLaw<T>, AnnulusError> {
    if series.is_empty() {
        return Err(AnnulusError::EmptySeries);
    }
    let ach = series.achievers_at(at_log_r);
    let (lo, hi) = (ach[0], *ach.last().unwrap());
    Ok(ImageLaw {
        m: lo,
        log_coeff: series.coefficient(lo),
        outward_m: hi,
        outward_log_coeff: series.coefficient(hi),
    })
}

/// `h' = Σ i h_i t^{i-1}` with `|i|` taken in the given setting.
pub fn derivative<T: Scalar>(
    series: &ValuedSeries<T>,
    setting: &ResidueSetting<T>,
) -> Result<ValuedSeries<T>, AnnulusError> {
    let terms: Vec<(i64, LogAbs<T>)> = series
        .terms()
        .iter()
        .map(|(i, v)| (i - 1, setting.int_abs(*i) + LogAbs::Finite(v.clone())))
        .collect();
    ValuedSeries::new(terms).map_err(|_| AnnulusError::InseparableSeries)
}

/// `log δ(x) = log|h'|_x + x − log|h|_x` on `[start, end]` after normalizing `h`.
pub fn different_profile<T: Scalar>(
    series: &ValuedSeries<T>,
    setting: &ResidueSetting<T>,
    start: T,
    end: Option<T>,
) -> Result<PmFunction<T>, AnnulusError> {
    let h = normalize(series)?;
    let dh = derivative(&h, setting)?;
    let norm_h = tropical_eval(&h, start.clone(), end.clone())?.function;
    let norm_dh = tropical_eval(&dh, start.clone(), end.clone())?.function;
    let radius = PmFunction::linear(start.clone(), end, LogAbs::Finite(start), 1);
    let delta = norm_dh.mul(&radius)?.mul(&norm_h.pow(-1)?)?;
    for (i, seg) in delta.segments().iter().enumerate() {
        let (left, right) = delta.segment_bounds(i);
        let right_ok = match &right {
            Some(r) => delta.eval(r)?.is_le_zero(),
            None => seg.slope <= 0,
        };
        if !seg.left_value.is_le_zero() {
            return Err(AnnulusError::InvalidModel(left.render()));
        }
        if !right_ok {
            return Err(AnnulusError::InvalidModel(right.map_or("+inf".into(), |r| r.render())));
        }
    }
    Ok(delta)
}

/// Multiplicity, dominant derivative index, different and inward slope at `|t| = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct DifferentReport<T> {
    pub m: i64,
    pub n: i64,
    pub log_delta: LogAbs<T>,
    pub slope_s: i64,
}

pub fn different_report<T: Scalar>(
    series: &ValuedSeries<T>,
    setting: &ResidueSetting<T>,
) -> Result<DifferentReport<T>, AnnulusError> {
    let h = normalize(series)?;
    let m = *h
        .terms()
        .iter()
        .find(|(_, v)| v.is_zero())
        .expect("normalized series reaches 0")
        .0;
    let dh = derivative(&h, setting)?;
    let top = dh.log_norm_at(&T::zero());
    let n = 1 + *dh
        .terms()
        .iter()
        .find(|(_, v)| **v == top)
        .expect("maximum is attained")
        .0;
    Ok(DifferentReport {
        m,
        n,
        log_delta: LogAbs::Finite(top),
        slope_s: m - n,
    })
}

/// The constraint `|m+s| ≥ δ ≥ |m|` with `s ≤ 0` on the upper border and
/// `s ≥ 0` on the lower border.
pub fn check_restriction<T: Scalar>(m: i64, s: i64, log_delta: &LogAbs<T>, setting: &ResidueSetting<T>) -> Verdict {
    if m <= 0 {
        return Verdict::violated(format!("multiplicity {m} is not positive"));
    }
    if !log_delta.is_le_zero() {
        return Verdict::violated(format!("log δ = {log_delta} is positive"));
    }
    let upper = setting.int_abs(m + s);
    let lower = setting.int_abs(m);
    if log_delta > &upper {
        return Verdict::violated(format!("log δ = {log_delta} exceeds log|m+s| = {upper}"));
    }
    if log_delta < &lower {
        return Verdict::violated(format!("log δ = {log_delta} is below log|m| = {lower}"));
    }
    if log_delta == &upper && s > 0 {
        return Verdict::violated(format!("δ = |m+s| forces s ≤ 0, got s = {s}"));
    }
    if log_delta == &lower && s < 0 {
        return Verdict::violated(format!("δ = |m| forces s ≥ 0, got s = {s}"));
    }
    Verdict::Ok
}

/// The residue characteristic 2 refinement for `m ≡ 2 (mod 4)`: either `s`
/// is odd, or `s = 0` and `δ = |2|`. `None` when it does not apply.
pub fn degree_two_refinement<T: Scalar>(
    m: i64,
    s: i64,
    log_delta: &LogAbs<T>,
    setting: &ResidueSetting<T>,
) -> Option<Verdict> {
    if setting.res_char() != 2 || m.rem_euclid(4) != 2 {
        return None;
    }
    if s % 2 != 0 || (s == 0 && *log_delta == setting.int_abs(2)) {
        Some(Verdict::Ok)
    } else {
        Some(Verdict::violated(format!("s = {s} is even but δ ≠ |2| or s ≠ 0")))
    }
}

/// A monomial or binomial series with the prescribed multiplicity, inward
/// slope and different at `|t| = 1`.
pub fn realize_triple<T: Scalar>(
    m: i64,
    s: i64,
    log_delta: &LogAbs<T>,
    setting: &ResidueSetting<T>,
) -> Result<ValuedSeries<T>, AnnulusError> {
    if let Verdict::Violated(reason) = check_restriction(m, s, log_delta, setting) {
        return Err(AnnulusError::UnrealizableTriple(reason));
    }
    let delta = log_delta
        .value()
        .ok_or_else(|| AnnulusError::UnrealizableTriple("δ = 0 is not attained at an interior point".into()))?;
    if s == 0 {
        return Ok(ValuedSeries::from_finite([(m, T::zero())])?);
    }
    let other = m - s;
    let coeff = setting
        .int_abs(other)
        .into_value()
        .map(|a| delta.clone() - a)
        .ok_or_else(|| AnnulusError::UnrealizableTriple(format!("|{other}| = 0")))?;
    Ok(ValuedSeries::from_finite([(m, T::zero()), (other, coeff)])?)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SeriesParseError {
    pub line: usize,
    pub message: String,
}

/// Reads the text format: one `i log_abs` pair per line, `#` starts a comment.
pub fn parse_series<T: Scalar>(text: &str) -> Result<ValuedSeries<T>, SeriesParseError> {
    let mut terms = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| SeriesParseError { line: no + 1, message };
        let mut parts = line.split_whitespace();
        let (Some(i), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `index log_abs`, got {line:?}")));
        };
        let i: i64 = i.parse().map_err(|_| err(format!("bad index {i:?}")))?;
        let v = LogAbs::<T>::parse(v).ok_or_else(|| err(format!("bad value {v:?}")))?;
        if !seen.insert(i) {
            return Err(err(format!("index {i} repeated")));
        }
        terms.push((i, v));
    }
    ValuedSeries::new(terms).map_err(|_| SeriesParseError {
        line: 0,
        message: "series has no nonzero terms".into(),
    })
}

pub fn render_series<T: Scalar>(series: &ValuedSeries<T>) -> String {
    let mut out = String::new();
    for (i, v) in series.terms() {
        let _ = writeln!(out, "{i} {}", v.render());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn series(terms: &[(i64, Rational)]) -> ValuedSeries<Rational> {
        ValuedSeries::from_finite(terms.iter().cloned()).unwrap()
    }

    fn mixed2() -> ResidueSetting<Rational> {
        ResidueSetting::mixed(2, q(-1, 1)).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize(&series(&[(0, q(0, 1)), (2, q(-1, 1))])).unwrap(),
            series(&[(2, q(0, 1))])
        );
        assert_eq!(normalize(&series(&[(2, q(0, 1))])).unwrap(), series(&[(2, q(0, 1))]));
        assert_eq!(
            normalize(&series(&[(1, q(-3, 1)), (3, q(-1, 1))])).unwrap(),
            series(&[(1, q(-2, 1)), (3, q(0, 1))])
        );
        assert_eq!(normalize(&series(&[(0, q(-2, 1))])), Err(AnnulusError::ConstantSeries));
    }

    #[test]
    fn image_law_examples() {
        for p in [2, 3, 5] {
            let law = skeleton_image_law(&series(&[(p, q(0, 1))]), &q(0, 1)).unwrap();
            assert_eq!((law.m, law.log_coeff), (p, LogAbs::zero()));
        }
        let law = skeleton_image_law(&series(&[(2, q(0, 1)), (3, q(-1, 2))]), &q(0, 1)).unwrap();
        assert_eq!((law.m, law.log_coeff.clone()), (2, LogAbs::zero()));
        assert_eq!(law.outward_m, 2);
        let tie = skeleton_image_law(&series(&[(2, q(0, 1)), (3, q(-1, 2))]), &q(1, 2)).unwrap();
        assert_eq!((tie.m, tie.outward_m), (2, 3));
        let id = skeleton_image_law(&series(&[(1, q(0, 1))]), &q(-7, 3)).unwrap();
        assert_eq!((id.m, id.log_coeff), (1, LogAbs::zero()));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            derivative(&series(&[(2, q(0, 1))]), &mixed2()).unwrap(),
            series(&[(1, q(-1, 1))])
        );
        let eq2 = ResidueSetting::<Rational>::equichar_p(2).unwrap();
        assert_eq!(
            derivative(&series(&[(2, q(0, 1))]), &eq2),
            Err(AnnulusError::InseparableSeries)
        );
        assert_eq!(
            derivative(&series(&[(2, q(0, 1)), (3, q(-1, 2))]), &mixed2()).unwrap(),
            series(&[(1, q(-1, 1)), (2, q(-1, 2))])
        );
    }

    #[test]
    fn profile_examples() {
        for (p, l) in [(2, q(-1, 1)), (3, q(-2, 3)), (5, q(-1, 1))] {
            let s = ResidueSetting::mixed(p as u64, l).unwrap();
            let f = different_profile(&series(&[(p, q(0, 1))]), &s, q(-1, 1), Some(q(0, 1))).unwrap();
            assert_eq!(f.simplified().segments().len(), 1);
            assert_eq!(f.segments()[0].slope, 0);
            assert_eq!(f.eval(&q(-1, 2)).unwrap(), LogAbs::Finite(l));
        }
        for s in [
            ResidueSetting::equichar_zero(),
            mixed2(),
            ResidueSetting::equichar_p(3).unwrap(),
        ] {
            let f = different_profile(&series(&[(1, q(0, 1))]), &s, q(-2, 1), Some(q(2, 1))).unwrap();
            assert_eq!(f.max_value(), LogAbs::zero());
            assert!(f.segments().iter().all(|seg| seg.slope == 0));
        }
        let f = different_profile(
            &series(&[(2, q(0, 1)), (3, q(-1, 2))]),
            &mixed2(),
            q(-1, 1),
            Some(q(1, 1)),
        )
        .unwrap();
        assert_eq!(f.eval(&q(0, 1)).unwrap(), LogAbs::Finite(q(-1, 2)));
        assert_eq!(f.slope_at(&q(0, 1), crate::pm_func::Side::Left).unwrap(), 1);
    }

    #[test]
    fn report_examples() {
        let r = different_report(&series(&[(2, q(0, 1))]), &mixed2()).unwrap();
        assert_eq!(
            r,
            DifferentReport {
                m: 2,
                n: 2,
                log_delta: LogAbs::Finite(q(-1, 1)),
                slope_s: 0
            }
        );
        let r = different_report(&series(&[(3, q(0, 1))]), &ResidueSetting::mixed(3, q(-1, 4)).unwrap()).unwrap();
        assert_eq!(
            r,
            DifferentReport {
                m: 3,
                n: 3,
                log_delta: LogAbs::Finite(q(-1, 4)),
                slope_s: 0
            }
        );
        let r = different_report(&series(&[(2, q(0, 1)), (3, q(-1, 2))]), &mixed2()).unwrap();
        assert_eq!(
            r,
            DifferentReport {
                m: 2,
                n: 3,
                log_delta: LogAbs::Finite(q(-1, 2)),
                slope_s: -1
            }
        );
        let r = different_report(&series(&[(1, q(0, 1))]), &ResidueSetting::equichar_zero()).unwrap();
        assert_eq!(
            r,
            DifferentReport {
                m: 1,
                n: 1,
                log_delta: LogAbs::zero(),
                slope_s: 0
            }
        );
    }

    #[test]
    fn restriction_examples() {
        assert_eq!(
            check_restriction(2, -1, &LogAbs::Finite(q(-1, 2)), &mixed2()),
            Verdict::Ok
        );
        for p in [2u64, 3, 5] {
            let s = ResidueSetting::mixed(p, q(-1, 1)).unwrap();
            assert_eq!(
                check_restriction(p as i64, 0, &LogAbs::Finite(q(-1, 1)), &s),
                Verdict::Ok
            );
        }
        assert!(!check_restriction(2, 0, &LogAbs::Finite(q(-1, 2)), &mixed2()).is_ok());
        assert!(!check_restriction(0, 0, &LogAbs::zero(), &mixed2()).is_ok());
        assert!(!check_restriction(1, 0, &LogAbs::Finite(q(1, 2)), &mixed2()).is_ok());
        // upper border with s > 0 is excluded
        assert!(!check_restriction(2, 1, &LogAbs::zero(), &mixed2()).is_ok());
    }

    #[test]
    fn refinement_applies_to_m_two_mod_four() {
        let d = LogAbs::Finite(q(-1, 1));
        assert_eq!(degree_two_refinement(2, 0, &d, &mixed2()), Some(Verdict::Ok));
        assert_eq!(
            degree_two_refinement(2, -3, &LogAbs::zero(), &mixed2()),
            Some(Verdict::Ok)
        );
        assert!(!degree_two_refinement(2, 2, &d, &mixed2()).unwrap().is_ok());
        assert_eq!(degree_two_refinement(4, 2, &d, &mixed2()), None);
        assert_eq!(degree_two_refinement(2, 2, &d, &ResidueSetting::equichar_zero()), None);
    }

    #[test]
    fn realize_examples() {
        assert_eq!(
            realize_triple(2, -1, &LogAbs::Finite(q(-1, 2)), &mixed2()).unwrap(),
            series(&[(2, q(0, 1)), (3, q(-1, 2))])
        );
        for m in [1i64, 2, 3, 4, 6] {
            let s = mixed2();
            assert_eq!(
                realize_triple(m, 0, &s.int_abs(m), &s).unwrap(),
                series(&[(m, q(0, 1))])
            );
        }
        assert_eq!(
            realize_triple(1, 0, &LogAbs::zero(), &ResidueSetting::equichar_zero()).unwrap(),
            series(&[(1, q(0, 1))])
        );
        assert!(matches!(
            realize_triple(2, 0, &LogAbs::Finite(q(-1, 2)), &mixed2()),
            Err(AnnulusError::UnrealizableTriple(_))
        ));
    }

    #[test]
    fn series_text_format() {
        let text = "# kummer\n2 0\n3 -1/2  # tail\n\n";
        let s: ValuedSeries<Rational> = parse_series(text).unwrap();
        assert_eq!(s, series(&[(2, q(0, 1)), (3, q(-1, 2))]));
        assert_eq!(parse_series::<Rational>(&render_series(&s)).unwrap(), s);
        let e = parse_series::<Rational>("1 0\nx 1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(parse_series::<Rational>("1 0\n1 -1\n").unwrap_err().line, 2);
        assert!(parse_series::<Rational>("# nothing\n").is_err());
    }
}
