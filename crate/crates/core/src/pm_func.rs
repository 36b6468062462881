//! Piecewise monomial functions in log coordinates: continuous, piecewise
//! linear functions of `log r` with integer slopes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::valuation::LogAbs;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PmError {
    #[error("point {0} is outside the domain")]
    OutOfDomain(String),
    #[error("functions are defined on different domains")]
    DomainMismatch,
    #[error("series has no terms")]
    EmptySeries,
    #[error("invalid piecewise function: {0}")]
    Invalid(String),
    #[error("negative power of a function that vanishes on its domain")]
    NegativePowerOfZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Segment<T> {
    pub left_value: LogAbs<T>,
    pub slope: i64,
}

/// A continuous function on `[start, end]` (`end = None` means `+∞`) that is
/// linear with integer slope on each segment.
#[derive(Clone, Debug, PartialEq)]
pub struct PmFunction<T> {
    /// Left endpoint of every segment; `starts[0]` is the domain start.
    starts: Vec<T>,
    end: Option<T>,
    segments: Vec<Segment<T>>,
}

fn value_after<T: Scalar>(v: &LogAbs<T>, slope: i64, width: &T) -> LogAbs<T> {
    v.shift(&(T::from_int(slope) * width.clone()))
}

impl<T: Scalar> PmFunction<T> {
    /// Builds a function from breakpoints `x_0 < … < x_k` (with `end = None`
    /// the last segment is unbounded and `breakpoints` lists only left ends).
    pub fn new(starts: Vec<T>, end: Option<T>, segments: Vec<Segment<T>>) -> Result<Self, PmError> {
        if starts.is_empty() || starts.len() != segments.len() {
            return Err(PmError::Invalid("one segment per left endpoint is required".into()));
        }
        for w in starts.windows(2) {
            if w[0] >= w[1] {
                return Err(PmError::Invalid("breakpoints must increase strictly".into()));
            }
        }
        if let Some(e) = &end {
            let last = starts.last().unwrap();
            let degenerate = starts.len() == 1 && e == last;
            if !degenerate && e <= last {
                return Err(PmError::Invalid("domain end must follow the last breakpoint".into()));
            }
        }
        for i in 1..segments.len() {
            let width = starts[i].clone() - starts[i - 1].clone();
            let expect = value_after(&segments[i - 1].left_value, segments[i - 1].slope, &width);
            if expect != segments[i].left_value {
                return Err(PmError::Invalid(format!("discontinuity at {}", starts[i])));
            }
        }
        Ok(Self { starts, end, segments })
    }

    pub fn linear(start: T, end: Option<T>, value: LogAbs<T>, slope: i64) -> Self {
        Self {
            starts: vec![start],
            end,
            segments: vec![Segment {
                left_value: value,
                slope,
            }],
        }
    }

    pub fn constant(start: T, end: Option<T>, value: LogAbs<T>) -> Self {
        Self::linear(start, end, value, 0)
    }

    pub fn start(&self) -> &T {
        &self.starts[0]
    }

    pub fn end(&self) -> Option<&T> {
        self.end.as_ref()
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// `[x_i, x_{i+1}]` of segment `i`.
    pub fn segment_bounds(&self, i: usize) -> (T, Option<T>) {
        let right = self.starts.get(i + 1).cloned().or_else(|| self.end.clone());
        (self.starts[i].clone(), right)
    }

    /// Interior breakpoints (excluding the domain ends).
    pub fn interior_breakpoints(&self) -> &[T] {
        &self.starts[1..]
    }

    /// All breakpoints `x_0 < … < x_k`, the last one omitted when the domain is unbounded.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut v = self.starts.clone();
        if let Some(e) = &self.end {
            if self.starts.len() > 1 || e != &self.starts[0] {
                v.push(e.clone());
            }
        }
        v
    }

    pub fn is_point(&self) -> bool {
        self.end.as_ref() == Some(&self.starts[0])
    }

    pub fn contains(&self, x: &T) -> bool {
        x >= &self.starts[0] && self.end.as_ref().is_none_or(|e| x <= e)
    }

    fn out(x: &T) -> PmError {
        PmError::OutOfDomain(x.render())
    }

    /// Index of the last segment whose left end is `<= x`.
    fn segment_index(&self, x: &T) -> usize {
        self.starts.iter().rposition(|s| s <= x).unwrap_or_default()
    }

    pub fn eval(&self, x: &T) -> Result<LogAbs<T>, PmError> {
        if !self.contains(x) {
            return Err(Self::out(x));
        }
        let i = self.segment_index(x);
        let seg = &self.segments[i];
        Ok(value_after(
            &seg.left_value,
            seg.slope,
            &(x.clone() - self.starts[i].clone()),
        ))
    }

    /// Slope of the segment adjacent to `x` on the given side.
    pub fn slope_at(&self, x: &T, side: Side) -> Result<i64, PmError> {
        if !self.contains(x) {
            return Err(Self::out(x));
        }
        match side {
            Side::Right => {
                if self.end.as_ref() == Some(x) {
                    return Err(Self::out(x));
                }
                Ok(self.segments[self.segment_index(x)].slope)
            }
            Side::Left => {
                if x == &self.starts[0] {
                    return Err(Self::out(x));
                }
                let i = self.starts.iter().rposition(|s| s < x).unwrap_or(0);
                Ok(self.segments[i].slope)
            }
        }
    }

    /// Re-expresses the function with the extra breakpoints inserted.
    fn refined(&self, cuts: &[T]) -> Self {
        let mut starts = Vec::new();
        let mut segments = Vec::new();
        let mut all: Vec<T> = self.starts.clone();
        for c in cuts {
            if self.contains(c) && self.end.as_ref() != Some(c) && !all.contains(c) {
                all.push(c.clone());
            }
        }
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for x in all {
            let i = self.segment_index(&x);
            let seg = &self.segments[i];
            let v = value_after(&seg.left_value, seg.slope, &(x.clone() - self.starts[i].clone()));
            starts.push(x);
            segments.push(Segment {
                left_value: v,
                slope: seg.slope,
            });
        }
        Self {
            starts,
            end: self.end.clone(),
            segments,
        }
    }

    fn same_domain(&self, other: &Self) -> bool {
        self.starts[0] == other.starts[0] && self.end == other.end
    }

    /// Pointwise product (sum in log scale) on the union of breakpoints.
    pub fn mul(&self, other: &Self) -> Result<Self, PmError> {
        if !self.same_domain(other) {
            return Err(PmError::DomainMismatch);
        }
        let a = self.refined(&other.starts);
        let b = other.refined(&self.starts);
        let segments = a
            .segments
            .iter()
            .zip(&b.segments)
            .map(|(s, t)| Segment {
                left_value: s.left_value.clone() + t.left_value.clone(),
                slope: s.slope + t.slope,
            })
            .collect();
        Ok(Self {
            starts: a.starts,
            end: a.end,
            segments,
        })
    }

    /// `f^n`: values and slopes scaled by `n`.
    pub fn pow(&self, n: i64) -> Result<Self, PmError> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let left_value = match &s.left_value {
                LogAbs::Finite(v) => LogAbs::Finite(v.clone() * T::from_int(n)),
                LogAbs::NegInf if n > 0 => LogAbs::NegInf,
                LogAbs::NegInf if n == 0 => LogAbs::zero(),
                LogAbs::NegInf => return Err(PmError::NegativePowerOfZero),
            };
            segments.push(Segment {
                left_value,
                slope: s.slope * n,
            });
        }
        Ok(Self {
            starts: self.starts.clone(),
            end: self.end.clone(),
            segments,
        })
    }

    /// Drops interior breakpoints where the slope does not change.
    pub fn simplified(&self) -> Self {
        let mut starts = vec![self.starts[0].clone()];
        let mut segments = vec![self.segments[0].clone()];
        for (x, s) in self.starts.iter().zip(&self.segments).skip(1) {
            if segments.last().unwrap().slope != s.slope {
                starts.push(x.clone());
                segments.push(s.clone());
            }
        }
        Self {
            starts,
            end: self.end.clone(),
            segments,
        }
    }

    /// Slopes weakly increase from left to right.
    pub fn is_convex(&self) -> bool {
        self.segments.windows(2).all(|w| w[0].slope <= w[1].slope)
    }

    pub fn max_value(&self) -> LogAbs<T> {
        let mut best = self.segments[0].left_value.clone();
        for i in 0..self.segments.len() {
            let (_, right) = self.segment_bounds(i);
            best = best.max(self.segments[i].left_value.clone());
            if let Some(r) = right {
                best = best.max(self.eval(&r).expect("segment end lies in the domain"));
            }
        }
        best
    }
}

/// A finite Laurent series `Σ h_i t^i`, stored as `i ↦ log|h_i|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedSeries<T> {
    terms: BTreeMap<i64, T>,
}

impl<T: Scalar> ValuedSeries<T> {
    /// Terms with `NegInf` coefficients are dropped.
    pub fn new<I>(terms: I) -> Result<Self, PmError>
    where
        I: IntoIterator<Item = (i64, LogAbs<T>)>,
    {
        let terms: BTreeMap<i64, T> = terms
            .into_iter()
            .filter_map(|(i, v)| v.into_value().map(|v| (i, v)))
            .collect();
        if terms.is_empty() {
            return Err(PmError::EmptySeries);
        }
        Ok(Self { terms })
    }

    pub fn from_finite<I: IntoIterator<Item = (i64, T)>>(terms: I) -> Result<Self, PmError> {
        Self::new(terms.into_iter().map(|(i, v)| (i, LogAbs::Finite(v))))
    }

    pub fn terms(&self) -> &BTreeMap<i64, T> {
        &self.terms
    }

    pub fn coefficient(&self, i: i64) -> LogAbs<T> {
        self.terms.get(&i).cloned().map_or(LogAbs::NegInf, LogAbs::Finite)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `log|h|` on the circle `log|t| = x`, by direct maximization.
    pub fn log_norm_at(&self, x: &T) -> T {
        self.terms
            .iter()
            .map(|(i, v)| v.clone() + T::from_int(*i) * x.clone())
            .reduce(T::max_of)
            .expect("series is nonempty")
    }

    /// All indices attaining the maximum at `log|t| = x`, ascending.
    pub fn achievers_at(&self, x: &T) -> Vec<i64> {
        let best = self.log_norm_at(x);
        self.terms
            .iter()
            .filter(|(i, v)| (*v).clone() + T::from_int(**i) * x.clone() == best)
            .map(|(i, _)| *i)
            .collect()
    }
}

/// The upper envelope of `x ↦ log|h_i| + i·x` together with the dominant
/// index of each segment.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonProfile<T> {
    pub function: PmFunction<T>,
    /// The unique index dominating the interior of each segment.
    pub dominant: Vec<i64>,
    series: ValuedSeries<T>,
}

impl<T: Scalar> NewtonProfile<T> {
    pub fn achievers_at(&self, x: &T) -> Result<Vec<i64>, PmError> {
        if !self.function.contains(x) {
            return Err(PmError::OutOfDomain(x.render()));
        }
        Ok(self.series.achievers_at(x))
    }
}

/// Tropical evaluation of a series over `[start, end]` in `log r`.
pub fn tropical_eval<T: Scalar>(
    series: &ValuedSeries<T>,
    start: T,
    end: Option<T>,
) -> Result<NewtonProfile<T>, PmError> {
    if series.is_empty() {
        return Err(PmError::EmptySeries);
    }
    if let Some(e) = &end {
        if e < &start {
            return Err(PmError::Invalid("empty domain".into()));
        }
    }
    let line = |i: i64, x: &T| series.terms[&i].clone() + T::from_int(i) * x.clone();
    let mut x = start.clone();
    // Among the achievers at the start, the largest index dominates to the right.
    let mut current = *series.achievers_at(&x).last().unwrap();
    let mut starts = vec![x.clone()];
    let mut dominant = vec![current];
    let mut segments = vec![Segment {
        left_value: LogAbs::Finite(line(current, &x)),
        slope: current,
    }];
    loop {
        // Next point where a steeper line overtakes the current one.
        let mut next: Option<(T, i64)> = None;
        for (&j, cj) in series.terms.range(current + 1..) {
            let cross = (series.terms[&current].clone() - cj.clone()) / T::from_int(j - current);
            if cross <= x || end.as_ref().is_some_and(|e| &cross >= e) {
                continue;
            }
            next = match next {
                Some((bx, bj)) if bx < cross || (bx == cross && bj > j) => Some((bx, bj)),
                _ => Some((cross, j)),
            };
        }
        match next {
            None => break,
            Some((cx, j)) => {
                x = cx;
                current = j;
                starts.push(x.clone());
                dominant.push(j);
                segments.push(Segment {
                    left_value: LogAbs::Finite(line(j, &x)),
                    slope: j,
                });
            }
        }
    }
    let function = PmFunction::new(starts, end, segments)?;
    Ok(NewtonProfile {
        function,
        dominant,
        series: series.clone(),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct PmJson<T> {
    domain: (String, String),
    breakpoints: Vec<String>,
    segments: Vec<Segment<T>>,
}

impl<T: Scalar> Serialize for PmFunction<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let end = self.end.as_ref().map_or("inf".to_string(), |e| e.render());
        let mut breakpoints: Vec<String> = self.breakpoints().iter().map(|b| b.render()).collect();
        if self.end.is_none() {
            breakpoints.push("inf".into());
        }
        PmJson {
            domain: (self.starts[0].render(), end),
            breakpoints,
            segments: self.segments.clone(),
        }
        .serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for PmFunction<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = PmJson::<T>::deserialize(d)?;
        let parse = |s: &str| T::parse(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")));
        let end = if raw.domain.1 == "inf" {
            None
        } else {
            Some(parse(&raw.domain.1)?)
        };
        let mut pts = raw
            .breakpoints
            .iter()
            .filter(|b| b.as_str() != "inf")
            .map(|b| parse(b))
            .collect::<Result<Vec<_>, _>>()?;
        if end.is_some() && pts.len() > raw.segments.len() {
            pts.pop();
        }
        if pts.first() != Some(&parse(&raw.domain.0)?) {
            return Err(D::Error::custom("first breakpoint must equal the domain start"));
        }
        PmFunction::new(pts, end, raw.segments).map_err(D::Error::custom)
    }
}
