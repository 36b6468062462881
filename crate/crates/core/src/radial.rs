//! Radial sets on skeletons and the topological ramification locus of
//! degree-`p` covers.
//!
//! The locus is described by its center (the part of the source skeleton
//! where the multiplicity is `p`) and the radius `ψ = −log δ/(p−1)` along
//! it. Each center edge carries `log δ` as a [`PmFunction`] starting at
//! its `from` end; `ψ` is read off by dividing by `1 − p`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::annulus::{different_report, AnnulusError};
use crate::elliptic::SkeletonReport;
use crate::graph::{EdgeId, GenusGraph, GraphError, Length, MetricGenusGraph, OrientedEdge, VertexId};
use crate::morphism::{DeltaMorphism, MetricDeltaMorphism, MorphismError, NMorphism};
use crate::pm_func::{PmError, PmFunction, Segment, Side, ValuedSeries};
use crate::scalar::Scalar;
use crate::special::metric_lift;
use crate::valuation::{LogAbs, ResidueSetting};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadialError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("morphism has degree {degree}, expected {p}")]
    WrongDegree { degree: u32, p: u64 },
    #[error("no point of {0}")]
    NotOnEdge(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pm(#[from] PmError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Annulus(#[from] AnnulusError),
}

/// The center graph with `log δ` on its vertices and edges.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialDescription<T> {
    p: u64,
    center: MetricGenusGraph<T>,
    vertex_log_delta: Vec<LogAbs<T>>,
    edge_log_delta: Vec<PmFunction<T>>,
}

/// `−v/(p−1)` with `NegInf ↦ None` (infinite radius).
fn radius_of<T: Scalar>(v: &LogAbs<T>, p: u64) -> Option<T> {
    v.value().map(|v| -v.clone() / T::from_int(p as i64 - 1))
}

impl<T: Scalar> RadialDescription<T> {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn center(&self) -> &MetricGenusGraph<T> {
        &self.center
    }

    pub fn log_delta(&self, e: EdgeId) -> &PmFunction<T> {
        &self.edge_log_delta[e.0]
    }

    pub fn vertex_log_delta(&self, v: VertexId) -> &LogAbs<T> {
        &self.vertex_log_delta[v.0]
    }

    /// `ψ` at a center vertex; `None` is an infinite radius.
    pub fn vertex_radius(&self, v: VertexId) -> Option<T> {
        radius_of(&self.vertex_log_delta[v.0], self.p)
    }

    /// `ψ` at distance `x` from the `from` end of `e`.
    pub fn radius_at(&self, e: EdgeId, x: &T) -> Result<Option<T>, RadialError> {
        Ok(radius_of(&self.edge_log_delta[e.0].eval(x)?, self.p))
    }

    /// Splits `e` at distance `at` from its `from` end.
    pub fn subdivided(&self, e: EdgeId, at: T) -> Result<Self, RadialError> {
        let g = self.center.graph();
        let f = &self.edge_log_delta[e.0];
        let inside = at > T::zero() && self.center.length(e).finite().is_none_or(|l| at < *l);
        if !inside {
            return Err(RadialError::NotOnEdge(format!("{} at {}", g.edge_name(e), at)));
        }
        let (a, b) = g.ends(e);
        let mut out = GenusGraph::new();
        for v in g.vertices() {
            out.add_vertex(g.vertex_name(v), g.vertex_genus(v));
        }
        let mid = out.add_vertex(format!("{}@{}", g.edge_name(e), at.render()), 0);
        let mut lengths = Vec::new();
        let mut funcs = Vec::new();
        for other in g.edges().filter(|x| *x != e) {
            let (u, w) = g.ends(other);
            out.add_edge(g.edge_name(other), u, w);
            lengths.push(self.center.length(other).clone());
            funcs.push(self.edge_log_delta[other.0].clone());
        }
        out.add_edge(format!("{}.0", g.edge_name(e)), a, mid);
        lengths.push(Length::Finite(at.clone()));
        funcs.push(window(f, &T::zero(), Some(&at))?);
        out.add_edge(format!("{}.1", g.edge_name(e)), mid, b);
        let rest = self.center.length(e).finite().map(|l| l.clone() - at.clone());
        lengths.push(rest.clone().map_or(Length::Infinite, Length::Finite));
        funcs.push(window(f, &at, f.end())?);
        let mut vertex_log_delta = self.vertex_log_delta.clone();
        vertex_log_delta.push(f.eval(&at)?);
        Ok(Self {
            p: self.p,
            center: MetricGenusGraph::new(out, lengths)?,
            vertex_log_delta,
            edge_log_delta: funcs,
        })
    }
}

/// Restriction of `f` to `[a, b]`, reparametrized to start at 0.
fn window<T: Scalar>(f: &PmFunction<T>, a: &T, b: Option<&T>) -> Result<PmFunction<T>, PmError> {
    let mut starts = vec![a.clone()];
    starts.extend(
        f.interior_breakpoints()
            .iter()
            .filter(|x| *x > a && b.is_none_or(|b| *x < b))
            .cloned(),
    );
    let mut segments = Vec::new();
    for x in &starts {
        segments.push(Segment {
            left_value: f.eval(x)?,
            slope: f.slope_at(x, Side::Right)?,
        });
    }
    let shifted = starts.into_iter().map(|x| x - a.clone()).collect();
    PmFunction::new(shifted, b.map(|b| b.clone() - a.clone()), segments)
}

/// The radial set `C(Γ₀, δ^{1/(p−1)})` of a degree-`p` metric δ-morphism:
/// its center is the part of the source of multiplicity `p`.
pub fn degree_p_locus<T: Scalar>(m: &MetricDeltaMorphism<T>, p: u64) -> Result<RadialDescription<T>, RadialError> {
    if !crate::valuation::is_prime(p) {
        return Err(RadialError::NotPrime(p));
    }
    let dm = m.morphism();
    if dm.degree() as u64 != p {
        return Err(RadialError::WrongDegree { degree: dm.degree(), p });
    }
    let src = m.source();
    let g = src.graph();
    let mut center = GenusGraph::new();
    let mut index = vec![None; g.vertex_count()];
    let mut vertex_log_delta = Vec::new();
    for v in g.vertices().filter(|v| dm.n_v(*v) as u64 == p) {
        index[v.0] = Some(center.add_vertex(g.vertex_name(v), g.vertex_genus(v)));
        vertex_log_delta.push(m.delta(v).clone());
    }
    let mut lengths = Vec::new();
    let mut funcs = Vec::new();
    for e in g.edges().filter(|e| dm.n(*e) as u64 == p) {
        let (a, b) = g.ends(e);
        let oe = if src.is_tail(e) && src.is_infinite_leaf(a) && !src.is_infinite_leaf(b) {
            OrientedEdge::backward(e)
        } else {
            OrientedEdge::forward(e)
        };
        let (u, w) = (g.tail(oe), g.head(oe));
        let (cu, cw) = (
            index[u.0].expect("ends of a p-edge have n_v = p"),
            index[w.0].expect("ends of a p-edge have n_v = p"),
        );
        center.add_edge(g.edge_name(e), cu, cw);
        let len = src.length(e).clone();
        funcs.push(PmFunction::linear(
            T::zero(),
            len.finite().cloned(),
            m.delta(u).clone(),
            dm.sdelta(oe),
        ));
        lengths.push(len);
    }
    Ok(RadialDescription {
        p,
        center: MetricGenusGraph::new(center, lengths)?,
        vertex_log_delta,
        edge_log_delta: funcs,
    })
}

/// A segment of a center edge on which `ψ` changes faster than distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct StrictWitness<T> {
    pub edge: String,
    #[serde(serialize_with = "ser_scalar")]
    pub from: T,
    #[serde(serialize_with = "ser_opt_scalar")]
    pub to: Option<T>,
    /// `|dψ/dx|` on the segment.
    #[serde(serialize_with = "ser_scalar")]
    pub rate: T,
}

fn ser_scalar<T: Scalar, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.render())
}

fn ser_opt_scalar<T: Scalar, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.as_ref().map_or("inf".to_string(), |v| v.render()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar", tag = "strictness", rename_all = "lowercase")]
pub enum Strictness<T> {
    Equal,
    Strict(StrictWitness<T>),
}

impl<T> Strictness<T> {
    pub fn is_strict(&self) -> bool {
        matches!(self, Strictness::Strict(_))
    }
}

impl<T: Scalar> fmt::Display for Strictness<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strictness::Equal => write!(f, "equal"),
            Strictness::Strict(w) => write!(
                f,
                "strict on {} [{}, {}] with rate {}",
                w.edge,
                w.from.render(),
                w.to.as_ref().map_or("inf".to_string(), |t| t.render()),
                w.rate.render()
            ),
        }
    }
}

/// Compares the radial set with the metric neighbourhood of its center:
/// they differ iff `ψ` has rate above 1 somewhere.
pub fn radial_vs_ball<T: Scalar>(r: &RadialDescription<T>) -> Strictness<T> {
    let g = r.center.graph();
    let denom = r.p as i64 - 1;
    for e in g.edges() {
        let f = &r.edge_log_delta[e.0];
        for (i, seg) in f.segments().iter().enumerate() {
            if seg.left_value.is_neg_inf() || seg.slope.abs() <= denom {
                continue;
            }
            let (from, to) = f.segment_bounds(i);
            return Strictness::Strict(StrictWitness {
                edge: g.edge_name(e).to_string(),
                from,
                to,
                rate: T::ratio(seg.slope.abs(), denom),
            });
        }
    }
    Strictness::Equal
}

/// Supersingularity of an elliptic double cover read three ways.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupersingularEvidence {
    /// From the type alone.
    pub by_type: bool,
    /// Some edge of the lifted skeleton has `|sδ| = 3`.
    pub slope_three_edge: bool,
    /// The radial set is strictly smaller than the metric neighbourhood.
    pub strict: bool,
}

impl SupersingularEvidence {
    pub fn agrees(&self) -> bool {
        self.by_type == self.slope_three_edge && self.by_type == self.strict
    }
}

pub fn supersingular_evidence<T: Scalar>(report: &SkeletonReport<T>) -> Result<SupersingularEvidence, RadialError> {
    let t = report.special_type;
    let lifted =
        metric_lift(t, &report.lengths(), &report.setting).map_err(|u| MorphismError::InvalidMetric(u.reason))?;
    let dm = lifted.morphism();
    let slope_three_edge = dm.source().edges().any(|e| dm.sdelta_values()[e.0].abs() == 3);
    let strict = radial_vs_ball(&degree_p_locus(&lifted, 2)?).is_strict();
    Ok(SupersingularEvidence {
        by_type: t.has_slope_three(),
        slope_three_edge,
        strict,
    })
}

/// True iff the skeleton has an edge where the different has slope 3.
pub fn supersingular_witness<T: Scalar>(report: &SkeletonReport<T>) -> bool {
    report.special_type.has_slope_three()
}

/// The skeleton of `t ↦ t^p` on the punctured unit disc: one vertex with
/// two tails of multiplicity `p` over the same shape, and `δ` constant,
/// taken from the different of the series `t^p` at `|t| = 1`.
pub fn kummer_cover<T: Scalar>(p: u64, setting: &ResidueSetting<T>) -> Result<MetricDeltaMorphism<T>, RadialError> {
    let series = ValuedSeries::from_finite([(p as i64, T::zero())])?;
    let report = different_report(&series, setting)?;
    let shape = |suffix: &str| {
        let mut g = GenusGraph::new();
        let c = g.add_vertex(format!("c{suffix}"), 0);
        let zero = g.add_vertex(format!("0{suffix}"), 0);
        let inf = g.add_vertex(format!("inf{suffix}"), 0);
        g.add_edge(format!("t0{suffix}"), c, zero);
        g.add_edge(format!("tinf{suffix}"), c, inf);
        g
    };
    let (src, tgt) = (shape(""), shape("'"));
    let vm = src.vertices().collect();
    let em = src.edges().map(OrientedEdge::forward).collect();
    let phi = NMorphism::new(src, tgt, vm, em, vec![p as u32; 2])?;
    let dm = DeltaMorphism::new(phi, vec![0; 2])?;
    let delta = vec![report.log_delta.clone(); 3];
    let lengths = vec![Length::Infinite; 2];
    Ok(MetricDeltaMorphism::new(
        dm,
        lengths.clone(),
        lengths,
        delta,
        setting.clone(),
    )?)
}
