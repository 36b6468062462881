//! Genus graphs: finite multigraphs (loops allowed) with a genus per vertex,
//! their metric variants, and divisors.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeId(pub usize);

/// An edge with a direction; `forward` follows the stored `from → to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    pub forward: bool,
}

impl OrientedEdge {
    pub fn forward(edge: EdgeId) -> Self {
        Self { edge, forward: true }
    }

    pub fn backward(edge: EdgeId) -> Self {
        Self { edge, forward: false }
    }

    pub fn reversed(self) -> Self {
        Self {
            edge: self.edge,
            forward: !self.forward,
        }
    }
}

impl std::ops::Neg for OrientedEdge {
    type Output = OrientedEdge;

    fn neg(self) -> Self::Output {
        self.reversed()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("illegal contraction: {0}")]
    IllegalMove(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GenusGraph {
    vertex_names: Vec<String>,
    genus: Vec<u32>,
    edge_names: Vec<String>,
    ends: Vec<(VertexId, VertexId)>,
}

impl GenusGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, genus: u32) -> VertexId {
        self.vertex_names.push(name.into());
        self.genus.push(genus);
        VertexId(self.genus.len() - 1)
    }

    pub fn add_edge(&mut self, name: impl Into<String>, from: VertexId, to: VertexId) -> EdgeId {
        assert!(
            from.0 < self.genus.len() && to.0 < self.genus.len(),
            "edge endpoint out of range"
        );
        self.edge_names.push(name.into());
        self.ends.push((from, to));
        EdgeId(self.ends.len() - 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.genus.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.genus.len()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.ends.len()).map(EdgeId)
    }

    pub fn vertex_genus(&self, v: VertexId) -> u32 {
        self.genus[v.0]
    }

    pub fn set_genus(&mut self, v: VertexId, g: u32) {
        self.genus[v.0] = g;
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.0]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|n| n == name).map(VertexId)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_names.iter().position(|n| n == name).map(EdgeId)
    }

    pub fn ends(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.ends[e.0]
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (a, b) = self.ends[e.0];
        a == b
    }

    /// Start vertex of an oriented edge.
    pub fn tail(&self, oe: OrientedEdge) -> VertexId {
        let (a, b) = self.ends[oe.edge.0];
        if oe.forward {
            a
        } else {
            b
        }
    }

    /// End vertex of an oriented edge.
    pub fn head(&self, oe: OrientedEdge) -> VertexId {
        self.tail(oe.reversed())
    }

    /// Oriented edges starting at `v`; a loop contributes both orientations.
    pub fn branches(&self, v: VertexId) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if a == v {
                out.push(OrientedEdge::forward(EdgeId(i)));
            }
            if b == v {
                out.push(OrientedEdge::backward(EdgeId(i)));
            }
        }
        out
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.ends
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.valence(v) == 1
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for oe in self.branches(VertexId(v)) {
                let w = self.head(oe).0;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// First Betti number `|E| − |V| + 1` of a connected graph.
    pub fn h1(&self) -> Result<i64, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(self.edge_count() as i64 - self.vertex_count() as i64 + 1)
    }

    /// `g(Γ) = h¹(Γ) + Σ g(v)`.
    pub fn genus(&self) -> Result<i64, GraphError> {
        Ok(self.h1()? + self.genus.iter().map(|&g| g as i64).sum::<i64>())
    }

    /// `K_Γ = Σ (val v + 2g(v) − 2) v`.
    pub fn canonical_divisor(&self) -> Divisor {
        Divisor::from_coeffs(
            self.vertices()
                .map(|v| self.valence(v) as i64 + 2 * self.vertex_genus(v) as i64 - 2)
                .collect(),
        )
    }

    /// Copy without the listed vertices and edges; ids are renumbered and the
    /// returned maps send old ids to new ones.
    pub(crate) fn without(
        &self,
        drop_vertices: &[VertexId],
        drop_edges: &[EdgeId],
    ) -> (GenusGraph, Vec<Option<VertexId>>, Vec<Option<EdgeId>>) {
        let mut g = GenusGraph::new();
        let mut vmap = vec![None; self.vertex_count()];
        for v in self.vertices() {
            if !drop_vertices.contains(&v) {
                vmap[v.0] = Some(g.add_vertex(self.vertex_name(v), self.vertex_genus(v)));
            }
        }
        let mut emap = vec![None; self.edge_count()];
        for e in self.edges() {
            if drop_edges.contains(&e) {
                continue;
            }
            let (a, b) = self.ends(e);
            let (a, b) = (
                vmap[a.0].expect("kept edge has kept ends"),
                vmap[b.0].expect("kept edge has kept ends"),
            );
            emap[e.0] = Some(g.add_edge(self.edge_name(e), a, b));
        }
        (g, vmap, emap)
    }

    /// Removes a genus-0 leaf and its edge.
    pub fn contract_leaf(&self, v: VertexId) -> Result<GenusGraph, GraphError> {
        if self.vertex_genus(v) != 0 || !self.is_leaf(v) {
            return Err(GraphError::IllegalMove(format!(
                "{} is not a genus-0 leaf",
                self.vertex_name(v)
            )));
        }
        let e = self.branches(v)[0].edge;
        Ok(self.without(&[v], &[e]).0)
    }

    /// Removes a genus-0 vertex of valence 2 and joins its two edges.
    pub fn smooth_vertex(&self, v: VertexId) -> Result<GenusGraph, GraphError> {
        let br = self.branches(v);
        if self.vertex_genus(v) != 0 || br.len() != 2 || br[0].edge == br[1].edge {
            return Err(GraphError::IllegalMove(format!(
                "{} is not a genus-0 vertex with two distinct edges",
                self.vertex_name(v)
            )));
        }
        let (a, b) = (self.head(br[0]), self.head(br[1]));
        let name = format!("{}+{}", self.edge_name(br[0].edge), self.edge_name(br[1].edge));
        let (mut g, vmap, _) = self.without(&[v], &[br[0].edge, br[1].edge]);
        g.add_edge(name, vmap[a.0].unwrap(), vmap[b.0].unwrap());
        Ok(g)
    }

    /// A contraction-free graph obtained by repeated moves.
    pub fn stabilize(&self) -> GenusGraph {
        let mut g = self.clone();
        'outer: loop {
            for v in g.vertices() {
                if let Ok(next) = g.contract_leaf(v).or_else(|_| g.smooth_vertex(v)) {
                    if next.vertex_count() == 0 {
                        break 'outer;
                    }
                    g = next;
                    continue 'outer;
                }
            }
            break;
        }
        g
    }
}

/// An edge length in `(0, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Length<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Length<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Length::Finite(t) => Some(t),
            Length::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Length::Infinite)
    }

    /// `n·l` with `n·∞ = ∞`.
    pub fn dilate(&self, n: u32) -> Self {
        match self {
            Length::Finite(t) => Length::Finite(t.clone() * T::from_int(n as i64)),
            Length::Infinite => Length::Infinite,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Length::Finite(t) => t.render(),
            Length::Infinite => "inf".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s.trim() == "inf" {
            Some(Length::Infinite)
        } else {
            T::parse(s).map(Length::Finite)
        }
    }
}

impl<T: Scalar> std::ops::Add for Length<T> {
    type Output = Length<T>;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Length::Finite(a), Length::Finite(b)) => Length::Finite(a + b),
            _ => Length::Infinite,
        }
    }
}

/// A genus graph with edge lengths; infinite edges are tails ending at
/// genus-0 infinite leaves. An infinite edge between two leaves ends at
/// its `to` vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGenusGraph<T> {
    graph: GenusGraph,
    lengths: Vec<Length<T>>,
    infinite_leaf: Vec<bool>,
}

impl<T: Scalar> MetricGenusGraph<T> {
    pub fn new(graph: GenusGraph, lengths: Vec<Length<T>>) -> Result<Self, GraphError> {
        if lengths.len() != graph.edge_count() {
            return Err(GraphError::InvalidMetric("one length per edge is required".into()));
        }
        let mut infinite_leaf = vec![false; graph.vertex_count()];
        for e in graph.edges() {
            match &lengths[e.0] {
                Length::Finite(l) if *l <= T::zero() => {
                    return Err(GraphError::InvalidMetric(format!(
                        "edge {} has length {}",
                        graph.edge_name(e),
                        l
                    )));
                }
                Length::Finite(_) => {}
                Length::Infinite => {
                    let (a, b) = graph.ends(e);
                    let leafy = |v: VertexId| graph.is_leaf(v) && graph.vertex_genus(v) == 0;
                    let leaf = match (leafy(a), leafy(b)) {
                        (true, false) => a,
                        (false, true) | (true, true) => b,
                        _ => {
                            return Err(GraphError::InvalidMetric(format!(
                                "infinite edge {} must end at a genus-0 leaf",
                                graph.edge_name(e)
                            )))
                        }
                    };
                    infinite_leaf[leaf.0] = true;
                }
            }
        }
        Ok(Self {
            graph,
            lengths,
            infinite_leaf,
        })
    }

    pub fn graph(&self) -> &GenusGraph {
        &self.graph
    }

    pub fn length(&self, e: EdgeId) -> &Length<T> {
        &self.lengths[e.0]
    }

    pub fn lengths(&self) -> &[Length<T>] {
        &self.lengths
    }

    pub fn is_infinite_leaf(&self, v: VertexId) -> bool {
        self.infinite_leaf[v.0]
    }

    pub fn is_tail(&self, e: EdgeId) -> bool {
        self.lengths[e.0].is_infinite()
    }

    /// Type-2 contraction; the merged edge has the summed length.
    pub fn smooth_vertex(&self, v: VertexId) -> Result<Self, GraphError> {
        let br = self.graph.branches(v);
        let g = self.graph.smooth_vertex(v)?;
        let mut lengths: Vec<Length<T>> = self
            .graph
            .edges()
            .filter(|e| *e != br[0].edge && *e != br[1].edge)
            .map(|e| self.lengths[e.0].clone())
            .collect();
        lengths.push(self.lengths[br[0].edge.0].clone() + self.lengths[br[1].edge.0].clone());
        Self::new(g, lengths)
    }
}

/// A formal integer combination of the vertices of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Divisor {
    coeffs: Vec<i64>,
}

impl Divisor {
    pub fn zero(vertex_count: usize) -> Self {
        Self {
            coeffs: vec![0; vertex_count],
        }
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        Self { coeffs }
    }

    pub fn coeff(&self, v: VertexId) -> i64 {
        self.coeffs[v.0]
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn set(&mut self, v: VertexId, c: i64) {
        self.coeffs[v.0] = c;
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Coefficients keyed by vertex name, in vertex order.
    pub fn named<'a>(&'a self, g: &'a GenusGraph) -> Vec<(&'a str, i64)> {
        g.vertices().map(|v| (g.vertex_name(v), self.coeff(v))).collect()
    }
}

impl std::ops::Add for &Divisor {
    type Output = Divisor;

    fn add(self, rhs: &Divisor) -> Divisor {
        assert_eq!(self.coeffs.len(), rhs.coeffs.len(), "divisors live on different graphs");
        Divisor::from_coeffs(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| format!("{c}·v{i}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
