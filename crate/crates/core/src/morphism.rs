//! Proper n-morphisms and δ-morphisms of genus graphs: Riemann–Hurwitz
//! bookkeeping, contractions, metric δ-morphisms and skeleton checks.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::annulus::check_restriction;
use crate::graph::{Divisor, EdgeId, GenusGraph, GraphError, Length, MetricGenusGraph, OrientedEdge, VertexId};
use crate::scalar::Scalar;
use crate::valuation::{LogAbs, ResidueSetting};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("not proper: {0}")]
    NotProper(String),
    #[error("invalid morphism data: {0}")]
    Invalid(String),
    #[error("illegal contraction: {0}")]
    IllegalMove(String),
    #[error("invalid metric δ-morphism: {0}")]
    InvalidMetric(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A graph map with edge multiplicities, validated to be proper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NMorphism {
    source: GenusGraph,
    target: GenusGraph,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<OrientedEdge>,
    n: Vec<u32>,
    vertex_mult: Vec<u32>,
    degree: u32,
}

impl NMorphism {
    pub fn new(
        source: GenusGraph,
        target: GenusGraph,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<OrientedEdge>,
        n: Vec<u32>,
    ) -> Result<Self, MorphismError> {
        Self::with_multiplicities(source, target, vertex_map, edge_map, n, &BTreeMap::new())
    }

    /// `isolated` supplies `n_v` for source vertices over target vertices
    /// without edges, where it cannot be read off the edges.
    pub fn with_multiplicities(
        source: GenusGraph,
        target: GenusGraph,
        vertex_map: Vec<VertexId>,
        edge_map: Vec<OrientedEdge>,
        n: Vec<u32>,
        isolated: &BTreeMap<VertexId, u32>,
    ) -> Result<Self, MorphismError> {
        if vertex_map.len() != source.vertex_count() {
            return Err(MorphismError::Invalid(
                "vertex map must cover every source vertex".into(),
            ));
        }
        if edge_map.len() != source.edge_count() || n.len() != source.edge_count() {
            return Err(MorphismError::Invalid(
                "edge map and multiplicities must cover every source edge".into(),
            ));
        }
        if !source.is_connected() || !target.is_connected() {
            return Err(MorphismError::NotProper("source and target must be connected".into()));
        }
        if let Some(v) = vertex_map.iter().find(|v| v.0 >= target.vertex_count()) {
            return Err(MorphismError::Invalid(format!("vertex image {} out of range", v.0)));
        }
        for e in source.edges() {
            let img = edge_map[e.0];
            if img.edge.0 >= target.edge_count() {
                return Err(MorphismError::Invalid(format!(
                    "edge image of {} out of range",
                    source.edge_name(e)
                )));
            }
            let (a, b) = source.ends(e);
            if vertex_map[a.0] != target.tail(img) || vertex_map[b.0] != target.head(img) {
                return Err(MorphismError::Invalid(format!(
                    "edge {} is not mapped compatibly with its endpoints",
                    source.edge_name(e)
                )));
            }
            if n[e.0] == 0 {
                return Err(MorphismError::Invalid(format!(
                    "edge {} has multiplicity 0",
                    source.edge_name(e)
                )));
            }
        }
        let image = |oe: OrientedEdge| {
            if oe.forward {
                edge_map[oe.edge.0]
            } else {
                edge_map[oe.edge.0].reversed()
            }
        };
        let mut vertex_mult = Vec::with_capacity(source.vertex_count());
        for v in source.vertices() {
            let tb = target.branches(vertex_map[v.0]);
            let mv = if tb.is_empty() {
                *isolated.get(&v).ok_or_else(|| {
                    MorphismError::NotProper(format!(
                        "multiplicity of {} over an isolated vertex is not given",
                        source.vertex_name(v)
                    ))
                })?
            } else {
                let sums: Vec<u32> = tb
                    .iter()
                    .map(|b| {
                        source
                            .branches(v)
                            .into_iter()
                            .filter(|sb| image(*sb) == *b)
                            .map(|sb| n[sb.edge.0])
                            .sum()
                    })
                    .collect();
                if sums.iter().any(|s| *s != sums[0]) {
                    return Err(MorphismError::NotProper(format!(
                        "multiplicity at {} is not locally constant: {:?}",
                        source.vertex_name(v),
                        sums
                    )));
                }
                if let Some(h) = isolated.get(&v) {
                    if *h != sums[0] {
                        return Err(MorphismError::Invalid(format!(
                            "declared multiplicity at {} disagrees",
                            source.vertex_name(v)
                        )));
                    }
                }
                sums[0]
            };
            if mv == 0 {
                return Err(MorphismError::NotProper(format!(
                    "{} has multiplicity 0",
                    source.vertex_name(v)
                )));
            }
            vertex_mult.push(mv);
        }
        let mut fiber_sums = vec![0u32; target.vertex_count()];
        for v in source.vertices() {
            fiber_sums[vertex_map[v.0].0] += vertex_mult[v.0];
        }
        let degree = fiber_sums[0];
        if fiber_sums.iter().any(|d| *d != degree) {
            return Err(MorphismError::NotProper(format!(
                "fiber degrees differ: {fiber_sums:?}"
            )));
        }
        Ok(Self {
            source,
            target,
            vertex_map,
            edge_map,
            n,
            vertex_mult,
            degree,
        })
    }

    pub fn source(&self) -> &GenusGraph {
        &self.source
    }

    pub fn target(&self) -> &GenusGraph {
        &self.target
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn map_vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn map_edge(&self, e: EdgeId) -> OrientedEdge {
        self.edge_map[e.0]
    }

    pub fn map_branch(&self, oe: OrientedEdge) -> OrientedEdge {
        if oe.forward {
            self.edge_map[oe.edge.0]
        } else {
            self.edge_map[oe.edge.0].reversed()
        }
    }

    pub fn edge_multiplicity(&self, e: EdgeId) -> u32 {
        self.n[e.0]
    }

    pub fn vertex_multiplicity(&self, v: VertexId) -> u32 {
        self.vertex_mult[v.0]
    }

    pub fn fiber(&self, t: VertexId) -> Vec<VertexId> {
        self.source.vertices().filter(|v| self.vertex_map[v.0] == t).collect()
    }

    /// `φ*D = Σ c_{φ(v)}·n_v·v`.
    pub fn pullback(&self, d: &Divisor) -> Divisor {
        Divisor::from_coeffs(
            self.source
                .vertices()
                .map(|v| d.coeff(self.map_vertex(v)) * self.vertex_multiplicity(v) as i64)
                .collect(),
        )
    }
}

/// A proper n-morphism with an oriented slope function `sδ` on source edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaMorphism {
    phi: NMorphism,
    sdelta: Vec<i64>,
}

/// The four divisors of the combinatorial Riemann–Hurwitz identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhWitness {
    pub canonical: Divisor,
    pub pullback_canonical: Divisor,
    pub ramification: Divisor,
    pub delta: Divisor,
    pub verdict: Verdict,
}

/// A contraction, addressed by the target vertex it removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    /// Remove a genus-0 target leaf and its fiber of balanced genus-0 leaves.
    Leaf(VertexId),
    /// Smooth a genus-0 valence-2 target vertex and its fiber.
    Smooth(VertexId),
}

impl Move {
    pub fn vertex(self) -> VertexId {
        match self {
            Move::Leaf(v) | Move::Smooth(v) => v,
        }
    }
}

/// Applies a contraction move to a bare genus graph.
pub fn contract_graph(g: &GenusGraph, mv: Move) -> Result<GenusGraph, GraphError> {
    match mv {
        Move::Leaf(v) => g.contract_leaf(v),
        Move::Smooth(v) => g.smooth_vertex(v),
    }
}

impl DeltaMorphism {
    /// `sdelta[e]` is the slope along `e` in its stored `from → to` direction.
    pub fn new(phi: NMorphism, sdelta: Vec<i64>) -> Result<Self, MorphismError> {
        if sdelta.len() != phi.source.edge_count() {
            return Err(MorphismError::Invalid(
                "one sδ value per source edge is required".into(),
            ));
        }
        Ok(Self { phi, sdelta })
    }

    pub fn phi(&self) -> &NMorphism {
        &self.phi
    }

    pub fn source(&self) -> &GenusGraph {
        &self.phi.source
    }

    pub fn target(&self) -> &GenusGraph {
        &self.phi.target
    }

    pub fn degree(&self) -> u32 {
        self.phi.degree
    }

    pub fn sdelta(&self, oe: OrientedEdge) -> i64 {
        if oe.forward {
            self.sdelta[oe.edge.0]
        } else {
            -self.sdelta[oe.edge.0]
        }
    }

    pub fn sdelta_values(&self) -> &[i64] {
        &self.sdelta
    }

    pub fn n(&self, e: EdgeId) -> u32 {
        self.phi.n[e.0]
    }

    pub fn n_v(&self, v: VertexId) -> u32 {
        self.phi.vertex_mult[v.0]
    }

    /// `S_e = −sδ(e) + n_e − 1`.
    pub fn slope_index(&self, oe: OrientedEdge) -> i64 {
        -self.sdelta(oe) + self.n(oe.edge) as i64 - 1
    }

    /// `χ(v) = 2g(v) − 2 − n_v·(2g(φ(v)) − 2)`.
    pub fn chi(&self, v: VertexId) -> i64 {
        let g = self.source().vertex_genus(v) as i64;
        let gt = self.target().vertex_genus(self.phi.map_vertex(v)) as i64;
        2 * g - 2 - self.n_v(v) as i64 * (2 * gt - 2)
    }

    /// `R_v = χ(v) − Σ_{e ∈ Br(v)} S_e`.
    pub fn differential_index(&self, v: VertexId) -> i64 {
        self.chi(v)
            - self
                .source()
                .branches(v)
                .into_iter()
                .map(|b| self.slope_index(b))
                .sum::<i64>()
    }

    pub fn is_balanced(&self, v: VertexId) -> bool {
        self.differential_index(v) == 0
    }

    pub fn is_tame_vertex(&self, v: VertexId) -> bool {
        self.source().branches(v).into_iter().all(|b| self.sdelta(b) == 0)
    }

    pub fn ramification_divisor(&self) -> Divisor {
        Divisor::from_coeffs(self.source().vertices().map(|v| self.differential_index(v)).collect())
    }

    /// `Δ_v = Σ_{e ∈ Br(v)} −sδ(e)`.
    pub fn delta_divisor(&self) -> Divisor {
        Divisor::from_coeffs(
            self.source()
                .vertices()
                .map(|v| self.source().branches(v).into_iter().map(|b| -self.sdelta(b)).sum())
                .collect(),
        )
    }

    pub fn unbalanced_vertices(&self) -> Vec<VertexId> {
        self.source().vertices().filter(|v| !self.is_balanced(*v)).collect()
    }

    /// Checks `K_Γ = φ*K_Γ' + R_φ + Δ_φ` coefficient by coefficient.
    pub fn rh_divisor_identity(&self) -> RhWitness {
        let canonical = self.source().canonical_divisor();
        let pullback_canonical = self.phi.pullback(&self.target().canonical_divisor());
        let ramification = self.ramification_divisor();
        let delta = self.delta_divisor();
        let rhs = &(&pullback_canonical + &ramification) + &delta;
        let bad: Vec<String> = self
            .source()
            .vertices()
            .filter(|v| canonical.coeff(*v) != rhs.coeff(*v))
            .map(|v| {
                format!(
                    "{}: K = {} but φ*K + R + Δ = {}",
                    self.source().vertex_name(v),
                    canonical.coeff(v),
                    rhs.coeff(v)
                )
            })
            .collect();
        let verdict = if bad.is_empty() {
            Verdict::Ok
        } else {
            Verdict::violated(bad.join("; "))
        };
        RhWitness {
            canonical,
            pullback_canonical,
            ramification,
            delta,
            verdict,
        }
    }

    /// Checks `2g(Γ) − 2 = deg φ·(2g(Γ') − 2) + Σ R_v`.
    pub fn rh_degree_identity(&self) -> Verdict {
        let (Ok(g), Ok(gt)) = (self.source().genus(), self.target().genus()) else {
            return Verdict::violated("graphs are not connected");
        };
        let lhs = 2 * g - 2;
        let rhs = self.degree() as i64 * (2 * gt - 2) + self.ramification_divisor().degree();
        if lhs == rhs {
            Verdict::Ok
        } else {
            Verdict::violated(format!("2g−2 = {lhs} but deg·(2g'−2) + ΣR = {rhs}"))
        }
    }

    /// The reason `mv` cannot be applied, or `None` when it can.
    pub fn move_obstruction(&self, mv: Move) -> Option<String> {
        let (src, tgt) = (self.source(), self.target());
        let t = mv.vertex();
        if t.0 >= tgt.vertex_count() {
            return Some("target vertex out of range".into());
        }
        let tname = tgt.vertex_name(t);
        if tgt.vertex_genus(t) != 0 {
            return Some(format!("target vertex {tname} has positive genus"));
        }
        let fiber = self.phi.fiber(t);
        for v in &fiber {
            let name = src.vertex_name(*v);
            if src.vertex_genus(*v) != 0 {
                return Some(format!("{name} has positive genus"));
            }
            let r = self.differential_index(*v);
            if r != 0 {
                return Some(format!("{name} is not balanced (R = {r})"));
            }
        }
        match mv {
            Move::Leaf(_) => {
                if !tgt.is_leaf(t) {
                    return Some(format!("target vertex {tname} is not a leaf"));
                }
                if tgt.vertex_count() == 1 {
                    return Some("cannot remove the last target vertex".into());
                }
                if let Some(v) = fiber.iter().find(|v| !src.is_leaf(**v)) {
                    return Some(format!("{} is not a leaf", src.vertex_name(*v)));
                }
            }
            Move::Smooth(_) => {
                let tb = tgt.branches(t);
                if tb.len() != 2 || tb[0].edge == tb[1].edge {
                    return Some(format!("target vertex {tname} does not have two distinct edges"));
                }
                for v in &fiber {
                    let br = src.branches(*v);
                    let name = src.vertex_name(*v);
                    if br.len() != 2 || br[0].edge == br[1].edge {
                        return Some(format!("{name} does not have valence 2"));
                    }
                    if self.n(br[0].edge) != self.n(br[1].edge) {
                        return Some(format!("multiplicity jumps at {name}"));
                    }
                    if self.sdelta(br[0]) + self.sdelta(br[1]) != 0 {
                        return Some(format!("sδ is not continuous through {name}"));
                    }
                }
            }
        }
        None
    }

    pub fn available_moves(&self) -> Vec<Move> {
        self.target()
            .vertices()
            .flat_map(|t| [Move::Leaf(t), Move::Smooth(t)])
            .filter(|mv| self.move_obstruction(*mv).is_none())
            .collect()
    }

    pub fn is_stable(&self) -> bool {
        self.available_moves().is_empty()
    }

    pub fn contract(&self, mv: Move) -> Result<DeltaMorphism, MorphismError> {
        if let Some(why) = self.move_obstruction(mv) {
            return Err(MorphismError::IllegalMove(why));
        }
        match mv {
            Move::Leaf(t) => self.contract_leaf(t),
            Move::Smooth(t) => self.smooth(t),
        }
    }

    fn contract_leaf(&self, t: VertexId) -> Result<DeltaMorphism, MorphismError> {
        let (src, tgt) = (self.source(), self.target());
        let te = tgt.branches(t)[0].edge;
        let fiber = self.phi.fiber(t);
        let over: Vec<EdgeId> = src.edges().filter(|e| self.phi.map_edge(*e).edge == te).collect();
        let (new_tgt, tvmap, temap) = tgt.without(&[t], &[te]);
        let (new_src, svmap, semap) = src.without(&fiber, &over);
        self.rebuild(new_src, new_tgt, &svmap, &semap, &tvmap, &temap, Vec::new())
    }

    fn smooth(&self, t: VertexId) -> Result<DeltaMorphism, MorphismError> {
        let (src, tgt) = (self.source(), self.target());
        let tb = tgt.branches(t);
        let fiber = self.phi.fiber(t);
        let dropped: Vec<EdgeId> = fiber
            .iter()
            .flat_map(|v| src.branches(*v).into_iter().map(|b| b.edge))
            .collect();
        let (mut new_tgt, tvmap, temap) = tgt.without(&[t], &[tb[0].edge, tb[1].edge]);
        let merged_t = new_tgt.add_edge(
            format!("{}+{}", tgt.edge_name(tb[0].edge), tgt.edge_name(tb[1].edge)),
            tvmap[tgt.head(tb[0]).0].unwrap(),
            tvmap[tgt.head(tb[1]).0].unwrap(),
        );
        let (mut new_src, svmap, semap) = src.without(&fiber, &dropped);
        let mut extra = Vec::new();
        for v in &fiber {
            let mut br = src.branches(*v);
            if self.phi.map_branch(br[0]) != tb[0] {
                br.swap(0, 1);
            }
            let e = new_src.add_edge(
                format!("{}+{}", src.edge_name(br[0].edge), src.edge_name(br[1].edge)),
                svmap[src.head(br[0]).0].unwrap(),
                svmap[src.head(br[1]).0].unwrap(),
            );
            extra.push((
                e,
                OrientedEdge::forward(merged_t),
                self.n(br[0].edge),
                self.sdelta(br[1]),
            ));
        }
        self.rebuild(new_src, new_tgt, &svmap, &semap, &tvmap, &temap, extra)
    }

    #[allow(clippy::too_many_arguments)]
    fn rebuild(
        &self,
        new_src: GenusGraph,
        new_tgt: GenusGraph,
        svmap: &[Option<VertexId>],
        semap: &[Option<EdgeId>],
        tvmap: &[Option<VertexId>],
        temap: &[Option<EdgeId>],
        extra: Vec<(EdgeId, OrientedEdge, u32, i64)>,
    ) -> Result<DeltaMorphism, MorphismError> {
        let ec = new_src.edge_count();
        let mut vertex_map = vec![VertexId(0); new_src.vertex_count()];
        let mut hints = BTreeMap::new();
        for v in self.source().vertices() {
            if let Some(nv) = svmap[v.0] {
                vertex_map[nv.0] = tvmap[self.phi.map_vertex(v).0].expect("surviving vertex over surviving vertex");
                hints.insert(nv, self.n_v(v));
            }
        }
        let mut edge_map = vec![OrientedEdge::forward(EdgeId(0)); ec];
        let mut n = vec![0; ec];
        let mut sdelta = vec![0; ec];
        for e in self.source().edges() {
            if let Some(ne) = semap[e.0] {
                let img = self.phi.map_edge(e);
                let te = temap[img.edge.0].expect("surviving edge over surviving edge");
                edge_map[ne.0] = OrientedEdge {
                    edge: te,
                    forward: img.forward,
                };
                n[ne.0] = self.n(e);
                sdelta[ne.0] = self.sdelta[e.0];
            }
        }
        for (e, img, ne, s) in extra {
            edge_map[e.0] = img;
            n[e.0] = ne;
            sdelta[e.0] = s;
        }
        let phi = NMorphism::with_multiplicities(new_src, new_tgt, vertex_map, edge_map, n, &hints)?;
        DeltaMorphism::new(phi, sdelta)
    }

    /// Applies the first available move until none is left.
    pub fn stabilize(&self) -> DeltaMorphism {
        let mut cur = self.clone();
        while let Some(mv) = cur.available_moves().first().copied() {
            cur = cur.contract(mv).expect("available move applies");
        }
        cur
    }

    /// Every stable morphism reachable by some sequence of moves, up to
    /// isomorphism.
    pub fn all_stabilizations(&self) -> Vec<DeltaMorphism> {
        use crate::canon::canonical_key;
        let mut seen = std::collections::BTreeSet::new();
        let mut results = BTreeMap::new();
        let mut stack = vec![self.clone()];
        while let Some(m) = stack.pop() {
            let key = canonical_key(&m);
            if !seen.insert(key.clone()) {
                continue;
            }
            let moves = m.available_moves();
            if moves.is_empty() {
                results.insert(key, m);
                continue;
            }
            for mv in moves {
                stack.push(m.contract(mv).expect("available move applies"));
            }
        }
        results.into_values().collect()
    }
}

/// A branch at a vertex that leaves the graph, with its multiplicity and slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OffBranch {
    pub n: u32,
    pub sdelta: i64,
}

impl OffBranch {
    pub fn slope_index(&self) -> i64 {
        -self.sdelta + self.n as i64 - 1
    }
}

/// Off-graph branches per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BoundaryAnnotation {
    pub branches: BTreeMap<VertexId, Vec<OffBranch>>,
}

impl BoundaryAnnotation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: VertexId, b: OffBranch) {
        self.branches.entry(v).or_default().push(b);
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, usize, &OffBranch)> {
        self.branches
            .iter()
            .flat_map(|(v, bs)| bs.iter().enumerate().map(move |(i, b)| (*v, i, b)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchViolation {
    pub vertex: String,
    pub index: usize,
    pub slope_index: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SkeletonCertificate {
    pub verdict: Verdict,
    pub violations: Vec<BranchViolation>,
}

/// A skeleton locally trivializes the different iff every branch leaving it
/// has slope index 0; ramification must sit in its vertex set.
pub fn certify_skeleton(
    graph: &GenusGraph,
    boundary: &BoundaryAnnotation,
    ram_in_vertices: bool,
) -> SkeletonCertificate {
    let violations: Vec<BranchViolation> = boundary
        .iter()
        .filter(|(_, _, b)| b.slope_index() != 0)
        .map(|(v, i, b)| BranchViolation {
            vertex: graph.vertex_name(v).to_string(),
            index: i,
            slope_index: b.slope_index(),
        })
        .collect();
    let verdict = if !ram_in_vertices {
        Verdict::violated("ramification is not contained in the vertex set")
    } else if let Some(w) = violations.first() {
        Verdict::violated(format!(
            "branch {} at {} has slope index {}",
            w.index, w.vertex, w.slope_index
        ))
    } else {
        Verdict::Ok
    };
    SkeletonCertificate { verdict, violations }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WideOpenReport {
    pub lhs: i64,
    pub rhs: i64,
    pub verdict: Verdict,
    /// A single infinity branch with slope index 0: the component is a disc.
    pub disc_criterion: bool,
}

/// Genus formula for a connected component `V` of the preimage of a wide
/// open `U`: `2g(V) − 2 − n(2g(U) − 2) = Σ R + Σ_{V∞} (2n_v − 2 − S_v)`.
pub fn wide_open_genus_check(
    ramification: &[i64],
    infinity: &[OffBranch],
    degree: u32,
    g_v: u32,
    g_u: u32,
) -> WideOpenReport {
    let lhs = 2 * g_v as i64 - 2 - degree as i64 * (2 * g_u as i64 - 2);
    let rhs = ramification.iter().sum::<i64>()
        + infinity
            .iter()
            .map(|b| 2 * b.n as i64 - 2 - b.slope_index())
            .sum::<i64>();
    let disc_criterion = infinity.len() == 1 && infinity[0].slope_index() == 0;
    let verdict = if lhs != rhs {
        Verdict::violated(format!("left side {lhs} differs from right side {rhs}"))
    } else if disc_criterion && g_v != 0 {
        Verdict::violated("a single trivializing infinity branch forces genus 0")
    } else {
        Verdict::Ok
    };
    WideOpenReport {
        lhs,
        rhs,
        verdict,
        disc_criterion,
    }
}

/// A δ-morphism of metric genus graphs with the values of `log δ` at the
/// source vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricDeltaMorphism<T> {
    morphism: DeltaMorphism,
    source: MetricGenusGraph<T>,
    target: MetricGenusGraph<T>,
    delta: Vec<LogAbs<T>>,
    setting: ResidueSetting<T>,
}

impl<T: Scalar> MetricDeltaMorphism<T> {
    pub fn new(
        morphism: DeltaMorphism,
        source_lengths: Vec<Length<T>>,
        target_lengths: Vec<Length<T>>,
        delta: Vec<LogAbs<T>>,
        setting: ResidueSetting<T>,
    ) -> Result<Self, MorphismError> {
        let bad = |s: String| Err(MorphismError::InvalidMetric(s));
        let source = MetricGenusGraph::new(morphism.source().clone(), source_lengths)?;
        let target = MetricGenusGraph::new(morphism.target().clone(), target_lengths)?;
        let g = morphism.source();
        if delta.len() != g.vertex_count() {
            return bad("one δ value per source vertex is required".into());
        }
        for v in g.vertices() {
            if !delta[v.0].is_le_zero() {
                return bad(format!("log δ({}) = {} is positive", g.vertex_name(v), delta[v.0]));
            }
        }
        for e in g.edges() {
            let img = morphism.phi().map_edge(e).edge;
            let expected = source.length(e).dilate(morphism.n(e));
            if target.length(img) != &expected {
                return bad(format!(
                    "edge {} of length {} and multiplicity {} maps to {} of length {}",
                    g.edge_name(e),
                    source.length(e).render(),
                    morphism.n(e),
                    morphism.target().edge_name(img),
                    target.length(img).render()
                ));
            }
        }
        for e in g.edges() {
            let (a, b) = g.ends(e);
            let s = morphism.sdelta_values()[e.0];
            match source.length(e) {
                Length::Finite(l) => {
                    let moved = delta[a.0].shift(&(l.clone() * T::from_int(s)));
                    if moved != delta[b.0] {
                        return bad(format!(
                            "log δ is not linear along {}: {} + {}·{} ≠ {}",
                            g.edge_name(e),
                            delta[a.0],
                            s,
                            l,
                            delta[b.0]
                        ));
                    }
                }
                Length::Infinite => {
                    let (base, leaf, out) = if source.is_infinite_leaf(b) {
                        (a, b, s)
                    } else {
                        (b, a, -s)
                    };
                    let limit = match out.signum() {
                        -1 => LogAbs::NegInf,
                        0 => delta[base.0].clone(),
                        _ => {
                            return bad(format!(
                                "δ grows along tail {} towards its infinite leaf",
                                g.edge_name(e)
                            ))
                        }
                    };
                    if limit != delta[leaf.0] {
                        return bad(format!(
                            "tail {} tends to log δ = {} but its leaf has {}",
                            g.edge_name(e),
                            limit,
                            delta[leaf.0]
                        ));
                    }
                }
            }
        }
        for v in g.vertices() {
            if source.is_infinite_leaf(v) {
                let want = setting.int_abs(morphism.n_v(v) as i64);
                if delta[v.0] != want {
                    return bad(format!(
                        "infinite leaf {} has log δ = {} instead of log|n_v| = {}",
                        g.vertex_name(v),
                        delta[v.0],
                        want
                    ));
                }
                continue;
            }
            for br in g.branches(v) {
                let verdict = check_restriction(morphism.n(br.edge) as i64, morphism.sdelta(br), &delta[v.0], &setting);
                if let Verdict::Violated(why) = verdict {
                    return bad(format!(
                        "restriction fails at {} along {}: {}",
                        g.vertex_name(v),
                        g.edge_name(br.edge),
                        why
                    ));
                }
            }
        }
        Ok(Self {
            morphism,
            source,
            target,
            delta,
            setting,
        })
    }

    pub fn morphism(&self) -> &DeltaMorphism {
        &self.morphism
    }

    pub fn source(&self) -> &MetricGenusGraph<T> {
        &self.source
    }

    pub fn target(&self) -> &MetricGenusGraph<T> {
        &self.target
    }

    pub fn delta(&self, v: VertexId) -> &LogAbs<T> {
        &self.delta[v.0]
    }

    pub fn deltas(&self) -> &[LogAbs<T>] {
        &self.delta
    }

    pub fn setting(&self) -> &ResidueSetting<T> {
        &self.setting
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, SettingQ};

    pub(crate) fn identity_on(g: GenusGraph) -> DeltaMorphism {
        let vm = g.vertices().collect();
        let em = g.edges().map(OrientedEdge::forward).collect();
        let n = vec![1; g.edge_count()];
        let z = vec![0; g.edge_count()];
        let hints = g.vertices().map(|v| (v, 1)).collect();
        DeltaMorphism::new(
            NMorphism::with_multiplicities(g.clone(), g, vm, em, n, &hints).unwrap(),
            z,
        )
        .unwrap()
    }

    /// Loop 2-gon x,y with slope-1 tails to leaves l,r over a path l'–x'–y'–r'.
    fn wb() -> DeltaMorphism {
        let mut s = GenusGraph::new();
        let (x, y, l, r) = (
            s.add_vertex("x", 0),
            s.add_vertex("y", 0),
            s.add_vertex("l", 0),
            s.add_vertex("r", 0),
        );
        s.add_edge("e", x, y);
        s.add_edge("f", x, y);
        s.add_edge("tl", x, l);
        s.add_edge("tr", y, r);
        let mut t = GenusGraph::new();
        let (xp, yp, lp, rp) = (
            t.add_vertex("x'", 0),
            t.add_vertex("y'", 0),
            t.add_vertex("l'", 0),
            t.add_vertex("r'", 0),
        );
        let h = t.add_edge("h", xp, yp);
        let tl = t.add_edge("tl'", xp, lp);
        let tr = t.add_edge("tr'", yp, rp);
        let phi = NMorphism::new(
            s,
            t,
            vec![xp, yp, lp, rp],
            vec![
                OrientedEdge::forward(h),
                OrientedEdge::forward(h),
                OrientedEdge::forward(tl),
                OrientedEdge::forward(tr),
            ],
            vec![1, 1, 2, 2],
        )
        .unwrap();
        DeltaMorphism::new(phi, vec![0, 0, -1, -1]).unwrap()
    }

    #[test]
    fn slope_index_examples() {
        let m = wb();
        assert_eq!(m.slope_index(OrientedEdge::forward(EdgeId(0))), 0);
        assert_eq!(m.slope_index(OrientedEdge::forward(EdgeId(2))), 2);
        assert_eq!(m.slope_index(OrientedEdge::backward(EdgeId(2))), 0);
        let mut g = GenusGraph::new();
        let a = g.add_vertex("a", 0);
        let b = g.add_vertex("b", 0);
        g.add_edge("e", a, b);
        let mut t = GenusGraph::new();
        let a2 = t.add_vertex("a", 0);
        let b2 = t.add_vertex("b", 0);
        t.add_edge("e", a2, b2);
        let phi = NMorphism::new(g, t, vec![a2, b2], vec![OrientedEdge::forward(EdgeId(0))], vec![2]).unwrap();
        let m = DeltaMorphism::new(phi, vec![0]).unwrap();
        assert_eq!(m.slope_index(OrientedEdge::forward(EdgeId(0))), 1);
    }

    #[test]
    fn chi_examples() {
        let m = wb();
        assert_eq!(m.chi(VertexId(2)), 2);
        let mut s = GenusGraph::new();
        s.add_vertex("r", 1);
        let mut t = GenusGraph::new();
        t.add_vertex("r'", 0);
        let hints = [(VertexId(0), 2)].into_iter().collect();
        let phi = NMorphism::with_multiplicities(s, t, vec![VertexId(0)], vec![], vec![], &hints).unwrap();
        let m = DeltaMorphism::new(phi, vec![]).unwrap();
        assert_eq!(m.chi(VertexId(0)), 4);
        let id = identity_on(wb().source().clone());
        assert!(id
            .source()
            .vertices()
            .all(|v| id.chi(v) == 0 && id.differential_index(v) == 0));
    }

    #[test]
    fn wb_bookkeeping() {
        let m = wb();
        assert_eq!(m.differential_index(VertexId(2)), 2);
        assert_eq!(m.differential_index(VertexId(3)), 2);
        assert_eq!(m.differential_index(VertexId(0)), 0);
        let w = m.rh_divisor_identity();
        assert!(w.verdict.is_ok());
        assert_eq!(w.canonical.coeff(VertexId(0)), 1);
        assert_eq!(w.pullback_canonical.coeff(VertexId(0)), 0);
        assert_eq!(w.ramification.coeff(VertexId(0)), 0);
        assert_eq!(w.delta.coeff(VertexId(0)), 1);
        assert_eq!(w.delta.degree(), 0);
        assert!(m.rh_degree_identity().is_ok());
        assert!(m.is_stable());
        let id = identity_on(m.source().clone());
        assert!(id.rh_divisor_identity().verdict.is_ok());
        assert!(id.ramification_divisor().is_zero());
    }

    #[test]
    fn not_proper_is_rejected() {
        let path = || {
            let mut g = GenusGraph::new();
            let vs: Vec<_> = (0..3).map(|i| g.add_vertex(format!("v{i}"), 0)).collect();
            g.add_edge("a", vs[0], vs[1]);
            g.add_edge("b", vs[1], vs[2]);
            g
        };
        let fwd = vec![OrientedEdge::forward(EdgeId(0)), OrientedEdge::forward(EdgeId(1))];
        let vm = vec![VertexId(0), VertexId(1), VertexId(2)];
        let phi = NMorphism::new(path(), path(), vm.clone(), fwd.clone(), vec![1, 2]);
        assert!(matches!(phi, Err(MorphismError::NotProper(_))));
        assert!(NMorphism::new(path(), path(), vm, fwd, vec![2, 2]).is_ok());
    }

    #[test]
    fn contracting_ramified_leaf_is_illegal() {
        let m = wb();
        assert!(matches!(
            m.contract(Move::Leaf(VertexId(2))),
            Err(MorphismError::IllegalMove(_))
        ));
        let mut p = GenusGraph::new();
        let vs: Vec<_> = (0..3).map(|i| p.add_vertex(format!("v{i}"), 0)).collect();
        p.add_edge("a", vs[0], vs[1]);
        p.add_edge("b", vs[1], vs[2]);
        let q = contract_graph(&p, Move::Leaf(vs[0])).unwrap();
        assert_eq!((q.vertex_count(), q.edge_count()), (2, 1));
    }

    #[test]
    fn smoothing_a_subdivided_loop_returns_wb() {
        let base = wb();
        let mut t = GenusGraph::new();
        let (xp, yp, lp, rp, mp) = (
            t.add_vertex("x'", 0),
            t.add_vertex("y'", 0),
            t.add_vertex("l'", 0),
            t.add_vertex("r'", 0),
            t.add_vertex("m'", 0),
        );
        let h1 = t.add_edge("h1", xp, mp);
        let h2 = t.add_edge("h2", mp, yp);
        let tl = t.add_edge("tl'", xp, lp);
        let tr = t.add_edge("tr'", yp, rp);
        let mut s2 = GenusGraph::new();
        let (x, y, l, r, m1, m2) = (
            s2.add_vertex("x", 0),
            s2.add_vertex("y", 0),
            s2.add_vertex("l", 0),
            s2.add_vertex("r", 0),
            s2.add_vertex("m1", 0),
            s2.add_vertex("m2", 0),
        );
        s2.add_edge("e1", x, m1);
        s2.add_edge("e2", m1, y);
        s2.add_edge("f1", x, m2);
        s2.add_edge("f2", m2, y);
        s2.add_edge("tl", x, l);
        s2.add_edge("tr", y, r);
        let phi = NMorphism::new(
            s2,
            t,
            vec![xp, yp, lp, rp, mp, mp],
            vec![
                OrientedEdge::forward(h1),
                OrientedEdge::forward(h2),
                OrientedEdge::forward(h1),
                OrientedEdge::forward(h2),
                OrientedEdge::forward(tl),
                OrientedEdge::forward(tr),
            ],
            vec![1, 1, 1, 1, 2, 2],
        )
        .unwrap();
        let sub = DeltaMorphism::new(phi, vec![0, 0, 0, 0, -1, -1]).unwrap();
        assert_eq!(sub.available_moves(), vec![Move::Smooth(mp)]);
        let st = sub.stabilize();
        assert!(st.is_stable());
        assert_eq!(crate::canon::canonical_key(&st), crate::canon::canonical_key(&base));
        assert_eq!(st.source().genus(), sub.source().genus());
        assert!(st.rh_divisor_identity().verdict.is_ok() && st.rh_degree_identity().is_ok());
        assert_eq!(sub.all_stabilizations().len(), 1);
    }

    #[test]
    fn skeleton_certificates() {
        let m = wb();
        let mut ok = BoundaryAnnotation::new();
        ok.add(VertexId(0), OffBranch { n: 1, sdelta: 0 });
        assert!(certify_skeleton(m.source(), &ok, true).verdict.is_ok());
        let mut bad = BoundaryAnnotation::new();
        bad.add(VertexId(1), OffBranch { n: 2, sdelta: 0 });
        let c = certify_skeleton(m.source(), &bad, true);
        assert!(!c.verdict.is_ok());
        assert_eq!(
            c.violations,
            vec![BranchViolation {
                vertex: "y".into(),
                index: 0,
                slope_index: 1
            }]
        );
        let mut wild = BoundaryAnnotation::new();
        wild.add(VertexId(2), OffBranch { n: 2, sdelta: 1 });
        wild.add(VertexId(3), OffBranch { n: 2, sdelta: 1 });
        assert!(certify_skeleton(m.source(), &wild, true).verdict.is_ok());
        assert!(!certify_skeleton(m.source(), &wild, false).verdict.is_ok());
    }

    #[test]
    fn wide_open_examples() {
        let disc = wide_open_genus_check(&[], &[OffBranch { n: 2, sdelta: 1 }], 2, 0, 0);
        assert!(disc.verdict.is_ok() && disc.disc_criterion);
        assert_eq!((disc.lhs, disc.rhs), (2, 2));
        let id = wide_open_genus_check(&[], &[OffBranch { n: 1, sdelta: 0 }], 1, 0, 0);
        assert!(id.verdict.is_ok());
        let ann = wide_open_genus_check(
            &[],
            &[OffBranch { n: 1, sdelta: 0 }, OffBranch { n: 1, sdelta: 0 }],
            1,
            0,
            0,
        );
        assert!(ann.verdict.is_ok() && !ann.disc_criterion);
        assert!(!wide_open_genus_check(&[], &[OffBranch { n: 2, sdelta: 1 }], 2, 1, 0)
            .verdict
            .is_ok());
    }

    fn lens(v: &[Option<(i64, i64)>]) -> Vec<Length<Rational>> {
        v.iter()
            .map(|x| x.map_or(Length::Infinite, |(p, q)| Length::Finite(Rational::new(p, q))))
            .collect()
    }

    #[test]
    fn metric_wb_in_char_two() {
        let m = wb();
        let setting = SettingQ::equichar_p(2).unwrap();
        let src = lens(&[Some((3, 1)), Some((3, 1)), None, None]);
        let tgt = lens(&[Some((3, 1)), None, None]);
        let delta = vec![LogAbs::zero(), LogAbs::zero(), LogAbs::NegInf, LogAbs::NegInf];
        let ok = MetricDeltaMorphism::new(m.clone(), src.clone(), tgt.clone(), delta.clone(), setting.clone());
        assert!(ok.is_ok(), "{ok:?}");
        let bad = MetricDeltaMorphism::new(
            m.clone(),
            src.clone(),
            lens(&[Some((2, 1)), None, None]),
            delta.clone(),
            setting,
        );
        assert!(bad.is_err());
        let mixed = SettingQ::mixed(2, Rational::from_integer(-1)).unwrap();
        assert!(MetricDeltaMorphism::new(m, src, tgt, delta, mixed).is_err());
    }
}
