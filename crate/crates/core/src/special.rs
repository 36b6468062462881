//! Special δ-morphisms: stable degree-2 morphisms from genus 1 to genus 0.
//! Root subtrees, the twelve combinatorial types, and their metric lifts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_key, CanonicalKey};
use crate::graph::{EdgeId, GenusGraph, Length, OrientedEdge, VertexId};
use crate::morphism::{DeltaMorphism, MetricDeltaMorphism, MorphismError, NMorphism};
use crate::scalar::Scalar;
use crate::valuation::{LogAbs, ResidueSetting};
use crate::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpecialType {
    TB,
    MB,
    WB,
    TG,
    MO,
    WO,
    MS,
    WS,
    MSS,
    WSS,
    ME,
    MES,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharClass {
    Tame,
    Mixed,
    Wild,
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CharClass::Tame => "tame",
            CharClass::Mixed => "mixed",
            CharClass::Wild => "wild",
        })
    }
}

impl SpecialType {
    pub const ALL: [SpecialType; 12] = [
        SpecialType::TB,
        SpecialType::MB,
        SpecialType::WB,
        SpecialType::TG,
        SpecialType::MO,
        SpecialType::WO,
        SpecialType::MS,
        SpecialType::WS,
        SpecialType::MSS,
        SpecialType::WSS,
        SpecialType::ME,
        SpecialType::MES,
    ];

    pub fn class(self) -> CharClass {
        use SpecialType::*;
        match self {
            TB | TG => CharClass::Tame,
            MB | MO | MS | MSS | ME | MES => CharClass::Mixed,
            WB | WO | WS | WSS => CharClass::Wild,
        }
    }

    pub fn is_exceptional(self) -> bool {
        matches!(self, SpecialType::ME | SpecialType::MES)
    }

    /// Source graph contains a loop.
    pub fn is_bad_reduction(self) -> bool {
        matches!(self, SpecialType::TB | SpecialType::MB | SpecialType::WB)
    }

    /// Contains an inner edge or tail with `|sδ| = 3`.
    pub fn has_slope_three(self) -> bool {
        use SpecialType::*;
        matches!(self, MS | MSS | WS | WSS | MES)
    }

    /// The twelve shapes as genus-1 core plus attached root subtrees.
    pub fn shape(self) -> SpecialShape {
        use RootTree as T;
        use SpecialType::*;
        let l = T::Leaf;
        let cherry = || T::Node(vec![l(1), l(1)]);
        match self {
            TG => SpecialShape::Genus1(vec![l(1), l(1), l(1), l(1)]),
            WSS => SpecialShape::Genus1(vec![l(4)]),
            WO => SpecialShape::Genus1(vec![l(2), l(2)]),
            MO => SpecialShape::Genus1(vec![cherry(), cherry()]),
            WS => SpecialShape::Genus1(vec![T::Node(vec![l(2), l(2)])]),
            MSS => SpecialShape::Genus1(vec![T::Node(vec![l(1), l(1), l(1), l(1)])]),
            MS => SpecialShape::Genus1(vec![T::Node(vec![cherry(), cherry()])]),
            ME => SpecialShape::Genus1(vec![cherry(), l(1), l(1)]),
            MES => SpecialShape::Genus1(vec![T::Node(vec![cherry(), l(1), l(1)])]),
            TB => SpecialShape::Loop(vec![l(1), l(1)], vec![l(1), l(1)]),
            MB => SpecialShape::Loop(vec![cherry()], vec![cherry()]),
            WB => SpecialShape::Loop(vec![l(2)], vec![l(2)]),
        }
    }

    /// The reference δ-morphism of this type.
    pub fn reference(self) -> DeltaMorphism {
        self.shape().build()
    }
}

impl fmt::Display for SpecialType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SpecialType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpecialType::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown special type {s:?}"))
    }
}

/// A root subtree: the edge from the root leads to a ramified leaf with the
/// given `R`, or to a genus-0 vertex with further subtrees. All edges carry
/// `n = 2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootTree {
    Leaf(i64),
    Node(Vec<RootTree>),
}

impl RootTree {
    /// `S` of the edge leaving the root, equal to the sum of leaf `R` values
    /// when every inner vertex is balanced.
    pub fn slope_index(&self) -> i64 {
        match self {
            RootTree::Leaf(r) => *r,
            RootTree::Node(ch) => ch.iter().map(RootTree::slope_index).sum(),
        }
    }

    /// `sδ` along the edge from the root, towards the leaves.
    pub fn upward_sdelta(&self) -> i64 {
        1 - self.slope_index()
    }

    pub fn leaf_values(&self) -> Vec<i64> {
        match self {
            RootTree::Leaf(r) => vec![*r],
            RootTree::Node(ch) => ch.iter().flat_map(RootTree::leaf_values).collect(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_values().len()
    }

    pub fn depth(&self) -> usize {
        match self {
            RootTree::Leaf(_) => 1,
            RootTree::Node(ch) => 1 + ch.iter().map(RootTree::depth).max().unwrap_or(0),
        }
    }

    /// Upward `sδ` of every edge, root edge first, depth first.
    pub fn upward_slopes(&self) -> Vec<i64> {
        let mut out = vec![self.upward_sdelta()];
        if let RootTree::Node(ch) = self {
            for c in ch {
                out.extend(c.upward_slopes());
            }
        }
        out
    }

    /// Sorted children, so equal trees compare equal.
    pub fn normalized(&self) -> RootTree {
        match self {
            RootTree::Leaf(r) => RootTree::Leaf(*r),
            RootTree::Node(ch) => {
                let mut ch: Vec<RootTree> = ch.iter().map(RootTree::normalized).collect();
                ch.sort();
                RootTree::Node(ch)
            }
        }
    }

    /// Bracket notation with the figure labels `−sδ` on the edges.
    pub fn render(&self) -> String {
        match self {
            RootTree::Leaf(r) => format!("-{}->R{}", -self.upward_sdelta(), r),
            RootTree::Node(ch) => {
                format!(
                    "-{}->({})",
                    -self.upward_sdelta(),
                    ch.iter().map(RootTree::render).collect::<Vec<_>>().join(" ")
                )
            }
        }
    }

    fn attach(&self, b: &mut Builder, parent: usize, name: String) {
        let v = b.vertex(name.clone(), 0);
        b.edge(format!("e{name}"), parent, v, 2, self.upward_sdelta());
        if let RootTree::Node(ch) = self {
            for (i, c) in ch.iter().enumerate() {
                c.attach(b, v, format!("{name}.{i}"));
            }
        }
    }
}

/// A genus-one core with root subtrees attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecialShape {
    /// A genus-1 vertex `r`.
    Genus1(Vec<RootTree>),
    /// Two vertices `x`, `y` joined by two split edges.
    Loop(Vec<RootTree>, Vec<RootTree>),
}

struct Builder {
    names: Vec<String>,
    genus: Vec<u32>,
    edges: Vec<(String, usize, usize, u32, i64)>,
    loop_pair: Option<(usize, usize)>,
}

impl Builder {
    fn vertex(&mut self, name: String, genus: u32) -> usize {
        self.names.push(name);
        self.genus.push(genus);
        self.names.len() - 1
    }

    fn edge(&mut self, name: String, a: usize, b: usize, n: u32, s: i64) {
        self.edges.push((name, a, b, n, s));
    }
}

impl SpecialShape {
    /// `G[t, …]` for a genus-1 core, `B[t, …][t, …]` for a loop.
    pub fn render(&self) -> String {
        let list = |ts: &[RootTree]| ts.iter().map(RootTree::render).collect::<Vec<_>>().join(", ");
        match self {
            SpecialShape::Genus1(ts) => format!("G[{}]", list(ts)),
            SpecialShape::Loop(xs, ys) => format!("B[{}][{}]", list(xs), list(ys)),
        }
    }

    /// The degree-2 δ-morphism onto the tree obtained by folding the loop
    /// (if any) and setting all genera to 0.
    pub fn build(&self) -> DeltaMorphism {
        let mut b = Builder {
            names: Vec::new(),
            genus: Vec::new(),
            edges: Vec::new(),
            loop_pair: None,
        };
        match self {
            SpecialShape::Genus1(trees) => {
                let r = b.vertex("r".into(), 1);
                for (i, t) in trees.iter().enumerate() {
                    t.attach(&mut b, r, format!("r{i}"));
                }
            }
            SpecialShape::Loop(xs, ys) => {
                let x = b.vertex("x".into(), 0);
                let y = b.vertex("y".into(), 0);
                b.edge("e".into(), x, y, 1, 0);
                b.edge("f".into(), x, y, 1, 0);
                b.loop_pair = Some((0, 1));
                for (i, t) in xs.iter().enumerate() {
                    t.attach(&mut b, x, format!("x{i}"));
                }
                for (i, t) in ys.iter().enumerate() {
                    t.attach(&mut b, y, format!("y{i}"));
                }
            }
        }
        let mut src = GenusGraph::new();
        let mut tgt = GenusGraph::new();
        for (name, g) in b.names.iter().zip(&b.genus) {
            src.add_vertex(name.clone(), *g);
            tgt.add_vertex(format!("{name}'"), 0);
        }
        let mut edge_map = Vec::new();
        let mut n = Vec::new();
        let mut sdelta = Vec::new();
        for (i, (name, a, c, ne, s)) in b.edges.iter().enumerate() {
            src.add_edge(name.clone(), VertexId(*a), VertexId(*c));
            let img = match b.loop_pair {
                Some((_, second)) if i == second => EdgeId(tgt.edge_count() - 1),
                _ => tgt.add_edge(format!("{name}'"), VertexId(*a), VertexId(*c)),
            };
            edge_map.push(OrientedEdge::forward(img));
            n.push(*ne);
            sdelta.push(*s);
        }
        let vertex_map = src.vertices().map(|v| VertexId(v.0)).collect();
        let phi = NMorphism::new(src, tgt, vertex_map, edge_map, n).expect("special shapes are proper");
        DeltaMorphism::new(phi, sdelta).expect("valid slopes")
    }
}

/// A root subtree from the inventory, with its slope index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSubtree {
    pub tree: RootTree,
    pub slope_index: i64,
}

/// All root subtrees with `leaf_r` a single admissible value per tree,
/// leaf `R` summing to `s`, and at least two children at inner vertices.
fn trees_with_slope(
    s: i64,
    leaf_r: Option<i64>,
    memo: &mut BTreeMap<(i64, Option<i64>), Vec<RootTree>>,
) -> Vec<RootTree> {
    if let Some(v) = memo.get(&(s, leaf_r)) {
        return v.clone();
    }
    let mut out = BTreeSet::new();
    if leaf_r.map_or(s > 0, |r| r == s) {
        out.insert(RootTree::Leaf(s));
    }
    for parts in partitions(s, s - 1) {
        if parts.len() < 2 {
            continue;
        }
        let choices: Vec<Vec<RootTree>> = parts.iter().map(|p| trees_with_slope(*p, leaf_r, memo)).collect();
        let mut acc = vec![Vec::new()];
        for c in &choices {
            acc = acc
                .into_iter()
                .flat_map(|pre| c.iter().map(move |t| [pre.clone(), vec![t.clone()]].concat()))
                .collect();
        }
        for ch in acc {
            out.insert(RootTree::Node(ch).normalized());
        }
    }
    let v: Vec<RootTree> = out.into_iter().collect();
    memo.insert((s, leaf_r), v.clone());
    v
}

/// Non-increasing partitions of `n` with parts at most `max`.
fn partitions(n: i64, max: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(n)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn odd_or_zero(tree: &RootTree) -> bool {
    tree.upward_slopes().iter().all(|s| *s == 0 || s % 2 != 0)
}

/// The root subtrees that can occur in a special δ-morphism, with at most
/// `max_leaves` leaves, up to isomorphism.
pub fn enumerate_root_subtrees(max_leaves: usize) -> Vec<RootSubtree> {
    let mut memo = BTreeMap::new();
    let mut out = Vec::new();
    for r in [4, 2, 1] {
        for s in 1..=4 {
            for t in trees_with_slope(s, Some(r), &mut memo) {
                if t.leaf_count() <= max_leaves && odd_or_zero(&t) {
                    out.push(RootSubtree {
                        slope_index: t.slope_index(),
                        tree: t,
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (a.tree.depth(), a.tree.leaf_count(), a.slope_index).cmp(&(b.tree.depth(), b.tree.leaf_count(), b.slope_index))
    });
    out
}

/// Sorted `R_v` over vertices with `R_v ≠ 0`.
pub fn ramification_signature(m: &DeltaMorphism) -> Vec<i64> {
    let mut r: Vec<i64> = m
        .source()
        .vertices()
        .map(|v| m.differential_index(v))
        .filter(|r| *r != 0)
        .collect();
    r.sort_unstable();
    r
}

/// The characteristic class by the tame/mixed/wild trichotomy, if one holds.
pub fn characteristic_class(m: &DeltaMorphism) -> Option<CharClass> {
    let src = m.source();
    let ram: Vec<VertexId> = src.vertices().filter(|v| !m.is_balanced(*v)).collect();
    if src.vertices().all(|v| m.is_tame_vertex(v)) {
        Some(CharClass::Tame)
    } else if ram.iter().all(|v| m.is_tame_vertex(*v)) {
        Some(CharClass::Mixed)
    } else if ram.iter().all(|v| !m.is_tame_vertex(*v)) {
        Some(CharClass::Wild)
    } else {
        None
    }
}

/// Checks the defining conditions in order and names the first failure.
pub fn is_special(m: &DeltaMorphism) -> Verdict {
    let (src, tgt) = (m.source(), m.target());
    if m.degree() != 2 {
        return Verdict::violated(format!("shape: degree {} ≠ 2", m.degree()));
    }
    let (g, gt) = (src.genus().unwrap_or(-1), tgt.genus().unwrap_or(-1));
    if g != 1 || gt != 0 {
        return Verdict::violated(format!("shape: genus {g} → {gt}, expected 1 → 0"));
    }
    if let Some(mv) = m.available_moves().first() {
        return Verdict::violated(format!("shape: not stable, {:?} applies", mv));
    }
    for v in src.vertices() {
        let r = m.differential_index(v);
        if r == 0 {
            continue;
        }
        let name = src.vertex_name(v);
        if !src.is_leaf(v) || src.vertex_genus(v) != 0 || r < 0 || m.n_v(v) != 2 {
            return Verdict::violated(format!(
                "ramification: {name} has R = {r} but is not a genus-0 leaf with R > 0 and n = 2"
            ));
        }
    }
    if characteristic_class(m).is_none() {
        return Verdict::violated("trichotomy: ramification points are neither all tame nor all wild");
    }
    for e in src.edges() {
        let s = m.sdelta_values()[e.0];
        if m.n(e) == 1 && s != 0 {
            return Verdict::violated(format!("split edge {} has sδ = {s}", src.edge_name(e)));
        }
        if s != 0 && s % 2 == 0 {
            return Verdict::violated(format!("edge {} has even sδ = {s}", src.edge_name(e)));
        }
    }
    Verdict::Ok
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecialError {
    #[error("not special: {0}")]
    NotSpecial(String),
    #[error("special δ-morphism matches none of the twelve types")]
    Unclassifiable,
}

fn reference_keys() -> &'static [(SpecialType, CanonicalKey)] {
    use std::sync::OnceLock;
    static KEYS: OnceLock<Vec<(SpecialType, CanonicalKey)>> = OnceLock::new();
    KEYS.get_or_init(|| {
        SpecialType::ALL
            .iter()
            .map(|t| (*t, canonical_key(&t.reference())))
            .collect()
    })
}

pub fn classify_special(m: &DeltaMorphism) -> Result<SpecialType, SpecialError> {
    if let Verdict::Violated(why) = is_special(m) {
        return Err(SpecialError::NotSpecial(why));
    }
    let key = canonical_key(m);
    reference_keys()
        .iter()
        .find(|(_, k)| *k == key)
        .map(|(t, _)| *t)
        .ok_or(SpecialError::Unclassifiable)
}

/// Exhaustive search over genus-one cores with balanced root subtrees
/// (arbitrary positive leaf `R`, total `R` at most 4), filtered by
/// [`is_special`] and deduplicated up to isomorphism. Besides the twelve
/// reference types this finds [`asymmetric_mixed_loop`].
pub fn enumerate_special() -> Vec<SpecialClass> {
    let mut memo = BTreeMap::new();
    let mut inventory: BTreeMap<i64, Vec<RootTree>> = BTreeMap::new();
    for s in 1..=4 {
        inventory.insert(s, trees_with_slope(s, None, &mut memo));
    }
    let forests = |total: i64| -> Vec<Vec<RootTree>> {
        let mut out = Vec::new();
        for parts in partitions(total, total) {
            let mut acc: Vec<Vec<RootTree>> = vec![Vec::new()];
            for p in &parts {
                acc = acc
                    .into_iter()
                    .flat_map(|pre| {
                        inventory[p]
                            .iter()
                            .map(move |t| [pre.clone(), vec![t.clone()]].concat())
                    })
                    .collect();
            }
            out.extend(acc);
        }
        out
    };
    let mut shapes: Vec<SpecialShape> = forests(4).into_iter().map(SpecialShape::Genus1).collect();
    let halves = forests(2);
    for (i, a) in halves.iter().enumerate() {
        for b in &halves[i..] {
            shapes.push(SpecialShape::Loop(a.clone(), b.clone()));
        }
    }
    let mut found: BTreeMap<CanonicalKey, SpecialClass> = BTreeMap::new();
    for shape in shapes {
        let m = shape.build();
        if !is_special(&m).is_ok() {
            continue;
        }
        let special_type = classify_special(&m).ok();
        found.entry(canonical_key(&m)).or_insert(SpecialClass {
            special_type,
            morphism: m,
        });
    }
    let mut out: Vec<SpecialClass> = found.into_values().collect();
    out.sort_by_key(|c| c.special_type.map_or(SpecialType::ALL.len(), |t| t as usize));
    out
}

/// One isomorphism class found by [`enumerate_special`]; `special_type` is
/// `None` when the class matches none of the twelve reference shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialClass {
    pub special_type: Option<SpecialType>,
    pub morphism: DeltaMorphism,
}

/// The special configuration outside the twelve reference shapes: a loop
/// with a slope-1 cherry at one vertex and two tame tails at the other.
pub fn asymmetric_mixed_loop() -> SpecialShape {
    let cherry = RootTree::Node(vec![RootTree::Leaf(1), RootTree::Leaf(1)]);
    SpecialShape::Loop(vec![cherry], vec![RootTree::Leaf(1), RootTree::Leaf(1)])
}

/// Inner edge lengths by slope class `|sδ| ∈ {0, 1, 3}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct Lengths<T> {
    #[serde(serialize_with = "ser_scalar")]
    pub l0: T,
    #[serde(serialize_with = "ser_scalar")]
    pub l1: T,
    #[serde(serialize_with = "ser_scalar")]
    pub l3: T,
}

fn ser_scalar<T: Scalar, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.render())
}

impl<T: Scalar> Lengths<T> {
    pub fn new(l0: T, l1: T, l3: T) -> Self {
        Self { l0, l1, l3 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn class(&self, slope: i64) -> Option<&T> {
        match slope.abs() {
            0 => Some(&self.l0),
            1 => Some(&self.l1),
            3 => Some(&self.l3),
            _ => None,
        }
    }

    /// `Σ i·l_i` over the classes present in `t`.
    pub fn weighted_sum(&self, t: SpecialType) -> T {
        let present = inner_classes(t);
        let mut sum = T::zero();
        if present.contains(&1) {
            sum = sum + self.l1.clone();
        }
        if present.contains(&3) {
            sum = sum + self.l3.clone() * T::from_int(3);
        }
        sum
    }
}

/// Slope classes `|sδ|` of the inner (finite) edges of a type.
pub fn inner_classes(t: SpecialType) -> BTreeSet<i64> {
    let m = t.reference();
    let src = m.source();
    src.edges()
        .filter(|e| !is_tail(src, *e))
        .map(|e| m.sdelta_values()[e.0].abs())
        .collect()
}

fn is_tail(g: &GenusGraph, e: EdgeId) -> bool {
    let (a, b) = g.ends(e);
    g.vertex_genus(a) == 0 && g.is_leaf(a) || g.vertex_genus(b) == 0 && g.is_leaf(b)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unliftable: {reason}")]
pub struct Unliftable {
    pub reason: String,
}

fn unliftable<R>(reason: impl Into<String>) -> Result<R, Unliftable> {
    Err(Unliftable { reason: reason.into() })
}

/// Puts the given lengths on the reference morphism of `t`, derives `δ` by
/// propagation from the genus-one locus (where `δ = 1`) and the tail rule,
/// and runs the metric constructor. No length constraint is imposed here.
pub fn metric_candidate<T: Scalar>(
    t: SpecialType,
    lengths: &Lengths<T>,
    setting: &ResidueSetting<T>,
) -> Result<MetricDeltaMorphism<T>, MorphismError> {
    lift_with_lengths(t.reference(), lengths, setting)
}

/// As [`metric_candidate`] for any special δ-morphism whose first vertex
/// lies on the genus-one locus (as built by [`SpecialShape::build`]).
pub fn lift_with_lengths<T: Scalar>(
    m: DeltaMorphism,
    lengths: &Lengths<T>,
    setting: &ResidueSetting<T>,
) -> Result<MetricDeltaMorphism<T>, MorphismError> {
    let src = m.source();
    let mut src_len = Vec::new();
    for e in src.edges() {
        if is_tail(src, e) {
            src_len.push(Length::Infinite);
        } else {
            let s = m.sdelta_values()[e.0];
            let l = lengths
                .class(s)
                .ok_or_else(|| MorphismError::InvalidMetric(format!("no length class for slope {s}")))?;
            src_len.push(Length::Finite(l.clone()));
        }
    }
    let mut tgt_len = vec![Length::Infinite; m.target().edge_count()];
    for e in src.edges() {
        tgt_len[m.phi().map_edge(e).edge.0] = src_len[e.0].dilate(m.n(e));
    }
    let mut delta: Vec<Option<LogAbs<T>>> = vec![None; src.vertex_count()];
    let anchor = VertexId(0);
    delta[anchor.0] = Some(LogAbs::zero());
    let mut queue = VecDeque::from([anchor]);
    while let Some(v) = queue.pop_front() {
        for br in src.branches(v) {
            let w = src.head(br);
            if delta[w.0].is_some() {
                continue;
            }
            if let Length::Finite(l) = &src_len[br.edge.0] {
                let d = delta[v.0]
                    .clone()
                    .unwrap()
                    .shift(&(l.clone() * T::from_int(m.sdelta(br))));
                delta[w.0] = Some(d);
                queue.push_back(w);
            }
        }
    }
    let delta = src
        .vertices()
        .map(|v| delta[v.0].clone().unwrap_or_else(|| setting.int_abs(m.n_v(v) as i64)))
        .collect();
    MetricDeltaMorphism::new(m.clone(), src_len, tgt_len, delta, setting.clone())
}

/// The metric lift of a special type with the given inner lengths.
pub fn metric_lift<T: Scalar>(
    t: SpecialType,
    lengths: &Lengths<T>,
    setting: &ResidueSetting<T>,
) -> Result<MetricDeltaMorphism<T>, Unliftable> {
    if t.is_exceptional() {
        return unliftable(format!("{t} has an edge of positive slope between two tails"));
    }
    for c in inner_classes(t) {
        let l = lengths.class(c).expect("classes are 0, 1, 3");
        if *l <= T::zero() {
            return unliftable(format!(
                "inner edges of slope {c} need positive length, got {}",
                l.render()
            ));
        }
    }
    if t.class() == CharClass::Mixed {
        let Some(log2) = setting.int_abs(2).into_value() else {
            return unliftable("mixed type needs 0 < |2| < 1");
        };
        let sum = lengths.weighted_sum(t);
        if sum != -log2.clone() {
            return unliftable(format!("Σ i·l_i = {} but −log|2| = {}", sum.render(), (-log2).render()));
        }
    }
    metric_candidate(t, lengths, setting).map_err(|e| Unliftable { reason: e.to_string() })
}

/// Separates the mixed H-shapes by the bar length `l = 4·l1 + l0` against
/// `−log|16| = −4·log|2|`.
pub fn bar_discriminator<T: Scalar>(lengths: &Lengths<T>, log2: &T) -> SpecialType {
    let l = lengths.l1.clone() * T::from_int(4) + lengths.l0.clone();
    let bound = -log2.clone() * T::from_int(4);
    if l > bound {
        SpecialType::MB
    } else if l == bound {
        SpecialType::MO
    } else {
        SpecialType::MS
    }
}

/// Classification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ClassificationReport<T> {
    #[serde(rename = "type")]
    pub special_type: SpecialType,
    pub characteristic_class: CharClass,
    pub ramification_signature: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Lengths<T>>,
}

pub fn classification_report<T: Scalar>(m: &DeltaMorphism) -> Result<ClassificationReport<T>, SpecialError> {
    let t = classify_special(m)?;
    Ok(ClassificationReport {
        special_type: t,
        characteristic_class: t.class(),
        ramification_signature: ramification_signature(m),
        lengths: None,
    })
}
