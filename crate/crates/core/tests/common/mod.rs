#![allow(dead_code)]

use ramify::graph::{EdgeId, GenusGraph, OrientedEdge, VertexId};
use ramify::morphism::{DeltaMorphism, NMorphism};
use ramify::pm_func::Side;
use ramify::{LogAbsQ, PmFunctionQ, Rational, SeriesQ, SettingQ};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

fn random_connected<R: Rng>(rng: &mut R, vertices: usize, extra_edges: usize, max_genus: u32) -> GenusGraph {
    let mut g = GenusGraph::new();
    let vs: Vec<VertexId> = (0..vertices)
        .map(|i| g.add_vertex(format!("t{i}"), rng.gen_range(0..=max_genus)))
        .collect();
    for i in 1..vertices {
        let j = rng.gen_range(0..i);
        g.add_edge(format!("f{i}"), vs[j], vs[i]);
    }
    for k in 0..extra_edges {
        let a = vs[rng.gen_range(0..vertices)];
        let b = vs[rng.gen_range(0..vertices)];
        g.add_edge(format!("x{k}"), a, b);
    }
    g
}

fn random_partition<R: Rng>(rng: &mut R, d: u32, max_parts: usize) -> Vec<u32> {
    loop {
        let mut parts = Vec::new();
        let mut left = d;
        while left > 0 {
            let p = rng.gen_range(1..=left);
            parts.push(p);
            left -= p;
        }
        if parts.len() <= max_parts {
            return parts;
        }
    }
}

/// A random proper δ-morphism with at most `max_source_vertices` source
/// vertices. Edges over a target edge are built from a random matching of
/// the `deg φ` sheets at its two ends, so properness holds by construction.
pub fn random_proper<R: Rng>(rng: &mut R, max_source_vertices: usize) -> DeltaMorphism {
    loop {
        let tv = rng.gen_range(1..=4usize);
        let extra = rng.gen_range(0..=2usize);
        let target = random_connected(rng, tv, extra, 2);
        let degree = rng.gen_range(1..=3u32);
        let budget = max_source_vertices / tv;
        let fibers: Vec<Vec<u32>> = (0..tv).map(|_| random_partition(rng, degree, budget.max(1))).collect();
        let total: usize = fibers.iter().map(Vec::len).sum();
        if total > max_source_vertices {
            continue;
        }
        let mut source = GenusGraph::new();
        let mut vertex_map = Vec::new();
        let mut sheets: Vec<Vec<VertexId>> = Vec::new();
        let mut hints = BTreeMap::new();
        for (t, parts) in fibers.iter().enumerate() {
            let mut sh = Vec::new();
            for (k, nv) in parts.iter().enumerate() {
                let v = source.add_vertex(format!("s{t}_{k}"), rng.gen_range(0..=2));
                vertex_map.push(VertexId(t));
                hints.insert(v, *nv);
                sh.extend(std::iter::repeat_n(v, *nv as usize));
            }
            sheets.push(sh);
        }
        let mut edge_map = Vec::new();
        let mut n = Vec::new();
        for e in target.edges() {
            let (a, b) = target.ends(e);
            let mut heads = sheets[b.0].clone();
            heads.shuffle(rng);
            let mut bundle: BTreeMap<(VertexId, VertexId), u32> = BTreeMap::new();
            for (u, w) in sheets[a.0].iter().zip(&heads) {
                *bundle.entry((*u, *w)).or_default() += 1;
            }
            for ((u, w), mut m) in bundle {
                while m > 0 {
                    let piece = rng.gen_range(1..=m);
                    m -= piece;
                    let id = source.add_edge(format!("e{}", source.edge_count()), u, w);
                    debug_assert_eq!(id, EdgeId(edge_map.len()));
                    edge_map.push(OrientedEdge::forward(e));
                    n.push(piece);
                }
            }
        }
        if !source.is_connected() {
            continue;
        }
        let sdelta = (0..source.edge_count())
            .map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-3..=3) })
            .collect();
        let phi = NMorphism::with_multiplicities(source, target, vertex_map, edge_map, n, &hints)
            .expect("construction is proper");
        return DeltaMorphism::new(phi, sdelta).expect("valid slopes");
    }
}

struct Parts {
    source: GenusGraph,
    target: GenusGraph,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<OrientedEdge>,
    n: Vec<u32>,
    sdelta: Vec<i64>,
    hints: BTreeMap<VertexId, u32>,
}

impl Parts {
    fn of(m: &DeltaMorphism) -> Self {
        let src = m.source();
        Parts {
            source: src.clone(),
            target: m.target().clone(),
            vertex_map: src.vertices().map(|v| m.phi().map_vertex(v)).collect(),
            edge_map: src.edges().map(|e| m.phi().map_edge(e)).collect(),
            n: src.edges().map(|e| m.n(e)).collect(),
            sdelta: m.sdelta_values().to_vec(),
            hints: src.vertices().map(|v| (v, m.n_v(v))).collect(),
        }
    }

    fn add_edge(&mut self, from: VertexId, to: VertexId, img: OrientedEdge, n: u32, s: i64) {
        let name = format!("d{}", self.source.edge_count());
        self.source.add_edge(name, from, to);
        self.edge_map.push(img);
        self.n.push(n);
        self.sdelta.push(s);
    }

    fn build(self) -> DeltaMorphism {
        let phi = NMorphism::with_multiplicities(
            self.source,
            self.target,
            self.vertex_map,
            self.edge_map,
            self.n,
            &self.hints,
        )
        .expect("decoration keeps properness");
        DeltaMorphism::new(phi, self.sdelta).unwrap()
    }
}

/// Adds a balanced genus-0 leaf over a new target leaf at `t`.
pub fn add_balanced_leaf<R: Rng>(rng: &mut R, m: &DeltaMorphism, t: VertexId) -> DeltaMorphism {
    let mut p = Parts::of(m);
    let name = format!("tl{}", p.target.vertex_count());
    let leaf_t = p.target.add_vertex(name, 0);
    let te = p.target.add_edge(format!("tle{}", p.target.edge_count()), t, leaf_t);
    for v in m.phi().fiber(t) {
        let mut left = m.n_v(v);
        while left > 0 {
            let ne = rng.gen_range(1..=left);
            left -= ne;
            let leaf = p.source.add_vertex(format!("sl{}", p.source.vertex_count()), 0);
            p.vertex_map.push(leaf_t);
            p.hints.insert(leaf, ne);
            p.add_edge(v, leaf, OrientedEdge::forward(te), ne, ne as i64 - 1);
        }
    }
    p.build()
}

/// Subdivides a target edge and every source edge over it, keeping `n` and
/// the slope through the new vertices.
pub fn subdivide(m: &DeltaMorphism, te: EdgeId) -> DeltaMorphism {
    let old = Parts::of(m);
    let mut p = Parts::of(m);
    let (ta, tb) = old.target.ends(te);
    let mid_t = p.target.add_vertex(format!("tm{}", old.target.vertex_count()), 0);
    let (target, _, temap) = rebuild_without(&p.target, te);
    p.target = target;
    let first = p.target.add_edge(format!("tm{}a", te.0), ta, mid_t);
    let second = p.target.add_edge(format!("tm{}b", te.0), mid_t, tb);
    let over: Vec<EdgeId> = old.source.edges().filter(|e| old.edge_map[e.0].edge == te).collect();
    let (source, _, semap) = {
        let mut g = GenusGraph::new();
        for v in old.source.vertices() {
            g.add_vertex(old.source.vertex_name(v), old.source.vertex_genus(v));
        }
        let mut semap = vec![None; old.source.edge_count()];
        for e in old.source.edges() {
            if !over.contains(&e) {
                let (a, b) = old.source.ends(e);
                semap[e.0] = Some(g.add_edge(old.source.edge_name(e), a, b));
            }
        }
        (g, (), semap)
    };
    p.source = source;
    p.edge_map.clear();
    p.n.clear();
    p.sdelta.clear();
    for e in old.source.edges() {
        if semap[e.0].is_some() {
            let img = old.edge_map[e.0];
            p.edge_map.push(OrientedEdge {
                edge: temap[img.edge.0].unwrap(),
                forward: img.forward,
            });
            p.n.push(old.n[e.0]);
            p.sdelta.push(old.sdelta[e.0]);
        }
    }
    for e in over {
        let (a, b) = old.source.ends(e);
        let img = old.edge_map[e.0];
        // orient the halves along the target edge's stored direction
        let (start, end, s) = if img.forward {
            (a, b, old.sdelta[e.0])
        } else {
            (b, a, -old.sdelta[e.0])
        };
        let mid = p.source.add_vertex(format!("sm{}", p.source.vertex_count()), 0);
        p.vertex_map.push(mid_t);
        p.hints.insert(mid, old.n[e.0]);
        p.add_edge(start, mid, OrientedEdge::forward(first), old.n[e.0], s);
        p.add_edge(mid, end, OrientedEdge::forward(second), old.n[e.0], s);
    }
    p.build()
}

fn rebuild_without(g: &GenusGraph, drop: EdgeId) -> (GenusGraph, (), Vec<Option<EdgeId>>) {
    let mut h = GenusGraph::new();
    for v in g.vertices() {
        h.add_vertex(g.vertex_name(v), g.vertex_genus(v));
    }
    let mut map = vec![None; g.edge_count()];
    for e in g.edges().filter(|e| *e != drop) {
        let (a, b) = g.ends(e);
        map[e.0] = Some(h.add_edge(g.edge_name(e), a, b));
    }
    (h, (), map)
}

/// A random proper δ-morphism decorated with balanced leaves and
/// subdivisions, so that contractions apply.
pub fn random_decorated<R: Rng>(rng: &mut R, max_source_vertices: usize) -> DeltaMorphism {
    let mut m = random_proper(rng, max_source_vertices);
    for _ in 0..rng.gen_range(1..=3) {
        m = if rng.gen_bool(0.5) || m.target().edge_count() == 0 {
            let t = VertexId(rng.gen_range(0..m.target().vertex_count()));
            add_balanced_leaf(rng, &m, t)
        } else {
            let te = EdgeId(rng.gen_range(0..m.target().edge_count()));
            subdivide(&m, te)
        };
    }
    m
}

/// A random series with at most 12 terms at positive indices and values in
/// `[−6, 0]`, separable in `setting`.
pub fn random_series<R: Rng>(rng: &mut R, setting: &SettingQ) -> SeriesQ {
    let p = setting.char_k() as i64;
    loop {
        let count = rng.gen_range(1..=12);
        let mut idx: Vec<i64> = (1..=16).collect();
        idx.shuffle(rng);
        idx.truncate(count);
        if p != 0 && idx.iter().all(|i| i % p == 0) {
            continue;
        }
        let terms = idx.into_iter().map(|i| {
            let d = [1, 2, 3, 4, 6][rng.gen_range(0..5)];
            (i, Rational::new(-rng.gen_range(0..=6 * d), d))
        });
        return SeriesQ::from_finite(terms).unwrap();
    }
}

/// `log δ(x)` by direct maximization over the terms of `h` and `h'`.
pub fn brute_log_delta(h: &SeriesQ, setting: &SettingQ, x: &Rational) -> LogAbsQ {
    let top = |with_index: bool| {
        h.terms()
            .iter()
            .filter(|(i, _)| **i != 0)
            .map(|(i, v)| {
                let base = LogAbsQ::Finite(*v + Rational::from_integer(*i) * x);
                if with_index {
                    base + setting.int_abs(*i)
                } else {
                    base
                }
            })
            .fold(LogAbsQ::NegInf, LogAbsQ::max)
    };
    match (top(true), top(false)) {
        (LogAbsQ::Finite(a), LogAbsQ::Finite(b)) => LogAbsQ::Finite(a - b),
        (a, _) => a,
    }
}

/// The 50 grid points `−4 + 8k/49`.
pub fn grid() -> Vec<Rational> {
    (0..50)
        .map(|k| Rational::new(-4, 1) + Rational::new(8 * k, 49))
        .collect()
}

/// `(m, s, log δ)` for the inward and outward branch at `x`.
pub fn branch_triples(h: &SeriesQ, profile: &PmFunctionQ, x: &Rational) -> Vec<(i64, i64, LogAbsQ)> {
    let ach = h.achievers_at(x);
    let delta = profile.eval(x).unwrap();
    let mut out = Vec::new();
    if x > profile.start() {
        out.push((ach[0], -profile.slope_at(x, Side::Left).unwrap(), delta.clone()));
    }
    if profile.end().is_none_or(|e| x < e) {
        out.push((*ach.last().unwrap(), profile.slope_at(x, Side::Right).unwrap(), delta));
    }
    out
}
