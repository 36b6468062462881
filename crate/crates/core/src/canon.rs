//! Canonical forms of small labelled graphs by colour refinement with
//! individualization, used to compare δ-morphisms up to isomorphism.

use crate::graph::{GenusGraph, OrientedEdge};
use crate::morphism::DeltaMorphism;

/// Direction, arc label and neighbour colour, as seen from one end.
type Signature<'a, A> = (bool, &'a A, usize);

/// A vertex-labelled directed multigraph with labelled arcs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Labelled<L, A> {
    pub labels: Vec<L>,
    pub arcs: Vec<(usize, usize, A)>,
}

impl<L: Ord + Clone, A: Ord + Clone> Labelled<L, A> {
    /// Relabels nodes by `perm[i]` and sorts the arcs.
    fn permuted(&self, perm: &[usize]) -> Self {
        let mut labels = self.labels.clone();
        for (i, l) in self.labels.iter().enumerate() {
            labels[perm[i]] = l.clone();
        }
        let mut arcs: Vec<_> = self
            .arcs
            .iter()
            .map(|(a, b, l)| (perm[*a], perm[*b], l.clone()))
            .collect();
        arcs.sort();
        Self { labels, arcs }
    }

    fn refine(&self, colors: &mut Vec<usize>) {
        let n = self.labels.len();
        loop {
            let mut sigs: Vec<(usize, Vec<Signature<A>>)> = (0..n).map(|i| (colors[i], Vec::new())).collect();
            for (a, b, l) in &self.arcs {
                sigs[*a].1.push((true, l, colors[*b]));
                sigs[*b].1.push((false, l, colors[*a]));
            }
            for s in sigs.iter_mut() {
                s.1.sort();
            }
            let mut distinct: Vec<_> = sigs.clone();
            distinct.sort();
            distinct.dedup();
            let next: Vec<usize> = sigs.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
            let before = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
            *colors = next;
            if distinct.len() == before {
                return;
            }
        }
    }

    /// The lexicographically least relabelling reachable by refinement and
    /// individualization; equal for isomorphic inputs.
    pub fn canonical(&self) -> Self {
        let mut distinct: Vec<&L> = self.labels.iter().collect();
        distinct.sort();
        distinct.dedup();
        let mut colors: Vec<usize> = self
            .labels
            .iter()
            .map(|l| distinct.binary_search(&l).unwrap())
            .collect();
        self.refine(&mut colors);
        let mut best = None;
        self.search(colors, &mut best);
        best.unwrap_or_else(|| self.clone())
    }

    fn search(&self, colors: Vec<usize>, best: &mut Option<Self>) {
        let n = self.labels.len();
        let mut counts = vec![0usize; n.max(1)];
        for c in &colors {
            counts[*c] += 1;
        }
        let Some(cell) = (0..n).find(|c| counts[*c] > 1) else {
            let cand = self.permuted(&colors);
            if best.as_ref().is_none_or(|b| cand < *b) {
                *best = Some(cand);
            }
            return;
        };
        for v in (0..n).filter(|v| colors[*v] == cell) {
            let mut c: Vec<usize> = colors.iter().map(|x| 2 * x + 1).collect();
            c[v] -= 1;
            self.refine(&mut c);
            self.search(c, best);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    SourceVertex { genus: u32, n: u32 },
    SourceEdge { n: u32, slope: i64 },
    TargetVertex { genus: u32 },
    TargetEdge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arc {
    /// Edge node to the endpoint it leaves from in the direction of
    /// non-negative slope.
    Tail,
    Head,
    /// Source node to its image.
    Maps,
    /// Source edge over a target loop, against the loop's stored direction.
    MapsReversed,
}

pub type CanonicalKey = Labelled<Node, Arc>;

fn graph_nodes(
    g: &GenusGraph,
    offset: usize,
    labels: &mut Vec<Node>,
    arcs: &mut Vec<(usize, usize, Arc)>,
    source: Option<&DeltaMorphism>,
) {
    let vc = g.vertex_count();
    for v in g.vertices() {
        labels.push(match source {
            Some(m) => Node::SourceVertex {
                genus: g.vertex_genus(v),
                n: m.n_v(v),
            },
            None => Node::TargetVertex {
                genus: g.vertex_genus(v),
            },
        });
    }
    for e in g.edges() {
        let node = offset + vc + e.0;
        let (a, b) = g.ends(e);
        match source {
            Some(m) => {
                let s = m.sdelta(OrientedEdge::forward(e));
                let (from, to) = if s >= 0 { (a, b) } else { (b, a) };
                labels.push(Node::SourceEdge {
                    n: m.n(e),
                    slope: s.abs(),
                });
                if s == 0 {
                    arcs.push((node, offset + from.0, Arc::Head));
                } else {
                    arcs.push((node, offset + from.0, Arc::Tail));
                }
                arcs.push((node, offset + to.0, Arc::Head));
            }
            None => {
                labels.push(Node::TargetEdge);
                arcs.push((node, offset + a.0, Arc::Head));
                arcs.push((node, offset + b.0, Arc::Head));
            }
        }
    }
}

/// Isomorphism invariant of a δ-morphism: source, target, both maps,
/// multiplicities and slopes.
pub fn canonical_key(m: &DeltaMorphism) -> CanonicalKey {
    let (src, tgt) = (m.source(), m.target());
    let mut labels = Vec::new();
    let mut arcs = Vec::new();
    graph_nodes(src, 0, &mut labels, &mut arcs, Some(m));
    let toff = labels.len();
    graph_nodes(tgt, toff, &mut labels, &mut arcs, None);
    let tvc = tgt.vertex_count();
    for v in src.vertices() {
        arcs.push((v.0, toff + m.phi().map_vertex(v).0, Arc::Maps));
    }
    for e in src.edges() {
        let img = m.phi().map_edge(e);
        let s = m.sdelta(OrientedEdge::forward(e));
        // relative direction only matters over loops, where endpoints do not fix it
        let kind = if tgt.is_loop(img.edge) && (img.forward != (s >= 0)) {
            Arc::MapsReversed
        } else {
            Arc::Maps
        };
        arcs.push((src.vertex_count() + e.0, toff + tvc + img.edge.0, kind));
    }
    Labelled { labels, arcs }.canonical()
}

/// Isomorphism invariant of the source graph with multiplicities and slopes only.
pub fn source_key(m: &DeltaMorphism) -> CanonicalKey {
    let mut labels = Vec::new();
    let mut arcs = Vec::new();
    graph_nodes(m.source(), 0, &mut labels, &mut arcs, Some(m));
    Labelled { labels, arcs }.canonical()
}

/// Isomorphism invariant of a bare genus graph.
pub fn graph_key(g: &GenusGraph) -> Labelled<(u8, u32), Arc> {
    let vc = g.vertex_count();
    let mut labels: Vec<(u8, u32)> = g.vertices().map(|v| (0, g.vertex_genus(v))).collect();
    let mut arcs = Vec::new();
    for e in g.edges() {
        labels.push((1, 0));
        let (a, b) = g.ends(e);
        arcs.push((vc + e.0, a.0, Arc::Head));
        arcs.push((vc + e.0, b.0, Arc::Head));
    }
    Labelled { labels, arcs }.canonical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;
    use proptest::prelude::*;

    fn cycle_with_pendant(order: &[usize]) -> GenusGraph {
        let mut g = GenusGraph::new();
        let vs: Vec<VertexId> = (0..5)
            .map(|i| g.add_vertex(format!("v{i}"), (order[i] == 4) as u32))
            .collect();
        let idx = |k: usize| vs[order.iter().position(|o| *o == k).unwrap()];
        for k in 0..4 {
            g.add_edge(format!("c{k}"), idx(k), idx((k + 1) % 4));
        }
        g.add_edge("p", idx(0), idx(4));
        g
    }

    #[test]
    fn relabelled_graphs_agree() {
        let a = cycle_with_pendant(&[0, 1, 2, 3, 4]);
        let b = cycle_with_pendant(&[3, 4, 0, 2, 1]);
        assert_eq!(graph_key(&a), graph_key(&b));
        let mut c = a.clone();
        c.set_genus(VertexId(1), 1);
        assert_ne!(graph_key(&a), graph_key(&c));
    }

    #[test]
    fn distinguishes_regular_graphs() {
        // two triangles vs a hexagon: refinement alone cannot tell them apart
        let mut two = GenusGraph::new();
        let v: Vec<_> = (0..6).map(|i| two.add_vertex(format!("v{i}"), 0)).collect();
        for t in [0, 3] {
            for k in 0..3 {
                two.add_edge(format!("e{t}{k}"), v[t + k], v[t + (k + 1) % 3]);
            }
        }
        let mut hex = GenusGraph::new();
        let w: Vec<_> = (0..6).map(|i| hex.add_vertex(format!("w{i}"), 0)).collect();
        for k in 0..6 {
            hex.add_edge(format!("h{k}"), w[k], w[(k + 1) % 6]);
        }
        assert_ne!(graph_key(&two), graph_key(&hex));
    }

    proptest! {
        #[test]
        fn invariant_under_relabelling(edges in prop::collection::vec((0usize..6, 0usize..6), 0..10),
                                       genera in prop::collection::vec(0u32..2, 6),
                                       perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
            let build = |p: &[usize]| {
                let mut g = GenusGraph::new();
                let mut inv = [0; 6];
                for (i, pi) in p.iter().enumerate() { inv[*pi] = i; }
                let vs: Vec<_> = (0..6).map(|i| g.add_vertex(format!("v{i}"), genera[inv[i]])).collect();
                for (k, (a, b)) in edges.iter().enumerate().rev() {
                    g.add_edge(format!("e{k}"), vs[p[*a]], vs[p[*b]]);
                }
                g
            };
            let id: Vec<usize> = (0..6).collect();
            prop_assert_eq!(graph_key(&build(&id)), graph_key(&build(&perm)));
        }
    }
}
