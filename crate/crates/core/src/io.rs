//! JSON files for graphs and morphisms. Rationals are strings, objects are
//! written with sorted keys, and rendering a parsed file reproduces it byte
//! for byte when it was produced by the renderer.
//!
//! Graph file:
//! `{"vertices": [{"id", "genus"}], "edges": [{"id", "from", "to", "length"?}]}`
//! with `length` a positive rational or `"inf"`; a graph without lengths is
//! combinatorial.
//!
//! Morphism file: `{"source", "target", "vertex_map", "edge_map", "n",
//! "sdelta", "delta"?, "setting"?, "vertex_multiplicity"?}`. Graphs are inline
//! objects or paths relative to the morphism file. `edge_map` sends a source
//! edge to `"e'"` or, reversed, `"-e'"`. `sdelta` gives each edge
//! `{"orientation": "u->v", "value"}`. `delta` maps vertices to `log δ`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::graph::{GenusGraph, GraphError, Length, MetricGenusGraph, OrientedEdge};
use crate::morphism::{DeltaMorphism, MetricDeltaMorphism, MorphismError, NMorphism};
use crate::scalar::Scalar;
use crate::valuation::{LogAbs, ResidueSetting};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{file}:{line}:{column}: {message}")]
    Syntax {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}: {message}")]
    Invalid { file: String, message: String },
    #[error("{file}: {source}")]
    Read { file: String, source: std::io::Error },
}

impl IoError {
    fn invalid(file: &str, message: impl Into<String>) -> Self {
        IoError::Invalid {
            file: file.to_string(),
            message: message.into(),
        }
    }

    fn json(file: &str, e: serde_json::Error) -> Self {
        IoError::Syntax {
            file: file.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }

    fn with_file(self, file: &str) -> Self {
        match self {
            IoError::Invalid { message, .. } => IoError::Invalid {
                file: file.to_string(),
                message,
            },
            IoError::Syntax {
                line, column, message, ..
            } => IoError::Syntax {
                file: file.to_string(),
                line,
                column,
                message,
            },
            other => other,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexJson {
    id: String,
    genus: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    id: String,
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SdeltaJson {
    orientation: String,
    value: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismJson {
    source: Value,
    target: Value,
    vertex_map: BTreeMap<String, String>,
    edge_map: BTreeMap<String, String>,
    n: BTreeMap<String, u32>,
    sdelta: BTreeMap<String, SdeltaJson>,
    #[serde(default)]
    delta: Option<BTreeMap<String, String>>,
    #[serde(default)]
    setting: Option<String>,
    #[serde(default)]
    vertex_multiplicity: Option<BTreeMap<String, u32>>,
}

/// A genus graph, metric when every edge carries a length.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphFile<T> {
    pub graph: GenusGraph,
    pub lengths: Option<Vec<Length<T>>>,
}

impl<T: Scalar> GraphFile<T> {
    pub fn combinatorial(graph: GenusGraph) -> Self {
        Self { graph, lengths: None }
    }

    pub fn metric(m: &MetricGenusGraph<T>) -> Self {
        Self {
            graph: m.graph().clone(),
            lengths: Some(m.lengths().to_vec()),
        }
    }

    pub fn to_metric(&self) -> Result<Option<MetricGenusGraph<T>>, GraphError> {
        self.lengths
            .as_ref()
            .map(|l| MetricGenusGraph::new(self.graph.clone(), l.clone()))
            .transpose()
    }
}

/// A δ-morphism with optional metric data.
#[derive(Clone, Debug, PartialEq)]
pub struct MorphismFile<T> {
    pub morphism: DeltaMorphism,
    pub source_lengths: Option<Vec<Length<T>>>,
    pub target_lengths: Option<Vec<Length<T>>>,
    pub delta: Option<Vec<LogAbs<T>>>,
    pub setting: Option<ResidueSetting<T>>,
}

impl<T: Scalar> MorphismFile<T> {
    pub fn combinatorial(morphism: DeltaMorphism) -> Self {
        Self {
            morphism,
            source_lengths: None,
            target_lengths: None,
            delta: None,
            setting: None,
        }
    }

    pub fn from_metric(m: &MetricDeltaMorphism<T>) -> Self {
        Self {
            morphism: m.morphism().clone(),
            source_lengths: Some(m.source().lengths().to_vec()),
            target_lengths: Some(m.target().lengths().to_vec()),
            delta: Some(m.deltas().to_vec()),
            setting: Some(m.setting().clone()),
        }
    }

    /// The metric morphism when lengths, `δ` and a setting are all present.
    pub fn to_metric(&self) -> Result<Option<MetricDeltaMorphism<T>>, MorphismError> {
        let (Some(sl), Some(tl), Some(d)) = (&self.source_lengths, &self.target_lengths, &self.delta) else {
            return Ok(None);
        };
        let setting = self.setting.clone().unwrap_or_else(ResidueSetting::equichar_zero);
        MetricDeltaMorphism::new(self.morphism.clone(), sl.clone(), tl.clone(), d.clone(), setting).map(Some)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn graph_value<T: Scalar>(g: &GenusGraph, lengths: Option<&[Length<T>]>) -> Value {
    let json = GraphJson {
        vertices: g
            .vertices()
            .map(|v| VertexJson {
                id: g.vertex_name(v).into(),
                genus: g.vertex_genus(v),
            })
            .collect(),
        edges: g
            .edges()
            .map(|e| {
                let (a, b) = g.ends(e);
                EdgeJson {
                    id: g.edge_name(e).into(),
                    from: g.vertex_name(a).into(),
                    to: g.vertex_name(b).into(),
                    length: lengths.map(|l| l[e.0].render()),
                }
            })
            .collect(),
    };
    serde_json::to_value(json).expect("graph serializes")
}

pub fn graph_to_value<T: Scalar>(file: &GraphFile<T>) -> Value {
    graph_value(&file.graph, file.lengths.as_deref())
}

pub fn render_graph<T: Scalar>(file: &GraphFile<T>) -> String {
    pretty(&graph_to_value(file))
}

fn graph_from_json<T: Scalar>(json: GraphJson, file: &str) -> Result<GraphFile<T>, IoError> {
    let mut g = GenusGraph::new();
    for v in &json.vertices {
        if g.vertex_by_name(&v.id).is_some() {
            return Err(IoError::invalid(file, format!("vertex {:?} declared twice", v.id)));
        }
        g.add_vertex(&v.id, v.genus);
    }
    let mut lengths = Vec::new();
    for e in &json.edges {
        if g.edge_by_name(&e.id).is_some() {
            return Err(IoError::invalid(file, format!("edge {:?} declared twice", e.id)));
        }
        let end = |name: &str| {
            g.vertex_by_name(name)
                .ok_or_else(|| IoError::invalid(file, format!("edge {:?} refers to unknown vertex {name:?}", e.id)))
        };
        let (a, b) = (end(&e.from)?, end(&e.to)?);
        g.add_edge(&e.id, a, b);
        if let Some(l) = &e.length {
            let len = Length::parse(l)
                .ok_or_else(|| IoError::invalid(file, format!("edge {:?} has bad length {l:?}", e.id)))?;
            lengths.push(len);
        }
    }
    let lengths = match lengths.len() {
        0 if !json.edges.is_empty() => None,
        n if n == json.edges.len() => Some(lengths),
        _ => return Err(IoError::invalid(file, "either every edge or no edge carries a length")),
    };
    if let Some(l) = &lengths {
        MetricGenusGraph::new(g.clone(), l.clone()).map_err(|e| IoError::invalid(file, e.to_string()))?;
    }
    Ok(GraphFile { graph: g, lengths })
}

pub fn parse_graph<T: Scalar>(text: &str) -> Result<GraphFile<T>, IoError> {
    parse_graph_named(text, "<graph>")
}

fn parse_graph_named<T: Scalar>(text: &str, file: &str) -> Result<GraphFile<T>, IoError> {
    let json: GraphJson = serde_json::from_str(text).map_err(|e| IoError::json(file, e))?;
    graph_from_json(json, file)
}

pub fn render_morphism<T: Scalar>(file: &MorphismFile<T>) -> String {
    pretty(&morphism_to_value(file))
}

pub fn morphism_to_value<T: Scalar>(file: &MorphismFile<T>) -> Value {
    let m = &file.morphism;
    let (src, tgt) = (m.source(), m.target());
    let mut obj = serde_json::Map::new();
    obj.insert("source".into(), graph_value(src, file.source_lengths.as_deref()));
    obj.insert("target".into(), graph_value(tgt, file.target_lengths.as_deref()));
    let vertex_map: BTreeMap<&str, &str> = src
        .vertices()
        .map(|v| (src.vertex_name(v), tgt.vertex_name(m.phi().map_vertex(v))))
        .collect();
    obj.insert("vertex_map".into(), serde_json::to_value(vertex_map).unwrap());
    let mut edge_map = BTreeMap::new();
    let mut n = BTreeMap::new();
    let mut sdelta = BTreeMap::new();
    for e in src.edges() {
        let img = m.phi().map_edge(e);
        let sign = if img.forward { "" } else { "-" };
        edge_map.insert(src.edge_name(e), format!("{sign}{}", tgt.edge_name(img.edge)));
        n.insert(src.edge_name(e), m.n(e));
        let (a, b) = src.ends(e);
        let orientation = format!("{}->{}", src.vertex_name(a), src.vertex_name(b));
        sdelta.insert(
            src.edge_name(e),
            SdeltaJson {
                orientation,
                value: m.sdelta(OrientedEdge::forward(e)),
            },
        );
    }
    obj.insert("edge_map".into(), serde_json::to_value(edge_map).unwrap());
    obj.insert("n".into(), serde_json::to_value(n).unwrap());
    obj.insert("sdelta".into(), serde_json::to_value(sdelta).unwrap());
    let isolated: BTreeMap<&str, u32> = src
        .vertices()
        .filter(|v| tgt.branches(m.phi().map_vertex(*v)).is_empty())
        .map(|v| (src.vertex_name(v), m.n_v(v)))
        .collect();
    if !isolated.is_empty() {
        obj.insert("vertex_multiplicity".into(), serde_json::to_value(isolated).unwrap());
    }
    if let Some(d) = &file.delta {
        let d: BTreeMap<&str, String> = src.vertices().map(|v| (src.vertex_name(v), d[v.0].render())).collect();
        obj.insert("delta".into(), serde_json::to_value(d).unwrap());
    }
    if let Some(s) = &file.setting {
        obj.insert("setting".into(), Value::String(s.to_string()));
    }
    Value::Object(obj)
}

pub fn parse_morphism<T: Scalar>(text: &str) -> Result<MorphismFile<T>, IoError> {
    parse_morphism_in(text, "<morphism>", None)
}

/// Reads a morphism file; graph paths inside it are resolved against its directory.
pub fn load_morphism<T: Scalar>(path: &Path) -> Result<MorphismFile<T>, IoError> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        file: file.clone(),
        source,
    })?;
    parse_morphism_in(&text, &file, path.parent())
}

pub fn load_graph<T: Scalar>(path: &Path) -> Result<GraphFile<T>, IoError> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        file: file.clone(),
        source,
    })?;
    parse_graph_named(&text, &file)
}

fn graph_entry<T: Scalar>(v: Value, file: &str, dir: Option<&Path>) -> Result<GraphFile<T>, IoError> {
    match v {
        Value::String(p) => {
            let path: PathBuf = dir.map_or_else(|| PathBuf::from(&p), |d| d.join(&p));
            load_graph(&path)
        }
        other => {
            let json: GraphJson = serde_json::from_value(other).map_err(|e| IoError::invalid(file, e.to_string()))?;
            graph_from_json(json, file)
        }
    }
}

fn parse_morphism_in<T: Scalar>(text: &str, file: &str, dir: Option<&Path>) -> Result<MorphismFile<T>, IoError> {
    let raw: MorphismJson = serde_json::from_str(text).map_err(|e| IoError::json(file, e))?;
    let source: GraphFile<T> = graph_entry(raw.source, file, dir)?;
    let target: GraphFile<T> = graph_entry(raw.target, file, dir)?;
    let (src, tgt) = (&source.graph, &target.graph);
    let bad = |m: String| IoError::invalid(file, m);
    let lookup = |map: &BTreeMap<String, String>, key: &str, what: &str| {
        map.get(key)
            .cloned()
            .ok_or_else(|| bad(format!("{what} has no entry for {key:?}")))
    };
    for key in raw.vertex_map.keys() {
        src.vertex_by_name(key)
            .ok_or_else(|| bad(format!("vertex_map mentions unknown vertex {key:?}")))?;
    }
    for (what, keys) in [
        ("edge_map", raw.edge_map.keys().collect::<Vec<_>>()),
        ("n", raw.n.keys().collect()),
        ("sdelta", raw.sdelta.keys().collect()),
    ] {
        if let Some(k) = keys.into_iter().find(|k| src.edge_by_name(k).is_none()) {
            return Err(bad(format!("{what} mentions unknown edge {k:?}")));
        }
    }
    let mut vertex_map = Vec::new();
    for v in src.vertices() {
        let img = lookup(&raw.vertex_map, src.vertex_name(v), "vertex_map")?;
        vertex_map.push(
            tgt.vertex_by_name(&img)
                .ok_or_else(|| bad(format!("unknown target vertex {img:?}")))?,
        );
    }
    let mut edge_map = Vec::new();
    let mut n = Vec::new();
    let mut sdelta = Vec::new();
    for e in src.edges() {
        let name = src.edge_name(e);
        let img = lookup(&raw.edge_map, name, "edge_map")?;
        let (forward, tname) = match img.strip_prefix('-') {
            Some(rest) => (false, rest),
            None => (true, img.as_str()),
        };
        let te = tgt
            .edge_by_name(tname)
            .ok_or_else(|| bad(format!("unknown target edge {tname:?}")))?;
        edge_map.push(OrientedEdge { edge: te, forward });
        n.push(
            *raw.n
                .get(name)
                .ok_or_else(|| bad(format!("n has no entry for {name:?}")))?,
        );
        let sd = raw
            .sdelta
            .get(name)
            .ok_or_else(|| bad(format!("sdelta has no entry for {name:?}")))?;
        let (a, b) = src.ends(e);
        let (an, bn) = (src.vertex_name(a), src.vertex_name(b));
        let value = match sd.orientation.split_once("->") {
            Some((x, y)) if x == an && y == bn => sd.value,
            Some((x, y)) if x == bn && y == an => -sd.value,
            _ => {
                return Err(bad(format!(
                    "sdelta orientation {:?} does not match edge {name:?} ({an}->{bn})",
                    sd.orientation
                )))
            }
        };
        sdelta.push(value);
    }
    let mut isolated = BTreeMap::new();
    for (k, v) in raw.vertex_multiplicity.iter().flatten() {
        let id = src
            .vertex_by_name(k)
            .ok_or_else(|| bad(format!("vertex_multiplicity mentions unknown vertex {k:?}")))?;
        isolated.insert(id, *v);
    }
    let phi = NMorphism::with_multiplicities(src.clone(), tgt.clone(), vertex_map, edge_map, n, &isolated)
        .map_err(|e| bad(e.to_string()))?;
    let morphism = DeltaMorphism::new(phi, sdelta).map_err(|e| bad(e.to_string()))?;
    let delta = match raw.delta {
        None => None,
        Some(map) => {
            let mut out = Vec::new();
            for v in src.vertices() {
                let s = lookup(&map, src.vertex_name(v), "delta")?;
                out.push(LogAbs::parse(&s).ok_or_else(|| bad(format!("bad log δ {s:?}")))?);
            }
            Some(out)
        }
    };
    let setting = raw
        .setting
        .map(|s| s.parse::<ResidueSetting<T>>().map_err(|e| bad(e.to_string())))
        .transpose()?;
    let out = MorphismFile {
        morphism,
        source_lengths: source.lengths,
        target_lengths: target.lengths,
        delta,
        setting,
    };
    if out.delta.is_some() && (out.source_lengths.is_none() || out.target_lengths.is_none()) {
        return Err(bad("delta values need lengths on both graphs".into()));
    }
    out.to_metric().map_err(|e| bad(e.to_string()))?;
    Ok(out)
}

impl IoError {
    /// Re-attributes an error to `file`.
    pub fn in_file(self, file: &Path) -> Self {
        self.with_file(&file.display().to_string())
    }
}
