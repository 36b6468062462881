//! Command-line front end: reads fixture files, runs the library checks and
//! prints human or JSON reports.
//!
//! Exit codes: 0 success, 1 a check failed or a lift does not exist, 2 bad
//! input.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ramify::annulus::{check_restriction, degree_two_refinement, different_profile, different_report, parse_series};
use ramify::elliptic::{classify_elliptic, EllipticInput};
use ramify::graph::{GenusGraph, Length};
use ramify::io::{graph_to_value, load_graph, load_morphism, morphism_to_value, GraphFile, MorphismFile};
use ramify::morphism::{DeltaMorphism, MetricDeltaMorphism, Move};
use ramify::radial::{degree_p_locus, radial_vs_ball, supersingular_evidence, RadialDescription};
use ramify::special::{
    bar_discriminator, classification_report, enumerate_special, is_special, metric_lift, Lengths, SpecialError,
    SpecialType,
};
use ramify::{LogAbsQ, Rational, Scalar, SettingQ, Verdict};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "ramify",
    version,
    about = "Different function on skeletons of curve coverings"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// equichar0, equicharP:<p> or mixed:<p>:<log|p|>.
    #[arg(long, global = true)]
    setting: Option<String>,
    /// Directory used to resolve bare fixture names such as `wb`.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check K = φ*K' + R + Δ and its degree form.
    RhCheck { morphism: String },
    /// Contract to a stable δ-morphism.
    Stabilize {
        morphism: String,
        /// Report every distinct maximal contraction.
        #[arg(long)]
        all: bool,
    },
    /// Test the special conditions and match against the twelve types.
    ClassifySpecial { morphism: String },
    /// List all special δ-morphisms up to isomorphism.
    EnumerateSpecial {
        /// Write one morphism file per class into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Put lengths on a special type.
    MetricLift {
        special_type: SpecialType,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        l0: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        l1: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        l3: String,
    },
    /// Minimal skeleton of an elliptic double cover.
    Elliptic {
        #[arg(long = "char")]
        char_k: u64,
        #[arg(long)]
        res_char: u64,
        #[arg(long, allow_hyphen_values = true)]
        log_p: Option<String>,
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "j_zero",
            required_unless_present = "j_zero"
        )]
        log_j: Option<String>,
        #[arg(long)]
        j_zero: bool,
    },
    /// Multiplicity and different of a series at |t| = 1.
    Annulus {
        #[arg(long)]
        series: String,
        /// Also print the profile of log δ on [from, to].
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
    },
    /// Radial description of the degree-p ramification locus.
    Radial {
        morphism: String,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Graphviz rendering of a graph or morphism file.
    ExportDot { file: String },
}

struct Outcome {
    code: i32,
    text: String,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { code: 0, text }
    }

    fn from_verdict(ok: bool, text: String) -> Self {
        Outcome {
            code: if ok { 0 } else { 1 },
            text,
        }
    }
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Res = Result<Outcome, InputError>;

/// Parses `argv` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            o.code
        }
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Res {
    let g = &cli.global;
    match &cli.command {
        Command::RhCheck { morphism } => rh_check(g, morphism),
        Command::Stabilize { morphism, all } => stabilize(g, morphism, *all),
        Command::ClassifySpecial { morphism } => classify(g, morphism),
        Command::EnumerateSpecial { out } => enumerate(g, out.as_deref()),
        Command::MetricLift {
            special_type,
            l0,
            l1,
            l3,
        } => lift(g, *special_type, [l0, l1, l3]),
        Command::Elliptic {
            char_k,
            res_char,
            log_p,
            log_j,
            j_zero: _,
        } => elliptic(g, *char_k, *res_char, log_p.as_deref(), log_j.as_deref()),
        Command::Annulus { series, from, to } => annulus(g, series, from.as_deref(), to.as_deref()),
        Command::Radial { morphism, p } => radial(g, morphism, *p),
        Command::ExportDot { file } => export_dot_file(g, file),
    }
}

fn rational(s: &str, what: &str) -> Result<Rational, InputError> {
    Rational::parse(s).ok_or_else(|| InputError(format!("{what}: {s:?} is not a rational number")))
}

fn setting(g: &Global) -> Result<Option<SettingQ>, InputError> {
    g.setting
        .as_deref()
        .map(|s| s.parse::<SettingQ>().map_err(InputError::from))
        .transpose()
}

/// Finds `name` as given, or inside the fixtures directory, optionally with
/// the `extension` appended.
fn resolve(g: &Global, name: &str, extension: &str) -> Result<PathBuf, InputError> {
    let direct = PathBuf::from(name);
    if direct.exists() {
        return Ok(direct);
    }
    if let Some(dir) = &g.fixtures {
        for candidate in [dir.join(name), dir.join(format!("{name}{extension}"))] {
            if candidate.exists() {
                return Ok(candidate);
            }
        }
    }
    Err(InputError(format!("{name}: no such file")))
}

fn read_morphism(g: &Global, name: &str) -> Result<MorphismFile<Rational>, InputError> {
    let path = resolve(g, name, ".morphism.json")?;
    let mut file: MorphismFile<Rational> = load_morphism(&path)?;
    if let Some(s) = setting(g)? {
        file.setting = Some(s);
        file.to_metric()
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    Ok(file)
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn divisor_value(g: &GenusGraph, d: &ramify::graph::Divisor) -> Value {
    Value::Object(d.named(g).into_iter().map(|(n, c)| (n.to_string(), json!(c))).collect())
}

fn divisor_text(g: &GenusGraph, d: &ramify::graph::Divisor) -> String {
    let mut out = String::new();
    for (n, c) in d.named(g).into_iter().filter(|(_, c)| *c != 0) {
        let sign = match (out.is_empty(), c < 0) {
            (true, false) => "",
            (true, true) => "-",
            (false, false) => " + ",
            (false, true) => " - ",
        };
        let _ = write!(out, "{sign}{}·{n}", c.abs());
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Ok => "ok".into(),
        Verdict::Violated(r) => format!("violated: {r}"),
    }
}

fn rh_check(g: &Global, name: &str) -> Res {
    let file = read_morphism(g, name)?;
    let m = &file.morphism;
    let w = m.rh_divisor_identity();
    let deg = m.rh_degree_identity();
    let ok = w.verdict.is_ok() && deg.is_ok();
    let src = m.source();
    if g.json {
        let v = json!({
            "canonical": divisor_value(src, &w.canonical),
            "pullback_canonical": divisor_value(src, &w.pullback_canonical),
            "ramification": divisor_value(src, &w.ramification),
            "delta": divisor_value(src, &w.delta),
            "divisor_identity": w.verdict,
            "degree_identity": deg,
        });
        return Ok(Outcome::from_verdict(ok, to_json(&v)));
    }
    let mut t = String::new();
    let _ = writeln!(t, "K_Γ   = {}", divisor_text(src, &w.canonical));
    let _ = writeln!(t, "φ*K   = {}", divisor_text(src, &w.pullback_canonical));
    let _ = writeln!(t, "R_φ   = {}", divisor_text(src, &w.ramification));
    let _ = writeln!(t, "Δ_φ   = {}", divisor_text(src, &w.delta));
    let _ = writeln!(t, "divisor identity: {}", verdict_text(&w.verdict));
    let _ = writeln!(t, "degree identity: {}", verdict_text(&deg));
    Ok(Outcome::from_verdict(ok, t))
}

fn describe_move(m: &DeltaMorphism, mv: Move) -> String {
    match mv {
        Move::Leaf(v) => format!("leaf {}", m.target().vertex_name(v)),
        Move::Smooth(v) => format!("smooth {}", m.target().vertex_name(v)),
    }
}

fn summary(m: &DeltaMorphism) -> String {
    format!(
        "source {} vertices / {} edges, target {} vertices / {} edges, degree {}",
        m.source().vertex_count(),
        m.source().edge_count(),
        m.target().vertex_count(),
        m.target().edge_count(),
        m.degree()
    )
}

fn stabilize(g: &Global, name: &str, all: bool) -> Res {
    let file = read_morphism(g, name)?;
    if all {
        let results = file.morphism.all_stabilizations();
        if g.json {
            let v: Vec<Value> = results
                .iter()
                .map(|m| morphism_to_value(&MorphismFile::<Rational>::combinatorial(m.clone())))
                .collect();
            return Ok(Outcome::ok(to_json(&v)));
        }
        let mut t = format!("{} distinct stable contraction(s)\n", results.len());
        for m in &results {
            let _ = writeln!(t, "  {}", summary(m));
        }
        return Ok(Outcome::ok(t));
    }
    let mut m = file.morphism.clone();
    let mut moves = Vec::new();
    while let Some(mv) = m.available_moves().first().copied() {
        moves.push(describe_move(&m, mv));
        m = m.contract(mv)?;
    }
    if g.json {
        let v = json!({ "moves": moves, "result": morphism_to_value(&MorphismFile::<Rational>::combinatorial(m)) });
        return Ok(Outcome::ok(to_json(&v)));
    }
    let mut t = String::new();
    for mv in &moves {
        let _ = writeln!(t, "contract {mv}");
    }
    let _ = writeln!(t, "stable: {}", summary(&m));
    Ok(Outcome::ok(t))
}

/// Inner lengths by slope class read off a metric morphism.
fn class_lengths(m: &MetricDeltaMorphism<Rational>) -> Option<Lengths<Rational>> {
    let mut l = Lengths::zero();
    for e in m.source().graph().edges() {
        if let Length::Finite(len) = m.source().length(e) {
            match m.morphism().sdelta_values()[e.0].abs() {
                0 => l.l0 = *len,
                1 => l.l1 = *len,
                3 => l.l3 = *len,
                _ => return None,
            }
        }
    }
    Some(l)
}

fn classify(g: &Global, name: &str) -> Res {
    let file = read_morphism(g, name)?;
    let m = &file.morphism;
    let verdict = is_special(m);
    if let Verdict::Violated(reason) = &verdict {
        let text = if g.json {
            to_json(&json!({ "special": verdict }))
        } else {
            format!("not special: {reason}\n")
        };
        return Ok(Outcome::from_verdict(false, text));
    }
    match classification_report::<Rational>(m) {
        Ok(mut report) => {
            if let Some(metric) = file.to_metric()? {
                report.lengths = class_lengths(&metric);
            }
            if g.json {
                return Ok(Outcome::ok(to_json(&report)));
            }
            let mut t = format!(
                "type {} ({}), ramification signature {:?}\n",
                report.special_type, report.characteristic_class, report.ramification_signature
            );
            if let Some(l) = &report.lengths {
                let _ = writeln!(t, "lengths l0 = {}, l1 = {}, l3 = {}", l.l0, l.l1, l.l3);
            }
            Ok(Outcome::ok(t))
        }
        Err(SpecialError::Unclassifiable) => {
            let reason = "special, but isomorphic to none of the twelve reference shapes";
            let text = if g.json {
                to_json(&json!({ "special": Verdict::Ok, "type": Value::Null, "reason": reason }))
            } else {
                format!("{reason}\n")
            };
            Ok(Outcome::from_verdict(false, text))
        }
        Err(e) => Err(InputError(e.to_string())),
    }
}

fn class_file_name(t: Option<SpecialType>, k: usize) -> String {
    match t {
        Some(t) => format!("{}.morphism.json", t.to_string().to_lowercase()),
        None => format!("unclassified-{k}.morphism.json"),
    }
}

fn enumerate(g: &Global, out: Option<&Path>) -> Res {
    let classes = enumerate_special();
    let mut unclassified = 0;
    let mut rows = Vec::new();
    let mut text = String::new();
    for c in &classes {
        let sig = ramify::special::ramification_signature(&c.morphism);
        let class = ramify::special::characteristic_class(&c.morphism);
        if c.special_type.is_none() {
            unclassified += 1;
        }
        if let Some(dir) = out {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(class_file_name(c.special_type, unclassified));
            std::fs::write(
                &path,
                ramify::io::render_morphism(&MorphismFile::<Rational>::combinatorial(c.morphism.clone())),
            )?;
        }
        let tag = c.special_type.map_or("unclassified".to_string(), |t| t.to_string());
        let class_name = class.map_or("?".to_string(), |c| c.to_string());
        let _ = writeln!(
            text,
            "{tag:<13} {class_name:<6} signature {sig:?}, {} source vertices, {} source edges",
            c.morphism.source().vertex_count(),
            c.morphism.source().edge_count()
        );
        rows.push(json!({
            "type": c.special_type,
            "characteristic_class": class,
            "ramification_signature": sig,
            "source_vertices": c.morphism.source().vertex_count(),
            "source_edges": c.morphism.source().edge_count(),
        }));
    }
    let _ = writeln!(
        text,
        "{} classes, {} of them outside the twelve reference types",
        classes.len(),
        unclassified
    );
    Ok(Outcome::ok(if g.json { to_json(&rows) } else { text }))
}

fn lift(g: &Global, t: SpecialType, raw: [&String; 3]) -> Res {
    let s = setting(g)?.unwrap_or_else(SettingQ::equichar_zero);
    let lengths = Lengths::new(
        rational(raw[0], "--l0")?,
        rational(raw[1], "--l1")?,
        rational(raw[2], "--l3")?,
    );
    match metric_lift(t, &lengths, &s) {
        Ok(m) => {
            if g.json {
                return Ok(Outcome::ok(ramify::io::render_morphism(&MorphismFile::from_metric(&m))));
            }
            let src = m.source().graph();
            let mut text = format!("{t} lifts in {s}\n");
            for v in src.vertices() {
                let _ = writeln!(text, "  log δ({}) = {}", src.vertex_name(v), m.delta(v));
            }
            if t.class() == ramify::special::CharClass::Mixed {
                if let Some(log2) = s.int_abs(2).into_value() {
                    let _ = writeln!(text, "bar discriminator: {}", bar_discriminator(&lengths, &log2));
                }
            }
            Ok(Outcome::ok(text))
        }
        Err(u) => {
            let text = if g.json {
                to_json(&json!({ "unliftable": u.reason }))
            } else {
                format!("{u}\n")
            };
            Ok(Outcome::from_verdict(false, text))
        }
    }
}

fn elliptic(g: &Global, char_k: u64, res_char: u64, log_p: Option<&str>, log_j: Option<&str>) -> Res {
    let log_p = log_p.map(|s| rational(s, "--log-p")).transpose()?;
    let log_j = match log_j {
        Some(s) => LogAbsQ::Finite(rational(s, "--log-j")?),
        None => LogAbsQ::NegInf,
    };
    let input = EllipticInput::from_chars(char_k, res_char, log_p, log_j)?;
    let report = classify_elliptic(&input)?;
    let evidence = supersingular_evidence(&report)?;
    if g.json {
        let mut v = serde_json::to_value(&report)?;
        v["supersingular_witness"] = json!(evidence.by_type);
        return Ok(Outcome::ok(to_json(&v)));
    }
    let mut text = format!("type {}\n", report.special_type);
    for (name, l) in [("l0", &report.l0), ("l1", &report.l1), ("l3", &report.l3)] {
        if let Some(l) = l {
            let _ = writeln!(text, "{name} = {l}");
        }
    }
    let _ = writeln!(text, "reduction: {:?} / {}", report.reduction, report.reduction_type);
    let _ = writeln!(text, "slope-3 edge: {}", if evidence.by_type { "yes" } else { "no" });
    Ok(Outcome::ok(text.replace("Good", "good").replace("Bad", "bad")))
}

fn annulus(g: &Global, name: &str, from: Option<&str>, to: Option<&str>) -> Res {
    let path = resolve(g, name, ".series")?;
    let text = std::fs::read_to_string(&path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let series = parse_series::<Rational>(&text).map_err(|e| InputError(format!("{}:{e}", path.display())))?;
    let s = setting(g)?.ok_or_else(|| InputError("annulus needs --setting".into()))?;
    let report = different_report(&series, &s)?;
    let verdict = check_restriction(report.m, report.slope_s, &report.log_delta, &s);
    let refinement = degree_two_refinement(report.m, report.slope_s, &report.log_delta, &s);
    let profile = match (from, to) {
        (Some(a), b) => {
            let a = rational(a, "--from")?;
            let b = b.map(|b| rational(b, "--to")).transpose()?;
            Some(different_profile(&series, &s, a, b)?)
        }
        (None, Some(_)) => return Err(InputError("--to needs --from".into())),
        (None, None) => None,
    };
    let ok = verdict.is_ok() && refinement.as_ref().is_none_or(Verdict::is_ok);
    if g.json {
        let mut v = json!({
            "m": report.m,
            "n": report.n,
            "log_delta": report.log_delta.render(),
            "s": report.slope_s,
            "restriction": verdict,
        });
        if let Some(r) = refinement {
            v["refinement"] = serde_json::to_value(r)?;
        }
        if let Some(p) = profile {
            v["profile"] = serde_json::to_value(p)?;
        }
        return Ok(Outcome::from_verdict(ok, to_json(&v)));
    }
    let mut t = format!(
        "m = {}, n = {}, log_delta = {}, s = {}\nrestriction: {}\n",
        report.m,
        report.n,
        report.log_delta,
        report.slope_s,
        verdict_text(&verdict)
    );
    if let Some(r) = refinement {
        let _ = writeln!(t, "residue characteristic 2 refinement: {}", verdict_text(&r));
    }
    if let Some(p) = profile {
        for (i, seg) in p.segments().iter().enumerate() {
            let (a, b) = p.segment_bounds(i);
            let b = b.map_or("inf".to_string(), |b| b.to_string());
            let _ = writeln!(t, "  [{a}, {b}]: log δ = {} + {}·(x − {a})", seg.left_value, seg.slope);
        }
    }
    Ok(Outcome::from_verdict(ok, t))
}

fn radial_value(r: &RadialDescription<Rational>) -> Value {
    let center = r.center();
    let g = center.graph();
    let per_edge: serde_json::Map<String, Value> = g
        .edges()
        .map(|e| {
            let v = json!({ "log_delta": r.log_delta(e), "divisor": (r.p() - 1).to_string(), "from": g.vertex_name(g.ends(e).0) });
            (g.edge_name(e).to_string(), v)
        })
        .collect();
    let per_vertex: serde_json::Map<String, Value> = g
        .vertices()
        .map(|v| {
            (
                g.vertex_name(v).to_string(),
                json!(r.vertex_radius(v).map_or("inf".to_string(), |x| x.to_string())),
            )
        })
        .collect();
    json!({
        "center_graph": graph_to_value(&GraphFile::metric(center)),
        "per_edge_radius": per_edge,
        "per_vertex_radius": per_vertex,
        "strictness": radial_vs_ball(r),
    })
}

fn radial(g: &Global, name: &str, p: Option<u64>) -> Res {
    let file = read_morphism(g, name)?;
    let metric = file
        .to_metric()?
        .ok_or_else(|| InputError(format!("{name}: radial needs lengths and delta values")))?;
    let p = p.unwrap_or(metric.morphism().degree() as u64);
    let r = degree_p_locus(&metric, p)?;
    if g.json {
        return Ok(Outcome::ok(to_json(&radial_value(&r))));
    }
    let center = r.center();
    let cg = center.graph();
    let mut t = format!(
        "center: {} vertices, {} edges (multiplicity {p})\n",
        cg.vertex_count(),
        cg.edge_count()
    );
    for v in cg.vertices() {
        let psi = r.vertex_radius(v).map_or("inf".to_string(), |x| x.to_string());
        let _ = writeln!(t, "  ψ({}) = {psi}", cg.vertex_name(v));
    }
    for e in cg.edges() {
        let f = r.log_delta(e);
        let slopes: Vec<String> = f
            .segments()
            .iter()
            .map(|s| Rational::new(-s.slope, p as i64 - 1).to_string())
            .collect();
        let _ = writeln!(
            t,
            "  edge {} (length {}): ψ slopes {}",
            cg.edge_name(e),
            center.length(e).render(),
            slopes.join(", ")
        );
    }
    let _ = writeln!(t, "radial set vs metric neighbourhood: {}", radial_vs_ball(&r));
    Ok(Outcome::ok(t))
}

/// DOT string literal; `\n` sequences in labels are kept as line breaks.
fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

fn dot_graph_body(
    out: &mut String,
    g: &GenusGraph,
    prefix: &str,
    indent: &str,
    edge_label: &dyn Fn(ramify::graph::EdgeId) -> String,
) {
    for v in g.vertices() {
        let name = g.vertex_name(v);
        let _ = writeln!(
            out,
            "{indent}{} [label={}];",
            quote(&format!("{prefix}{name}")),
            quote(&format!("{name}\\ng={}", g.vertex_genus(v)))
        );
    }
    for e in g.edges() {
        let (a, b) = g.ends(e);
        let _ = writeln!(
            out,
            "{indent}{} -- {} [label={}];",
            quote(&format!("{prefix}{}", g.vertex_name(a))),
            quote(&format!("{prefix}{}", g.vertex_name(b))),
            quote(&edge_label(e))
        );
    }
}

/// DOT text for a graph; lengths are shown when present.
pub fn export_dot_graph(file: &GraphFile<Rational>) -> String {
    let g = &file.graph;
    let mut out = String::from("graph G {\n");
    let label = |e| match &file.lengths {
        Some(l) => format!("{}\\nl={}", g.edge_name(e), l[e.0].render()),
        None => g.edge_name(e).to_string(),
    };
    dot_graph_body(&mut out, g, "", "  ", &label);
    out.push_str("}\n");
    out
}

/// DOT text for a morphism: source and target as clusters, source edges
/// labelled with `n`, `sδ` (along the drawn direction) and length.
pub fn export_dot_morphism(file: &MorphismFile<Rational>) -> String {
    let m = &file.morphism;
    let (src, tgt) = (m.source(), m.target());
    let mut out = String::from("graph G {\n  subgraph cluster_source {\n    label=\"source\";\n");
    let src_label = |e: ramify::graph::EdgeId| {
        let l = file
            .source_lengths
            .as_ref()
            .map_or("-".to_string(), |l| l[e.0].render());
        format!(
            "{}\\nn={}, sδ={}, l={}",
            src.edge_name(e),
            m.n(e),
            m.sdelta_values()[e.0],
            l
        )
    };
    dot_graph_body(&mut out, src, "s:", "    ", &src_label);
    out.push_str("  }\n  subgraph cluster_target {\n    label=\"target\";\n");
    let tgt_label = |e: ramify::graph::EdgeId| {
        let l = file
            .target_lengths
            .as_ref()
            .map_or("-".to_string(), |l| l[e.0].render());
        format!("{}\\nl={}", tgt.edge_name(e), l)
    };
    dot_graph_body(&mut out, tgt, "t:", "    ", &tgt_label);
    out.push_str("  }\n}\n");
    out
}

fn export_dot_file(g: &Global, name: &str) -> Res {
    let path = resolve(g, name, ".morphism.json")?;
    let text = std::fs::read_to_string(&path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let is_morphism = serde_json::from_str::<Value>(&text)
        .map_err(|e| InputError(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))?
        .get("source")
        .is_some();
    if is_morphism {
        Ok(Outcome::ok(export_dot_morphism(&read_morphism(
            g,
            path.to_str().unwrap_or(name),
        )?)))
    } else {
        Ok(Outcome::ok(export_dot_graph(&load_graph(&path)?)))
    }
}
