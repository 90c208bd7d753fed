use std::fmt::Write;

use cremona::cluster::Cluster;
use cremona::minimize::WeightedForest;
use serde_json::{json, Value};

use crate::commands::{Failure, Outcome};
use crate::{Format, Options};

/// One DOT subgraph.
pub struct Graph {
    label: String,
    nodes: Vec<(String, String, &'static str)>,
    /// (from, to, dashed)
    edges: Vec<(String, String, bool)>,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n"))
}

impl Graph {
    /// Predecessor edges solid, extra proximities dashed.
    pub fn cluster(label: &str, c: &Cluster, mult: &[i64]) -> Self {
        let mut g = Graph { label: label.to_string(), nodes: Vec::new(), edges: Vec::new() };
        for (n, m) in c.nodes.iter().zip(mult) {
            let shape = if n.predecessor.is_none() { "doublecircle" } else { "circle" };
            g.nodes.push((n.id.clone(), format!("{}\n{}", n.id, m), shape));
            if let Some(p) = &n.predecessor {
                g.edges.push((p.clone(), n.id.clone(), false));
            }
            for t in n.proximate_to.iter().filter(|t| Some(*t) != n.predecessor.as_ref()) {
                g.edges.push((n.id.clone(), t.clone(), true));
            }
        }
        g
    }

    pub fn forest(f: &WeightedForest) -> Self {
        let mut g = Graph { label: format!("forest over F_{}", f.n), nodes: Vec::new(), edges: Vec::new() };
        for (ci, comp) in f.components.iter().enumerate() {
            let key = |v: usize| format!("{ci}:{}", comp.vertices[v].id);
            for (vi, v) in comp.vertices.iter().enumerate() {
                let shape = if vi == 0 {
                    "box"
                } else if v.general {
                    "ellipse"
                } else {
                    "circle"
                };
                g.nodes.push((key(vi), format!("{}\n{}", v.id, v.weight), shape));
                if let Some(p) = v.parent {
                    g.edges.push((key(p), key(vi), v.general));
                }
            }
        }
        g
    }
}

pub fn dot(graphs: &[Graph]) -> String {
    let mut out = String::from("digraph cremona {\n  node [fontname=\"monospace\"];\n");
    for (i, g) in graphs.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{\n    label={};", quote(&g.label));
        for (id, label, shape) in &g.nodes {
            let _ = writeln!(out, "    {} [label={}, shape={shape}];", quote(&format!("{i}/{id}")), quote(label));
        }
        for (a, b, dashed) in &g.edges {
            let style = if *dashed { " [style=dashed]" } else { "" };
            let _ = writeln!(out, "    {} -> {}{style};", quote(&format!("{i}/{a}")), quote(&format!("{i}/{b}")));
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

fn failure_json(f: &Failure) -> Value {
    match f {
        Failure::Input { message, violations } => {
            json!({ "error": { "kind": "input", "message": message, "violations": violations } })
        }
        Failure::Internal { message, .. } => json!({ "error": { "kind": "internal", "message": message } }),
    }
}

fn report_failure(f: &Failure) {
    match f {
        Failure::Input { message, violations } => {
            eprintln!("error: {message}");
            for v in violations {
                eprintln!("  {}: {}", v.node, v.rule);
            }
        }
        Failure::Internal { message, trace } => {
            eprintln!("internal error: {message}");
            if let Some(t) = trace {
                eprintln!("{}", serde_json::to_string_pretty(t).unwrap_or_default());
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values print")
}

pub fn emit_single(out: &Outcome, opts: &Options) {
    match out {
        Ok(r) => match opts.format {
            Format::Json => println!("{}", pretty(&r.json)),
            Format::Text => print!("{}", r.text),
            Format::Dot => print!("{}", dot(&r.graphs)),
        },
        Err(f) => {
            report_failure(f);
            if opts.format == Format::Json {
                println!("{}", pretty(&failure_json(f)));
            }
        }
    }
}

pub fn emit_batch(outs: &[(String, Outcome)], opts: &Options) {
    match opts.format {
        Format::Json => {
            let items: Vec<Value> = outs
                .iter()
                .map(|(file, o)| match o {
                    Ok(r) => json!({ "file": file, "exit": 0, "report": r.json }),
                    Err(f) => {
                        let mut v = failure_json(f);
                        v["file"] = json!(file);
                        v["exit"] = json!(if matches!(f, Failure::Internal { .. }) { 1 } else { 2 });
                        v
                    }
                })
                .collect();
            println!("{}", pretty(&Value::Array(items)));
        }
        Format::Text => {
            for (file, o) in outs {
                println!("== {file}");
                match o {
                    Ok(r) => print!("{}", r.text),
                    Err(f) => report_failure(f),
                }
            }
        }
        Format::Dot => {
            for (_, o) in outs {
                match o {
                    Ok(r) => print!("{}", dot(&r.graphs)),
                    Err(f) => report_failure(f),
                }
            }
        }
    }
    if opts.format == Format::Json {
        for (_, o) in outs {
            if let Err(f) = o {
                report_failure(f);
            }
        }
    }
}
