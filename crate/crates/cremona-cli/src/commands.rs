use cremona::cluster::{validate_cluster, Violation};
use cremona::factorize::nc_factor;
use cremona::io::Document;
use cremona::minimize::{
    brute_force_min_oracle_kind, classify, classify_rational_system, dejonquieres_reduction, flat_model, forest_pipeline,
    minimal_models, natural_model, noether_reduce, sharp_model, smooth_model_test, Kind, SharpStatus,
};
use cremona::notation;
use cremona::systems::{
    adjoint, adjoint_chain, arithmetic_genus, virtual_dimension, HirzebruchSystem, PlaneSystem, System,
};
use cremona::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::render::Graph;
use crate::{Command, Options};

pub struct Report {
    pub json: Value,
    pub text: String,
    pub graphs: Vec<Graph>,
}

pub enum Failure {
    Input { message: String, violations: Vec<Violation> },
    Internal { message: String, trace: Option<Value> },
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure::Input { message: message.into(), violations: Vec::new() }
    }
}

pub type Outcome = Result<Report, Failure>;

fn engine_failure(e: Error, sys: &System, opts: &Options) -> Failure {
    if e.is_input_error() {
        return Failure::input(e.to_string());
    }
    let trace = opts.trace_lattice.then(|| {
        json!({
            "lattice": sys.lattice(),
            "class": sys.class().ok(),
            "system": sys,
        })
    });
    Failure::Internal { message: e.to_string(), trace }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn plane(sys: &System) -> Result<&PlaneSystem, Failure> {
    sys.as_plane().ok_or_else(|| Failure::input("this command takes a plane system (surface P2)"))
}

fn hirz(sys: &System) -> Result<&HirzebruchSystem, Failure> {
    sys.as_hirzebruch().ok_or_else(|| Failure::input("this command takes a Hirzebruch system (surface Fn)"))
}

/// Parse, validate, and run one command on `text`.
pub fn run(cmd: &Command, name: &str, text: &str, opts: &Options) -> Outcome {
    let doc: Document = serde_json::from_str(text)
        .map_err(|e| Failure::input(format!("{name}: {e}")))?;
    let kind = opts.kind.unwrap_or(doc.kind);
    let sys = doc.to_system().map_err(|e| Failure::input(format!("{name}: {e}")))?;
    let violations = validate_cluster(sys.cluster());
    if !violations.is_empty() {
        return Err(Failure::Input { message: format!("{name}: invalid cluster"), violations });
    }
    let mut report = dispatch(cmd, &sys, kind).map_err(|e| match e {
        Fail::Engine(e) => engine_failure(e, &sys, opts),
        Fail::Usage(f) => f,
    })?;
    if !opts.assume_generic && !matches!(cmd, Command::Validate(_) | Command::Factor(_)) {
        if let Value::Object(m) = &mut report.json {
            m.insert("generic_position_assumed".into(), Value::Bool(false));
        }
        report.text.push_str("note: computed for points in general position\n");
    }
    Ok(report)
}

enum Fail {
    Engine(Error),
    Usage(Failure),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Engine(e)
    }
}

impl From<Failure> for Fail {
    fn from(f: Failure) -> Self {
        Fail::Usage(f)
    }
}

fn status_line(s: &SharpStatus) -> String {
    format!(
        "sharp: {}  sharpsharp: {}  flat index: {}  natural: {}\n",
        s.sharp, s.sharpsharp, s.flat_index, s.natural
    )
}

fn input_graph(sys: &System) -> Vec<Graph> {
    vec![Graph::cluster(&notation::system(sys), sys.cluster(), sys.mult())]
}

fn dispatch(cmd: &Command, sys: &System, kind: Kind) -> Result<Report, Fail> {
    let note = notation::system(sys);
    let report = match cmd {
        Command::Validate(_) => {
            let u = sys.unloaded()?;
            let genus = arithmetic_genus(sys)?;
            let vdim = virtual_dimension(sys);
            Report {
                json: json!({
                    "valid": true,
                    "notation": note,
                    "unloaded": notation::system(&u),
                    "virtual_dimension": vdim,
                    "arithmetic_genus": genus,
                }),
                text: format!("{note}: valid\nunloaded: {}\nvirtual dimension: {vdim}\narithmetic genus: {genus}\n", notation::system(&u)),
                graphs: input_graph(sys),
            }
        }
        Command::Adjoint { m: Some(m), .. } => {
            if *m < 1 {
                return Err(Failure::input("--m must be positive").into());
            }
            let ad = adjoint(sys, *m)?;
            let n = ad.as_ref().map(notation::system);
            Report {
                text: format!("ad_{m}({note}) = {}\n", n.as_deref().unwrap_or("empty")),
                graphs: ad.as_ref().map(input_graph).unwrap_or_default(),
                json: json!({ "m": m, "adjoint": ad, "notation": n }),
            }
        }
        Command::Adjoint { m: None, .. } => {
            let c = adjoint_chain(sys)?;
            let names: Vec<Option<String>> = c.systems.iter().map(|s| s.as_ref().map(notation::system)).collect();
            let mut text = String::new();
            for (i, n) in names.iter().enumerate() {
                text.push_str(&format!("ad_{i} = {}\n", n.as_deref().unwrap_or("empty")));
            }
            text.push_str(&format!("m = {}, alpha = {}\n", c.m, c.alpha));
            let mut json = to_json(&c);
            json["notation"] = to_json(&names);
            Report { json, text, graphs: input_graph(sys) }
        }
        Command::Classify(_) => {
            let r = classify(sys, kind)?;
            let mut text = format!("{note}\ncase: {}\nm = {}, alpha = {}\n", to_json(&r.case).as_str().unwrap_or("?"), r.m, r.alpha);
            if let Some(n) = r.n {
                text.push_str(&format!("n = {n}\n"));
            }
            if let Some(m) = &r.model {
                text.push_str(&format!("model: {}\n", notation::system(m)));
            }
            for d in &r.diagnostics {
                text.push_str(&format!("diagnostic: {d}\n"));
            }
            let graphs = r.model.as_ref().map(input_graph).unwrap_or_else(|| input_graph(sys));
            Report { json: to_json(&r), text, graphs }
        }
        Command::Minimize(_) => {
            let r = classify(sys, kind)?;
            let models = minimal_models(sys, kind)?;
            let mut text = format!("{note}\ncase: {}, m = {}, alpha = {}\n", to_json(&r.case).as_str().unwrap_or("?"), r.m, r.alpha);
            let mut graphs = Vec::new();
            for mm in &models {
                let tag = to_json(&mm.type_tag);
                let how = to_json(&mm.minimality);
                text.push_str(&format!("{}  [{}, {}]\n", mm.notation, tag.as_str().unwrap_or("?"), how.as_str().unwrap_or("?")));
                for a in &mm.ambiguity {
                    text.push_str(&format!("  or {}\n", notation::plane(a)));
                }
                graphs.push(Graph::cluster(&mm.notation, &mm.system.cluster, &mm.system.mult));
            }
            Report { json: json!({ "classification": r, "models": models }), text, graphs }
        }
        Command::Factor(_) => {
            let net = plane(sys)?;
            let f = nc_factor(net)?;
            let mut text = format!("{note}: {} quadratic maps\n", f.quadratic_count());
            for q in f.all_quadratics() {
                text.push_str(&format!("  ({}, {}, {})\n", q[0], q[1], q[2]));
            }
            let cert: Vec<String> = f.certificate.iter().map(|s| format!("({},{},{})", s.k, s.h, s.s)).collect();
            text.push_str(&format!("simplicity: {}\n", cert.join(" > ")));
            Report { json: to_json(&f), text, graphs: input_graph(sys) }
        }
        Command::Forest(_) => {
            let (forest, clusters, models) = forest_pipeline(hirz(sys)?, kind)?;
            let mut text = format!("{note}\nforest over F_{}\n", forest.n);
            for c in &forest.components {
                text.push_str(&format!("  fiber {}:", c.fiber));
                for v in &c.vertices[1..] {
                    text.push_str(&format!(" {}({})", v.id, v.weight));
                }
                text.push('\n');
            }
            for g in &clusters {
                text.push_str(&format!("good cluster {{{}}} weight {} sequence {:?}\n", g.points.join(","), g.weight, g.multiplicities));
            }
            for m in &models {
                text.push_str(&format!("model {}\n", m.notation));
            }
            Report {
                json: json!({ "forest": forest, "good_clusters": clusters, "models": models }),
                text,
                graphs: vec![Graph::forest(&forest)],
            }
        }
        Command::Sharp(_) | Command::Flat(_) | Command::Natural(_) => {
            let h = hirz(sys)?;
            let (m, s) = match cmd {
                Command::Sharp(_) => sharp_model(h, kind)?,
                Command::Flat(_) => flat_model(h, kind)?,
                _ => natural_model(h, kind)?,
            };
            let n = notation::hirzebruch(&m);
            Report {
                text: format!("{note} -> {n}\n{}", status_line(&s)),
                graphs: vec![Graph::cluster(&n, &m.cluster, &m.mult)],
                json: json!({ "model": m, "notation": n, "status": s }),
            }
        }
        Command::Reduce(_) => {
            let p = plane(sys)?;
            let (noether, quads) = noether_reduce(p)?;
            let mut text = format!("{note}\nNoether type after {} quadratic maps: {}\n", quads.len(), notation::plane(&noether));
            let mut json = json!({
                "noether": { "system": noether, "notation": notation::plane(&noether), "quadratics": quads },
            });
            let mut graphs = vec![Graph::cluster(&notation::plane(&noether), &noether.cluster, &noether.mult)];
            match dejonquieres_reduction(p) {
                Ok(r) => {
                    match &r.witness {
                        Some(w) => text.push_str(&format!(
                            "de Jonquieres map of degree {} centered at {} lowers the degree to {}\n",
                            w.delta, w.center, w.image_degree
                        )),
                        None => text.push_str("no de Jonquieres map lowers the degree\n"),
                    }
                    graphs.push(Graph::cluster(&notation::plane(&r.image), &r.image.cluster, &r.image.mult));
                    json["dejonquieres"] = to_json(&r);
                }
                Err(Error::NotAdmissible) => {
                    text.push_str("not admissible: no de Jonquieres search\n");
                    json["dejonquieres"] = Value::Null;
                }
                Err(e) => return Err(e.into()),
            }
            Report { json, text, graphs }
        }
        Command::Oracle { depth, aux, .. } => {
            let r = brute_force_min_oracle_kind(plane(sys)?, *depth, *aux, kind)?;
            Report {
                text: format!(
                    "{note}\nleast degree within {depth} quadratic maps ({aux} fresh points): {}{}\nstates: {}\n",
                    r.degree,
                    if r.partial { " (search truncated)" } else { "" },
                    r.explored
                ),
                json: to_json(&r),
                graphs: input_graph(sys),
            }
        }
        Command::Rational(_) => {
            let r = classify_rational_system(sys)?;
            let t = to_json(&r.rtype);
            Report {
                text: format!("{note}\ntype {}: {} of dimension {}\n", t.as_str().unwrap_or("?"), r.notation, r.dimension),
                graphs: vec![Graph::cluster(&r.notation, &r.system.cluster, &r.system.mult)],
                json: to_json(&r),
            }
        }
        Command::Smooth { d, .. } => {
            let r = smooth_model_test(plane(sys)?, *d)?;
            let v = to_json(&r.verdict);
            Report {
                text: format!(
                    "{note} vs smooth curves of degree {d}: {}\ngenus {} (expected {}), m = {} (expected {}), alpha = {} (expected {})\n",
                    v.as_str().unwrap_or("?"),
                    r.genus,
                    r.expected_genus,
                    r.m,
                    r.expected_m,
                    r.alpha,
                    r.expected_alpha
                ),
                json: to_json(&r),
                graphs: input_graph(sys),
            }
        }
    };
    Ok(report)
}

