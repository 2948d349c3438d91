mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polywedge::char_map::{singularity_order, validate_rchar};
use polywedge::constructions::{
    blowdown_at, blowup, extend_char, k_wedge, k_wedge_char, restrict_char, wedge_char_on_product, ConstructionError,
    WedgeParams,
};
use polywedge::retraction::{find_retraction, from_order, singularity_trace};
use polywedge::simplicial::{dual_of_polytope, simplicial_k_wedge, wedge_vertex_vectors, WedgeVariant};
use polywedge::torsion::{
    all_prime_scan, blowdown_torsion_check, check_plain, kwedge_torsion_check, plain_prime_scan, replay,
    PipelineOptions,
};
use polywedge::{CharMap, IntVector, Polytope, PolytopeFile, SearchOptions, SimplicialComplex, TorsionCertificate};
use serde_json::{json, Value};

use render::Table;

#[derive(Parser)]
#[command(name = "polywedge", version, about = "Constructions and torsion certificates for simple polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Input file.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write the resulting object here.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Search {
    /// Vertices to take last, e.g. "v3,v7".
    #[arg(long)]
    defer: Option<String>,
    /// Deferred vertices only after all others are gone.
    #[arg(long)]
    strict: bool,
    /// Vertices to take first, in order.
    #[arg(long)]
    start: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the polytope and, if present, the characteristic map.
    Validate(Common),
    /// Face counts and vertex orders.
    Info(Common),
    /// P × Δᵏ; with --facet and --a the map is extended as well.
    Product {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        facet: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
    },
    /// Polytopal k-wedge at a facet.
    Wedge {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        facet: String,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        a: i64,
    },
    /// Truncate a face given by facet names.
    Blowup {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        face: String,
        /// Vector on the new facet, e.g. "2,5,2"; required with a map.
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
    },
    /// Collapse a facet onto a base face.
    Blowdown {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        facet: String,
        #[arg(long)]
        face: String,
    },
    /// Search for a retraction sequence.
    Retract {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
    },
    /// Singularity orders along a retraction (searched unless --order is given).
    Trace {
        #[command(flatten)]
        common: Common,
        /// Full vertex order, e.g. "v0,v1,...".
        #[arg(long)]
        order: Option<String>,
        #[command(flatten)]
        search: Search,
    },
    /// Torsion certificate for one prime, or replay of a saved certificate.
    Torsion {
        #[command(flatten)]
        common: Common,
        #[arg(long, required_unless_present = "replay")]
        prime: Option<u64>,
        #[arg(long, conflicts_with = "wedge")]
        blowdown: bool,
        /// 2-wedge at --facet with parameter --a.
        #[arg(long)]
        wedge: bool,
        #[arg(long)]
        facet: Option<String>,
        #[arg(long)]
        face: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        /// Treat the input as a certificate and check it.
        #[arg(long)]
        replay: bool,
        #[command(flatten)]
        search: Search,
    },
    /// Every relevant prime, plain or through a blowdown.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        blowdown: bool,
        #[arg(long)]
        facet: Option<String>,
        #[arg(long)]
        face: Option<String>,
    },
    /// Dual simplicial complex.
    Dualize(Common),
    /// Simplicial k-wedge of a complex, or of a polytope's dual.
    Swedge {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vertex: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// λ_v² on the 2-wedge, from the polytope's map.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        /// Join single new vertices with the deletion, as the formula is written.
        #[arg(long)]
        literal: bool,
    },
}

/// Input and usage problems exit 2; failed checks exit 1.
enum Failure {
    Input(anyhow::Error),
    Check(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

struct Report {
    text: String,
    json: Value,
    pass: bool,
    output: Option<String>,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, pass: true, output: None }
    }

    fn with_output(mut self, body: String) -> Self {
        self.output = Some(body);
        self
    }
}

type Outcome = Result<Report, Failure>;

fn check_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Check(e.into())
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> anyhow::Result<PolytopeFile> {
    PolytopeFile::parse(&read(path)?).with_context(|| format!("in {}", path.display()))
}

// A structurally valid polytope plus its map, which is checked.
fn load_pair(path: &Path) -> Result<(Polytope, Option<CharMap>), Failure> {
    let file = load(path)?;
    let p = file.polytope().map_err(check_err)?;
    let l = file.char_map(&p)?;
    if let Some(l) = &l {
        validate_rchar(&p, l).map_err(check_err)?;
    }
    Ok((p, l))
}

fn require_char(l: Option<CharMap>) -> Result<CharMap, Failure> {
    l.ok_or_else(|| Failure::Input(anyhow!("the input has no \"char\" map")))
}

fn names(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn vertex_list(p: &Polytope, list: &str) -> anyhow::Result<Vec<usize>> {
    names(list)
        .iter()
        .map(|s| {
            let v: usize = s.strip_prefix('v').unwrap_or(s).parse().with_context(|| format!("bad vertex {s:?}"))?;
            if v >= p.num_vertices() {
                bail!("vertex {s} does not exist");
            }
            Ok(v)
        })
        .collect()
}

fn int_vector(s: &str) -> anyhow::Result<IntVector> {
    let xs = names(s).iter().map(|x| x.parse::<i64>()).collect::<Result<Vec<_>, _>>()?;
    Ok(IntVector::from_i64s(&xs))
}

fn search_options(p: &Polytope, s: &Search) -> anyhow::Result<SearchOptions> {
    Ok(SearchOptions {
        prefix: s.start.as_deref().map(|l| vertex_list(p, l)).transpose()?.unwrap_or_default(),
        defer: s.defer.as_deref().map(|l| vertex_list(p, l)).transpose()?.unwrap_or_default().into_iter().collect(),
        strict_defer: s.strict,
        seed: s.seed,
    })
}

fn need<'a>(opt: &'a Option<String>, flag: &str) -> anyhow::Result<&'a str> {
    opt.as_deref().ok_or_else(|| anyhow!("--{flag} is required here"))
}

fn polytope_report(what: &str, p: &Polytope, l: Option<&CharMap>) -> Report {
    let file = PolytopeFile::new(p, l);
    let text = format!(
        "{what}: dim {}, {} facets, {} vertices\nfacets: {}\n",
        p.dim(),
        p.num_facets(),
        p.num_vertices(),
        p.facet_names().join(" ")
    );
    let body = file.to_json();
    Report::ok(text, serde_json::to_value(&file).expect("serializes")).with_output(body)
}

fn validate(c: &Common) -> Outcome {
    let file = load(&c.input)?;
    let p = match file.polytope() {
        Ok(p) => p,
        Err(e) => {
            return Ok(Report {
                text: format!("invalid polytope: {e}\n"),
                json: json!({"valid": false, "error": e.to_string()}),
                pass: false,
                output: None,
            })
        }
    };
    let char_result = file.char_map(&p)?.map(|l| validate_rchar(&p, &l));
    let (pass, text, err) = match &char_result {
        Some(Err(e)) => (false, format!("polytope valid; characteristic map invalid: {e}\n"), Some(e.to_string())),
        Some(Ok(())) => (true, "polytope valid; characteristic map valid\n".into(), None),
        None => (true, "polytope valid\n".into(), None),
    };
    Ok(Report { text, json: json!({"valid": pass, "error": err}), pass, output: None })
}

fn info(c: &Common) -> Outcome {
    let (p, l) = load_pair(&c.input)?;
    let counts = p.face_counts();
    let mut t = Table::new(&["vertex", "facets", "order"]);
    let mut orders = Vec::new();
    for v in 0..p.num_vertices() {
        let o = l.as_ref().map(|l| singularity_order(&p, l, v)).transpose()?;
        orders.push(o);
        t.row([format!("v{v}"), p.facet_names_of(p.vertex_facets(v)).join(","), o.map_or("-".into(), |o| o.to_string())]);
    }
    let text = format!(
        "dim {}\nf-vector {:?}\nfacets {}\n{}",
        p.dim(),
        counts.counts,
        p.facet_names().join(" "),
        t.render()
    );
    let json = json!({
        "dim": p.dim(),
        "f_vector": counts.counts,
        "facets": p.facet_names(),
        "vertices": (0..p.num_vertices()).map(|v| p.facet_names_of(p.vertex_facets(v))).collect::<Vec<_>>(),
        "orders": orders,
    });
    Ok(Report::ok(text, json))
}

fn product(c: &Common, k: usize, facet: &Option<String>, a: Option<i64>) -> Outcome {
    let (p, l) = load_pair(&c.input)?;
    let q = p.product_with_simplex(k);
    let lq = match (l, facet, a) {
        (Some(l), Some(f), Some(a)) => {
            let f = p.facet_index(f)?;
            Some(wedge_char_on_product(&p, &l, f, WedgeParams::new(k, a)?).map_err(check_err)?)
        }
        (_, None, None) => None,
        _ => return Err(Failure::Input(anyhow!("extending the map needs a map, --facet and --a"))),
    };
    Ok(polytope_report("product", &q, lq.as_ref()))
}

fn wedge(c: &Common, facet: &str, k: usize, a: i64) -> Outcome {
    let (p, l) = load_pair(&c.input)?;
    let f = p.facet_index(facet)?;
    let (wr, lw) = match l {
        Some(l) => {
            let params = WedgeParams::new(k, a)?;
            let (wr, lw) = k_wedge_char(&p, &l, f, params).map_err(check_err)?;
            (wr, Some(lw))
        }
        None => (k_wedge(&p, f, k)?, None),
    };
    Ok(polytope_report("wedge", &wr.polytope, lw.as_ref()))
}

fn blowup_cmd(c: &Common, face: &str, vector: &Option<String>) -> Outcome {
    let (p, l) = load_pair(&c.input)?;
    let face = p.face_from_names(&names(face))?;
    let bu = blowup(&p, &face)?;
    let lb = match (l, vector) {
        (Some(l), Some(v)) => Some(extend_char(&bu, &l, int_vector(v)?).map_err(check_err)?),
        (Some(_), None) => return Err(Failure::Input(anyhow!("--vector is required when the input has a map"))),
        (None, _) => None,
    };
    Ok(polytope_report("blowup", &bu.polytope, lb.as_ref()))
}

fn blowdown_cmd(c: &Common, facet: &str, face: &str) -> Outcome {
    let (p, l) = load_pair(&c.input)?;
    let big = p.facet_index(facet)?;
    let base = p.face_from_names(&names(face))?;
    let bd = match blowdown_at(&p, big, &base) {
        Ok(bd) => bd,
        Err(e @ (ConstructionError::NotProductType(_) | ConstructionError::InvalidOutput(_))) => {
            return Err(check_err(e))
        }
        Err(e) => return Err(e.into()),
    };
    let lq = l.map(|l| restrict_char(&p, &l, &bd)).transpose().map_err(check_err)?.map(|r| r.char_map);
    let q = &bd.polytope;
    let mut t = Table::new(&["facet", "", "image"]);
    let mut map = serde_json::Map::new();
    for (j, img) in bd.facet_map.iter().enumerate() {
        let image = img.map(|i| q.facet_name(i).to_string());
        t.row([p.facet_name(j).to_string(), "->".into(), image.clone().unwrap_or_else(|| "(collapsed)".into())]);
        map.insert(p.facet_name(j).to_string(), json!(image));
    }
    let file = PolytopeFile::new(q, lq.as_ref());
    let text = format!(
        "blowdown: {} facets, {} vertices; distinguished facet {}\n{}",
        q.num_facets(),
        q.num_vertices(),
        p.facet_name(bd.structure.distinguished),
        t.render()
    );
    let json = json!({"facet_map": map, "vertex_map": bd.vertex_map, "polytope": file});
    Ok(Report::ok(text, json).with_output(file.to_json()))
}

fn trace_report(p: &Polytope, l: Option<&CharMap>, order: &[usize]) -> Outcome {
    let seq = from_order(p, order).map_err(check_err)?;
    let trace = l.map(|l| singularity_trace(p, l, &seq)).transpose()?;
    let mut t = Table::new(&["step", "vertex", "dim", "face", "order"]);
    for (i, s) in seq.steps().iter().enumerate() {
        t.row([
            (i + 1).to_string(),
            format!("v{}", s.vertex),
            s.max_face.dim().to_string(),
            if s.max_face.support().is_empty() { "Q".into() } else { p.facet_names_of(s.max_face.support()).join(",") },
            trace.as_ref().map_or("-".into(), |t| t[i].to_string()),
        ]);
    }
    let json = json!({"order": order, "sequence": seq.record(p), "trace": trace});
    Ok(Report::ok(t.render(), json))
}

fn retract(c: &Common, s: &Search, order: Option<&str>) -> Outcome {
    let (p, l) = load_pair(&c.input)?;
    let order = match order {
        Some(o) => vertex_list(&p, o)?,
        None => match find_retraction(&p, &search_options(&p, s)?) {
            Some(seq) => seq.order(),
            None => {
                return Ok(Report {
                    text: "no retraction sequence under these options\n".into(),
                    json: json!({"order": null}),
                    pass: false,
                    output: None,
                })
            }
        },
    };
    trace_report(&p, l.as_ref(), &order)
}

fn certificate_report(cert: TorsionCertificate) -> Outcome {
    let text = render::certificate(&cert);
    let body = cert.to_json();
    Ok(Report { text, json: serde_json::to_value(&cert)?, pass: cert.certified(), output: Some(body) })
}

#[allow(clippy::too_many_arguments)]
fn torsion(
    c: &Common,
    prime: Option<u64>,
    blowdown: bool,
    wedge: bool,
    facet: &Option<String>,
    face: &Option<String>,
    a: Option<i64>,
    do_replay: bool,
    s: &Search,
) -> Outcome {
    if do_replay {
        let cert: TorsionCertificate = serde_json::from_str(&read(&c.input)?)?;
        return Ok(match replay(&cert) {
            Ok(()) => Report::ok(
                format!("certificate replays; conclusion {:?} for p = {}\n", cert.conclusion, cert.prime),
                json!({"replayed": true}),
            ),
            Err(e) => Report {
                text: format!("replay failed: {e}\n"),
                json: json!({"replayed": false, "error": e.to_string()}),
                pass: false,
                output: None,
            },
        });
    }
    let prime = prime.expect("clap requires it");
    let (p, l) = load_pair(&c.input)?;
    let l = require_char(l)?;
    let opts = PipelineOptions { search: search_options(&p, s)?, ..Default::default() };
    let cert = if blowdown {
        let big = p.facet_index(need(facet, "facet")?)?;
        let base = p.face_from_names(&names(need(face, "face")?))?;
        blowdown_torsion_check(&p, &l, big, &base, prime, &opts)
    } else if wedge {
        let f = p.facet_index(need(facet, "facet")?)?;
        let a = a.ok_or_else(|| anyhow!("--a is required with --wedge"))?;
        kwedge_torsion_check(&p, &l, f, a, prime, &opts)
    } else {
        check_plain(&p, &l, prime, &opts)
    };
    certificate_report(cert.map_err(|e| match e {
        polywedge::TorsionError::NotPrime(_) => Failure::Input(e.into()),
        e => check_err(e),
    })?)
}

fn scan(c: &Common, blowdown: bool, facet: &Option<String>, face: &Option<String>) -> Outcome {
    let (p, l) = load_pair(&c.input)?;
    let l = require_char(l)?;
    let opts = PipelineOptions::default();
    let result = if blowdown {
        let big = p.facet_index(need(facet, "facet")?)?;
        let base = p.face_from_names(&names(need(face, "face")?))?;
        all_prime_scan(&p, &l, big, &base, &opts)
    } else {
        plain_prime_scan(&p, &l, &opts)
    }
    .map_err(check_err)?;
    let mut t = Table::new(&["prime", "conclusion", "failed at"]);
    for cert in &result.certificates {
        t.row([
            cert.prime.to_string(),
            format!("{:?}", cert.conclusion),
            cert.failed_at.map_or("-".into(), |s| format!("{s:?}")),
        ]);
    }
    let text = format!(
        "relevant primes: {:?}\n{}torsion free: {}\nwhy: {}\n",
        result.relevant_primes,
        t.render(),
        if result.torsion_free { "yes" } else { "not established" },
        result.justification
    );
    let body = serde_json::to_string_pretty(&result)?;
    Ok(Report { text, json: serde_json::to_value(&result)?, pass: result.torsion_free, output: Some(body) })
}

fn complex_report(what: &str, k: &SimplicialComplex, extra: Option<Value>) -> Report {
    let mut json = serde_json::to_value(k).expect("serializes");
    if let Some(x) = extra {
        json["vectors"] = x;
    }
    let mut text = format!(
        "{what}: {} vertices, {} maximal simplices, dim {}, {}\n",
        k.num_vertices(),
        k.maximal().len(),
        k.dim(),
        if k.is_pure() { "pure" } else { "not pure" }
    );
    for s in k.maximal() {
        text.push_str(&format!("  {{{}}}\n", k.names_of(s).join(",")));
    }
    let body = serde_json::to_string_pretty(&json).expect("serializes");
    Report::ok(text, json).with_output(body)
}

fn dualize(c: &Common) -> Outcome {
    let (p, _) = load_pair(&c.input)?;
    Ok(complex_report("dual", &dual_of_polytope(&p), None))
}

fn swedge(c: &Common, vertex: &str, k: usize, a: Option<i64>, literal: bool) -> Outcome {
    let text = read(&c.input)?;
    let variant = if literal { WedgeVariant::Literal } else { WedgeVariant::Pure };
    if let Ok(cx) = SimplicialComplex::parse(&text) {
        if a.is_some() {
            return Err(Failure::Input(anyhow!("--a needs a polytope file with a map")));
        }
        let v = cx.vertex_index(vertex)?;
        return Ok(complex_report("simplicial wedge", &simplicial_k_wedge(&cx, v, k, variant)?, None));
    }
    let (p, l) = load_pair(&c.input)?;
    let cx = dual_of_polytope(&p);
    let v = cx.vertex_index(vertex)?;
    match a {
        None => Ok(complex_report("simplicial wedge", &simplicial_k_wedge(&cx, v, k, variant)?, None)),
        Some(a) => {
            if k != 2 || literal {
                return Err(Failure::Input(anyhow!("vectors are defined on the pure 2-wedge only")));
            }
            let l = require_char(l)?;
            let (w, lw) = wedge_vertex_vectors(&cx, &l, v, a).map_err(check_err)?;
            let named: serde_json::Map<String, Value> = w
                .vertices()
                .iter()
                .zip(lw.vectors())
                .map(|(n, x)| (n.clone(), serde_json::to_value(x).expect("serializes")))
                .collect();
            Ok(complex_report("simplicial 2-wedge", &w, Some(Value::Object(named))))
        }
    }
}

fn run(cli: &Cli) -> (Outcome, &Common) {
    match &cli.command {
        Command::Validate(c) => (validate(c), c),
        Command::Info(c) => (info(c), c),
        Command::Product { common, k, facet, a } => (product(common, *k, facet, *a), common),
        Command::Wedge { common, facet, k, a } => (wedge(common, facet, *k, *a), common),
        Command::Blowup { common, face, vector } => (blowup_cmd(common, face, vector), common),
        Command::Blowdown { common, facet, face } => (blowdown_cmd(common, facet, face), common),
        Command::Retract { common, search } => (retract(common, search, None), common),
        Command::Trace { common, order, search } => (retract(common, search, order.as_deref()), common),
        Command::Torsion { common, prime, blowdown, wedge, facet, face, a, replay, search } => {
            (torsion(common, *prime, *blowdown, *wedge, facet, face, *a, *replay, search), common)
        }
        Command::Scan { common, blowdown, facet, face } => (scan(common, *blowdown, facet, face), common),
        Command::Dualize(c) => (dualize(c), c),
        Command::Swedge { common, vertex, k, a, literal } => (swedge(common, vertex, *k, *a, *literal), common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, common) = run(&cli);
    match outcome {
        Ok(report) => {
            if let (Some(path), Some(body)) = (&common.output, &report.output) {
                if let Err(e) = fs::write(path, body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            match common.format {
                Format::Text => print!("{}", report.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("serializes")),
            }
            ExitCode::from(if report.pass { 0 } else { 1 })
        }
        Err(Failure::Check(e)) => {
            match common.format {
                Format::Text => println!("check failed: {e:#}"),
                Format::Json => println!("{}", json!({"pass": false, "error": format!("{e:#}")})),
            }
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
