use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use thl_core::forest::ElementJson;
use thl_core::gram::{self, SpectrumReport, DEFAULT_FAMILY_CAP};
use thl_core::homfly::{evaluate, EvalParams, HomflyEngine, Normalization};
use thl_core::signs::{self, enumerate_oriented};
use thl_core::tangle::{build_link, build_unoriented_link, PdJson};
use thl_core::{Convention, Error, GeneratorWord, GroupElement, LinkDiagram, Tangle, Tree};

#[derive(Parser)]
#[command(
    name = "thl",
    version,
    about = "Thompson group links and HOMFLYPT positivity checks"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Root of unity order: s = e^{iπ/r}
    #[arg(long, global = true)]
    r: Option<u32>,
    /// Level: a = s^{-2k}
    #[arg(long, global = true)]
    k: Option<u32>,
    /// PSD tolerance on the minimum eigenvalue
    #[arg(long, global = true, default_value_t = gram::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Standard)]
    convention: ConventionArg,
    #[arg(long, global = true, value_enum, default_value_t = NormArg::Std)]
    normalization: NormArg,
    /// Omit the timestamp field from reports
    #[arg(long, global = true)]
    deterministic: bool,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Standard,
    Mirror,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Std,
    Loop,
}

#[derive(Subcommand)]
enum Cmd {
    /// Element operations
    Element {
        #[command(subcommand)]
        verb: ElementVerb,
    },
    /// PD JSON of the link of an element
    Link {
        /// Word, tree pair "PLUS,MINUS", or element JSON
        element: String,
        /// Use the construction without orientations (any element of F)
        #[arg(long)]
        unoriented: bool,
        /// Also render the tree pair with its crossings as SVG
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// HOMFLYPT polynomial of an element's link or of a PD JSON file
    Homfly {
        /// Word, tree pair, or element JSON
        element: Option<String>,
        /// Closed diagram in PD JSON form
        #[arg(long, conflicts_with = "element")]
        pd: Option<PathBuf>,
    },
    /// Gram matrix spectra
    Gram(GramArgs),
    /// Reduced oriented elements up to a leaf count
    Enumerate {
        #[arg(long)]
        leaves: usize,
    },
}

#[derive(Subcommand)]
enum ElementVerb {
    Parse { element: String },
    Reduce { element: String },
    Multiply { a: String, b: String },
    Invert { element: String },
    OrientCheck { element: String },
}

#[derive(Args)]
struct GramArgs {
    /// JSON list of elements (or of PD tangles with --tangles)
    #[arg(long)]
    family: Option<PathBuf>,
    /// Use all oriented elements with at most this many leaves
    #[arg(long, conflicts_with = "family")]
    leaves: Option<usize>,
    /// Draw this many random sub-families instead of one Gram matrix
    #[arg(long)]
    samples: Option<usize>,
    /// Sub-family size for --samples
    #[arg(long, default_value_t = 8)]
    size: usize,
    /// Parameter list "r,k;r,k;…"
    #[arg(long)]
    sweep: Option<String>,
    /// Family file holds PD tangles with a common boundary
    #[arg(long)]
    tangles: bool,
    #[arg(long, default_value_t = DEFAULT_FAMILY_CAP)]
    cap: usize,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::InvalidSigns(_)
            | Error::Json(_)
            | Error::Guard(..)
            | Error::InvalidParams(_)
            | Error::DegenerateDelta { .. }
            | Error::BoundaryMismatch { .. }
            | Error::OpenBoundary(_) => 2,
            Error::NotOriented(_) | Error::Unoriented => 3,
            _ => 5,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 5,
            msg: e.to_string(),
        }
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn conv(c: &Common) -> Convention {
    match c.convention {
        ConventionArg::Standard => Convention::Standard,
        ConventionArg::Mirror => Convention::Mirror,
    }
}

fn norm(c: &Common) -> Normalization {
    match c.normalization {
        NormArg::Std => Normalization::Std,
        NormArg::Loop => Normalization::Loop,
    }
}

fn params(c: &Common) -> Out<Option<EvalParams>> {
    match (c.r, c.k) {
        (None, None) => Ok(None),
        (Some(r), Some(k)) => Ok(Some(EvalParams::new(r, k)?)),
        _ => Err(Error::InvalidParams("--r and --k go together".into()).into()),
    }
}

/// Word, `PLUS,MINUS` tree pair, element JSON, or `@path` to any of these.
fn parse_element(s: &str) -> Out<GroupElement> {
    let text = match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)?,
        None => s.to_string(),
    };
    let t = text.trim();
    if t.starts_with('{') {
        let j: ElementJson = serde_json::from_str(t)?;
        return Ok(GroupElement::try_from(&j)?);
    }
    if let Some((p, m)) = split_pair(t) {
        let plus: Tree = p.trim().parse()?;
        let minus: Tree = m.trim().parse().map_err(|e| match e {
            Error::Parse { pos, msg } => Error::Parse {
                pos: pos + p.len() + 1,
                msg,
            },
            e => e,
        })?;
        return Ok(GroupElement::new(plus, minus)?);
    }
    let w: GeneratorWord = t.parse()?;
    Ok(w.eval())
}

/// `PLUS,MINUS` or the printed form `(PLUS, MINUS)`.
fn split_pair(t: &str) -> Option<(&str, &str)> {
    if !(t.starts_with('(') || t.starts_with('l')) {
        return None;
    }
    let at_depth = |s: &str, want: i32| {
        let mut depth = 0;
        s.char_indices().find_map(|(i, ch)| {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == want => return Some(i),
                _ => {}
            }
            None
        })
    };
    if let Some(i) = at_depth(t, 0) {
        return Some((&t[..i], &t[i + 1..]));
    }
    let inner = t.strip_prefix('(')?.strip_suffix(')')?;
    at_depth(inner, 0).map(|i| (&inner[..i], &inner[i + 1..]))
}

fn element_value(g: &GroupElement) -> Value {
    let obj = signs::oriented_object(g).map(|s| s.to_string());
    json!({
        "element": ElementJson::from(g),
        "leaves": g.leaf_count(),
        "reduced": g.is_reduced(),
        "oriented": obj.is_some(),
        "object": obj,
    })
}

fn emit(c: &Common, v: &Value) -> Out<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match &c.out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn stamp(c: &Common, mut v: Value) -> Value {
    if !c.deterministic {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        if let Value::Object(m) = &mut v {
            m.insert("timestamp".into(), json!(secs));
        }
    }
    v
}

fn complex(z: num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

fn run(cli: &Cli) -> Out<()> {
    let c = &cli.common;
    match &cli.cmd {
        Cmd::Element { verb } => {
            let v = match verb {
                ElementVerb::Parse { element } => element_value(&parse_element(element)?),
                ElementVerb::Reduce { element } => element_value(&parse_element(element)?.reduce()),
                ElementVerb::Multiply { a, b } => {
                    element_value(&parse_element(a)?.multiply(&parse_element(b)?))
                }
                ElementVerb::Invert { element } => element_value(&parse_element(element)?.invert()),
                ElementVerb::OrientCheck { element } => {
                    let g = parse_element(element)?;
                    json!({
                        "element": ElementJson::from(&g),
                        "oriented": signs::is_oriented(&g),
                        "plus_signs": signs::format_signs(&signs::propagate_tree(g.plus(), thl_core::Sign::Plus)),
                        "minus_signs": signs::format_signs(&signs::propagate_tree(g.minus(), thl_core::Sign::Plus)),
                    })
                }
            };
            emit(c, &v)
        }
        Cmd::Link {
            element,
            unoriented,
            svg,
        } => {
            let g = parse_element(element)?;
            let d = if *unoriented {
                build_unoriented_link(&g, conv(c))?
            } else {
                build_link(&g, conv(c))?
            };
            if let Some(path) = svg {
                fs::write(path, render_svg(&g))?;
            }
            emit(c, &serde_json::to_value(d.tangle().to_pd())?)
        }
        Cmd::Homfly { element, pd } => {
            let engine = HomflyEngine::from_env()?;
            let p = params(c)?;
            let (poly, g) = match (element, pd) {
                (Some(e), None) => {
                    let g = parse_element(e)?;
                    (engine.homfly(&build_link(&g, conv(c))?)?, Some(g))
                }
                (None, Some(path)) => {
                    let pd: PdJson = serde_json::from_str(&fs::read_to_string(path)?)?;
                    let d = LinkDiagram::from_tangle(Tangle::from_pd(&pd)?)?;
                    (engine.homfly(&d)?, None)
                }
                _ => return Err(Error::InvalidParams("give an element or --pd".into()).into()),
            };
            let poly = norm(c).apply(poly);
            let mut v = json!({ "poly": poly.to_json(), "text": poly.to_string() });
            if let Some(p) = p {
                v["params"] = json!(p);
                v["value"] = complex(evaluate(&poly, p));
                if let Some(g) = g {
                    v["phi"] = complex(engine.phi(&g, p, conv(c))?);
                }
            }
            engine.save()?;
            emit(c, &v)
        }
        Cmd::Gram(args) => run_gram(c, args),
        Cmd::Enumerate { leaves } => {
            let list: Vec<ElementJson> = enumerate_oriented(*leaves)?
                .iter()
                .map(ElementJson::from)
                .collect();
            emit(c, &serde_json::to_value(list)?)
        }
    }
}

fn parse_sweep(s: &str) -> Out<Vec<EvalParams>> {
    s.split(';')
        .filter(|x| !x.trim().is_empty())
        .map(|pair| {
            let bad = || Error::Parse {
                pos: 0,
                msg: format!("expected 'r,k', found '{pair}'"),
            };
            let (r, k) = pair.split_once(',').ok_or_else(bad)?;
            let r: u32 = r.trim().parse().map_err(|_| bad())?;
            let k: u32 = k.trim().parse().map_err(|_| bad())?;
            Ok(EvalParams::new(r, k)?)
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FamilyEntry {
    Json(ElementJson),
    Text(String),
}

fn run_gram(c: &Common, args: &GramArgs) -> Out<()> {
    let engine = HomflyEngine::from_env()?;
    let plist = match (&args.sweep, params(c)?) {
        (Some(s), _) => parse_sweep(s)?,
        (None, Some(p)) => vec![p],
        (None, None) => vec![EvalParams::new(5, 1)?],
    };
    let reports: Vec<SpectrumReport> = if args.tangles {
        let path = args
            .family
            .as_ref()
            .ok_or_else(|| Error::InvalidParams("--tangles needs --family".into()))?;
        let pds: Vec<PdJson> = serde_json::from_str(&fs::read_to_string(path)?)?;
        if pds.len() > args.cap {
            return Err(Error::InvalidParams(format!(
                "family of {} exceeds the cap of {}",
                pds.len(),
                args.cap
            ))
            .into());
        }
        let ts: Vec<Tangle> = pds.iter().map(Tangle::from_pd).collect::<Result<_, _>>()?;
        plist
            .iter()
            .map(|&p| gram::tangle_gram(&engine, &ts, p)?.spectrum(c.tol))
            .collect::<Result<_, _>>()?
    } else {
        let family: Vec<GroupElement> = match (&args.family, args.leaves) {
            (Some(path), _) => {
                let entries: Vec<FamilyEntry> = serde_json::from_str(&fs::read_to_string(path)?)?;
                entries
                    .iter()
                    .map(|e| match e {
                        FamilyEntry::Json(j) => Ok(GroupElement::try_from(j)?),
                        FamilyEntry::Text(s) => parse_element(s),
                    })
                    .collect::<Out<_>>()?
            }
            (None, Some(n)) => enumerate_oriented(n)?,
            (None, None) => {
                return Err(Error::InvalidParams("give --family or --leaves".into()).into())
            }
        };
        let families: Vec<Vec<GroupElement>> = match args.samples {
            None => vec![family],
            Some(count) => {
                let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
                (0..count)
                    .map(|_| {
                        let size = rng.gen_range(1..=args.size.min(family.len()).max(1));
                        family.choose_multiple(&mut rng, size).cloned().collect()
                    })
                    .collect()
            }
        };
        let mut out = Vec::new();
        for f in &families {
            for &p in &plist {
                let g = gram::element_gram_with_cap(&engine, f, p, conv(c), args.cap)?;
                out.push(g.spectrum(c.tol)?);
            }
        }
        out
    };
    engine.save()?;
    let violated = reports.iter().any(SpectrumReport::violates_guarantee);
    let v = if reports.len() == 1 && args.sweep.is_none() {
        serde_json::to_value(&reports[0])?
    } else {
        let worst = reports
            .iter()
            .map(|r| r.min_eig)
            .fold(f64::INFINITY, f64::min);
        json!({
            "reports": reports,
            "all_psd": reports.iter().all(SpectrumReport::is_psd),
            "min_eig": worst,
        })
    };
    emit(c, &stamp(c, v))?;
    if violated {
        return Err(Failure {
            code: 4,
            msg: "indefinite Gram matrix in the guaranteed range".into(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// SVG

fn layout(
    t: &Tree,
    first_leaf: &mut usize,
    nodes: &mut Vec<(f64, usize)>,
    edges: &mut Vec<(usize, usize)>,
) -> usize {
    match t {
        Tree::Leaf => {
            nodes.push((*first_leaf as f64, 0));
            *first_leaf += 1;
            nodes.len() - 1
        }
        Tree::Caret(l, r) => {
            let a = layout(l, first_leaf, nodes, edges);
            let b = layout(r, first_leaf, nodes, edges);
            let h = nodes[a].1.max(nodes[b].1) + 1;
            nodes.push(((nodes[a].0 + nodes[b].0) / 2.0, h));
            let me = nodes.len() - 1;
            edges.push((me, a));
            edges.push((me, b));
            me
        }
    }
}

/// Plus tree above the leaf line, minus tree reflected below; every caret
/// vertex is drawn as a crossing marker.
fn render_svg(g: &GroupElement) -> String {
    let step = 40.0;
    let n = g.leaf_count();
    let mut body = String::new();
    let mut height = 0usize;
    for (tree, dir) in [(g.plus(), -1.0), (g.minus(), 1.0)] {
        let (mut nodes, mut edges) = (Vec::new(), Vec::new());
        let mut leaf = 0;
        layout(tree, &mut leaf, &mut nodes, &mut edges);
        height = height.max(nodes.iter().map(|x| x.1).max().unwrap_or(0));
        let pos = |i: usize| (20.0 + nodes[i].0 * step, dir * nodes[i].1 as f64 * step);
        for &(a, b) in &edges {
            let (x1, y1) = pos(a);
            let (x2, y2) = pos(b);
            body += &format!(
                "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"black\"/>\n"
            );
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.1 > 0 {
                let (x, y) = pos(i);
                body += &format!(
                    "<circle cx=\"{x}\" cy=\"{y}\" r=\"5\" fill=\"white\" stroke=\"crimson\"/>\n"
                );
            }
        }
    }
    let w = 40.0 + (n.max(1) - 1) as f64 * step;
    let h = (height as f64 + 0.5) * step;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 {} {w} {}\">\n\
         <line x1=\"0\" y1=\"0\" x2=\"{w}\" y2=\"0\" stroke=\"#bbb\" stroke-dasharray=\"4\"/>\n{body}</svg>\n",
        -h,
        2.0 * h
    )
}
