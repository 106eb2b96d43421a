//! The `hopset` command-line tool.
//!
//! Every flag may also be given in a `key=value` file passed with
//! `--config`; keys are the long flag names without dashes. Flags on the
//! command line override the file. Exit codes: 0 success, 1 internal
//! invariant violated, 2 bad configuration or input, 3 hopset built for a
//! different graph.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builder::{build_hopset_with, BuildOptions, Hopset, HopsetParams};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::{load_graph, write_graph, Format};
use crate::overlay::Link;
use crate::query::HopsetIndex;
use crate::reduction::build_reduced_hopset;
use crate::schedule::EpsilonMode;
use crate::spt::{extract_spt, validate_tree, PathTree};
use crate::sssp::{bounded_bellman_ford, dijkstra};
use crate::synth::{generate, Family, GenSpec};
use crate::validate::{validate_hopset, PairSelection, BUCKETS};

#[derive(Debug, Parser)]
#[command(name = "hopset", version, about = "Deterministic hopsets and approximate shortest paths")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads (falls back to HOPSET_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// key=value file mirroring the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a hopset and write it as JSON.
    Build(BuildArgs),
    /// Hop-limited distances from one or more sources.
    Query(QueryArgs),
    /// Approximate shortest-path tree over the graph's own edges.
    Spt(SptArgs),
    /// Compare a hopset against exact distances.
    Validate(ValidateArgs),
    /// Structural checks of a tree written by `spt`.
    ValidateTree(ValidateTreeArgs),
    /// Timing and relaxation counts against Dijkstra and Bellman-Ford.
    Bench(BenchArgs),
    /// Write a seeded synthetic graph.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to csv for `.csv` files and dimacs otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph> {
        let format = self.format.unwrap_or_else(|| infer_format(&self.input));
        load_graph(&self.input, format)
    }
}

fn infer_format(p: &Path) -> Format {
    match p.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Dimacs,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuildMode {
    /// Multi-scale hopset without memory paths.
    Direct,
    /// Weight-reduced hopset (always stores memory paths).
    Reduced,
    /// Multi-scale hopset with memory paths, needed by `spt`.
    PathReporting,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 4)]
    pub kappa: u32,
    #[arg(long, default_value_t = 0.25)]
    pub rho: f64,
    #[arg(long, value_enum, default_value_t = BuildMode::PathReporting)]
    pub mode: BuildMode,
    #[arg(long, value_enum, default_value_t = EpsilonMode::Rescaled)]
    pub epsilon_mode: EpsilonMode,
    /// Fail if a memory path would exceed this many hops.
    #[arg(long)]
    pub max_memory_hops: Option<usize>,
}

impl ParamArgs {
    fn params(&self) -> HopsetParams {
        HopsetParams::new(self.epsilon, self.kappa, self.rho, self.epsilon_mode)
    }

    fn build(&self, g: &Graph) -> Result<Hopset> {
        let opts = BuildOptions {
            memory: self.mode != BuildMode::Direct,
            max_memory_hops: self.max_memory_hops,
            audit: false,
        };
        match self.mode {
            BuildMode::Reduced => build_reduced_hopset(g, self.params(), &opts),
            _ => build_hopset_with(g, self.params(), &opts).map(|r| r.0),
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Hopset JSON output (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Metrics report (JSON) output; printed to stderr if absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub hopset: PathBuf,
    /// Source vertices (0-based), comma separated or repeated.
    #[arg(long, alias = "source", value_delimiter = ',', required = true)]
    pub sources: Vec<usize>,
    /// TSV output (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SptArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub hopset: PathBuf,
    #[arg(long)]
    pub source: usize,
    /// Tree output: JSON if the name ends in `.json`, TSV otherwise (stdout
    /// if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ValidateLevel {
    None,
    Sampled,
    All,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub hopset: PathBuf,
    #[arg(long, value_enum, default_value_t = ValidateLevel::Sampled)]
    pub validate: ValidateLevel,
    /// Pairs drawn by sampled validation.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest n for which all-pairs validation is allowed.
    #[arg(long, default_value_t = 1024)]
    pub max_all_pairs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateTreeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Tree written by `spt`.
    #[arg(long)]
    pub tree: PathBuf,
    /// Also bound the stretch by this factor against Dijkstra.
    #[arg(long)]
    pub stretch: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Use this hopset instead of building one.
    #[arg(long)]
    pub hopset: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Sources to time; random vertices drawn with `--seed` if not given.
    #[arg(long, value_delimiter = ',')]
    pub sources: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000.0)]
    pub max_weight: f64,
    #[arg(long, default_value_t = 4.0)]
    pub degree: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Dimacs)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Reads `key=value` lines into `--key value` arguments.
pub fn config_args(path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("expected key=value, got `{line}`"),
        })?;
        let k = k.trim().replace('_', "-");
        if k == "config" {
            return Err(Error::Config("config files cannot include other config files".into()));
        }
        out.push(OsString::from(format!("--{k}")));
        out.push(OsString::from(v.trim()));
    }
    Ok(out)
}

/// Splices config-file arguments right after the subcommand so that
/// explicit flags, which come later, win.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let extra = config_args(&path)?;
    // skip global flags (and their values) to find the subcommand
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if !s.starts_with('-') {
            break;
        }
        i += if s == "--threads" || s == "--config" { 2 } else { 1 };
    }
    let sub = (i + 1).min(args.len());
    let mut out = args[..sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[sub..]);
    Ok(out)
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    let threads = match threads {
        Some(t) => Some(t),
        None => match std::env::var("HOPSET_THREADS") {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("HOPSET_THREADS is not a number: `{v}`")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_hopset(path: &Path, g: &Graph) -> Result<Hopset> {
    let h = Hopset::from_json(&std::fs::read_to_string(path)?)?;
    h.check_graph(g)?;
    Ok(h)
}

#[derive(Debug, Serialize)]
struct LayerReport {
    family: Option<usize>,
    scale: i64,
    edges: usize,
    rounds: u128,
    work: u64,
}

#[derive(Debug, Serialize)]
struct BuildReport {
    n: usize,
    m: usize,
    mode: String,
    hopset_edges: usize,
    star_edges: usize,
    size_bound: f64,
    layers: Vec<LayerReport>,
    hopbound: u64,
    ell: Option<usize>,
    lambda: Option<i64>,
    k0: Option<i64>,
    stretch_bound: f64,
    rounds: u128,
    work: u64,
    warnings: Vec<String>,
    wall_time_s: f64,
}

fn build_report(g: &Graph, h: &Hopset, mode: BuildMode, wall: f64) -> BuildReport {
    let s = h.schedule.as_ref();
    let n = g.n() as f64;
    let kappa = h.params.kappa as f64;
    let lambda_ceil = h.params.aspect_ratio.map_or(0.0, |a| a.log2().ceil().max(1.0));
    let mut warnings = s.map(|s| s.warnings.clone()).unwrap_or_default();
    if let Some(r) = &h.reduced {
        for f in &r.families {
            for w in f.schedule.iter().flat_map(|s| &s.warnings) {
                if !warnings.contains(w) {
                    warnings.push(w.clone());
                }
            }
        }
    }
    BuildReport {
        n: g.n(),
        m: g.m(),
        mode: mode.to_possible_value().expect("named").get_name().to_string(),
        hopset_edges: h.edge_count(),
        star_edges: h.reduced.as_ref().map_or(0, |r| r.stars.len()),
        size_bound: match &h.reduced {
            None => lambda_ceil * n.powf(1.0 + 1.0 / kappa),
            Some(_) => n.powf(1.0 + 1.0 / kappa) * n.log2().max(1.0),
        },
        layers: h
            .layers
            .iter()
            .map(|l| LayerReport {
                family: l.family,
                scale: l.scale,
                edges: l.edges.len(),
                rounds: l.stats.rounds,
                work: l.stats.work,
            })
            .collect(),
        hopbound: h.hopbound,
        ell: s.map(|s| s.ell),
        lambda: s.map(|s| s.lambda),
        k0: s.map(|s| s.k0),
        stretch_bound: h.stretch_bound,
        rounds: h.rounds(),
        work: h.work(),
        warnings,
        wall_time_s: wall,
    }
}

fn cmd_build(a: &BuildArgs) -> Result<()> {
    let g = a.graph.load()?;
    let t = Instant::now();
    let h = a.params.build(&g)?;
    let wall = t.elapsed().as_secs_f64();
    emit(&a.out, &h.to_json()?)?;
    let report = serde_json::to_string_pretty(&build_report(&g, &h, a.params.mode, wall))?;
    match &a.report {
        Some(p) => std::fs::write(p, report + "\n")?,
        None => eprintln!("{report}"),
    }
    Ok(())
}

fn cmd_query(a: &QueryArgs) -> Result<()> {
    let g = a.graph.load()?;
    let h = load_hopset(&a.hopset, &g)?;
    let index = HopsetIndex::new(&g, &h)?;
    let rows = index.mssd(&a.sources)?;
    let mut out = String::from("source\tvertex\tdistance\thops\n");
    for (s, dv) in a.sources.iter().zip(&rows) {
        for v in 0..g.n() {
            let _ = writeln!(out, "{s}\t{v}\t{}\t{}", dv.dist[v], dv.hops[v]);
        }
    }
    emit(&a.out, &out)
}

fn tree_tsv(t: &PathTree) -> String {
    let mut out = format!("# root {}\nvertex\tparent\tdistance\n", t.root);
    for v in 0..t.n() {
        let p = t.parent[v].map_or("-".to_string(), |p| p.to_string());
        let _ = writeln!(out, "{v}\t{p}\t{}", t.dist[v]);
    }
    out
}

fn parse_tree(text: &str, g: &Graph) -> Result<PathTree> {
    if text.trim_start().starts_with('{') {
        #[derive(serde::Deserialize)]
        struct Wrapped {
            tree: PathTree,
        }
        return Ok(serde_json::from_str::<Wrapped>(text)?.tree);
    }
    let n = g.n();
    let mut root = None;
    let mut t = PathTree {
        root: 0,
        parent: vec![None; n],
        dist: vec![f64::INFINITY; n],
        link: vec![None; n],
    };
    let perr = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(r) = line.strip_prefix("# root") {
            root = Some(r.trim().parse().map_err(|_| perr(i + 1, "bad root"))?);
            continue;
        }
        if line.is_empty() || line.starts_with('#') || line.starts_with("vertex") {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(perr(i + 1, "expected vertex, parent, distance"));
        }
        let v: usize = f[0].parse().map_err(|_| perr(i + 1, "bad vertex"))?;
        if v >= n {
            return Err(perr(i + 1, "vertex out of range"));
        }
        t.dist[v] = f[2].parse().map_err(|_| perr(i + 1, "bad distance"))?;
        if f[1] != "-" {
            let p: usize = f[1].parse().map_err(|_| perr(i + 1, "bad parent"))?;
            let e = g
                .find_edge(p, v)
                .ok_or_else(|| Error::InvalidGraph(format!("tree edge ({p}, {v}) is not a graph edge")))?;
            t.parent[v] = Some(p);
            t.link[v] = Some(Link::Edge(e));
        }
    }
    t.root = root.ok_or_else(|| perr(1, "missing `# root` line"))?;
    Ok(t)
}

fn cmd_spt(a: &SptArgs) -> Result<()> {
    let g = a.graph.load()?;
    let h = load_hopset(&a.hopset, &g)?;
    if a.source >= g.n() {
        return Err(Error::Config(format!("source {} is not a vertex", a.source)));
    }
    let r = extract_spt(&g, &h, a.source)?;
    let json = a
        .out
        .as_ref()
        .and_then(|p| p.extension())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let text = if json {
        serde_json::to_string(&r)?
    } else {
        tree_tsv(&r.tree)
    };
    emit(&a.out, &text)
}

#[derive(Debug, Serialize)]
struct TreeCheck {
    edges: usize,
    reachable: usize,
    max_inconsistency: f64,
    max_stretch: Option<f64>,
}

fn cmd_validate_tree(a: &ValidateTreeArgs) -> Result<()> {
    let g = a.graph.load()?;
    let t = parse_tree(&std::fs::read_to_string(&a.tree)?, &g)?;
    let rep = validate_tree(&g, &t)?;
    if rep.max_inconsistency > 1e-9 {
        return Err(Error::Internal(format!(
            "tree distances are not parent-consistent (relative gap {:e})",
            rep.max_inconsistency
        )));
    }
    let mut max_stretch = None;
    if let Some(bound) = a.stretch {
        let exact = dijkstra(&g, t.root);
        let worst = (0..g.n())
            .filter(|&v| v != t.root && exact.dist[v].is_finite())
            .map(|v| t.dist[v] / exact.dist[v])
            .fold(1.0, f64::max);
        max_stretch = Some(worst);
        if worst > bound * (1.0 + 1e-9) {
            return Err(Error::Internal(format!("tree stretch {worst} exceeds {bound}")));
        }
    }
    let check = TreeCheck {
        edges: rep.edges,
        reachable: rep.reachable,
        max_inconsistency: rep.max_inconsistency,
        max_stretch,
    };
    println!("{}", serde_json::to_string_pretty(&check)?);
    Ok(())
}

fn cmd_validate(a: &ValidateArgs) -> Result<()> {
    let g = a.graph.load()?;
    let h = load_hopset(&a.hopset, &g)?;
    let sel = match a.validate {
        ValidateLevel::None => {
            emit(&a.out, "{\"validated\":false}\n")?;
            return Ok(());
        }
        ValidateLevel::Sampled => PairSelection::Sampled {
            count: a.samples,
            seed: a.seed,
        },
        ValidateLevel::All => PairSelection::All { max_n: a.max_all_pairs },
    };
    let rep = validate_hopset(&g, &h, sel, 1e-9)?;
    let mut text = serde_json::to_string_pretty(&rep)?;
    text.push('\n');
    emit(&a.out, &text)?;
    let mut hist = String::new();
    for (i, c) in rep.histogram.iter().enumerate() {
        match BUCKETS.get(i) {
            Some(b) => {
                let _ = write!(hist, " <={b}:{c}");
            }
            None => {
                let _ = write!(hist, " >{}:{c}", BUCKETS[BUCKETS.len() - 1]);
            }
        }
    }
    eprintln!(
        "pairs {} max stretch {} (bound {}) histogram{hist}",
        rep.pairs, rep.max_stretch, rep.stretch_bound
    );
    if !rep.passed {
        return Err(Error::Internal(format!(
            "validation failed: {} stretch, {} shortening, {} unreached, max hops {} of {}",
            rep.stretch_violations, rep.shortening_violations, rep.unreached, rep.max_hops, rep.hopbound
        )));
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let g = a.graph.load()?;
    let h = match &a.hopset {
        Some(p) => load_hopset(p, &g)?,
        None => a.params.build(&g)?,
    };
    let index = HopsetIndex::new(&g, &h)?;
    let sources: Vec<usize> = if a.sources.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        (0..a.count).map(|_| rng.gen_range(0..g.n())).collect()
    } else {
        a.sources.clone()
    };
    let full = g.n().saturating_sub(1).max(1) as u64;
    let mut out = String::from("method,source,time,relaxations\n");
    for &s in &sources {
        if s >= g.n() {
            return Err(Error::Config(format!("source {s} is not a vertex")));
        }
        let t = Instant::now();
        let d = dijkstra(&g, s);
        let _ = writeln!(out, "dijkstra,{s},{},{}", t.elapsed().as_secs_f64(), d.relaxations);
        let t = Instant::now();
        let d = bounded_bellman_ford(&g, &[s], full, None);
        let _ = writeln!(out, "bellman-ford,{s},{},{}", t.elapsed().as_secs_f64(), d.relaxations);
        let t = Instant::now();
        let d = index.sssd(&[s])?;
        let _ = writeln!(out, "hopset,{s},{},{}", t.elapsed().as_secs_f64(), d.relaxations);
    }
    emit(&a.out, &out)
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let g = generate(&GenSpec {
        family: a.family,
        n: a.n,
        degree: a.degree,
        max_weight: a.max_weight,
        seed: a.seed,
    })?;
    emit(&a.out, &write_graph(&g, a.format))
}

pub fn execute(cli: &Cli) -> Result<()> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Query(a) => cmd_query(a),
        Command::Spt(a) => cmd_spt(a),
        Command::Validate(a) => cmd_validate(a),
        Command::ValidateTree(a) => cmd_validate_tree(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
