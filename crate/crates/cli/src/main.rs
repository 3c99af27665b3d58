//! `twalk`: generate threshold graphs and evaluate quantum and random walks on them.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use threshold_walk::classical::classical_evolve_with;
use threshold_walk::oracle::{expm, laplacian, sym_eigen, ORACLE_LIMIT};
use threshold_walk::quantum::{evolve_with, propagator_matrix, time_averaged_with};
use threshold_walk::sweep::{run_sweep, with_medians, SweepKind, SweepRow, SweepSpec};
use threshold_walk::{
    classical_time_average, decompose, evolve, Error, GraphFile, HiddenDistribution,
    HiddenVariableConfig, Method, Part, ThresholdGraph,
};

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "twalk",
    version,
    about = "Quantum and random walks on threshold graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a threshold graph and write it as JSON.
    Generate(GenerateArgs),
    /// Laplacian spectrum with multiplicities.
    Spectrum(SpectrumArgs),
    /// Walk distribution (or amplitudes) at one time or on a time grid.
    Evolve(EvolveArgs),
    /// Exact long-time average of the walk distribution.
    TimeAverage(AverageArgs),
    /// Compare the fast evaluators with the dense matrix-exponential oracle.
    Verify(VerifyArgs),
    /// Seed sweeps over binary graphs.
    Sweep(SweepArgs),
}

/// Sampling parameters for a hidden-variable graph.
#[derive(Args)]
struct GeneratorArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Shorthand for `--dist bernoulli:P`.
    #[arg(long, conflicts_with = "dist")]
    p: Option<f64>,
    /// bernoulli:P, uniform:LOW,HIGH or explicit:X1,X2,... (default bernoulli:0.5)
    #[arg(long)]
    dist: Option<String>,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A graph file, or generator parameters.
#[derive(Args)]
struct GraphSource {
    #[arg(long, conflicts_with_all = ["n", "p", "dist"])]
    graph: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Build from a creation sequence (comma-separated bits) instead of sampling.
    #[arg(long, conflicts_with_all = ["n", "p", "dist"])]
    sequence: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a plain `u w` edge list.
    #[arg(long)]
    edges: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV with one eigenvector per row.
    #[arg(long)]
    vectors: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Walk {
    Quantum,
    Classical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StartPart {
    V1,
    V0,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliMethod {
    ClosedForm,
    Spectral,
}

#[derive(Args)]
struct StartArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, value_enum, default_value = "quantum")]
    walk: Walk,
    /// Start vertex as a canonical position.
    #[arg(long, conflicts_with = "start_part")]
    start: Option<usize>,
    /// v1: a vertex of the top clique block; v0: a vertex of the bottom independent block.
    #[arg(long, value_enum)]
    start_part: Option<StartPart>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    start: StartArgs,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "t1", conflicts_with_all = ["t0", "t1", "steps"])]
    t: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, requires = "steps", allow_hyphen_values = true)]
    t1: Option<f64>,
    /// Number of grid intervals between t0 and t1.
    #[arg(long, requires = "t1")]
    steps: Option<usize>,
    #[arg(long, value_enum, default_value = "closed-form")]
    method: CliMethod,
    /// Add re/im amplitude columns (quantum walk only).
    #[arg(long)]
    amplitudes: bool,
}

#[derive(Args)]
struct AverageArgs {
    #[command(flatten)]
    start: StartArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Single time; replaces the --times list.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "times")]
    t: Option<f64>,
    /// Comma-separated times.
    #[arg(
        long,
        default_value = "0,0.37,1,3.141592653589793,10",
        allow_hyphen_values = true
    )]
    times: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliSweepKind {
    Rates,
    Spread,
    Contrast,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: CliSweepKind,
    /// Comma-separated graph sizes.
    #[arg(long)]
    sizes: String,
    /// Comma-separated seeds or a half-open range `A..B`.
    #[arg(long)]
    seeds: String,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    let items: Vec<&str> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .collect();
    if items.is_empty() {
        return Err("list must not be empty".into());
    }
    items
        .into_iter()
        .map(|x| x.parse().map_err(|_| format!("cannot parse {x:?}")))
        .collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad range start {a:?}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad range end {b:?}"))?;
        if b <= a {
            return Err(format!("empty seed range {s:?}"));
        }
        return Ok((a..b).collect());
    }
    parse_list(s)
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Lib(Error),
    Usage(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => EXIT_IO,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Verify(_) => EXIT_VERIFY,
            Failure::Lib(e) => match e {
                Error::Config(_)
                | Error::Argument(_)
                | Error::VertexOutOfRange { .. }
                | Error::DimensionOverflow { .. } => EXIT_USAGE,
                Error::Disconnected(_)
                | Error::NotBinary
                | Error::Coverage { .. }
                | Error::UnknownEigenvalue { .. } => EXIT_PRECONDITION,
                Error::Consistency(_) | Error::NotSymmetric(_) => EXIT_VERIFY,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) | Failure::Usage(m) | Failure::Verify(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Evolve(a) => evolve_cmd(a),
        Command::TimeAverage(a) => time_average(a),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("twalk: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_graph(source: &GraphSource) -> Result<ThresholdGraph, Failure> {
    match &source.graph {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok(GraphFile::from_json(&text)?.into_graph()?)
        }
        None => sample_graph(&source.generator),
    }
}

fn sample_graph(g: &GeneratorArgs) -> Result<ThresholdGraph, Failure> {
    let distribution = match (&g.dist, g.p) {
        (Some(spec), _) => parse_distribution(spec)?,
        (None, Some(p)) => HiddenDistribution::Bernoulli { p },
        (None, None) => HiddenDistribution::Bernoulli { p: 0.5 },
    };
    let n = match (&distribution, g.n) {
        (_, Some(n)) => n,
        (HiddenDistribution::Explicit { values }, None) => values.len(),
        _ => return Err(Failure::Usage("give --graph or --n".into())),
    };
    Ok(ThresholdGraph::generate(&HiddenVariableConfig {
        n,
        distribution,
        theta: g.theta,
        seed: g.seed,
    })?)
}

fn parse_distribution(spec: &str) -> Result<HiddenDistribution, Failure> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| {
        Failure::Usage(format!("distribution {spec:?} needs the form KIND:PARAMS"))
    })?;
    let nums: Vec<f64> = parse_list(rest).map_err(Failure::Usage)?;
    match (kind, nums.as_slice()) {
        ("bernoulli", &[p]) => Ok(HiddenDistribution::Bernoulli { p }),
        ("uniform", &[low, high]) => Ok(HiddenDistribution::Uniform { low, high }),
        ("explicit", _) => Ok(HiddenDistribution::Explicit { values: nums }),
        _ => Err(Failure::Usage(format!("unknown distribution {spec:?}"))),
    }
}

fn generate(a: GenerateArgs) -> Outcome {
    let graph = if let Some(seq) = &a.sequence {
        let bits: Vec<u8> = parse_list(seq).map_err(Failure::Usage)?;
        ThresholdGraph::from_creation_sequence(&bits)?
    } else {
        sample_graph(&a.generator)?
    };
    if let Some(path) = &a.edges {
        fs::write(path, graph.edge_list_text())?;
    }
    let mut json = graph.to_file().to_json();
    json.push('\n');
    emit(a.out.as_deref(), &json)
}

fn spectrum(a: SpectrumArgs) -> Outcome {
    let graph = load_graph(&a.source)?;
    let dec = decompose(&graph)?;
    #[derive(Serialize)]
    struct Report {
        n: usize,
        spectrum: Vec<threshold_walk::spectral::SpectrumEntry>,
    }
    if let Some(path) = &a.vectors {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["eigenvalue".to_string()];
        header.extend((0..graph.n()).map(|p| format!("x{p}")));
        w.write_record(&header)?;
        for (lambda, v) in dec.dense_vectors() {
            let mut rec = vec![lambda.to_string()];
            rec.extend(v.into_iter().map(fmt));
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    let report = Report {
        n: graph.n(),
        spectrum: dec.spectrum(),
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    emit(a.out.as_deref(), &json)
}

fn resolve_start(graph: &ThresholdGraph, a: &StartArgs) -> Result<usize, Failure> {
    match (a.start, a.start_part) {
        (Some(s), _) => {
            graph.check_vertex(s)?;
            Ok(s)
        }
        (None, Some(StartPart::V1)) => graph
            .top_clique_vertex()
            .ok_or_else(|| Failure::Lib(Error::Argument("graph has no clique vertex".into()))),
        (None, Some(StartPart::V0)) => graph
            .bottom_independent_vertex()
            .ok_or_else(|| Failure::Lib(Error::Argument("graph has no independent vertex".into()))),
        (None, None) => Err(Failure::Usage("give --start or --start-part".into())),
    }
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self, Failure> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    fn vertex_row(
        &mut self,
        graph: &ThresholdGraph,
        t: Option<f64>,
        p: usize,
        mass: f64,
        amp: Option<Complex64>,
    ) -> Outcome {
        let (level, part) = graph.level_of(p);
        let mut rec = Vec::with_capacity(8);
        if let Some(t) = t {
            rec.push(fmt(t));
        }
        rec.push(p.to_string());
        rec.push(graph.vertex_at(p).to_string());
        rec.push((level + 1).to_string());
        rec.push(match part {
            Part::Clique => "1".to_string(),
            Part::Independent => "0".to_string(),
        });
        rec.push(fmt(mass));
        if let Some(z) = amp {
            rec.push(fmt(z.re));
            rec.push(fmt(z.im));
        }
        self.writer.write_record(&rec)?;
        Ok(())
    }

    fn finish(self) -> Result<String, Failure> {
        let bytes = self
            .writer
            .into_inner()
            .map_err(|e| Failure::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn evolve_cmd(a: EvolveArgs) -> Outcome {
    let graph = load_graph(&a.start.source)?;
    let start = resolve_start(&graph, &a.start)?;
    if a.amplitudes && a.start.walk == Walk::Classical {
        return Err(Failure::Usage(
            "--amplitudes only applies to the quantum walk".into(),
        ));
    }
    let times: Vec<f64> = match (a.t, a.t1, a.steps) {
        (Some(t), _, _) => vec![t],
        (None, Some(t1), Some(steps)) => {
            if steps == 0 {
                return Err(Failure::Usage("--steps must be positive".into()));
            }
            (0..=steps)
                .map(|k| a.t0 + (t1 - a.t0) * k as f64 / steps as f64)
                .collect()
        }
        _ => return Err(Failure::Usage("give --t or --t1 with --steps".into())),
    };
    if !graph.is_connected() {
        return Err(Error::Disconnected("walk evolution").into());
    }
    let mut header = vec!["t", "vertex", "original", "level", "part", "mass"];
    if a.amplitudes {
        header.extend(["re", "im"]);
    }
    let mut table = Table::new(&header)?;
    let needs_dec = a.start.walk == Walk::Classical || a.method == CliMethod::Spectral;
    let dec = if needs_dec {
        Some(decompose(&graph)?)
    } else {
        None
    };
    for &t in &times {
        match a.start.walk {
            Walk::Quantum => {
                let psi = match &dec {
                    Some(d) => evolve_with(d, start, t)?,
                    None => evolve(&graph, start, t, Method::ClosedForm)?,
                };
                for (p, z) in psi.entries.iter().enumerate() {
                    table.vertex_row(
                        &graph,
                        Some(t),
                        p,
                        z.norm_sqr(),
                        a.amplitudes.then_some(*z),
                    )?;
                }
            }
            Walk::Classical => {
                let dist =
                    classical_evolve_with(dec.as_ref().expect("decomposition built"), start, t)?;
                for (p, &m) in dist.masses.iter().enumerate() {
                    table.vertex_row(&graph, Some(t), p, m, None)?;
                }
            }
        }
    }
    emit(a.start.out.as_deref(), &table.finish()?)
}

fn time_average(a: AverageArgs) -> Outcome {
    let graph = load_graph(&a.start.source)?;
    let start = resolve_start(&graph, &a.start)?;
    let masses = match a.start.walk {
        Walk::Quantum => {
            if !graph.is_connected() {
                return Err(Error::Disconnected("time averaging").into());
            }
            time_averaged_with(&decompose(&graph)?, start).masses
        }
        Walk::Classical => classical_time_average(&graph, start)?.masses,
    };
    let mut table = Table::new(&["vertex", "original", "level", "part", "mass"])?;
    for (p, &m) in masses.iter().enumerate() {
        table.vertex_row(&graph, None, p, m, None)?;
    }
    emit(a.start.out.as_deref(), &table.finish()?)
}

#[derive(Serialize)]
struct VerifyReport {
    n: usize,
    times: Vec<f64>,
    tolerance: f64,
    closed_form: f64,
    spectral: f64,
    classical: f64,
    unitarity: f64,
    time_average: f64,
    passed: bool,
}

fn verify(a: VerifyArgs) -> Outcome {
    let graph = load_graph(&a.source)?;
    if !graph.is_connected() {
        return Err(Error::Disconnected("verification").into());
    }
    if graph.n() > ORACLE_LIMIT {
        return Err(Error::DimensionOverflow {
            dim: graph.n(),
            limit: ORACLE_LIMIT,
        }
        .into());
    }
    let times: Vec<f64> = match a.t {
        Some(t) => vec![t],
        None => parse_list(&a.times).map_err(Failure::Usage)?,
    };
    let n = graph.n();
    let lap = laplacian(&graph)?;
    let dec = decompose(&graph)?;
    let (mut closed, mut spectral, mut classical, mut unitarity) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &t in &times {
        let oracle = expm(&lap, Complex64::new(0.0, t))?;
        unitarity = unitarity.max(oracle.unitarity_defect());
        closed =
            closed.max(propagator_matrix(&graph, t, Method::ClosedForm)?.max_abs_diff(&oracle));
        spectral =
            spectral.max(propagator_matrix(&graph, t, Method::Spectral)?.max_abs_diff(&oracle));
        if t >= 0.0 {
            let heat = expm(&lap, Complex64::new(-t, 0.0))?;
            for s in 0..n {
                let col = classical_evolve_with(&dec, s, t)?;
                for (x, m) in col.masses.iter().enumerate() {
                    classical = classical.max((m - heat[(x, s)].re).abs());
                }
            }
        }
    }
    // time averages against eigenvector groups of the dense eigensolver
    let eig = sym_eigen(&lap)?;
    let mut groups: Vec<(i64, Vec<usize>)> = Vec::new();
    for (k, &v) in eig.values.iter().enumerate() {
        let key = v.round() as i64;
        match groups.iter_mut().find(|(g, _)| *g == key) {
            Some((_, members)) => members.push(k),
            None => groups.push((key, vec![k])),
        }
    }
    let mut average = 0.0f64;
    for s in 0..n {
        let fast = time_averaged_with(&dec, s).masses;
        for (x, &f) in fast.iter().enumerate() {
            let dense: f64 = groups
                .iter()
                .map(|(_, ks)| {
                    let e: f64 = ks
                        .iter()
                        .map(|&k| eig.vectors[(x, k)] * eig.vectors[(s, k)])
                        .sum();
                    e * e
                })
                .sum();
            average = average.max((f - dense).abs());
        }
    }
    let passed = [closed, spectral, classical, unitarity, average]
        .iter()
        .all(|&d| d <= a.tol);
    let report = VerifyReport {
        n,
        times,
        tolerance: a.tol,
        closed_form: closed,
        spectral,
        classical,
        unitarity,
        time_average: average,
        passed,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    emit(a.out.as_deref(), &json)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "deviation above tolerance {:e}",
            a.tol
        )))
    }
}

fn sweep(a: SweepArgs) -> Outcome {
    let spec = SweepSpec {
        kind: match a.kind {
            CliSweepKind::Rates => SweepKind::Rates,
            CliSweepKind::Spread => SweepKind::Spread,
            CliSweepKind::Contrast => SweepKind::Contrast,
        },
        p: a.p,
        t: a.t,
        sizes: parse_list(&a.sizes).map_err(|e| Failure::Usage(format!("--sizes: {e}")))?,
        seeds: parse_seeds(&a.seeds).map_err(|e| Failure::Usage(format!("--seeds: {e}")))?,
    };
    let rows = with_medians(&run_sweep(&spec)?);
    let text = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
        Format::Csv => sweep_csv(&rows)?,
    };
    emit(a.out.as_deref(), &text)
}

fn sweep_csv(rows: &[SweepRow]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "seed", "quantity", "value"])?;
    for r in rows {
        let seed = r
            .seed
            .map(|s| s.to_string())
            .unwrap_or_else(|| "median".into());
        w.write_record([r.n.to_string(), seed, r.quantity.clone(), fmt(r.value)])?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
