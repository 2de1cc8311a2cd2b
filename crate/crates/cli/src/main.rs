use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use spolink::belief::{match_graphs, MatchError};
use spolink::ntriples::parse_document;
use spolink::patterns::PatternError;
use spolink::relate::{classify_pair, component_sets, relate_all, RelateError, ScoringConfig};
use spolink::{reify_blank_nodes, Graph, Iri, MiningStore, PatternSet, SymbolTable};

#[derive(Debug, Parser)]
#[command(name = "spolink", version, about = "Relate, mine and match N-Triples graphs")]
struct Cli {
    /// IRI prefix for skolemized blank nodes; a per-file content hash is appended.
    #[arg(long, global = true, default_value = "http://skolem.invalid/")]
    skolem_scheme: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a file and report every malformed line.
    Validate { file: PathBuf },
    /// Classify how the first graph relates to the second.
    Classify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Relate every ordered pair of files and write the link graph.
    RelateAll {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// JSON object of relation kind to score.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Run one mining session against a persisted store.
    Mine {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        add: PathBuf,
    },
    /// Decide whether the second graph matches the first.
    Match {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// JSON object of relation kind to score.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Parse(String),
    Conflict(anyhow::Error),
    Store(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Conflict(_) => 3,
            Failure::Store(_) => 4,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            match &failure {
                Failure::Parse(msg) => eprint!("{msg}"),
                Failure::Usage(e) | Failure::Conflict(e) | Failure::Store(e) => eprintln!("error: {e:#}"),
            }
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let scheme = cli.skolem_scheme.as_str();
    if Iri::new(scheme).is_err() || !scheme.ends_with(['/', '#']) {
        return Err(Failure::Usage(anyhow::anyhow!(
            "--skolem-scheme must be an IRI prefix ending in '/' or '#', got {scheme:?}"
        )));
    }
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Classify { a, b, json } => classify(&a, &b, json, scheme),
        Command::RelateAll {
            files,
            out,
            format,
            scores,
        } => relate(&files, &out, format, scores.as_deref(), scheme),
        Command::Mine { store, add } => mine(&store, &add, scheme),
        Command::Match {
            a,
            b,
            threshold,
            scores,
        } => match_command(&a, &b, threshold, scores.as_deref(), scheme),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_file(path: &Path) -> Result<(String, Graph), Failure> {
    let text = read(path)?;
    match parse_document(&text) {
        Ok(graph) => Ok((text, graph)),
        Err(errors) => {
            let mut msg = String::new();
            for e in &errors {
                let _ = writeln!(msg, "{}:{e}", path.display());
            }
            Err(Failure::Parse(msg))
        }
    }
}

/// Parses a file and skolemizes its blank nodes under `scheme` plus a prefix
/// of the file's SHA-256, so labels from different files never meet.
fn load(path: &Path, scheme: &str) -> Result<Graph, Failure> {
    let (text, graph) = parse_file(path)?;
    let digest = Sha256::digest(text.as_bytes());
    let hash: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    let doc_scheme = format!("{scheme}{hash}/");
    reify_blank_nodes(&graph, &doc_scheme).map_err(|e| Failure::Parse(format!("{}: {e}\n", path.display())))
}

fn load_scores(path: Option<&Path>) -> Result<ScoringConfig, Failure> {
    match path {
        None => Ok(ScoringConfig::default()),
        Some(p) => {
            let text = read(p)?;
            ScoringConfig::from_json(&text)
                .with_context(|| format!("invalid scores in {}", p.display()))
                .map_err(Failure::Usage)
        }
    }
}

fn validate(file: &Path) -> Outcome {
    let (_, graph) = parse_file(file)?;
    let n = graph.len();
    Ok(format!("{n} {}\n", if n == 1 { "triple" } else { "triples" }))
}

fn classify(a: &Path, b: &Path, json: bool, scheme: &str) -> Outcome {
    let ga = load(a, scheme)?;
    let gb = load(b, scheme)?;
    let mut table = SymbolTable::new();
    table.intern_graph(&ga);
    table.intern_graph(&gb);
    let ca = component_sets(&ga, &table).map_err(anyhow::Error::from)?;
    let cb = component_sets(&gb, &table).map_err(anyhow::Error::from)?;
    let view = classify_pair(&ca, &cb, &ga, &gb).view(&table);

    if json {
        return Ok(pretty(&view)? + "\n");
    }
    let mut out = format!("{}\n", view.kind);
    for w in &view.witnesses {
        let _ = writeln!(out, "  {}: {}", w.components, w.terms.join(" "));
    }
    if !view.violated.is_empty() {
        let _ = writeln!(out, "violated: {}", view.violated.join(", "));
    }
    Ok(out)
}

fn relate(files: &[PathBuf], out: &Path, format: Format, scores: Option<&Path>, scheme: &str) -> Outcome {
    let scoring = load_scores(scores)?;
    let mut named = Vec::with_capacity(files.len());
    for f in files {
        let name = f
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .with_context(|| format!("{} has no file name", f.display()))?;
        named.push((name, load(f, scheme)?));
    }
    let mut table = SymbolTable::new();
    named.iter().for_each(|(_, g)| table.intern_graph(g));
    let links = relate_all(&named, &table, &scoring).map_err(|e| match e {
        RelateError::DuplicateName(_) => Failure::Usage(anyhow::anyhow!(e).context("node ids are file basenames")),
        other => Failure::Usage(other.into()),
    })?;

    let rendered = match format {
        Format::Json => pretty(&links.view())? + "\n",
        Format::Dot => links.to_dot(),
    };
    fs::write(out, rendered).with_context(|| format!("cannot write {}", out.display()))?;
    Ok(format!(
        "{} nodes, {} edges written to {}\n",
        links.nodes.len(),
        links.edges.len(),
        out.display()
    ))
}

fn mine(store_path: &Path, add: &Path, scheme: &str) -> Outcome {
    let graph = load(add, scheme)?;
    let mut store = if store_path.exists() {
        let text = read(store_path).map_err(Failure::Store)?;
        MiningStore::from_json(&text)
            .and_then(|s| s.verify_replay().map(|()| s))
            .with_context(|| format!("cannot load store {}", store_path.display()))
            .map_err(Failure::Store)?
    } else {
        MiningStore::new()
    };

    let source = add.display().to_string();
    let patterns = store.run_session(&graph, &source).map_err(|e| match e {
        PatternError::EmptySequence => Failure::Usage(anyhow::anyhow!(e).context(source.clone())),
        other => Failure::Store(other.into()),
    })?;
    persist(store_path, &store.to_json()).map_err(Failure::Store)?;

    let state = store.state.expect("a session just ran");
    let mut out = format!("session {}\n", store.sessions() - 1);
    out += &describe(&patterns, &store.table);
    let lambda = state.lambda().map(|l| l.to_string()).unwrap_or_else(|| "-".into());
    let _ = writeln!(out, "K1 = {}, K2 = {}, lambda = {lambda}", state.k1, state.k2);
    Ok(out)
}

fn describe(patterns: &PatternSet, table: &SymbolTable) -> String {
    let mut out = format!(
        "patterns of length {} occurring {} times:\n",
        patterns.pattern_length(),
        patterns.count()
    );
    for p in patterns.patterns() {
        let terms: Vec<String> = p
            .symbols()
            .iter()
            .map(|id| {
                table
                    .term_of(*id)
                    .map(ToString::to_string)
                    .unwrap_or_else(|| id.to_string())
            })
            .collect();
        let _ = writeln!(out, "  {}", terms.join(" "));
    }
    out
}

/// Writes through a sibling temporary file so an interrupted run never leaves
/// a truncated store behind.
fn persist(path: &Path, contents: &str) -> anyhow::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).with_context(|| format!("cannot write {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("cannot replace {}", path.display()))
}

fn match_command(a: &Path, b: &Path, threshold: f64, scores: Option<&Path>, scheme: &str) -> Outcome {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Failure::Usage(anyhow::anyhow!(
            "--threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let scoring = load_scores(scores)?;
    let ga = load(a, scheme)?;
    let gb = load(b, scheme)?;
    let mut table = SymbolTable::new();
    table.intern_graph(&ga);
    table.intern_graph(&gb);
    let result = match_graphs::<f64>(&ga, &gb, &table, &scoring, threshold).map_err(|e| match e {
        MatchError::TotalConflict | MatchError::FrameTooLarge(_) => Failure::Conflict(e.into()),
        other => Failure::Usage(other.into()),
    })?;
    Ok(pretty(&result.view())? + "\n")
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.into()))
}
