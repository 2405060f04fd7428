//! `argnota`: validate, render, compare and serve argument annotations.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use argnota_core::agreement::{compare_documents, AgreementReport, DEFAULT_THRESHOLD};
use argnota_core::graph::GraphError;
use argnota_core::model::AnnotationDocument;
use argnota_core::notation::parse_expr;
use argnota_core::report::{compare_text, diagnostics_text, document_roles, render_document, roles_text, RenderFormat};
use argnota_core::stats::CorpusStats;
use argnota_core::storage::{document_paths, load_document, load_document_unchecked, StorageError};
use argnota_core::validation::{has_errors, validate_document, ValidationMode};

#[derive(Debug, Parser)]
#[command(name = "argnota", version, about = "Legal argumentation annotation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print diagnostics; exit 1 if any is an error.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Draw the argument diagram as SVG or DOT.
    Render {
        file: PathBuf,
        #[arg(long, default_value = "svg")]
        format: RenderFormat,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the inferred role of every proposition.
    Roles { file: PathBuf },
    /// Agreement report for two annotations (or two directories, paired by doc_id).
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Type, subtype and relation counts for a file or directory.
    Stats { path: PathBuf },
    /// Echo the canonical form of a relation expression.
    ParseExpr { text: String },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        root: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
    },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct ModeFlags {
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    permissive: bool,
}

impl ModeFlags {
    fn mode(&self) -> ValidationMode {
        if self.permissive {
            ValidationMode::Permissive
        } else {
            ValidationMode::Strict
        }
    }
}

/// Exit status 1: the input is well-formed but has errors.
/// Exit status 2: the input could not be read or parsed.
enum Failure {
    Invalid(String),
    Io(String),
}

impl From<StorageError> for Failure {
    fn from(e: StorageError) -> Self {
        match e {
            StorageError::Invariant(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Io(e.to_string()),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let GraphError::InvalidDocument(ds) = &e;
        Failure::Invalid(format!("{e}\n{}", diagnostics_text(ds).trim_end()))
    }
}

type Outcome = Result<ExitCode, Failure>;

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn validate(file: &Path, mode: ValidationMode) -> Outcome {
    let doc = load_document_unchecked(file)?;
    let diagnostics = validate_document(&doc, mode);
    emit(&diagnostics_text(&diagnostics))?;
    Ok(if has_errors(&diagnostics) { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn render(file: &Path, format: RenderFormat, out: Option<&Path>) -> Outcome {
    let text = render_document(&load_document(file)?, format)?;
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => emit(&text)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn roles(file: &Path) -> Outcome {
    emit(&roles_text(&document_roles(&load_document(file)?)?))?;
    Ok(ExitCode::SUCCESS)
}

/// Documents of a directory keyed by doc_id.
fn corpus(dir: &Path) -> Result<BTreeMap<String, AnnotationDocument>, Failure> {
    let mut docs = BTreeMap::new();
    for path in document_paths(dir)? {
        let doc = load_document(&path)?;
        if docs.contains_key(&doc.doc_id) {
            return Err(Failure::Io(format!("{}: second document for {:?}", path.display(), doc.doc_id)));
        }
        docs.insert(doc.doc_id.clone(), doc);
    }
    Ok(docs)
}

fn compare(a: &Path, b: &Path, threshold: f64, json: bool) -> Outcome {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Failure::Io(format!("threshold {threshold} outside [0, 1]")));
    }
    let pairs = if a.is_dir() && b.is_dir() {
        let (mut da, mut db) = (corpus(a)?, corpus(b)?);
        for id in da.keys().filter(|id| !db.contains_key(*id)) {
            eprintln!("warning: {id} only in {}", a.display());
        }
        for id in db.keys().filter(|id| !da.contains_key(*id)) {
            eprintln!("warning: {id} only in {}", b.display());
        }
        let ids: Vec<String> = da.keys().filter(|id| db.contains_key(*id)).cloned().collect();
        ids.into_iter()
            .map(|id| (da.remove(&id).unwrap(), db.remove(&id).unwrap()))
            .collect()
    } else {
        vec![(load_document(a)?, load_document(b)?)]
    };
    let mut reports: Vec<AgreementReport> = Vec::new();
    for (x, y) in &pairs {
        let report = compare_documents(x, y, threshold).map_err(|e| Failure::Invalid(format!("{}: {e}", x.doc_id)))?;
        reports.push(report);
    }
    let text = if json {
        let value = if reports.len() == 1 && !a.is_dir() {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        };
        value.expect("report serializes") + "\n"
    } else {
        reports.iter().map(compare_text).collect::<Vec<_>>().join("\n")
    };
    emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn stats(path: &Path) -> Outcome {
    let paths = if path.is_dir() { document_paths(path)? } else { vec![path.to_path_buf()] };
    let mut stats = CorpusStats::new();
    for p in paths {
        let doc = load_document(&p)?;
        stats
            .add(&doc)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
    }
    emit(&stats.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn parse_expression(text: &str) -> Outcome {
    match parse_expr(text) {
        Ok(expr) => {
            emit(&format!("{expr}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Err(d) => {
            let caret: String = " ".repeat(d.position);
            Err(Failure::Invalid(format!("{d}\n  {text}\n  {caret}^")))
        }
    }
}

fn serve(root: PathBuf, bind: SocketAddr) -> Outcome {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
    runtime
        .block_on(argnota_service::serve(root, bind))
        .map_err(|e| Failure::Io(e.to_string()))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate { file, mode } => validate(&file, mode.mode()),
        Command::Render { file, format, out } => render(&file, format, out.as_deref()),
        Command::Roles { file } => roles(&file),
        Command::Compare { a, b, threshold, json } => compare(&a, &b, threshold, json),
        Command::Stats { path } => stats(&path),
        Command::ParseExpr { text } => parse_expression(&text),
        Command::Serve { root, bind } => {
            tracing_subscriber::fmt()
                .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
                .with_writer(std::io::stderr)
                .init();
            serve(root, bind)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
