//! `tracegraph` command line.
//!
//! Exit codes: 0 success, 1 usage error or unusable input, 2 extraction
//! errors (including a source tree without `.cs` files).

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use tracegraph_core::dot::to_dot;
use tracegraph_core::extract::{extract_project, ExtractError};
use tracegraph_core::kb::{load, save, KnowledgeBase};
use tracegraph_core::query::{compute_visibility, SelectionQuery};
use tracegraph_core::{emit_xml, parse_xml, populate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_EXTRACTION: i32 = 2;

/// Overrides `serve --bind` when set.
pub const BIND_ENV: &str = "TRACEGRAPH_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Parser)]
#[command(name = "tracegraph", version, about = "C# traceability extraction and impact queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse every .cs file under SRC_DIR into a code model document.
    Extract {
        src_dir: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Populate a knowledge base from a code model and print the report.
    Build {
        model: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Print the objects visible in each column for a selection.
    Query {
        kb: PathBuf,
        /// Checked object as TYPE:NAME (qualified or display name).
        #[arg(long, value_name = "TYPE:NAME", num_args = 1..)]
        check: Vec<String>,
        /// Displayed columns in order; default: all knowledge types.
        #[arg(long, value_delimiter = ',', value_name = "T1,T2")]
        columns: Option<Vec<String>>,
        /// Enabled link types; default: all link types.
        #[arg(long, value_delimiter = ',', value_name = "L1,L2")]
        links: Option<Vec<String>>,
    },
    /// Write the knowledge base as a Graphviz digraph.
    ExportDot {
        kb: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Serve the knowledge base over HTTP.
    Serve {
        kb: PathBuf,
        #[arg(long, value_name = "HOST:PORT", default_value = DEFAULT_BIND)]
        bind: String,
    },
}

/// A failure that ends the command with `code`.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<(), Failure>;

/// Run the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Extract { src_dir, output } => extract(&src_dir, &output, out, err),
        Command::Build { model, output } => build(&model, &output, out),
        Command::Query {
            kb,
            check,
            columns,
            links,
        } => query(&kb, &check, columns, links, out),
        Command::ExportDot { kb, output } => export_dot(&kb, &output, out),
        Command::Serve { kb, bind } => {
            let bind = std::env::var(BIND_ENV).ok().filter(|b| !b.is_empty()).unwrap_or(bind);
            serve(&kb, &bind, out)
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "tracegraph: {}", f.message);
            f.code
        }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    std::fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    load(&read_bytes(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn extract(src: &Path, output: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if !src.is_dir() {
        return Err(usage(format!("{} is not a directory", src.display())));
    }
    let extraction = extract_project(src).map_err(|e| match e {
        ExtractError::NoSourcesFound(_) => Failure {
            code: EXIT_EXTRACTION,
            message: e.to_string(),
        },
        other => usage(other.to_string()),
    })?;
    let project = &extraction.project;
    for d in &project.diagnostics {
        let _ = writeln!(err, "{d}");
    }
    // The model of the files that did parse is still written.
    write_file(output, emit_xml(&project.model).as_bytes())?;
    let errors = project
        .diagnostics
        .iter()
        .filter(|d| d.severity == tracegraph_core::extract::Severity::Error)
        .count();
    let _ = writeln!(
        out,
        "{} files, {} errors, {} warnings -> {}",
        project.files.len(),
        errors,
        project.diagnostics.len() - errors,
        output.display()
    );
    if project.has_errors() {
        return Err(Failure {
            code: EXIT_EXTRACTION,
            message: format!("{errors} file(s) failed to extract"),
        });
    }
    Ok(())
}

fn build(model: &Path, output: &Path, out: &mut dyn Write) -> Outcome {
    let text = String::from_utf8(read_bytes(model)?).map_err(|_| usage(format!("{} is not UTF-8", model.display())))?;
    let model_doc = parse_xml(&text).map_err(|e| usage(format!("{}: {e}", model.display())))?;
    let mut kb = KnowledgeBase::new();
    let report = populate(&model_doc, &mut kb).map_err(|e| usage(e.to_string()))?;
    write_file(output, &save(&kb))?;
    let _ = write!(out, "{report}");
    Ok(())
}

/// Resolve `TYPE:NAME` to an object id: exact id first, then a unique
/// display name within the type.
fn resolve_check(kb: &KnowledgeBase, spec: &str) -> Result<(String, String), Failure> {
    let (ty, name) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("--check {spec}: expected TYPE:NAME")))?;
    if kb.knowledge_type(ty).is_none() {
        return Err(usage(format!("--check {spec}: unknown type {ty}")));
    }
    if let Some(o) = kb.object(spec) {
        return Ok((ty.to_string(), o.id.clone()));
    }
    let matches: Vec<_> = kb.objects_of_type(ty).filter(|o| o.display_name == name).collect();
    match matches.as_slice() {
        [one] => Ok((ty.to_string(), one.id.clone())),
        [] => Err(usage(format!("--check {spec}: no such object"))),
        many => Err(usage(format!(
            "--check {spec}: ambiguous, use one of: {}",
            many.iter().map(|o| o.id.as_str()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn query(
    kb_path: &Path,
    check: &[String],
    columns: Option<Vec<String>>,
    links: Option<Vec<String>>,
    out: &mut dyn Write,
) -> Outcome {
    let kb = load_kb(kb_path)?;
    let displayed_type_ids =
        columns.unwrap_or_else(|| kb.knowledge_types().iter().map(|t| t.id.clone()).collect());
    let enabled_link_type_ids: BTreeSet<String> = match links {
        Some(l) => l.into_iter().collect(),
        None => kb.link_types().iter().map(|t| t.id.clone()).collect(),
    };
    let mut checked: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for spec in check {
        let (ty, id) = resolve_check(&kb, spec)?;
        checked.entry(ty).or_default().insert(id);
    }
    let q = SelectionQuery {
        displayed_type_ids,
        checked,
        enabled_link_type_ids,
    };
    let result = compute_visibility(&kb, &q).map_err(|e| usage(e.to_string()))?;
    for t in &q.displayed_type_ids {
        let ids = &result.visible[t];
        let _ = writeln!(out, "{t} ({})", ids.len());
        for id in ids {
            let _ = writeln!(out, "  {id}");
        }
    }
    Ok(())
}

fn export_dot(kb_path: &Path, output: &Path, out: &mut dyn Write) -> Outcome {
    let kb = load_kb(kb_path)?;
    write_file(output, to_dot(&kb).as_bytes())?;
    let _ = writeln!(
        out,
        "{} objects, {} links -> {}",
        kb.object_count(),
        kb.link_count(),
        output.display()
    );
    Ok(())
}

fn serve(kb_path: &Path, bind: &str, out: &mut dyn Write) -> Outcome {
    let state = tracegraph_service::AppState::open(kb_path).map_err(|e| usage(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| usage(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .map_err(|e| usage(format!("cannot bind {bind}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| usage(e.to_string()))?;
        let _ = writeln!(out, "listening on http://{addr}");
        let _ = out.flush();
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        tracegraph_service::serve_on(listener, state, shutdown)
            .await
            .map_err(|e| usage(format!("server error: {e}")))
    })
}
