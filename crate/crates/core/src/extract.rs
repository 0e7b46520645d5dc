//! End-to-end extraction of a source tree.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use crate::kb::KnowledgeBase;
use crate::lexer::{tokenize, SourcePosition};
use crate::model::CodeModel;
use crate::parser::{merge_lenient, parse_file};
use crate::populate::{populate, PopulateError, PopulationReport};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("NoSourcesFound: no .cs files under {0}")]
    NoSourcesFound(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Populate(#[from] PopulateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// The file (or a declaration) was dropped.
    Error,
    /// Something was skipped but the file contributed its declarations.
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiagnostic {
    /// Path relative to the extraction root, `/`-separated.
    pub file: String,
    /// 1-based (line, column) when the problem has a position.
    pub at: Option<(u32, u32)>,
    pub severity: Severity,
    pub message: String,
}

impl FileDiagnostic {
    /// `message` of an error whose display starts with `pos`.
    fn positioned(file: &str, severity: Severity, pos: Option<&SourcePosition>, message: String) -> Self {
        let (at, message) = match pos {
            Some(p) => {
                let prefix = format!("{p}: ");
                let message = message.strip_prefix(&prefix).map(str::to_string).unwrap_or(message);
                (Some((p.line, p.column)), message)
            }
            None => (None, message),
        };
        FileDiagnostic {
            file: file.to_string(),
            at,
            severity,
            message,
        }
    }
}

impl fmt::Display for FileDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.at {
            Some((line, column)) => write!(f, "{}:{line}:{column}: {level}: {}", self.file, self.message),
            None => write!(f, "{}: {level}: {}", self.file, self.message),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedProject {
    pub model: CodeModel,
    /// Relative paths of all source files found, in processing order.
    pub files: Vec<String>,
    pub diagnostics: Vec<FileDiagnostic>,
}

impl ParsedProject {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub project: ParsedProject,
    pub kb: KnowledgeBase,
    pub report: PopulationReport,
}

/// `*.cs` files under `root`, as (relative `/` path, absolute path) in
/// lexicographic order of the relative path.
pub fn source_files(root: &Path) -> Result<Vec<(String, PathBuf)>, ExtractError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| ExtractError::Io {
            path: e.path().unwrap_or(root).to_path_buf(),
            source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("filesystem loop")),
        })?;
        if !entry.file_type().is_file() || entry.path().extension().and_then(|e| e.to_str()) != Some("cs") {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let rel = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push((rel, entry.path().to_path_buf()));
    }
    files.sort();
    Ok(files)
}

/// Tokenize, parse and merge every source file under `root`. Files that fail
/// to lex or parse are reported and left out; they never abort the project.
pub fn parse_project(root: &Path) -> Result<ParsedProject, ExtractError> {
    let files = source_files(root)?;
    if files.is_empty() {
        return Err(ExtractError::NoSourcesFound(root.to_path_buf()));
    }
    let mut models = Vec::new();
    let mut diagnostics = Vec::new();
    let mut names = Vec::new();
    for (rel, path) in files {
        let bytes = std::fs::read(&path).map_err(|source| ExtractError::Io { path: path.clone(), source })?;
        names.push(rel.clone());
        let error = |pos: Option<&SourcePosition>, message: String| {
            FileDiagnostic::positioned(&rel, Severity::Error, pos, message)
        };
        let text = match String::from_utf8(bytes) {
            Ok(t) => t,
            Err(e) => {
                diagnostics.push(error(None, format!("not valid UTF-8: {e}")));
                continue;
            }
        };
        let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
        let tokens = match tokenize(text, &rel) {
            Ok(t) => t,
            Err(e) => {
                diagnostics.push(error(Some(e.position()), e.to_string()));
                continue;
            }
        };
        match parse_file(&tokens) {
            Ok(parsed) => {
                diagnostics.extend(parsed.diagnostics.into_iter().map(|d| {
                    let at = d.pos.as_ref().map(|p| (p.line, p.column));
                    FileDiagnostic {
                        file: rel.clone(),
                        at,
                        severity: Severity::Warning,
                        message: d.message,
                    }
                }));
                models.push(parsed.model);
            }
            Err(e) => {
                let crate::parser::ParseError::UnbalancedBraces(ref p) = e;
                diagnostics.push(error(Some(p), e.to_string()))
            }
        }
    }
    let (model, conflicts) = merge_lenient(models);
    diagnostics.extend(conflicts.into_iter().map(|e| FileDiagnostic {
        file: String::from("<project>"),
        at: None,
        severity: Severity::Error,
        message: e.to_string(),
    }));
    Ok(ParsedProject {
        model,
        files: names,
        diagnostics,
    })
}

/// Parse `root` and populate a fresh knowledge base from the merged model.
pub fn extract_project(root: &Path) -> Result<Extraction, ExtractError> {
    let mut project = parse_project(root)?;
    let mut kb = KnowledgeBase::new();
    let report = populate(&project.model, &mut kb)?;
    project.model.unresolved_report = report
        .unresolved_references
        .iter()
        .map(|r| (r.name.clone(), r.pos.clone()))
        .collect();
    Ok(Extraction { project, kb, report })
}
