//! Traceability extraction for C# projects.
//!
//! Source files are tokenized, reduced to a declaration model with per-body
//! reference lists, serialized as canonical XML, and loaded into a typed
//! knowledge graph that answers column-selection impact queries.

pub mod dot;
pub mod extract;
pub mod kb;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod populate;
pub mod query;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod xml;

pub use lexer::{tokenize, LexError, SourcePosition, Token, TokenKind};
pub use model::CodeModel;
pub use parser::{merge_models, parse_file, Diagnostic, MergeError, ParseError, ParsedFile};
pub use xml::{emit_xml, parse_xml, XmlError};
pub use extract::{extract_project, ExtractError, Extraction};
pub use kb::{KbError, KnowledgeBase};
pub use populate::{populate, PopulationReport};
pub use query::{compute_visibility, tree_children, tree_roots, SelectionQuery, VisibilityResult};
