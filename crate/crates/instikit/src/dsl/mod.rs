//! The textual model language (`.ikm` files): parser with positioned
//! diagnostics, canonical printer, and name resolution into the typed
//! objects of the institution modules. The grammar is documented in
//! `docs/dsl.md`.

pub mod ast;
pub mod lex;
pub mod parse;
pub mod print;
pub mod resolve;

pub use ast::{Diagnostic, ModelFile, Severity, Span};
pub use parse::parse_model;
pub use print::print_model;
pub use resolve::{resolve, resolve_with, ResolveOptions, ResolvedCheck, ResolvedModel, ResolvedSystem};
