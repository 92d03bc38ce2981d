//! Java front end: lexer, error-tolerant parser and syntax tree.

mod ast;
pub mod lexer;
mod parser;
pub mod visit;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use ast::*;
pub use parser::{is_keyword, LambdaListener, ParseOptions};
pub use visit::{all_types, conditional_count};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{} is not valid UTF-8 (byte offset {offset})", path.display())]
    Encoding { path: PathBuf, offset: usize },
}

/// Parses source text without lambda-listener materialization. Never fails:
/// malformed regions become opaque nodes with diagnostics.
pub fn parse_unit(file: &Path, text: &str) -> CompilationUnit {
    parse_unit_with(file, text, &ParseOptions::default())
}

pub fn parse_unit_with(file: &Path, text: &str, options: &ParseOptions) -> CompilationUnit {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    parser::Parser::new(text, options).parse_unit(file)
}

/// Decodes `bytes` as UTF-8 and parses them.
pub fn parse_bytes(file: &Path, bytes: &[u8], options: &ParseOptions) -> Result<CompilationUnit, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Encoding { path: file.to_path_buf(), offset: e.valid_up_to() })?;
    Ok(parse_unit_with(file, text, options))
}

pub fn parse_file(path: &Path, options: &ParseOptions) -> Result<CompilationUnit, ParseError> {
    let bytes = std::fs::read(path).map_err(|source| ParseError::Io { path: path.to_path_buf(), source })?;
    parse_bytes(path, &bytes, options)
}

/// Flattens every type of the unit that could implement a listener.
pub fn iter_listener_capable_types(unit: &CompilationUnit) -> Vec<&TypeDeclaration> {
    all_types(unit)
}
