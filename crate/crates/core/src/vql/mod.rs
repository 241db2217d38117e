//! The visualization query language: grammar, AST, canonical form, matching.

mod ast;
mod canonical;
mod error;
mod lexer;
mod matching;
mod parser;
mod unparse;

pub use ast::*;
pub use canonical::{canonical_string, canonicalize};
pub use error::VqlError;
pub use lexer::{tokenize, Token, TokenKind};
pub use matching::{compare_canonical, component_match, tree_match, ComponentReport, DataMatch};
pub use parser::{parse_vql, parse_vql_bytes, validate_structure};
pub use unparse::unparse_vql;
