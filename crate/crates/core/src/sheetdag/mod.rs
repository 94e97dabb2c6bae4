//! A small spreadsheet engine: formula parsing, dependency graph
//! construction and incremental (dirty-set) re-evaluation.
//!
//! Cells are addressed by symbolic names rather than A1-style coordinates.
//! Cells whose formula is a numeric literal are *input* cells and may be
//! overwritten with [`SheetGraph::set_input`]; every other cell is derived.

mod ast;
mod graph;
mod parser;

use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{BinaryOp, FormulaAst, Function};
pub use graph::{SheetGraph, ValueMap};
pub use parser::parse_formula;

/// Name of a cell: a letter followed by letters, digits or underscores.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CellId(String);

impl CellId {
    pub fn new(name: impl Into<String>) -> Result<Self, SheetError> {
        let name = name.into();
        if is_valid_name(&name) {
            Ok(Self(name))
        } else {
            Err(SheetError::InvalidCellName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for CellId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for CellId {
    type Error = SheetError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        CellId::new(value)
    }
}

impl From<CellId> for String {
    fn from(id: CellId) -> Self {
        id.0
    }
}

/// Why a formula could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    /// Negative base raised to a non-integer power.
    DomainError,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalErrorKind::DivisionByZero => f.write_str("division by zero"),
            EvalErrorKind::DomainError => f.write_str("domain error"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SheetError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown function `{name}` at position {position}")]
    UnknownFunction { name: String, position: usize },
    #[error("invalid cell name `{0}`")]
    InvalidCellName(String),
    #[error("cell `{0}` is defined more than once")]
    DuplicateCell(String),
    #[error("cell `{cell}` references undefined cell `{missing}`")]
    UndefinedReference { cell: CellId, missing: CellId },
    #[error("dependency cycle: {}", display_cycle(.0))]
    Cycle(Vec<CellId>),
    #[error("no such cell `{0}`")]
    UnknownCell(String),
    #[error("cell `{0}` holds a derived formula and cannot be set")]
    NotAnInputCell(CellId),
    #[error("{kind} while evaluating cell `{cell}`")]
    Eval { cell: CellId, kind: EvalErrorKind },
    #[error("invalid sheet definition: {0}")]
    Definition(String),
}

fn display_cycle(cells: &[CellId]) -> String {
    let mut out: Vec<&str> = cells.iter().map(CellId::as_str).collect();
    if let Some(first) = cells.first() {
        out.push(first.as_str());
    }
    out.join(" -> ")
}
