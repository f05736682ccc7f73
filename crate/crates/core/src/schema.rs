//! Machine-readable views shared by the command-line tool and the HTTP
//! service.
//!
//! Every top-level document carries `schema_version`. Partial terms are
//! encoded as externally tagged trees with holes as the string `"_"`;
//! states as ordered arrays of `{name, value}` with `null` for a hole.
//! Each structured term is accompanied by its canonical text rendering.

use std::ops::Range;

use serde::Serialize;

use crate::lattice::{hole_positions, Position, SizeExceeded};
use crate::oracle::OracleError;
use crate::parse::ParseError;
use crate::render::render_with_spans;
use crate::slicer::{SliceError, SliceOutcome};
use crate::state::{PartialState, State};
use crate::syntax::{Command, PartialCommand, Partialize};
use crate::tracer::{Derivation, EvalError, TraceStats};

pub const SCHEMA_VERSION: u32 = 1;

/// A document tagged with the schema version.
#[derive(Clone, Debug, Serialize)]
pub struct Versioned<T> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub body: T,
}

pub fn versioned<T>(body: T) -> Versioned<T> {
    Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunView {
    pub output_state: State,
    pub output_text: String,
    pub trace_stats: TraceStats,
}

impl RunView {
    pub fn new(d: &Derivation) -> Self {
        RunView {
            output_state: d.output.clone(),
            output_text: d.output.to_string(),
            trace_stats: d.stats(),
        }
    }
}

/// Where one hole of a slice sits, both in the canonical text of the
/// original program (for dimming) and in the text of the slice itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoleSpan {
    pub position: Position,
    /// Byte range in `program_text`.
    pub start: usize,
    pub end: usize,
    /// Byte range of the `_` in `program_slice_text`.
    pub slice_start: usize,
    pub slice_end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceView {
    pub program_text: String,
    pub program_slice: PartialCommand,
    pub program_slice_text: String,
    pub input_slice: PartialState,
    pub input_slice_text: String,
    pub holes: Vec<HoleSpan>,
}

fn span(r: Option<Range<usize>>) -> Range<usize> {
    r.expect("every hole position exists in both renderings")
}

impl SliceView {
    pub fn new(program: &Command, outcome: &SliceOutcome) -> Self {
        let full = render_with_spans(&program.partialize());
        let slice = render_with_spans(&outcome.program_slice);
        let holes = hole_positions(&outcome.program_slice)
            .into_iter()
            .map(|position| {
                let in_program = span(full.span_of(&position));
                let in_slice = span(slice.span_of(&position));
                HoleSpan {
                    position,
                    start: in_program.start,
                    end: in_program.end,
                    slice_start: in_slice.start,
                    slice_end: in_slice.end,
                }
            })
            .collect();
        SliceView {
            program_text: full.text,
            program_slice: outcome.program_slice.clone(),
            program_slice_text: slice.text,
            input_slice: outcome.input_slice.clone(),
            input_slice_text: outcome.input_slice.to_string(),
            holes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForwardView {
    pub partial_output: PartialState,
    pub partial_output_text: String,
}

impl ForwardView {
    pub fn new(out: PartialState) -> Self {
        ForwardView {
            partial_output_text: out.to_string(),
            partial_output: out,
        }
    }
}

/// Error taxonomy shared by all front ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    ParseError,
    DuplicateVariable,
    UnboundVariable,
    Overflow,
    FuelExhausted,
    CriterionMismatch,
    LatticeMismatch,
    SizeExceeded,
    LawViolation,
    NotFound,
    BadRequest,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::ParseError => "parse_error",
            ErrorKind::DuplicateVariable => "duplicate_variable",
            ErrorKind::UnboundVariable => "unbound_variable",
            ErrorKind::Overflow => "overflow",
            ErrorKind::FuelExhausted => "fuel_exhausted",
            ErrorKind::CriterionMismatch => "criterion_mismatch",
            ErrorKind::LatticeMismatch => "lattice_mismatch",
            ErrorKind::SizeExceeded => "size_exceeded",
            ErrorKind::LawViolation => "law_violation",
            ErrorKind::NotFound => "not_found",
            ErrorKind::BadRequest => "bad_request",
        }
    }
}

/// A diagnostic: its kind, a human-readable message and, where known, the
/// location it refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorView {
    pub error: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<String>,
    /// Which input the diagnostic is about (`program`, `state`, ...).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl ErrorView {
    pub fn new(error: ErrorKind, message: impl Into<String>) -> Self {
        ErrorView {
            error,
            message: message.into(),
            line: None,
            column: None,
            expected: None,
            position: None,
            cardinality: None,
            source: None,
        }
    }

    pub fn in_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }
}

impl From<&ParseError> for ErrorView {
    fn from(e: &ParseError) -> Self {
        let kind = match e {
            ParseError::Syntax { .. } => ErrorKind::ParseError,
            ParseError::DuplicateVariable { .. } => ErrorKind::DuplicateVariable,
        };
        let mut v = ErrorView::new(kind, e.to_string());
        v.line = Some(e.line());
        v.column = Some(e.column());
        if let ParseError::Syntax { expected, .. } = e {
            v.expected = Some(expected.clone());
        }
        v
    }
}

impl From<&EvalError> for ErrorView {
    fn from(e: &EvalError) -> Self {
        let kind = match e {
            EvalError::UnboundVariable { .. } => ErrorKind::UnboundVariable,
            EvalError::FuelExhausted { .. } => ErrorKind::FuelExhausted,
            EvalError::Overflow { .. } => ErrorKind::Overflow,
        };
        ErrorView::new(kind, e.to_string())
    }
}

impl From<&SliceError> for ErrorView {
    fn from(e: &SliceError) -> Self {
        match e {
            SliceError::CriterionMismatch { .. } => ErrorView::new(ErrorKind::CriterionMismatch, e.to_string()),
            SliceError::Lattice(m) => {
                let mut v = ErrorView::new(ErrorKind::LatticeMismatch, e.to_string());
                v.position = Some(m.position.clone());
                v
            }
            SliceError::Overflow { position } => {
                let mut v = ErrorView::new(ErrorKind::Overflow, e.to_string());
                v.position = Some(position.clone());
                v
            }
        }
    }
}

impl From<&SizeExceeded> for ErrorView {
    fn from(e: &SizeExceeded) -> Self {
        let mut v = ErrorView::new(ErrorKind::SizeExceeded, e.to_string());
        v.cardinality = Some(e.cardinality.to_string());
        v
    }
}

impl From<&OracleError> for ErrorView {
    fn from(e: &OracleError) -> Self {
        match e {
            OracleError::SizeExceeded(s) => s.into(),
            OracleError::Slice(s) => s.into(),
            OracleError::NotBelowOutput(_) => ErrorView::new(ErrorKind::CriterionMismatch, e.to_string()),
            OracleError::NoLeastElement { .. } | OracleError::LawViolation(_) => {
                ErrorView::new(ErrorKind::LawViolation, e.to_string())
            }
        }
    }
}
