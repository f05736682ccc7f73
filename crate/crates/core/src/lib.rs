//! Dynamic program slicing for Imp.
//!
//! The crate records big-step execution traces of Imp programs and uses them
//! to slice in both directions:
//!
//! - [`slicer::fwd_cmd`] evaluates a *partial* program on a *partial* input
//!   state along a trace, propagating holes;
//! - [`slicer::bwd_cmd`] maps a partial output state (the slicing criterion)
//!   to the least partial program and input state that still recompute it.
//!
//! For every derivation the two directions form a Galois connection between
//! the prefix lattice of `(program, input)` and the prefix lattice of the
//! output state. [`oracle`] certifies this by exhaustive enumeration.
//!
//! ```
//! use imp_slice_core::{parse_command, parse_state, parse_partial_state, tracer};
//!
//! let program = parse_command(
//!     "if (y = 1) then { y := x + 1 } else { y := y + 1 } ; z := z + 1",
//! ).unwrap();
//! let input = parse_state("x = 1, y = 0, z = 2").unwrap();
//! let run = tracer::eval_cmd(&input, &program, tracer::DEFAULT_FUEL).unwrap();
//! assert_eq!(run.output.to_string(), "x = 1, y = 1, z = 3");
//!
//! let criterion = parse_partial_state("x = _, y = 1, z = _").unwrap();
//! let slice = run.backward(&criterion).unwrap();
//! assert_eq!(
//!     slice.program_slice.to_string(),
//!     "if (y = 1) then { _ } else { y := y + 1 } ; _",
//! );
//! assert_eq!(slice.input_slice.to_string(), "x = _, y = 0, z = _");
//! ```

pub mod lattice;
pub mod oracle;
pub mod parse;
pub mod render;
pub mod schema;
pub mod slicer;
pub mod state;
pub mod syntax;
pub mod tracer;

pub use lattice::{Cardinality, Lattice, LatticeMismatch, Position, PrefixWitness};
pub use parse::{
    parse_arith, parse_bool, parse_command, parse_partial_arith, parse_partial_bool, parse_partial_command,
    parse_partial_state, parse_state, ParseError,
};
pub use slicer::{SliceError, SliceOutcome};
pub use state::{Domain, PartialState, State};
pub use syntax::{
    ArithExpr, ArithOp, BoolExpr, CmpOp, Command, PartialArithExpr, PartialBoolExpr, PartialCommand, Value,
};
pub use tracer::{Derivation, EvalError};
