//! Checker for Euclid-style proof scripts.
//!
//! The system works over a six-sorted language (points, lines, circles;
//! segment, angle, and area magnitudes) and verifies proofs built from:
//!
//! - construction steps introducing new objects (points, lines, circles,
//!   intersections) when their prerequisites hold,
//! - diagrammatic inferences (the forward-chaining closure in [`diagram`]),
//! - metric inferences (linear arithmetic over ordered magnitudes in
//!   [`metric`]),
//! - transfer inferences bridging the two ([`transfer`]),
//! - case splits, reductio, superposition, and theorem application
//!   ([`engine`]).
//!
//! Brute-force reference checkers live in [`oracle`]; they back the test
//! suite and the `decide` CLI command.

pub mod ast;
pub mod constructions;
pub mod diagram;
pub mod engine;
pub mod lang;
pub mod library;
pub mod metric;
pub mod oracle;
pub mod parser;
pub mod render;
pub mod run;
pub mod transfer;

pub use lang::{
    DiagramAtom, DiagramLit, Literal, MagAtom, MagSort, MagnitudeTerm, MetricAtom, MetricLit,
    MetricRel, Obj, ObjTable, Pred, Sort, TheoremStatement,
};
