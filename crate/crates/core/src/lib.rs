//! Linkage-based independence systems on finite digraphs.
//!
//! A *dimaze* is a digraph together with a set of out-degree-0 vertices, the
//! *exits*. A vertex set is *independent* when a family of pairwise disjoint
//! directed paths links it to the exits. This crate provides:
//!
//! * the dimaze/linkage data model with a plain-text format, JSON and DOT
//!   export ([`dimaze`]), plus generators for the standard parameterized
//!   families ([`families`]);
//! * an independence oracle built on alternating-walk augmentation, with
//!   Menger-style separators on linkages ([`linkage`]);
//! * the two-linkage merge construction, the exchange step and the
//!   alternating-comb trace derived from it ([`merge`]);
//! * matroid axiom checking, circuits/cocircuits, separation values and
//!   finitarisation probes over any independence oracle ([`matroid`]);
//! * transversal systems on bipartite graphs, including the stage-indexed
//!   maximal-extension algorithm for trees ([`transversal`]).
//!
//! Everything is deterministic: vertex identifiers are strings and all
//! tie-breaking follows their lexicographic order.

pub mod dimaze;
pub mod families;
pub mod linkage;
pub mod matroid;
pub mod merge;
pub mod transversal;

pub use dimaze::{Dimaze, DirectedPath, Linkage, VertexId};
pub use families::FamilyGenerator;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A malformed line in one of the text formats.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// An edge, exit or query referenced an undeclared vertex.
    #[error("unknown vertex `{id}` in {context}")]
    UnknownVertex { id: String, context: String },
    /// A generator or operation received an inadmissible parameter.
    #[error("invalid parameter {name}={value}: {msg}")]
    Param {
        name: &'static str,
        value: usize,
        msg: &'static str,
    },
    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// An enumeration was refused because the ground set is too large.
    #[error("ground set of size {size} exceeds enumeration guard {guard}")]
    SizeGuard { size: usize, guard: usize },
    /// Structural preconditions (tree shape, bipartition, root) failed.
    #[error("mode error: {0}")]
    Mode(String),
    /// An internal cross-check failed; this signals a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Default cap on ground-set size for exhaustive enumerations.
pub const DEFAULT_SIZE_GUARD: usize = 20;

/// Enumeration guard: `GAMMOID_SIZE_GUARD` overrides the default of 20.
pub fn size_guard() -> usize {
    std::env::var("GAMMOID_SIZE_GUARD")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_SIZE_GUARD)
}
