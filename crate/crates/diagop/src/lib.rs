//! Desk-scale spectral calculus for diagonal self-adjoint operators.
//!
//! Every operator handled here is diagonal in a fixed labeled orthonormal
//! basis: it is the data of an eigenvalue sequence `{a_n}`, given as a finite
//! prefix plus a symbolic generator, together with declared tail metadata
//! (boundedness, accumulation set). Numeric facts come from sampling the
//! sequence up to a horizon; analytic facts about tails come from the
//! metadata, with sampled sanity checks in between.
//!
//! On top of that model the crate computes:
//!
//! - spectra, essential spectra, `σ̄_ess` (essential spectrum plus a
//!   boundedness bit), Weyl witnesses, compact-resolvent checks, and
//!   essential spectra via finite families of spectral intersections
//!   ([`spectra`], [`sets`]);
//! - the strong-resolvent-topology metric on co-diagonal pairs and
//!   norm-resolvent distances with tail certificates ([`metrics`]);
//! - optimal bottleneck (minimax) permutation matching and the
//!   unitary-modulo-compact construction it supports ([`matching`],
//!   [`equivalence`]);
//! - dyadic band profiles of operator domains and the Köthe/Fillmore-Williams
//!   shift criterion for unitary equivalence of dense operator ranges
//!   ([`domains`]);
//! - explicit local orbit walks by small compact steps ([`turbulence`]);
//! - spectral rounding of finite Hermitian matrices onto an ε-net
//!   ([`epsnet`]);
//! - a self-contained reproduction suite pinning all of the above to fixed
//!   tolerances ([`reproduce`]).
//!
//! All values are immutable after construction and every operation is a pure
//! function, so the API is safe to drive from any number of threads.

pub mod domains;
pub mod eigen;
pub mod epsnet;
pub mod equivalence;
pub mod expr;
pub mod family;
pub mod matching;
pub mod metrics;
pub mod operator;
pub mod pairing;
pub mod reproduce;
pub mod sets;
pub mod spectra;
pub mod turbulence;

pub use expr::{parse_generator, GenExpr, Pred};
pub use family::Family;
pub use operator::{AccumulationSpec, EigenvalueSequence, OperatorSpec, TailMeta};
pub use pairing::{pair_decode, pair_encode};
pub use sets::ClosedSetApprox;

use thiserror::Error;

/// Default sampling horizon used when a caller does not pick one.
pub const DEFAULT_HORIZON: u64 = 4096;
/// Default window half-width: sets are reported within `[-64, 64]`.
pub const DEFAULT_WINDOW: f64 = 64.0;
/// Default clustering resolution for sampled spectra.
pub const DEFAULT_RESOLUTION: f64 = 1e-6;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum DiagopError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },
    #[error("generator evaluates to non-finite value {value} at index {index}")]
    NonFiniteValue { index: u64, value: f64 },
    #[error("integer overflow in pair encoding of (k={k}, m={m})")]
    PairOverflow { k: u64, m: u64 },
    #[error("parameter out of range: {0}")]
    ParamRange(String),
    #[error("operators live in different bases: `{a}` vs `{b}`")]
    BasisMismatch { a: String, b: String },
    #[error("closed-set windows differ: [{0}, {1}] vs [{2}, {3}]")]
    WindowMismatch(f64, f64, f64, f64),
    #[error("declared tail metadata is inconsistent with samples: {0}")]
    InconsistentMetadata(String),
    #[error("input lists have different lengths: {a} vs {b}")]
    SizeMismatch { a: usize, b: usize },
    #[error("matrix is not Hermitian within tolerance (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("band profiles too short for the requested check: need {need}, have {have}")]
    InsufficientProfile { need: usize, have: usize },
    #[error("target not within delta-reachable tail at this horizon")]
    TargetNotReachable,
    #[error("walk leaves the neighborhood: step {step} has distance {dist} >= {bound}")]
    WalkOutsideNeighborhood { step: usize, dist: f64, bound: f64 },
    #[error("finite-rank perturbation touches index {index} beyond the probe window {window}")]
    ProbeWindowExceeded { index: u64, window: u64 },
    #[error("invalid operator spec: {0}")]
    InvalidSpec(String),
}
