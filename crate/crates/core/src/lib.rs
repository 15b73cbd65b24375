//! Finite stable configuration structures and behavioural equivalences over
//! them.
//!
//! The crate covers
//! - representation, validation and the causal semantics of configurations
//!   ([`structure`], [`validate`], [`order`]),
//! - CCS-style terms and their translation ([`terms`]),
//! - forward and reverse moves of several kinds ([`transitions`]),
//! - greatest-fixpoint checkers for nine forward/reverse bisimulations with
//!   distinguishing strategies ([`equivalence`]),
//! - random generation of structures and a property harness ([`genprop`]),
//! - a small corpus of classic example pairs ([`corpus`]).

pub mod corpus;
pub mod equivalence;
pub mod error;
pub mod genprop;
pub mod order;
pub mod structure;
pub mod terms;
pub mod transitions;
pub mod validate;

pub use equivalence::{
    check, check_all, check_with, maximal_bisimulation, maximal_bisimulation_with, verify_relation,
    CandidateRelation, CheckOptions, EquivalenceKind, EventIsomorphism, Side, Verdict, Violation,
    WitnessTree,
};
pub use error::{Error, Result};
pub use order::{
    auto_concurrency, causality, depths, lift, minimal_events, slice, slice_geq, slice_leq,
    AutoConcurrencyReport, CausalContext, DepthMap,
};
pub use structure::{
    ConfigStructure, Configuration, EventId, EventSet, Family, Label, LabelMultiset, Limits,
};
pub use terms::{parse, translate, translate_str, Term};
pub use transitions::{Direction, Move, MoveKind, StepConstraint};
pub use validate::{validate, validate_with, ValidationReport};
