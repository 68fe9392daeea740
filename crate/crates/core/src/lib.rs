//! Workbench for finite unary semigroups and their division bimagmas.
//!
//! A *unary semigroup* is a semigroup `(S, ·)` equipped with an arbitrary
//! unary operation `′`. Its *division bimagma* is the structure `(S, \, /)`
//! with `x\y = x′·y` and `x/y = x·y′`. The crate provides:
//!
//! - immutable finite-algebra values with validation and isomorphism
//!   canonicalization ([`algebra`]),
//! - a term/identity engine over the signature `{\, /, ·, ′}` ([`term`]),
//! - the two conversion maps between unary semigroups and bimagmas together
//!   with well-definedness reports ([`functors`]),
//! - a registry of named identities and class predicates for both signatures
//!   ([`classes`]),
//! - bounded exhaustive model search with pruning and isomorphism dedup
//!   ([`search`]),
//! - an equational proof checker for step-by-step rewrite derivations
//!   ([`proof`]),
//! - a curated corpus of small models with machine-checked expected profiles
//!   ([`fixtures`]).

pub mod algebra;
pub mod classes;
pub mod fixtures;
pub mod functors;
pub mod proof;
pub mod search;
pub mod term;
