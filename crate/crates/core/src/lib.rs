//! An untyped computational lambda-calculus with a global store.
//!
//! The crate provides:
//!
//! - [`syntax`]: terms, binding, substitution, alpha-equivalence, sugar;
//! - [`store`]: the decidable equational algebra of store and lookup terms;
//! - [`eval`]: small-step and big-step operational semantics;
//! - [`types`]: four sorts of intersection types with subtyping;
//! - [`typing`]: explicit typing derivations, a rule-by-rule checker,
//!   derivation transformers along reduction, and the convergence certifier;
//! - [`realize`]: budgeted membership tests for the term-level type
//!   interpretation;
//! - [`enumgen`]: term/store/type enumeration and seeded random generation;
//! - [`suites`]: the batch property suites exercising the whole stack.

pub mod enumgen;
pub mod eval;
pub mod realize;
pub mod store;
pub mod suites;
pub mod syntax;
pub mod types;
pub mod typing;
