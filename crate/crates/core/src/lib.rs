//! Exact arithmetic for orthogonal discriminants of ordinary group characters.
//!
//! The crate is organized bottom-up:
//!
//! * [`cyclo`] — cyclotomic field elements `Q(zeta_n)`, abelian subfields as
//!   fixed groups of `(Z/n)^x`, Galois action, relative norms, certified
//!   numeric embeddings.
//! * [`sqclass`] — square classes of abelian fields, exact squareness
//!   decisions, dyadic places and valuations, oddness of classes.
//! * [`groups`] — small permutation groups, conjugacy data, the named corpus.
//! * [`chartab`] — ordinary character tables (finite-field eigenvector
//!   method), Frobenius–Schur indicators, restriction/induction.
//! * [`orthdisc`] — orthogonal stability and the discriminant decision
//!   procedures (p-group formulas, decomposition and recursion).
//! * [`oracle`] — independent cross-check: explicit representations,
//!   averaged invariant forms, discriminants of Gram matrices.
//! * [`report`] — deterministic JSON reports and the built-in corpus runner.

pub mod arith;
pub mod chartab;
pub mod cyclo;
pub mod error;
pub mod groups;
pub mod oracle;
pub mod orthdisc;
pub mod report;
pub mod sqclass;

pub use error::{Error, Result};
