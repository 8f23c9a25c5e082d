//! Exact arithmetic for 2-torsion Brauer classes over Q, the rational function
//! field Q(x), and iterated Laurent series towers over Q, together with the
//! 2-descent machinery that bounds genus sizes via Tate-Shafarevich groups.
//!
//! The crate is organized bottom-up:
//! - [`arith`]: places of Q, factorization, Jacobi symbols, local square tests;
//! - [`brq`]: quaternion classes over Q as even ramification sets;
//! - [`qx`]: polynomials and classes over Q(x): tame residues, the Faddeev
//!   decomposition, specialization, genus certificates, split points;
//! - [`laurent`]: monomial classes over iterated Laurent series fields,
//!   normal forms, index-2 certification, genus and gen-spl reports;
//! - [`descent`]: 2-isogeny and full 2-descent Selmer computations with exact
//!   local solvability, Sha-based genus bounds, and quadratic-twist refinement.

pub mod arith;
pub mod brq;
pub mod config;
pub mod descent;
pub mod error;
pub mod laurent;
pub mod qx;

pub use arith::{PlaceQ, Rat};
pub use brq::{BrauerClass2Q, SymbolQ};
pub use config::{Config, OutputMode};
pub use error::{Error, Result};
