//! Exact computations around genus-2 Siegel modular forms mod p^m.
//!
//! * [`padic`]: residues mod p^m and p-valued scalars.
//! * [`bqf`]: binary quadratic forms, the p-neighbor multiset and orbit cycles.
//! * [`symrep`]: Sym^d of the standard representation and the contraction map.
//! * [`qexp`]: truncated q-expansions, Hecke and theta operators, operator expressions.
//! * [`rootdata`]: GSp4 weights, Weyl chambers and vanishing predicates.
//! * [`commalg`]: modules over k[(Z/p^N)^q], defects, ordinary idempotents.

pub mod bqf;
pub mod commalg;
pub mod error;
pub mod io;
pub mod padic;
pub mod qexp;
pub mod rootdata;
pub mod symrep;
pub mod verify;

pub use error::{Error, Result};
