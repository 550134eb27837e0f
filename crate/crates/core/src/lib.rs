//! A desk-scale laboratory for oracle relativizations of P vs NP.
//!
//! Problems (CNF formulas or set-sum instances) are small enough that every
//! input set can be enumerated, so each oracle construction and each oracle
//! machine can be checked against exhaustive ground truth.
//!
//! * [`formula`]: CNF formulas, canonical enumeration, brute-force SAT.
//! * [`encoding`]: pairing, Gödel numbers, partition and input codes.
//! * [`machine`]: budgets, oracle sessions and the deterministic and
//!   nondeterministic solvers.
//! * [`oracles`]: the A, B, C, C̄, D, D̄, E and F constructions.
//! * [`lambda`]: the set-sum analog classes and their oracle battery.
//! * [`harness`]: corpus generation, experiment suites and reports.

pub mod encoding;
pub mod error;
pub mod formula;
pub mod harness;
pub mod lambda;
pub mod machine;
pub mod oracles;

pub use error::{Error, Result};
