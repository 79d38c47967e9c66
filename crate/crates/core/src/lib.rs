//! Exact-arithmetic workbench for lattice-ordered algebras: Grothendieck
//! envelopes of ℓ-monoids, states of prelinear semihoops, the decomposition
//! of IBP₀-algebras into a Boolean skeleton and a radical semihoop, and the
//! splitting of hyperstates into a probability measure and a semihoop state.

pub mod cli;
pub mod cone;
pub mod corpus;
pub mod error;
pub mod hypernum;
pub mod ibp0;
pub mod io;
pub mod lmonoid;
pub mod report;
pub mod scan;
pub mod semihoop;
pub mod states;
pub mod table;

pub use error::{Error, Result};
