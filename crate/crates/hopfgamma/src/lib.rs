//! Exact computer algebra for a family of group-graded Hopf algebras built
//! from root-of-unity braiding data.
//!
//! The crate provides:
//!
//! - arithmetic in cyclotomic fields Q(zeta_N) and exact linear algebra
//!   ([`scalar`], [`linalg`]);
//! - finite-dimensional Hopf algebras as sparse structure constants, with
//!   axiom verifiers, duals, integrals and cocycle twists ([`hopf`]);
//! - the quantum-linear-space construction: braiding datum, character
//!   group, PBW normal forms, fiber algebras and their connecting maps
//!   ([`qls`]);
//! - the graded system of fiber duals with verifiers for strong grading,
//!   the exact sequence, coradical behaviour, cosemisimplicity and
//!   twisting ([`graded`]);
//! - exact Cayley-ball growth of subgroups of the parameter group, growth
//!   classification and the induced dimension/Noetherianity/regularity
//!   verdicts ([`growth`]).

pub mod check;
pub mod error;
pub mod graded;
pub mod growth;
pub mod hopf;
pub mod linalg;
pub mod qls;
pub mod scalar;

pub use check::{CheckEntry, CheckReport};
pub use error::{Error, Result};
