//! Combinatorial classification engine for connected solvable spherical
//! subgroups of semisimple algebraic groups.
//!
//! The pipeline goes root system -> Chevalley algebra -> admissible marked
//! roots -> combinatorial data `(S, M, pi, ~)` -> reconstructed subgroup models
//! -> sphericity checks -> exhaustive enumeration with canonical forms under
//! elementary transformations.

pub mod error;
pub mod combinatorial_data;
pub mod enumeration;
pub mod lie_algebra;
pub mod linalg;
pub mod marked_roots;
pub mod reconstruction;
pub mod root_system;
pub mod sphericity;

pub use error::{Error, Result};

/// Exact rational scalar used by every algebraic computation.
pub type Rat = num::BigRational;

/// Exact rational subspace in canonical row-reduced form.
pub type QSubspace = linalg::Subspace<Rat>;
