//! Exact matrix decomposition with fixed sparsity supports.
//!
//! The crate answers three related questions about structured sparse
//! factorization:
//!
//! 1. Given a matrix `Z` and a tuple of rank-one supports, can the rank-one
//!    terms summing to `Z` be recovered exactly, and are they unique? The
//!    [`emd`] module implements the iterative completion algorithm and the
//!    [`supports`] module the closability test that certifies it.
//! 2. Can a fast transform (DFT, DCT-II, DST-II, Hadamard) be factored into
//!    its butterfly layers from the dense matrix alone, knowing only the
//!    support chain? The [`hier`] module implements hierarchical lifting and
//!    recovery under any factor-grouping tree.
//! 3. Are the sparsity patterns themselves forced? The [`oracle`] module
//!    enumerates every rank-one support partition compatible with a matrix
//!    under column-sparsity bounds and certifies uniqueness by brute force.
//!
//! Matrices are dense complex with 1-based public indices throughout, matching
//! the usual linear-algebra convention for transform definitions.

pub mod cli;
pub mod emd;
pub mod error;
pub mod fixtures;
pub mod hier;
pub mod json;
pub mod mask;
pub mod matrix;
pub mod oracle;
pub mod perm;
pub mod supports;
pub mod tol;
pub mod transforms;

pub use error::Error;
pub use mask::SupportMask;
pub use matrix::ComplexMatrix;
pub use perm::Permutation;
pub use tol::TolerancePolicy;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
