//! Exact integer decision engine for degrees of maps between closed oriented
//! `2n`-manifolds whose mapping problem reduces to integer matrix algebra.
//!
//! A map `M → L` of degree `k` inducing `P` on middle cohomology forces
//! `Pᵀ·A·P = k·B`, where `A` and `B` are the intersection forms. For
//! 4-manifolds with simply connected target that equation is also
//! sufficient; for `(n−1)`-connected `2n`-manifolds it is sufficient together
//! with a condition on the attaching-map invariants in `π_{2n−1}(Sⁿ)`.
//!
//! - [`intform`]: unimodular forms and their invariants
//! - [`catalog`]: named manifold models and connected sums
//! - [`homotopy`]: the `⟨ν⟩ ⊕ G` bookkeeping and the homotopy condition
//! - [`solver`]: the search for `P`, with complete filters and an oracle
//! - [`degsets`]: degree sets, degree-one splittings, self-maps, dominance
//! - [`io`] and [`cli`]: file formats and the command-line surface

pub mod catalog;
pub mod cli;
pub mod degsets;
pub mod homotopy;
pub mod intform;
pub mod io;
pub mod matrix;
pub mod scalar;
pub mod solver;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision integer.
pub type Int = BigInt;
/// Exact rational.
pub type Rational = BigRational;
/// Matrix of arbitrary-precision integers; carries `A`, `B` and `P`.
pub type IntMatrix = matrix::Matrix<BigInt>;
/// Matrix of exact rationals, used for congruence diagonalization.
pub type RatMatrix = matrix::Matrix<BigRational>;
/// Machine-integer matrix used by the fast search path.
pub type SmallIntMatrix = matrix::Matrix<i64>;

pub use intform::{IntersectionForm, Parity, Signature, Symmetry};
pub use solver::{congruence_solve, SearchConfig, Verdict};
