//! Spectral-norm rearrangement inequalities for matrix words.
//!
//! A *word* is a finite product of powers of two symmetric positive
//! semidefinite matrices, `A^{m1} B^{n1} ... A^{ms} B^{ns}`. The question
//! this crate is built around: is the spectral norm of such a product
//! always dominated by the norm of the fully ordered product `A^m B^n`
//! with the same total exponents? The answer is yes for 2×2 matrices and
//! for small perturbations of the identity with nonsingular commutator,
//! and no in general from dimension 3 on.
//!
//! The crate provides
//!
//! - [`word`]: parsing, canonicalization and manipulation of words;
//! - [`linalg`]: small dense symmetric linear algebra (Jacobi
//!   eigendecomposition, spectral norms, PSD sampling, fractional powers);
//! - [`ncpoly`]: exact truncated expansion of perturbed words as
//!   noncommutative polynomials with big-integer coefficients;
//! - [`verify`]: numerical verifiers for the rearrangement gap, the 2×2
//!   eigenvalue certificate, trace inequalities, perturbation lemmas and
//!   a suite of classical operator-norm inequalities;
//! - [`search`]: derivative-free counterexample search over PSD pairs;
//! - [`certify`]: exact-rational certification of found violations;
//! - [`suites`]: batch drivers producing machine-readable reports.
//!
//! All randomness flows from a single `u64` seed through the portable
//! generator in [`rng`], so every result is bit-reproducible for any
//! thread count.


pub mod certify;
pub mod error;
pub mod search;
pub mod suites;
pub mod verify;
pub mod linalg;
pub mod ncpoly;
pub mod rng;



pub mod word;

pub use error::{Error, Result};
pub use linalg::{EigenDecomposition, Matrix, SymMatrix};
pub use ncpoly::NcPolynomial;
pub use verify::GapReport;

pub use word::Word;
