//! Off-diagonal decay algebras of matrices, differential norms and
//! norm-controlled inversion.
//!
//! The crate works with finite square matrices indexed by an integer window
//! (a finite section of a bi-infinite matrix) and provides
//!
//! - the Schur, BGS, Beurling and Jaffard norms with polynomial weights, and
//!   the `ℓ²` operator norm by power iteration ([`norms`]);
//! - checks and estimates for differential inequalities and the power
//!   condition `‖A^m‖ ≤ D‖A‖^{m−θ}‖A‖_B^θ` ([`differential`]);
//! - a Neumann-series inversion engine that certifies an explicit bound on
//!   `‖A^{−1}‖` in the decay norm ([`inversion`]);
//! - the Wiener algebra and `C¹[a, b]` counterparts ([`function`]);
//! - seeded generators for all of the above ([`generators`]).
//!
//! ```
//! use normctl::{AlgebraSpec, FiniteMatrix, Family};
//!
//! let a = FiniteMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]])?;
//! let spec = AlgebraSpec::new(Family::Schur, 1.0, 1.0)?;
//! assert_eq!(spec.norm(&a)?, 4.0);
//! # Ok::<(), normctl::Error>(())
//! ```

pub mod differential;
pub mod error;
pub mod function;
pub mod generators;
pub mod inversion;
pub mod matrix;
pub mod norms;
mod scaled;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
pub use matrix::{laurent_from_symbol, FiniteMatrix, FourierSymbol, IndexWindow};
pub use norms::{AlgebraSpec, Family};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/norms.md")]
    mod norms {}
    #[doc = include_str!("../../../book/src/differential.md")]
    mod differential {}
    #[doc = include_str!("../../../book/src/inversion.md")]
    mod inversion {}
    #[doc = include_str!("../../../book/src/functions.md")]
    mod functions {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
}
