//! Numerical workbench for heat semigroups on finite and almost-commutative
//! spectral triples.
//!
//! The crate builds finite spectral triples, Clifford modules and SU(2)/U(1)
//! homogeneous bundles, then certifies properties of the associated quantum
//! dynamical semigroups: complete positivity, conservativity, the Dirichlet
//! contraction inequality, covariance, smoothness, and the vacuum identity of a
//! discrete quantum stochastic dilation.
//!
//! The guide in `book/` walks through each module; its code listings are
//! compiled and run as doc-tests of this crate.

pub mod clifford;
pub mod dilation;
pub mod dirichlet;
pub mod error;
pub mod homogeneous;
pub mod matrix;
pub mod qds;
pub mod report;
pub mod sample;
pub mod triple;

pub use error::{Error, Result};
pub use matrix::{CMatrix, GradedMatrix, Spectrum};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/clifford.md")]
    mod clifford {}
    #[doc = include_str!("../../../book/src/triples.md")]
    mod triples {}
    #[doc = include_str!("../../../book/src/homogeneous.md")]
    mod homogeneous {}
    #[doc = include_str!("../../../book/src/semigroups.md")]
    mod semigroups {}
    #[doc = include_str!("../../../book/src/dirichlet.md")]
    mod dirichlet {}
    #[doc = include_str!("../../../book/src/dilation.md")]
    mod dilation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
