//! Exact computations with Whittaker scalar products, the q-Toda
//! eigenfunction and fermionic characters of principal subspaces.
//!
//! Everything is exact: scalars are Laurent polynomials in `v` with rational
//! coefficients, and `q = v^2`. Infinite series are expanded inside an explicit
//! [`multivar::TruncSpec`] window. Start with [`gz::jd_explicit`] for scalar products,
//! [`fermionic`] for the sum side and [`characters`] for characters. The
//! `pchar` binary exposes the same checks through [`verify`] and [`suite`].

pub mod characters;
pub mod cli;
pub mod error;
pub mod fermionic;
pub mod gz;
pub mod multivar;
pub mod report;
pub mod scalar;
pub mod suite;
pub mod toda;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/whittaker.md")]
    mod whittaker {}
    #[doc = include_str!("../../../book/src/toda.md")]
    mod toda {}
    #[doc = include_str!("../../../book/src/fermionic.md")]
    mod fermionic {}
    #[doc = include_str!("../../../book/src/characters.md")]
    mod characters {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
