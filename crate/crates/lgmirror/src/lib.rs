//! Exact genus-zero Landau–Ginzburg mirror symmetry for invertible
//! polynomials, with a built-in catalog of the 14 exceptional unimodular
//! singularities.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod brieskorn;
pub mod catalog;
pub mod cli;
pub mod fjrw;
pub mod frobenius;
pub mod jacobi;
pub mod primitive;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/jacobi.md")]
    mod jacobi {}
    #[doc = include_str!("../../../book/src/prepotential.md")]
    mod prepotential {}
    #[doc = include_str!("../../../book/src/fjrw.md")]
    mod fjrw {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
