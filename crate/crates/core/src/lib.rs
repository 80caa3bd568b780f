//! Classical kernel functions of potential theory on smooth, finitely
//! connected planar domains.
//!
//! The crate is `no_std` (it needs `alloc`) and has no IO. Everything is
//! built on one boundary discretization: each boundary curve is a
//! trigonometric polynomial sampled at equispaced parameters, so the
//! trapezoid rule, spectral differentiation and Cauchy integrals are all
//! spectrally accurate.
//!
//! Module map:
//!
//! * [`geometry`]: curves, domains, boundary grids, point membership.
//! * [`numerics`]: dense LU, QR least squares, Gram–Schmidt, smallest
//!   singular pairs, circular derivative stencils.
//! * [`hardy`]: weighted boundary inner products, the Hardy projection,
//!   weighted Szegő and Garabedian kernels, Cauchy evaluation.
//! * [`classical`]: the unweighted Szegő and Garabedian kernels, Ahlfors
//!   maps and their zeros.
//! * [`potential`]: Dirichlet problems, Green's function, harmonic
//!   measure, Poisson weight, Bergman kernel and `Λ`.
//! * [`reconstruct`]: finite-rank reconstruction of the Szegő kernels from
//!   proper maps.
//! * [`verify`]: boundary identity residuals, class witnesses and the
//!   algebraic dependence detector.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classical;
pub mod error;
pub mod geometry;
pub mod hardy;
pub mod numerics;
pub mod potential;
pub mod reconstruct;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

pub(crate) mod prelude {
    pub use alloc::string::String;
    pub use alloc::sync::Arc;
    pub use alloc::vec;
    pub use alloc::vec::Vec;
    pub use core::f64::consts::PI;
    pub use num_traits::Float;

    pub use crate::error::{Error, Result};
    pub use crate::C64;

    pub const I: C64 = C64::new(0.0, 1.0);
    pub const ZERO: C64 = C64::new(0.0, 0.0);
    pub const ONE: C64 = C64::new(1.0, 0.0);

    #[inline]
    pub fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }
}
