//! Numerical machinery for an inverse source problem on a mixed
//! time-fractional parabolic-hyperbolic equation
//!
//! ```text
//! f(x) = D^alpha_{0t} u - u_xx,   t > 0   (Caputo, 0 < alpha <= 1)
//! f(x) = D^beta_{t0}  u - u_xx,   t < 0   (Caputo, 1 < beta <= 2)
//! ```
//!
//! on `0 < x < 1`, `-p < t < q`, with `u(0,t) = u(1,t)`, `u_x(0,t) = 0`,
//! `u(x,-p) = u(x,q) = 0` and a transmitting condition across `t = 0`.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure computation:
//! special functions, Caputo quadrature, closed-form time modes, the
//! determinant analysis, field assembly, verification and root scans.
//! File formats and the command line live in the `fracmix` crate.

#![no_std]

extern crate alloc;

pub mod assembly;
pub mod bigfloat;
pub mod caputo;
pub mod modes;
pub mod scan;
pub mod error;
pub mod inverse;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
