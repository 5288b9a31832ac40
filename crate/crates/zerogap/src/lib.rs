//! Zero-spacing statistics for Dirichlet L-functions.
//!
//! The crate computes, exactly where exactness is affordable and with paired
//! brute-force checks where it is not:
//!
//! - multiplicative arithmetic and pluggable L-function coefficients
//!   ([`arith`]),
//! - Dirichlet character groups, conductors, Gauss sums, and the weighted
//!   character average Δ(m,n) ([`characters`]),
//! - the kernel F(a,b), the gap functionals j_d and j_d*, the gap constants
//!   μ_d and λ_d, and the comparison function h(α) ([`special`]),
//! - large-sieve diagonal main terms and the arithmetic sums A(X), B(X)
//!   ([`als`]),
//! - critical-line zeros of Dirichlet L-functions, gap statistics, and the
//!   mollified means 𝓜 and 𝓜(α) ([`zeros`]).
//!
//! A narrative guide with runnable examples lives in `book/`; its code
//! blocks are compiled as doctests through the [`guide`] module.
//!
//! # Example
//!
//! ```
//! use zerogap::special::{j_small, solve_mu};
//!
//! let mu = solve_mu(1, 1e-10).unwrap();
//! assert!((j_small(1, mu.value) - 1.0).abs() <= 1e-10);
//! assert!(mu.value > 0.0 && mu.value < 1.0);
//! ```

pub mod als;
pub mod arith;
pub mod characters;
mod error;
pub mod guide;
pub mod quadrature;
pub mod special;
pub mod zeros;

pub use error::{Error, Result};
