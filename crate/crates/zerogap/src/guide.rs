//! The book's chapters, compiled as doctests.
//!
//! Each module below carries one chapter of the mdbook guide in `book/src/`
//! as its documentation, so `cargo test --doc` exercises every code block
//! the book shows.  When a chapter changes, the corresponding doctests
//! change with it; the two cannot drift apart.
//!
//! (The chapters use plain-text interval notation like \[1,2\], which
//! rustdoc would misread as intra-doc links; the lint is silenced here so
//! the markdown stays clean for mdbook.)
#![allow(rustdoc::broken_intra_doc_links)]

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/arithmetic.md")]
pub mod arithmetic {}

#[doc = include_str!("../../../book/src/characters.md")]
pub mod characters {}

#[doc = include_str!("../../../book/src/gap-constants.md")]
pub mod gap_constants {}

#[doc = include_str!("../../../book/src/large-sieve.md")]
pub mod large_sieve {}

#[doc = include_str!("../../../book/src/zeros.md")]
pub mod zeros {}

#[doc = include_str!("../../../book/src/comparison.md")]
pub mod comparison {}
