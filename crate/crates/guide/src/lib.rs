//! Doc-test carrier for the guide in `book/`.
//!
//! mdbook renders the chapters but cannot run their Rust snippets as tests,
//! so each chapter is also included here as a rustdoc page: `cargo test
//! --doc -p orbitpair-guide` compiles and runs every code block the book
//! shows, keeping the prose and the library in lockstep. One module per
//! chapter so a failing snippet points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/census.md")]
pub mod census {}

#[doc = include_str!("../../../book/src/thermodynamics.md")]
pub mod thermodynamics {}

#[doc = include_str!("../../../book/src/predictions.md")]
pub mod predictions {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
