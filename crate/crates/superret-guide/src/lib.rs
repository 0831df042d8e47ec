//! Runs every code block in the guide (`book/src/*.md`) as a documentation
//! test, so the chapters can never drift out of sync with the library.
//! mdbook cannot execute snippets against a local crate by itself; including
//! each chapter as a `#[doc]` attribute hands the job to `cargo test --doc`.
//!
//! One module per chapter keeps failures attributable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/greens-tensor.md")]
pub mod greens_tensor {}

#[doc = include_str!("../../../book/src/fidelity.md")]
pub mod fidelity {}

#[doc = include_str!("../../../book/src/rings-maps-greedy.md")]
pub mod rings_maps_greedy {}

#[doc = include_str!("../../../book/src/continuum.md")]
pub mod continuum {}

#[doc = include_str!("../../../book/src/closed-forms.md")]
pub mod closed_forms {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
