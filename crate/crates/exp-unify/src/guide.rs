//! The mdbook guide, attached as module documentation so the book's code
//! snippets run under `cargo test` and cannot drift from the library.

#[doc = include_str!("../../../book/src/terms.md")]
pub mod terms {}

#[doc = include_str!("../../../book/src/inference-rules.md")]
pub mod inference_rules {}

#[doc = include_str!("../../../book/src/failure-graphs.md")]
pub mod failure_graphs {}

#[doc = include_str!("../../../book/src/solving.md")]
pub mod solving {}

#[doc = include_str!("../../../book/src/rewrite-oracle.md")]
pub mod rewrite_oracle {}

#[doc = include_str!("../../../book/src/group-extension.md")]
pub mod group_extension {}
