//! Each chapter of the guide is a module here, so `cargo test` runs its
//! listings as doctests and keeps the book honest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/kernel.md")]
pub mod kernel {}

#[doc = include_str!("../../../book/src/algebras.md")]
pub mod algebras {}

#[doc = include_str!("../../../book/src/sectors.md")]
pub mod sectors {}

#[doc = include_str!("../../../book/src/measurement.md")]
pub mod measurement {}

#[doc = include_str!("../../../book/src/projective.md")]
pub mod projective {}

#[doc = include_str!("../../../book/src/channels.md")]
pub mod channels {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
