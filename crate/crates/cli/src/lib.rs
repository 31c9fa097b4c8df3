//! File formats, manifests and subcommands of the `nqs-ising` tool.

pub mod analysis;
pub mod bench;
pub mod commands;
pub mod error;
pub mod formats;
pub mod manifest;
