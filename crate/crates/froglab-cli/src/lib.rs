//! Library surface of the `froglab` experiments driver: sweep configuration
//! and execution, result emission, and the boundary report. The binary in
//! `main.rs` is a thin argument-parsing layer over these modules.

pub mod config;
pub mod emit;
pub mod lemma;
pub mod report;
pub mod sweep;
