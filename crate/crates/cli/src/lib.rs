//! Library surface of the `revmix` command-line tool: chain-file loading,
//! command implementations, and the deterministic report writer. The binary
//! in `main.rs` is a thin argument-parsing wrapper so the test suites can
//! drive everything in process.

pub mod chainspec;
pub mod commands;
pub mod report;
