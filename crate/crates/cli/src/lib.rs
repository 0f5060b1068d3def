//! Library surface of the command-line driver: configuration parsing and
//! deterministic file output, reused by the binary and by integration tests.

pub mod config;
pub mod output;
