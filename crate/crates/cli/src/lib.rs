//! Library surface of the command-line front end; `main.rs` is a thin
//! dispatcher around these modules so that integration tests can drive
//! parsing, report emission and the verification suite directly.

pub mod args;
pub mod report;
pub mod verify;
