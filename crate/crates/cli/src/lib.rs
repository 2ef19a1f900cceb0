//! Library side of the `pueb` command-line tool.

pub mod commands;
pub mod dims;
pub mod report;
pub mod verify;
