//! Command line and HTTP front ends.

pub mod args;
pub mod commands;
pub mod server;
