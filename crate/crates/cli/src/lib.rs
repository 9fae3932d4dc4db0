//! Library surface of the `rde5` command-line tool, split out so the
//! command implementations can be driven directly from integration tests.

pub mod commands;
pub mod config;
pub mod csvout;
