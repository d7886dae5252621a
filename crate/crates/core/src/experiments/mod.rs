//! Drivers behind the command line subcommands. Each returns plain data with a CSV rendering.

pub mod advection;
pub mod levelset;
pub mod resources;
pub mod tfim;
