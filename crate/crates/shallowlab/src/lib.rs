//! File formats, model persistence, reports and the command-line front end
//! for the `shallowlab-core` shallow parser.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod io;
pub mod model_file;
pub mod report;
pub mod ssf;

pub use shallowlab_core as core;
