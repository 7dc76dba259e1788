//! Command-line front end: reads parameter or solution files, runs the
//! requested checks and produces a [`Report`].

pub mod args;
pub mod report;
pub mod run;

pub use report::{GridRow, Report, Section, Verdict};
pub use run::{run, Command, InputSource, OutputFormat, RunConfig, RunError};
