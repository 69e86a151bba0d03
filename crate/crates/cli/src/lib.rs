//! Library surface of the `dkit` command-line tool: spec parsing, command
//! execution, and report construction. The binary in main.rs is a thin
//! argument-parsing wrapper so tests can drive commands in-process.

pub mod report;
pub mod run;
pub mod spec;

pub use report::{Report, Timings};
pub use run::{run, Command, Overrides};
pub use spec::{InputError, Mode, SystemSpec};
