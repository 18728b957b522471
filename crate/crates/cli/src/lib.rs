//! Library side of the `ks` command-line tool: argument types, the
//! evaluation methods, CSV records and the subcommand drivers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod methods;
pub mod record;
pub mod resum;
pub mod solve;
pub mod svg;
pub mod sweep;
pub mod verify;

pub use error::{CliError, CliResult};
pub use methods::{EvalConfig, Method, Setting};
pub use record::SweepRecord;
