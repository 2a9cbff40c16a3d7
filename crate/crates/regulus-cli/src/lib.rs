//! Command line surface for the regulus engine: a hand-rolled expression
//! parser, a session with named bindings, and the batch commands driving
//! decomposition, counterexample construction, witness certification,
//! linearization and the acceptance suite.

pub mod ast;
pub mod builtins;
pub mod error;
pub mod lex;
pub mod parse;
pub mod session;
pub mod value;

pub use error::{CliError, CliResult};
pub use session::{Outcome, Session, DEFAULT_SEED};
pub use value::Value;
