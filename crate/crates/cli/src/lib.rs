//! Text and JSON front end for `wkb-core`.

pub mod commands;
pub mod doc;
pub mod parse;

pub use commands::{run, Cli, Command, Outcome, OutputFormat, EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION};
pub use parse::{parse_expr, parse_poly, parse_rational, parse_symbol, ExprAst, ParseError};
