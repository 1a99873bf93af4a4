//! Command-line driver: configuration loading, subcommands and output files.

pub mod config;
pub mod output;
pub mod run;

use clap::Parser;

pub use config::{load_config, parse_config, ConfigError, RunConfig};
pub use run::{run, Cli, Command};

/// Parses `args` and runs the subcommand. Usage errors exit with 1, like other
/// validation failures.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.command),
        Err(e) => {
            let code = if e.use_stderr() { run::EXIT_INVALID } else { run::EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
