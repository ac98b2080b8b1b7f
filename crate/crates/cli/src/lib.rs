//! `maslov` command-line front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod loops;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use maslov_core::immersion::ShapeRegistry;

pub use config::{FileConfig, Format, Options, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "maslov", version, about = "Maslov class of Lagrangian immersions, two ways")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the registered shapes
    Catalog,
    /// Lagrangian, rank and special-Lagrangian checks on a parameter grid
    Check,
    /// Maslov index of each loop by both engines
    Index,
    /// Pointwise identity along each loop; CSV output holds the angle track
    Theorem,
    /// Indices of the generator loops
    Periods,
    /// Closure defect of the mean-curvature form over a metric family
    Sweep,
    /// Parallel transport of the tangent plane along each loop
    Transport,
}

/// Dispatch one command. Returns the exit code.
pub fn run_command(cfg: &RunConfig, command: Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let registry = ShapeRegistry::builtin();
    let mut sink = output::Sink::new(cfg.format, cfg.timestamps);
    let outcome = match command {
        Command::Catalog => commands::catalog(&registry, &mut sink)?,
        Command::Check => commands::check(cfg, &registry, &mut sink)?,
        Command::Index => commands::index(cfg, &registry, &mut sink, false)?,
        Command::Theorem => commands::index(cfg, &registry, &mut sink, true)?,
        Command::Periods => commands::periods(cfg, &registry, &mut sink)?,
        Command::Sweep => commands::sweep(cfg, &registry, &mut sink)?,
        Command::Transport => commands::transport(cfg, &registry, &mut sink)?,
    };
    sink.finish(cfg.out.as_deref(), stdout)?;
    Ok(outcome.exit_code())
}

/// Parse arguments, run, and report errors as JSON on `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors
            if !e.use_stderr() {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let err = CliError::config(e.to_string().trim().to_string());
            let _ = writeln!(stderr, "{}", err.to_json());
            return err.exit_code();
        }
    };
    let result = RunConfig::resolve(&cli.options).and_then(|cfg| run_command(&cfg, cli.command, stdout));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}
