//! Argument parsing and dispatch for the `telescope` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::Setup;
use crate::pipeline;

#[derive(Parser)]
#[command(
    name = "telescope",
    version,
    about = "Build and verify transposition telescopes of self-similar groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the component table.
    Build {
        #[arg(long)]
        config: String,
    },
    /// Run every check and write the certificate.
    Verify {
        #[arg(long)]
        config: String,
        /// Overrides `output_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Describe the action of one word over `g<k>` and `t`.
    Word {
        #[arg(long)]
        config: String,
        #[arg(long)]
        word: String,
    },
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> anyhow::Result<bool> {
    match cli.command {
        Command::Build { config } => {
            let setup = Setup::load(&config)?;
            write!(out, "{}", pipeline::build_summary(&setup))?;
            Ok(true)
        }
        Command::Verify { config, out: path } => {
            let setup = Setup::load(&config)?;
            let cert = pipeline::verify(&setup)?;
            let path = path.unwrap_or_else(|| PathBuf::from(&setup.config.output_path));
            std::fs::write(&path, cert.to_json())
                .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
            write!(out, "{}", pipeline::verify_summary(&cert))?;
            writeln!(out, "certificate written to {}", path.display())?;
            Ok(cert.is_clean())
        }
        Command::Word { config, word } => {
            let setup = Setup::load(&config)?;
            write!(out, "{}", pipeline::word_report(&setup, &word)?)?;
            Ok(true)
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code: 0 on success, 1 if a check failed, 2 on usage or input errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
