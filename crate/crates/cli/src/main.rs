//! Command-line front end for the direct and inverse spectral solvers.
//!
//! Reports go to stdout as canonical JSON (or a plain-text table); timing
//! and error diagnostics go to stderr so stdout stays byte-stable. Exit
//! codes: 0 every check passed, 1 unusable input, 2 a feasibility or
//! verification check failed.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use report::Format;

#[derive(Parser)]
#[command(
    name = "specband",
    version,
    about = "Spectral analysis of ring-closed complex Jacobi matrices"
)]
struct Cli {
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Equality-tolerance base; overrides the instance file's `tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the full spectrum of a matrix instance and verify it.
    Direct {
        /// Matrix instance file (kind matrix-general or matrix-hat).
        file: PathBuf,
    },
    /// Reconstruct every matrix with the prescribed spectral data.
    Inverse {
        /// Spectral-data instance file.
        file: PathBuf,
        /// Reconstruct only the branch with this index.
        #[arg(long, conflicts_with = "all_branches")]
        branch: Option<u64>,
        /// Enumerate every branch (the default).
        #[arg(long)]
        all_branches: bool,
    },
    /// Check that a matrix reproduces prescribed spectral data.
    Verify {
        /// Matrix instance file.
        matrix: PathBuf,
        /// Spectral-data instance file.
        data: PathBuf,
    },
    /// Run direct-then-inverse round trips and report the residuals.
    Roundtrip {
        /// Matrix instance file; omit to use generated instances.
        file: Option<PathBuf>,
        /// Number of generated instances when no file is given.
        #[arg(long, default_value_t = 50)]
        random: usize,
        /// Seed for the generated instances.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Run the built-in fixture suite.
    Selftest,
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("SPECBAND_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(k) => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k.max(1))
                    .build_global();
            }
            Err(_) => eprintln!("ignoring SPECBAND_THREADS={raw:?}: not an integer"),
        }
    }
}

fn main() {
    configure_threads();
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            print!("{e}");
            std::process::exit(0);
        }
        eprint!("{e}");
        std::process::exit(1);
    });
    let started = Instant::now();

    let result = match &cli.command {
        Command::Direct { file } => commands::cmd_direct(file, cli.tol),
        Command::Inverse { file, branch, .. } => commands::cmd_inverse(file, cli.tol, *branch),
        Command::Verify { matrix, data } => commands::cmd_verify(matrix, data, cli.tol),
        Command::Roundtrip { file, random, seed } => {
            commands::cmd_roundtrip(file.as_deref(), *random, *seed, cli.tol)
        }
        Command::Selftest => commands::cmd_selftest(),
    };

    match result {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            eprintln!(
                "timing: {} {:.3} ms",
                report.command,
                started.elapsed().as_secs_f64() * 1e3
            );
            std::process::exit(if report.pass { 0 } else { 2 });
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.exit);
        }
    }
}
