//! `skm`: command-line front end for the feasibility toolkit.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for runtime failures,
//! and 3 when `certify` finishes its iteration budget without finding a
//! certificate. Human-readable output goes to standard output, diagnostics
//! to standard error; machine-readable output is written only to `--out`,
//! `--plot`, `--trace-out`, and `--witness-out` files.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    cmd_certify, cmd_compare_bk, cmd_convert, cmd_gain, cmd_generate, cmd_solve, cmd_sweep,
    CertifyArgs, CmdError, CompareBkArgs, ConvertArgs, GainArgs, GenerateArgs, SolveArgs,
    SweepArgs,
};

#[derive(Parser)]
#[command(
    name = "skm",
    version,
    about = "Sampling Kaczmarz-Motzkin solvers for linear feasibility systems Ax <= b"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and its witness.
    Generate(GenerateArgs),
    /// Run the SKM iteration on an instance file.
    Solve(SolveArgs),
    /// Search for a feasibility certificate of an integer system.
    Certify(CertifyArgs),
    /// Sweep batch sizes and relaxations, with CSV and plot output.
    Sweep(SweepArgs),
    /// Print the batch-size gain table and its argmax.
    Gain(GainArgs),
    /// Convert an MPS linear program into a feasibility instance.
    Convert(ConvertArgs),
    /// Race SKM against block Kaczmarz on a consistent equality system.
    CompareBk(CompareBkArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let result = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Gain(args) => cmd_gain(args),
        Command::Convert(args) => cmd_convert(args),
        Command::CompareBk(args) => cmd_compare_bk(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CmdError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(1)
        }
        Err(CmdError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
