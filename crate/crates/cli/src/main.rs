use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

mod cli;
mod commands;
mod expect;

use commands::{run, Ctx, Status};

fn main() -> ExitCode {
    let cli = cli::Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &Ctx::default(), &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(Status::Success), Ok(())) => ExitCode::SUCCESS,
        (Ok(Status::VerificationFailed), Ok(())) => ExitCode::from(1),
        (Err(e), _) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(2)
        }
        (_, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
