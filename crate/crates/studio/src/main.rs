use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match breeder_studio::cli::run(breeder_studio::cli::Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
