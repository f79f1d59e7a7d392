use std::process::ExitCode;

use clap::Parser;
use qemlab_cli::{execute, threads_from_env, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env().and_then(|threads| execute(cli.command, threads));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qemlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
