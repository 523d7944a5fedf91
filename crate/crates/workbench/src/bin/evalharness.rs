use std::process::ExitCode;

use clap::Parser;
use postedit_workbench::evalharness::{run, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.data) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("evalharness: {}: {e}", args.data.display());
            return ExitCode::from(2);
        }
    };
    match run(&args, &text) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("evalharness: {e}");
            ExitCode::FAILURE
        }
    }
}
