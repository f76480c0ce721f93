use std::process::ExitCode;

use clap::Parser;
use tc_cli::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fit(args) => tc_cli::fit(args).map(|summary| {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", summary.report());
        }),
        Command::Eval(args) => tc_cli::eval(args).map(|score| println!("{score:.4}")),
        Command::Serve(args) => tc_cli::serve(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tc: {e}");
            ExitCode::FAILURE
        }
    }
}
