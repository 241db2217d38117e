use clap::Parser;
use t2v_cli::args::Cli;
use t2v_cli::commands::{exit_code, run};

fn main() {
    let result = run(Cli::parse());
    if let Err(e) = &result {
        eprintln!("error: {e:#}");
    }
    std::process::exit(exit_code(&result));
}
