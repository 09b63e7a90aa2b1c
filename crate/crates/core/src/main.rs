use clap::Parser;

use tomoprob::cli::{exit_code, run, Cli, EXIT_INVARIANT};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(outcome) if outcome.passed => 0,
        Ok(_) => EXIT_INVARIANT,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}
