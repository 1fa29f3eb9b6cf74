use clap::Parser;

use sspec::cli::{self, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let res = cli::configure_threads().and_then(|()| cli::run(cli));
    if let Err(e) = &res {
        eprintln!("sspec: {e}");
    }
    std::process::exit(cli::exit_code(&res));
}
