mod args;
mod run;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            std::process::exit(code);
        }
    };
    let outcome = match &cli.command {
        Command::Cluster(a) => run::cluster(a),
        Command::Sweep(a) => run::sweep(a),
        Command::Classify(a) => run::classify(a),
    };
    if let Err(f) = outcome {
        eprintln!("error: {}", f.message());
        std::process::exit(f.exit_code());
    }
}
