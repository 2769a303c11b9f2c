mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn parse() -> Result<Cli, Failure> {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match args::config_path(&argv) {
        None => argv,
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            args::merge_config(argv, &text).map_err(Failure::Usage)?
        }
    };
    Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp
        | ErrorKind::DisplayVersion
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            std::process::exit(
                if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    1
                } else {
                    0
                },
            );
        }
        _ => {
            // the message proper ends at the first blank line, before the usage
            let text = e.to_string();
            let message: Vec<&str> = text
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            Failure::Usage(message.join(" ").trim_start_matches("error: ").to_string())
        }
    })
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Clean(a) => commands::clean(a),
        Command::Embed(a) => commands::embed(a),
        Command::Run(a) => commands::run(a),
        Command::Compare(a) => commands::compare_cmd(a),
        Command::Report(a) => commands::report_cmd(a),
        Command::Synth(a) => commands::synth(a),
    }
}

fn main() -> ExitCode {
    match parse().and_then(|cli| dispatch(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.code() as u8)
        }
    }
}
