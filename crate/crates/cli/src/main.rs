use std::io;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use liecid_cli::{execute, Cli, CliError, EXIT_INVALID, EXIT_OK};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match cli.opts.to_config(cli.command.into()) {
        Ok(cfg) => execute(&cfg, &mut io::stdout().lock(), &mut io::stderr().lock()),
        Err(CliError { code, report }) => {
            eprintln!("{report}");
            code
        }
    };
    ExitCode::from(code as u8)
}
