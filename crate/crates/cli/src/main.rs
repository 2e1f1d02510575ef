use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use progressa::cli::Cli;
use progressa::CliError;

fn fail(err: &CliError) -> ExitCode {
    let _ = writeln!(std::io::stderr(), "{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.to_string().trim_end().to_string())),
    };
    match progressa::run(args) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
