use std::process::ExitCode;

use clap::Parser;

use hardy_bench::config::{self, Cli};
use hardy_bench::{report, run};

/// Exit codes: 0 all checks passed; 1 the report could not be written;
/// 2 invalid configuration; 3 a check failed or a numerical failure left a
/// partial report.
fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match config::load(cli) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    let record = match run::run(&config) {
        Ok(record) => record,
        Err(run::RunError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let bytes = report::serialize(&record, config.format);
    if let Err(err) = report::emit(&bytes, config.output.as_deref()) {
        eprintln!("error: cannot write the report: {err}");
        return ExitCode::from(1);
    }
    if record.summary.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
