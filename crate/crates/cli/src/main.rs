use std::process::ExitCode;

use clap::Parser;
use isogap_cli::{run, Cli, Command, Exit};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::Config.into() } else { Exit::Pass.into() };
        }
    };
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.stdout);
            if !cli.common.json {
                // Profile CSV owns stdout; the verdict table goes to stderr.
                if matches!(cli.command, Command::Profile { .. }) && cli.common.out.is_none() {
                    eprint!("{}", o.report.table());
                } else {
                    print!("{}", o.report.table());
                }
            }
            o.exit.into()
        }
        Err(e) => {
            eprintln!("isogap: {e}");
            e.exit().into()
        }
    }
}
