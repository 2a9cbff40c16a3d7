use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use regulus_cli::session::{Session, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "regulus",
    version,
    about = "Exact calculator and certification driver for regular algebras"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Interactive session over the algebra described in FILE.
    Repl {
        /// Algebra description: `atoms K`, a line of K weights, `vars ...`.
        file: PathBuf,
    },
    /// Run a script of session commands, one per line.
    Run {
        script: PathBuf,
        /// Line-oriented `event key="value"` reports.
        #[arg(long)]
        machine: bool,
    },
    /// Run the acceptance checks and report one line per check.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Line-oriented `check=... status=...` reports.
        #[arg(long)]
        machine: bool,
    },
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Repl { file } => repl(&file),
        Cmd::Run { script, machine } => run(&script, machine),
        Cmd::Selftest { seed, machine } => {
            let mut session = Session::new();
            session.set_machine(machine);
            match session.run_line(&format!("selftest {}", seed)) {
                Ok(out) => {
                    for line in &out.lines {
                        println!("{}", line);
                    }
                    if out.failed {
                        ExitCode::FAILURE
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {}", e);
                    ExitCode::FAILURE
                }
            }
        }
    }
}

fn repl(file: &PathBuf) -> ExitCode {
    let mut session = Session::new();
    match session.run_line(&format!("load-algebra {}", file.display())) {
        Ok(out) => {
            for line in &out.lines {
                println!("{}", line);
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::FAILURE;
        }
    }
    println!("type `help` for commands, `quit` to leave");
    let stdin = io::stdin();
    let mut input = String::new();
    loop {
        print!("regulus> ");
        if io::stdout().flush().is_err() {
            return ExitCode::FAILURE;
        }
        input.clear();
        match stdin.lock().read_line(&mut input) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
        match session.run_line(&input) {
            Ok(out) => {
                for line in &out.lines {
                    println!("{}", line);
                }
                if out.quit {
                    break;
                }
            }
            // The session survives errors; they become part of the transcript.
            Err(e) => println!("error: {}", e),
        }
    }
    ExitCode::SUCCESS
}

fn run(script: &PathBuf, machine: bool) -> ExitCode {
    let text = match std::fs::read_to_string(script) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", script.display(), e);
            return ExitCode::FAILURE;
        }
    };
    let mut session = Session::new();
    session.set_machine(machine);
    let mut failed = false;
    for (k, line) in text.lines().enumerate() {
        match session.run_line(line) {
            Ok(out) => {
                for report in &out.lines {
                    println!("{}", report);
                }
                failed |= out.failed;
                if out.quit {
                    break;
                }
            }
            Err(e) => {
                eprintln!("error: line {}: {}", k + 1, e);
                return ExitCode::FAILURE;
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
