//! `ahl`: check, verify and explore access Hoare triples over finite domains.

mod commands;
mod render;
mod state_arg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use ahl_core::calculus::Flavor;
use ahl_core::semantics::DEFAULT_FUEL;
use clap::{Args, Parser, Subcommand};

use commands::{Exit, Outcome};

#[derive(Debug, Parser)]
#[command(name = "ahl", version, about = "Access Hoare logic checker for a small While language")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Program file (`.ahl`).
    file: PathBuf,
    /// Step budget per run.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Largest domain that may be enumerated. Overrides a `statecap` in the
    /// file; the default is 1000000.
    #[arg(long, env = "AHL_STATECAP")]
    statecap: Option<u64>,
    /// Human-readable output instead of JSON.
    #[arg(long)]
    pretty: bool,
    /// Add wall time to the report. Reports are then no longer reproducible.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide the file's triple by running the program from every state.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "access", value_parser = parse_flavor)]
        flavor: Flavor,
    },
    /// Generate and discharge verification conditions from loop invariants.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Write the proof tree as JSON.
        #[arg(long, value_name = "PATH")]
        emit_derivation: Option<PathBuf>,
    },
    /// Strongest precondition of the program for the file's postcondition.
    Sp {
        #[command(flatten)]
        common: Common,
        /// Also compute the syntactic form (loop-free programs only).
        #[arg(long)]
        syntactic: bool,
        /// Check that sp is wp restricted to terminating states.
        #[arg(long)]
        check_corollary: bool,
    },
    /// Weakest liberal precondition of the program for the file's postcondition.
    Wp {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        check_corollary: bool,
    },
    /// Check a derivation (JSON proof tree) against the file's domain.
    Prove {
        #[command(flatten)]
        common: Common,
        derivation: PathBuf,
    },
    /// Run the program from one state.
    Run {
        #[command(flatten)]
        common: Common,
        /// Initial values as `name=value,...`. Unlisted variables start at
        /// the least value of their domain.
        #[arg(long, default_value = "")]
        state: String,
    },
    /// Print the dual triple: access becomes Hoare with both assertions negated.
    Dual {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "access", value_parser = parse_flavor)]
        flavor: Flavor,
        /// Also check the triple and its dual.
        #[arg(long)]
        check: bool,
    },
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    s.parse()
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Check { common, .. }
            | Command::Verify { common, .. }
            | Command::Sp { common, .. }
            | Command::Wp { common, .. }
            | Command::Prove { common, .. }
            | Command::Run { common, .. }
            | Command::Dual { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Verify { .. } => "verify",
            Command::Sp { .. } => "sp",
            Command::Wp { .. } => "wp",
            Command::Prove { .. } => "prove",
            Command::Run { .. } => "run",
            Command::Dual { .. } => "dual",
        }
    }
}

fn dispatch(cmd: &Command) -> Outcome {
    let c = cmd.common();
    let ctx = match commands::Context::load(&c.file, c.fuel, c.statecap) {
        Ok(ctx) => ctx,
        Err(o) => return o,
    };
    match cmd {
        Command::Check { flavor, .. } => commands::check(&ctx, *flavor),
        Command::Verify { emit_derivation, .. } => commands::verify(&ctx, emit_derivation.as_deref()),
        Command::Sp {
            syntactic,
            check_corollary,
            ..
        } => commands::sp(&ctx, *syntactic, *check_corollary),
        Command::Wp { check_corollary, .. } => commands::wp(&ctx, *check_corollary),
        Command::Prove { derivation, .. } => commands::prove(&ctx, derivation),
        Command::Run { state, .. } => commands::run(&ctx, state),
        Command::Dual { flavor, check, .. } => commands::dual(&ctx, *flavor, *check),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Usage } else { Exit::Ok };
            let _ = e.print();
            return code.into();
        }
    };
    let started = Instant::now();
    let mut outcome = dispatch(&cli.command);
    let common = cli.command.common();
    let mut report = serde_json::Map::new();
    report.insert("command".into(), cli.command.name().into());
    report.insert("file".into(), common.file.display().to_string().into());
    report.append(&mut outcome.report);
    if common.timing {
        report.insert("wall_time_ms".into(), (started.elapsed().as_secs_f64() * 1000.0).into());
    }
    let report = serde_json::Value::Object(report);
    if common.pretty {
        print!("{}", render::pretty(&report));
    } else {
        println!("{report}");
    }
    if let Some(msg) = &outcome.message {
        eprintln!("ahl: {msg}");
    }
    outcome.exit.into()
}
