//! `cyclo`: command-line front end to the cyclic homology library.

mod commands;
mod input;
mod report;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cyclo::homology::DEFAULT_MAX_BASIS;

use commands::Inputs;
use report::{Failure, ReportDocument};

#[derive(Parser, Debug)]
#[command(name = "cyclo", version, about = "Cyclic homology and Gauss-Manin transport for finite-dimensional algebras")]
struct Cli {
    /// Print the JSON report instead of the table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Associativity and the operator identity suite.
    Check(commands::CheckArgs),
    /// HH, HC and HP dimensions.
    Homology(commands::HomologyArgs),
    /// Periodic cyclic homology only.
    Hp(commands::HpArgs),
    /// Chern character of an idempotent or invertible, with pairings.
    Chern(commands::ChernArgs),
    /// Gauss-Manin transport of a chain along a family.
    Transport(commands::TransportArgs),
    /// Bidimension bound, Khalkhali retract and retract transport.
    Retract(commands::RetractArgs),
}

fn max_basis() -> Result<usize, Failure> {
    match std::env::var("CYCLO_MAX_BASIS") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::input("InvalidArgument", format!("CYCLO_MAX_BASIS={v} is not a count"))),
        Err(_) => Ok(DEFAULT_MAX_BASIS),
    }
}

/// The flags as JSON, with the effective cap recorded alongside.
fn flags<T: serde::Serialize>(args: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(args).expect("flags serialize");
    v["max_basis"] = max_basis().map(Into::into).unwrap_or(serde_json::Value::Null);
    v
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut inputs: Inputs = Vec::new();
    let cap = max_basis();
    let i = &mut inputs;
    let (name, flags, outcome) = match &cli.command {
        Command::Check(a) => ("check", flags(a), cap.and_then(|c| commands::check(a, c, i))),
        Command::Homology(a) => ("homology", flags(a), cap.and_then(|c| commands::homology(a, c, i))),
        Command::Hp(a) => ("hp", flags(a), cap.and_then(|c| commands::hp(a, c, i))),
        Command::Chern(a) => ("chern", flags(a), cap.and_then(|c| commands::chern(a, c, i))),
        Command::Transport(a) => ("transport", flags(a), cap.and_then(|c| commands::transport_cmd(a, c, i))),
        Command::Retract(a) => ("retract", flags(a), cap.and_then(|c| commands::retract(a, c, i))),
    };
    if let Err(f) = &outcome {
        eprintln!("cyclo {name}: {}: {}", f.kind, f.message);
    }
    let digests: BTreeMap<String, String> = inputs.iter().map(|(role, i)| (role.to_string(), i.digest())).collect();
    let doc = ReportDocument::finish(name, digests, flags, outcome);
    if cli.json {
        println!("{}", doc.to_json());
    } else {
        print!("{}", doc.to_table());
    }
    ExitCode::from(doc.exit_code as u8)
}
