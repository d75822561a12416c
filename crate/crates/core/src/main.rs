use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nctorus::cli::{default_theta, parse_theta, run, Command, Options};

#[derive(Parser)]
#[command(name = "nctorus", version, about = "Exact factor-system calculus for torus actions on quantum tori")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON config file, or `-` for stdin
    #[arg(long)]
    config: Option<String>,
    /// Character box radius
    #[arg(long)]
    range: Option<i64>,
    /// Exponent bound for base monomials
    #[arg(long)]
    degree: Option<i64>,
    /// Seed for randomized sample corpora
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the report as one JSON object
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the factor-system relations
    CheckFactorSystem(Common),
    /// Extract the obstruction cocycle of an automorphism and lift it
    Lift(Common),
    /// Check the lift conditions for a derivation and family H
    LiftDerivation(Common),
    /// Curvature of the frame connection on an associated module
    Curvature(Common),
    /// Worked examples
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// The quantum 3-torus with the circle acting on u3
    Q3torus {
        /// theta12,theta13,theta23 as rationals
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn read_config(path: &str) -> std::io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Cmd::CheckFactorSystem(c) => (Command::CheckFactorSystem, c),
        Cmd::Lift(c) => (Command::Lift, c),
        Cmd::LiftDerivation(c) => (Command::LiftDerivation, c),
        Cmd::Curvature(c) => (Command::Curvature, c),
        Cmd::Demo { which: Demo::Q3torus { theta, common } } => {
            let theta = match theta.as_deref().map(parse_theta).transpose() {
                Ok(t) => t.unwrap_or_else(default_theta),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            (Command::DemoQ3Torus { theta }, common)
        }
    };
    let config = match (&common.config, cmd.needs_config()) {
        (Some(p), true) => match read_config(p) {
            Ok(s) => Some(s),
            Err(e) => {
                eprintln!("error: cannot read {p}: {e}");
                return ExitCode::from(2);
            }
        },
        _ => None,
    };
    let opts = Options { range: common.range, degree: common.degree, seed: common.seed };
    let out = run(&cmd, config.as_deref(), &opts);
    if common.json {
        println!("{}", out.report.to_json());
    } else {
        print!("{}", out.report.to_text());
    }
    ExitCode::from(out.exit_code as u8)
}
