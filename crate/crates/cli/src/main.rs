use clap::{Args, Parser, Subcommand};
use dkit_cli::{run, Command, Overrides, SystemSpec};
use std::process::ExitCode;

/// Exact Darboux-integrability analysis of polynomial vector fields in R^n
/// and on the n-sphere.
#[derive(Parser)]
#[command(name = "dkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Path to the system spec (JSON).
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    /// Seed for randomized searches and numeric trials.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numeric tolerance for verify-numeric.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone)]
enum Cmd {
    /// Tangency certificate: is the system a vector field on the sphere?
    CheckSphere {
        #[command(flatten)]
        common: Common,
    },
    /// Extactic polynomial for a comma-separated basis, e.g. --basis "x,y".
    Extactic {
        #[arg(long)]
        basis: String,
        #[command(flatten)]
        common: Common,
    },
    /// Invariant parallels x_{n+1} = k (sphere mode).
    Parallels {
        #[command(flatten)]
        common: Common,
    },
    /// Invariant meridians (sphere mode).
    Meridians {
        #[command(flatten)]
        common: Common,
    },
    /// Invariant affine hyperplanes (ambient mode).
    Hyperplanes {
        #[command(flatten)]
        common: Common,
    },
    /// Cofactor equation for one candidate surface.
    Cofactor {
        #[arg(long)]
        surface: String,
        #[command(flatten)]
        common: Common,
    },
    /// Verify an exponential factor exp(g/h).
    Expfactor {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[command(flatten)]
        common: Common,
    },
    /// First integrals and time invariants from detected/candidate cofactors.
    Darboux {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate every bound formula (from --input or --n/--m).
    Bounds {
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated component degrees, e.g. --m "2,2,2".
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample random fields tangent to the sphere.
    Sample {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Numeric cross-check of detected surfaces and first integrals.
    VerifyNumeric {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_degrees(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| format!("bad degree `{p}`: {e}")))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, extra) = match cli.command {
        Cmd::CheckSphere { common } => (Command::CheckSphere, common, Overrides::default()),
        Cmd::Extactic { basis, common } => (
            Command::Extactic {
                basis: basis.split(',').map(|s| s.trim().to_string()).collect(),
            },
            common,
            Overrides::default(),
        ),
        Cmd::Parallels { common } => (Command::Parallels, common, Overrides::default()),
        Cmd::Meridians { common } => (Command::Meridians, common, Overrides::default()),
        Cmd::Hyperplanes { common } => (Command::Hyperplanes, common, Overrides::default()),
        Cmd::Cofactor { surface, common } => {
            (Command::Cofactor { surface }, common, Overrides::default())
        }
        Cmd::Expfactor { g, h, common } => {
            (Command::ExpFactor { g, h }, common, Overrides::default())
        }
        Cmd::Darboux { common } => (Command::Darboux, common, Overrides::default()),
        Cmd::Bounds { n, m, common } => {
            let degrees = match m.as_deref().map(parse_degrees).transpose() {
                Ok(d) => d,
                Err(e) => return input_failure(&e),
            };
            (
                Command::Bounds,
                common,
                Overrides {
                    n,
                    degrees,
                    ..Default::default()
                },
            )
        }
        Cmd::Sample { count, n, m, common } => {
            let degrees = match m.as_deref().map(parse_degrees).transpose() {
                Ok(d) => d,
                Err(e) => return input_failure(&e),
            };
            (
                Command::Sample,
                common,
                Overrides {
                    count,
                    n,
                    degrees,
                    ..Default::default()
                },
            )
        }
        Cmd::VerifyNumeric { common } => (Command::VerifyNumeric, common, Overrides::default()),
    };

    let overrides = Overrides {
        seed: common.seed,
        tol: common.tol,
        ..extra
    };

    let spec = match &common.input {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match SystemSpec::from_json(&text) {
                Ok(s) => Some(s),
                Err(e) => return input_failure(&e.to_string()),
            },
            Err(e) => return input_failure(&format!("cannot read {path}: {e}")),
        },
        None => None,
    };

    match run(&command, spec.as_ref(), &overrides) {
        Ok((report, exit)) => {
            let rendered =
                serde_json::to_string_pretty(&report).expect("report serializes");
            match &common.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered + "\n") {
                        return input_failure(&format!("cannot write {path}: {e}"));
                    }
                }
                None => println!("{rendered}"),
            }
            ExitCode::from(exit as u8)
        }
        Err(e) => input_failure(&e.to_string()),
    }
}

fn input_failure(message: &str) -> ExitCode {
    eprintln!("dkit: {message}");
    ExitCode::from(2)
}
