use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kpsym::correspond::{dkp_flow_rhs_series, moyal_kp_flow_rhs, MoyalCoeffs};
use kpsym::psdo::{kp_flow_rhs, LaxKP};
use kpsym::qpsdo::{qkp_flow_rhs, BracketOrder};
use kpsym::verify::{self, seeded_dressed_lax, RunConfig};
use kpsym::{Coeff, Error, PhaseSymbol, StarKind, StarProduct};

#[derive(Parser, Debug)]
#[command(name = "kpsym", version, about = "Exact symbol calculus for KP-type hierarchies")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Deformation parameter q, as an exact rational.
    #[arg(long, global = true, env = "KPSYM_Q", default_value = "3/2")]
    q: String,

    /// Weight κ of the symbol product, as an exact rational.
    #[arg(long, global = true, env = "KPSYM_KAPPA", default_value = "1/2")]
    kappa: String,

    /// Number of symbol powers kept below the top of each series.
    #[arg(long, global = true, env = "KPSYM_DEPTH", default_value_t = 6)]
    depth: u32,

    /// λ-order kept in sine-bracket series (even, at most 12).
    #[arg(long, global = true, env = "KPSYM_LAMBDA_ORDER", default_value_t = 8)]
    lambda_order: u32,

    /// Seed for every randomized suite.
    #[arg(long, global = true, env = "KPSYM_SEED", default_value_t = 1)]
    seed: u64,

    /// Report format; `star` defaults to json, everything else to text.
    #[arg(long, global = true, env = "KPSYM_OUTPUT", value_enum)]
    output: Option<Output>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite, or `all` of them.
    Verify { suite: String },
    /// Print the right-hand side of the n-th flow, one coefficient per line.
    Flow { kind: FlowKind, n: u32 },
    /// Multiply two phase-space symbols read from files.
    Star {
        product: String,
        lhs: PathBuf,
        rhs: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FlowKind {
    Kp,
    Qkp,
    Moyal,
    Dkp,
}

/// A failure that maps to exit status 2.
struct UsageError(String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, UsageError> {
    let cfg = RunConfig::parse(&cli.q, &cli.kappa, cli.depth, cli.lambda_order, cli.seed)?;
    match &cli.command {
        Command::Verify { suite } => {
            let report = verify::run(suite, &cfg)?;
            match cli.output.unwrap_or(Output::Text) {
                Output::Text => print!("{}", report.render_text()),
                Output::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
            }
            Ok(report.passed)
        }
        Command::Flow { kind, n } => {
            if !(1..=3).contains(n) {
                return Err(UsageError(format!("flow index must lie in 1..=3, got {n}")));
            }
            let (header, lines) = flow_lines(*kind, *n, &cfg)?;
            match cli.output.unwrap_or(Output::Text) {
                Output::Text => {
                    if let Some(h) = &header {
                        println!("{h}");
                    }
                    for (lhs, rhs) in &lines {
                        println!("{lhs} = {rhs}");
                    }
                }
                Output::Json => {
                    let eqs: Vec<_> = lines.iter().map(|(l, r)| json!({ "lhs": l, "rhs": r })).collect();
                    let body =
                        json!({ "kind": format!("{kind:?}").to_lowercase(), "n": n, "lax": header, "equations": eqs });
                    println!("{}", serde_json::to_string_pretty(&body).expect("flow serializes"));
                }
            }
            Ok(true)
        }
        Command::Star { product, lhs, rhs } => {
            let kind: StarKind = product.parse()?;
            let f = read_symbol(lhs)?;
            let g = read_symbol(rhs)?;
            let out = StarProduct::new(kind, cfg.kappa.clone(), cfg.q.clone()).apply(&f, &g)?;
            match cli.output.unwrap_or(Output::Json) {
                Output::Text => println!("{out}"),
                Output::Json => println!("{}", serde_json::to_string_pretty(&out).expect("symbol serializes")),
            }
            Ok(true)
        }
    }
}

/// An optional header line and `(lhs, rhs)` equation pairs.
type FlowText = (Option<String>, Vec<(String, String)>);

/// Flow right-hand sides as `(lhs, rhs)` text pairs, `cfg.depth` of them,
/// windows sized so every flow index prints the same count. Unknowns u_k sit at
/// ξ^(1-k) (λ^(1-k) for phase-space flows); the q-flow acts on a seeded
/// dressed operator whose coefficient at D_q^(-k) is written a_k.
fn flow_lines(kind: FlowKind, n: u32, cfg: &RunConfig) -> Result<FlowText, Error> {
    let d = cfg.depth;
    let lines = |terms: Vec<(i64, String)>| -> Vec<(String, String)> {
        terms
            .into_iter()
            .map(|(k, c)| (format!("dt{n} u{}", 1 - k), c))
            .collect()
    };
    match kind {
        FlowKind::Kp => {
            let rhs = kp_flow_rhs(&LaxKP::generic(d + n + 2), n)?;
            Ok((
                None,
                lines(rhs.terms().rev().map(|(k, c)| (k, c.to_string())).collect()),
            ))
        }
        FlowKind::Moyal => {
            let lambda = MoyalCoeffs::generic((d + n - 1) as usize).symbol()?;
            let rhs = moyal_kp_flow_rhs(&lambda, n, &cfg.kappa)?;
            Ok((
                None,
                lines(rhs.terms().rev().map(|(k, c)| (k, c.to_string())).collect()),
            ))
        }
        FlowKind::Dkp => {
            let lambda = MoyalCoeffs::generic((d + n - 1) as usize).symbol()?;
            let rhs = dkp_flow_rhs_series(&lambda, n)?;
            Ok((
                None,
                lines(rhs.terms().rev().map(|(k, c)| (k, c.to_string())).collect()),
            ))
        }
        FlowKind::Qkp => {
            let (_, l) = seeded_dressed_lax(cfg.seed, &cfg.q, d + n)?;
            let rhs = qkp_flow_rhs(&l, n, BracketOrder::PlusFirst)?;
            let header = l
                .terms()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| format!("({c})*D^{k}"))
                .collect::<Vec<_>>()
                .join(" + ");
            let eqs = rhs
                .terms()
                .rev()
                .map(|(k, c)| (format!("dt{n} a{}", -k), c.to_string()))
                .collect();
            Ok((Some(format!("L = {header}")), eqs))
        }
    }
}

/// Reads a symbol from JSON, or from canonical text when the file does not
/// start with `{`. Errors carry the file name and position.
fn read_symbol(path: &Path) -> Result<PhaseSymbol, UsageError> {
    let name = path.display();
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{name}: {e}")))?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| UsageError(format!("{name}:{}:{}: {e}", e.line(), e.column())))
    } else {
        text.trim().parse().map_err(|e: Error| match e {
            Error::Parse { column, message } => UsageError(format!("{name}:1:{column}: {message}")),
            other => UsageError(format!("{name}: {other}")),
        })
    }
}
