//! `thetalift` command line: JSON configuration in, JSON and CSV out.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Sink;

#[derive(Parser)]
#[command(name = "thetalift", version, about = "Theta lifts over totally real fields")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for JSON/CSV artifacts (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the parallel sums.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Relative tolerance; overrides `policy.rel_tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Group,
}

#[derive(Subcommand)]
enum Group {
    Field {
        #[command(subcommand)]
        cmd: FieldCmd,
    },
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    Weil {
        #[command(subcommand)]
        cmd: WeilCmd,
    },
    Specfun {
        #[command(subcommand)]
        cmd: SpecfunCmd,
    },
    Theta {
        #[command(subcommand)]
        cmd: ThetaCmd,
    },
    Whittaker {
        #[command(subcommand)]
        cmd: WhittakerCmd,
    },
    Green {
        #[command(subcommand)]
        cmd: GreenCmd,
    },
    Examples {
        #[command(subcommand)]
        cmd: ExamplesCmd,
    },
}

#[derive(Subcommand)]
enum FieldCmd {
    /// Degree, discriminant, embeddings and codifferent basis.
    Info,
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Evenness, module structure, signatures and discriminant order.
    Info,
    /// Basis of the Z-dual.
    Dual,
    /// The discriminant group L'/L with its quadratic form.
    Disc,
}

#[derive(Subcommand)]
enum WeilCmd {
    /// Matrix of a generator word.
    Gen,
    /// Defining relations and unitarity.
    Check,
}

#[derive(Subcommand)]
enum SpecfunCmd {
    /// Evaluate one special function.
    Eval,
}

#[derive(Subcommand)]
enum ThetaCmd {
    /// Θ(τ, z) with its tail bound.
    Eval,
    /// Residual of the transformation law under a word.
    Check,
}

#[derive(Subcommand)]
enum WhittakerCmd {
    /// f(τ, s) and δ_k f(τ).
    Eval,
    /// Pairings with supplied cusp forms.
    Pair,
    /// Weak holomorphy obstruction.
    Obstruct,
    /// B(f) from Eisenstein coefficients or residues.
    Bf,
}

#[derive(Subcommand)]
enum GreenCmd {
    /// Φ at s and its regularized value at s₀.
    Eval,
    /// Regularized values along a segment, as CSV.
    Scan,
    /// Pole fit at s₀.
    Pole,
}

#[derive(Subcommand)]
enum ExamplesCmd {
    /// The cubic field of discriminant 49 and its empty-basis certificate.
    ShimuraCurve,
    /// The even unimodular lattices over Q(√3).
    Sqrt3,
}

type Handler = fn(&RunConfig) -> Result<Outcome, CliError>;

fn dispatch(g: &Group) -> (&'static str, bool, Handler) {
    use commands as c;
    // (name, needs a config, handler)
    match g {
        Group::Field { cmd: FieldCmd::Info } => ("field info", true, c::field_info),
        Group::Lattice { cmd } => match cmd {
            LatticeCmd::Info => ("lattice info", true, c::lattice_info),
            LatticeCmd::Dual => ("lattice dual", true, c::lattice_dual),
            LatticeCmd::Disc => ("lattice disc", true, c::lattice_disc),
        },
        Group::Weil { cmd } => match cmd {
            WeilCmd::Gen => ("weil gen", true, c::weil_gen),
            WeilCmd::Check => ("weil check", true, c::weil_check),
        },
        Group::Specfun { cmd: SpecfunCmd::Eval } => ("specfun eval", true, c::specfun_eval),
        Group::Theta { cmd } => match cmd {
            ThetaCmd::Eval => ("theta eval", true, c::theta_eval),
            ThetaCmd::Check => ("theta check", true, c::theta_check),
        },
        Group::Whittaker { cmd } => match cmd {
            WhittakerCmd::Eval => ("whittaker eval", true, c::whittaker_eval),
            WhittakerCmd::Pair => ("whittaker pair", true, c::whittaker_pair),
            WhittakerCmd::Obstruct => ("whittaker obstruct", true, c::whittaker_obstruct),
            WhittakerCmd::Bf => ("whittaker bf", true, c::whittaker_bf),
        },
        Group::Green { cmd } => match cmd {
            GreenCmd::Eval => ("green eval", true, c::green_eval),
            GreenCmd::Scan => ("green scan", true, c::green_scan),
            GreenCmd::Pole => ("green pole", true, c::green_pole),
        },
        Group::Examples { cmd } => match cmd {
            ExamplesCmd::ShimuraCurve => ("examples shimura-curve", false, c::examples_shimura_curve),
            ExamplesCmd::Sqrt3 => ("examples sqrt3", false, c::examples_sqrt3),
        },
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (name, needs_config, handler) = dispatch(&cli.command);
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?,
        None if needs_config => {
            return Err(CliError::Config {
                pointer: "/".into(),
                message: format!("`{name}` needs --config"),
            })
        }
        None => "{}".to_string(),
    };
    let cfg = RunConfig::parse(&text, cli.tol)?;
    let sink = Sink::new(cli.out.clone(), name, &text, &cfg.raw, cli.threads, cfg.policy.rel_tol);
    let outcome = thetalift::par::with_threads(cli.threads, || handler(&cfg))?;
    let stem = name.replace(' ', "_");
    match (&outcome.table, &sink.dir) {
        (Some((header, rows)), None) => sink.csv(&stem, header, rows)?,
        (Some((header, rows)), Some(_)) => {
            sink.json(&stem, outcome.result.clone())?;
            sink.csv(&stem, header, rows)?;
        }
        (None, _) => sink.json(&stem, outcome.result.clone())?,
    }
    if !outcome.passed {
        return Err(CliError::CheckFailed(format!("`{name}` reported a failed check")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thetalift: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
