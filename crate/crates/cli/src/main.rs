use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nodal_core::verify::Suite;

mod commands;

#[derive(Parser)]
#[command(
    name = "nodal",
    version,
    about = "Dual graphs, pushforwards and stability for nodal curves"
)]
struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, stability class, exceptional chains and canonical multidegree of a curve.
    Classify { curve: PathBuf },
    /// Contract the exceptional chains of a semistable curve.
    StableModel { curve: PathBuf },
    /// Replace nodes by chains of rational curves.
    Modify {
        curve: PathBuf,
        /// `EDGE=LENGTH`, repeatable.
        #[arg(long = "edge", value_name = "EDGE=LENGTH", value_parser = parse_length)]
        edges: Vec<(String, usize)>,
    },
    /// Pushforward model of a line bundle along a modification, with diagnostics.
    Pushforward {
        modification: PathBuf,
        multidegree: PathBuf,
    },
    /// Cohomology of a line bundle on a chain of rational curves.
    ChainH {
        #[arg(required = true, allow_hyphen_values = true, value_delimiter = ',')]
        degrees: Vec<i64>,
        /// Twist down by one point at each end of the chain.
        #[arg(long)]
        punctured: bool,
    },
    /// Polarized (semi/quasi)stability of a sheaf model or line bundle.
    CheckStability(CheckStability),
    /// Basic Inequality check for a line bundle on a quasistable curve.
    CheckBalanced {
        curve: PathBuf,
        multidegree: PathBuf,
        #[arg(long)]
        stably: bool,
    },
    /// Balanced bundle on a small modification to sheaf model on the stable curve.
    Phi {
        modification: PathBuf,
        multidegree: PathBuf,
    },
    /// Sheaf model to balanced bundle on the small modification.
    PhiInv { curve: PathBuf, sheaf: PathBuf },
    /// List all sheaf models or balanced bundles of a given degree.
    Enumerate {
        curve: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
        #[arg(long, value_enum)]
        mode: EnumerateMode,
    },
    /// Check the balanced/semistable correspondence by enumeration.
    Certify {
        curve: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
        /// Compare stably balanced bundles with stable sheaves.
        #[arg(long)]
        stable: bool,
    },
    /// Run the verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CheckStability {
    curve: PathBuf,
    /// Sheaf model, or a multidegree with `--bundle`.
    object: PathBuf,
    /// Treat OBJECT as the multidegree of a line bundle.
    #[arg(long)]
    bundle: bool,
    /// Polarization file; defaults to the canonical polarization for the degree.
    #[arg(long, value_name = "PATH")]
    polarization: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "semistable")]
    mode: StabilityArg,
    /// Base vertex id for `--mode quasistable`.
    #[arg(long, value_name = "VERTEX", required_if_eq("mode", "quasistable"))]
    base: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StabilityArg {
    Semistable,
    Stable,
    Quasistable,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnumerateMode {
    Semistable,
    Stable,
    Balanced,
    StablyBalanced,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run, repeatable; all suites when omitted.
    #[arg(long = "suite", value_name = "SUITE", value_parser = clap::builder::ValueParser::new(parse_suite))]
    suites: Vec<Suite>,
    #[arg(long, default_value_t = 4)]
    max_vertices: usize,
    #[arg(long, default_value_t = 2)]
    max_genus: u32,
    /// Degrees range over `[-w, w]`.
    #[arg(long, default_value_t = 3)]
    degree_window: i64,
    #[arg(long, default_value_t = 3)]
    chain_length_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    instance_count: usize,
    /// Directory for reproduction files of failing instances.
    #[arg(long, value_name = "DIR", default_value = "verify-repro")]
    repro_dir: PathBuf,
}

fn parse_length(s: &str) -> Result<(String, usize), String> {
    let (edge, len) = s
        .split_once('=')
        .ok_or_else(|| format!("expected EDGE=LENGTH, got `{s}`"))?;
    let len = len.parse().map_err(|e| format!("bad length in `{s}`: {e}"))?;
    Ok((edge.to_owned(), len))
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok((value, status)) => match commands::emit(&value, cli.output.as_deref()) {
            Ok(()) => status,
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(2)
            }
        },
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
