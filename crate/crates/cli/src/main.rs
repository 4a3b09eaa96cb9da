mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{CliError, Format};

/// Critical exponents and fractional-Laplacian numerics for higher-order
/// evolution equations.
#[derive(Parser, Debug)]
#[command(name = "critex", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical exponent report for an operator document.
    Exponent {
        #[arg(long, short)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Lower envelope of the scaling lines.
    Envelope {
        #[arg(long, short)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check (−Δ)^σ⟨x⟩^{−q} at the origin and its decay rate.
    FraclapVerify {
        #[arg(long)]
        n: u32,
        /// Rational power, e.g. `1/2`.
        #[arg(long)]
        sigma: String,
        /// Rational decay exponent, `q > n`.
        #[arg(long)]
        q: String,
        /// Relative tolerance for the origin value.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Allowed excess of the fitted slope over `−q_σ`.
        #[arg(long, default_value_t = critex::fraclap::DECAY_SLACK)]
        slack: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sample the time test functions and their primitives.
    TestfnDump {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        p: f64,
        /// Rational time scaling exponent.
        #[arg(long, default_value = "1")]
        eta: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Sample the scaled family on `[0, R^η]`.
        #[arg(long)]
        scaled: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run one simulation from a configuration document.
    Simulate {
        #[arg(long, short)]
        config: PathBuf,
        /// Write every stored snapshot as a binary grid into this directory.
        #[arg(long)]
        snapshots: Option<PathBuf>,
        /// Time scaling of the test function for the weak residual.
        #[arg(long, requires = "residual_r")]
        residual_eta: Option<String>,
        /// Radius of the test function for the weak residual.
        #[arg(long, requires = "residual_eta")]
        residual_r: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a configuration over several powers `p`.
    Sweep {
        #[arg(long, short)]
        config: PathBuf,
        /// Comma-separated powers.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Exponent { input, out } => commands::exponent(&input, out.format.into(), out.output.as_deref()),
        Command::Envelope { input, out } => commands::envelope(&input, out.format.into(), out.output.as_deref()),
        Command::FraclapVerify { n, sigma, q, tol, slack, out } => {
            commands::fraclap_verify(n, &sigma, &q, tol, slack, out.format.into(), out.output.as_deref())
        }
        Command::TestfnDump { m, p, eta, r, samples, scaled, out } => {
            commands::testfn_dump(m, p, &eta, r, samples, scaled, out.format.into(), out.output.as_deref())
        }
        Command::Simulate { config, snapshots, residual_eta, residual_r, out } => {
            let residual = residual_eta.zip(residual_r);
            commands::simulate(&config, snapshots.as_deref(), residual, out.format.into(), out.output.as_deref())
        }
        Command::Sweep { config, p, jobs, out } => {
            commands::sweep(&config, &p, jobs, out.format.into(), out.output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CRITEX_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return CliError::Usage(e.to_string().trim().to_string()).report(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
