//! `dunkl-ou`: verifies the Dunkl Ornstein–Uhlenbeck identities and
//! inequalities and writes margin reports.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "dunkl-ou", version, about = "Two-path verification of Dunkl Ornstein-Uhlenbeck inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite and exit 0 iff every non-skipped check passes.
    Verify(Options),
    /// Sharpness of the gradient bound over a multiplicity grid.
    Sweep(Options),
    /// Taylor partial sums of t ↦ ∫(O_t f)² dm_k against the exact value.
    Taylor(Options),
    /// Entropy bounds and empirical log-Sobolev ratios.
    Entropy(Options),
}

/// Flags override the config file, which overrides the defaults.
#[derive(Args)]
struct Options {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration in canonical form and exit.
    #[arg(long)]
    print_config: bool,
    /// Group, e.g. rank1:k=1, z2:2:k=1,0.5 or sym:3:k=1.
    #[arg(long)]
    group: Option<String>,
    /// Multiplicity grid for the sweep, e.g. 0,1/2,1,2.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    quad_order: Option<String>,
    #[arg(long)]
    precision_digits: Option<String>,
    /// Semigroup times, comma separated.
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    battery_size: Option<String>,
    /// One tolerance for every tier.
    #[arg(long)]
    tol: Option<String>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    out_json: Option<String>,
    #[arg(long)]
    out_csv: Option<String>,
    /// identity, semigroup, poincare, gradient, entropy or all.
    #[arg(long)]
    suite: Option<String>,
    /// Polynomial for the Taylor table, e.g. "x1^2 - 1/2*x1".
    #[arg(long)]
    function: Option<String>,
    /// Number of Taylor terms.
    #[arg(long)]
    terms: Option<String>,
}

impl Options {
    fn resolve(&self) -> dunkl_ou::Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| dunkl_ou::Error::Parse(format!("{}: {e}", path.display())))?;
            c.apply_text(&text)?;
        }
        let flags = [
            ("group", &self.group),
            ("k", &self.k),
            ("quad_order", &self.quad_order),
            ("precision_digits", &self.precision_digits),
            ("t", &self.t),
            ("seed", &self.seed),
            ("battery_size", &self.battery_size),
            ("tol", &self.tol),
            ("jobs", &self.jobs),
            ("out_json", &self.out_json),
            ("out_csv", &self.out_csv),
            ("suite", &self.suite),
            ("function", &self.function),
            ("terms", &self.terms),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                c.set(key, v).map_err(|e| dunkl_ou::Error::Parse(format!("--{}: {e}", key.replace('_', "-"))))?;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (options, run): (&Options, fn(&RunConfig) -> dunkl_ou::Result<u8>) = match &cli.command {
        Command::Verify(o) => (o, commands::verify),
        Command::Sweep(o) => (o, commands::sweep),
        Command::Taylor(o) => (o, commands::taylor),
        Command::Entropy(o) => (o, commands::entropy),
    };
    let config = match options.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::EXIT_USAGE);
        }
    };
    if options.print_config {
        print!("{config}");
        return ExitCode::SUCCESS;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::EXIT_USAGE);
        }
    };
    match pool.install(|| run(&config)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                dunkl_ou::Error::CrossPath(_) => commands::EXIT_CROSS_PATH,
                dunkl_ou::Error::Capability(_) | dunkl_ou::Error::Numerical(_) => commands::EXIT_FAIL,
                _ => commands::EXIT_USAGE,
            })
        }
    }
}
