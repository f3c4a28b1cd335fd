use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pacman_cli::run::{enum_cap, evaluate, run, sweep, verification_table};
use pacman_cli::scenario::{dedup_bounds, Scenario, SweepParam};
use pacman_core::bounds::{BoundName, Sigma};

#[derive(Parser)]
#[command(
    name = "pacman",
    version,
    about = "Exact and Monte Carlo checks of generalization bounds on finite worlds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario and write analysis.csv and summary.json.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Re-run a scenario over a list of parameter values and write sweep.csv.
    Sweep {
        config: PathBuf,
        /// gamma, n, delta, alpha, beta or h_count. Defaults to the scenario's `sweep` block.
        #[arg(long)]
        param: Option<SweepParam>,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the verification table; exits with status 1 if a certified bound fails.
    Verify {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args)]
struct Overrides {
    /// Comma-separated bound names, or `all`.
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// `auto` or a nonnegative number.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    expected_cs: bool,
}

impl Overrides {
    fn apply(&self, s: &mut Scenario) -> Result<()> {
        if let Some(b) = &self.bounds {
            s.bounds = dedup_bounds(BoundName::parse_list(b).context("--bounds")?);
        }
        let p = &mut s.params;
        if let Some(v) = self.delta {
            p.delta = v;
        }
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.beta {
            p.beta = v;
        }
        if let Some(v) = self.nu {
            p.nu = v;
        }
        if let Some(v) = &self.sigma {
            p.sigma = v.parse::<Sigma>().context("--sigma")?;
        }
        if let Some(v) = self.t_max {
            p.t_max = Some(v);
        }
        if self.expected_cs {
            p.expected_cs = true;
        }
        p.validate().context("invalid bound parameters")?;
        Ok(())
    }
}

fn load(config: &Path, overrides: &Overrides) -> Result<Scenario> {
    let mut s = Scenario::load(config)?;
    overrides.apply(&mut s)?;
    Ok(s)
}

fn main_inner() -> Result<ExitCode> {
    let cli = Cli::parse();
    let cap = enum_cap()?;
    match cli.command {
        Command::Run { config, out, overrides } => {
            let s = load(&config, &overrides)?;
            let ev = run(&s, &out, cap)?;
            if ev.analysis.is_none() {
                eprintln!("enumeration cap exceeded: wrote Monte Carlo results for global bounds only");
            }
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
            overrides,
        } => {
            let s = load(&config, &overrides)?;
            let (param, values) = match (param, values, &s.sweep) {
                (Some(p), Some(v), _) => (p, v),
                (None, None, Some(sw)) => (sw.param, sw.values.clone()),
                (Some(p), None, Some(sw)) if sw.param == p => (p, sw.values.clone()),
                _ => anyhow::bail!("sweep needs --param and --values, or a `sweep` block in the scenario"),
            };
            sweep(&s, param, &values, &out, cap)?;
        }
        Command::Verify { config, overrides } => {
            let s = load(&config, &overrides)?;
            let ev = evaluate(&s, cap)?;
            print!("{}", verification_table(&ev));
            if !ev.pass() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
