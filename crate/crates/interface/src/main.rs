use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use spingame::report::{entropy_report, play_report};
use spingame::session::SessionStore;
use spingame::spec::{EnsembleSpec, ObservableSpec, PresetArg, StrategySpec};
use spingame::{api, sweep};
use spingame_core::entropy::EntropyUnit;

#[derive(Debug, Parser)]
#[command(
    name = "spingame",
    version,
    about = "Spin-1/2 measurement game: entropy, payoff curves, simulation and server"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the density matrix, its spectrum and its entropy.
    Entropy {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[command(flatten)]
        unit: UnitArgs,
    },
    /// Write the entropy and best-payoff curves of the presets as CSV.
    Sweep {
        /// Grid spacing in p1.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate N rounds with a fixed strategy.
    Play {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Observable: `z`, `x`, or Bloch angles `theta,phi` in radians.
        #[arg(long, default_value = "z")]
        obs: ObservableSpec,
        /// Eigenvalue index bet on (0 = largest).
        #[arg(long, default_value_t = 0)]
        pick: usize,
        #[arg(long, default_value_t = 1000)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        unit: UnitArgs,
    },
    /// Run the JSON session API.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    /// rho1, rho2 or rho3, optionally with p1 inline: rho2(0.75).
    #[arg(long, conflicts_with = "ensemble_file")]
    preset: Option<PresetArg>,
    #[arg(long)]
    p1: Option<f64>,
    /// Ensemble text file: dimension, then one `weight re im ...` line per state.
    #[arg(long, conflicts_with = "p1")]
    ensemble_file: Option<PathBuf>,
}

impl EnsembleArgs {
    fn spec(&self) -> anyhow::Result<EnsembleSpec> {
        if let Some(path) = &self.ensemble_file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return EnsembleSpec::parse_file(&text)
                .with_context(|| format!("parsing {}", path.display()));
        }
        let Some(arg) = self.preset else {
            bail!("one of --preset or --ensemble-file is required");
        };
        let p1 = match (arg.p1, self.p1) {
            (Some(a), Some(b)) if a != b => {
                bail!("p1 given twice with different values ({a} and {b})")
            }
            (a, b) => a.or(b),
        };
        Ok(EnsembleSpec::preset(arg.preset, p1))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UnitName {
    Bits,
    Nats,
    Kb,
}

#[derive(Debug, Args)]
struct UnitArgs {
    #[arg(long, value_enum, default_value = "bits")]
    unit: UnitName,
    /// Boltzmann constant for `--unit kb`.
    #[arg(long, default_value_t = 1.0)]
    kb: f64,
}

impl UnitArgs {
    fn unit(&self) -> anyhow::Result<EntropyUnit> {
        Ok(match self.unit {
            UnitName::Bits => EntropyUnit::Bits,
            UnitName::Nats => EntropyUnit::Nats,
            UnitName::Kb => {
                if !(self.kb.is_finite() && self.kb > 0.0) {
                    bail!("--kb must be positive, got {}", self.kb);
                }
                EntropyUnit::Physical { k_b: self.kb }
            }
        })
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Entropy { ensemble, unit } => {
            let report = entropy_report(&ensemble.spec()?, unit.unit()?)?;
            print!("{report}");
        }
        Command::Sweep { step, out } => {
            let curves = sweep::compute(step)?;
            match out {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    sweep::write_csv(&curves, BufWriter::new(file))?;
                    let rows = sweep::read_csv(File::open(&path)?)?;
                    let dev = sweep::verify_rows(&rows)?;
                    eprintln!(
                        "wrote {} rows to {} (max deviation {dev:.1e})",
                        rows.len(),
                        path.display()
                    );
                }
                None => {
                    let stdout = io::stdout();
                    sweep::write_csv(&curves, stdout.lock())?;
                }
            }
        }
        Command::Play {
            ensemble,
            obs,
            pick,
            rounds,
            seed,
            unit,
        } => {
            let strategy = StrategySpec {
                observable: obs,
                pick,
            };
            let report = play_report(&ensemble.spec()?, &strategy, rounds, seed, unit.unit()?)?;
            print!("{report}");
        }
        Command::Serve { bind, port } => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(api::serve(SocketAddr::new(bind, port), SessionStore::new()))?;
        }
    }
    io::stdout().flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
