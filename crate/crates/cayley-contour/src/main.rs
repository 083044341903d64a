use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cayley_contour::cli::{self, CommandReport};
use cayley_contour::gibbs::Engine;
use cayley_contour::potential::{default_enum_cap, Spin};
use cayley_contour::tree::Vertex;

/// Exact contour analysis and finite-volume Gibbs measures for finite-range
/// spin models on Cayley trees.
#[derive(Parser)]
#[command(name = "cayley-contour", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Enumeration cap (default from CAYLEY_CONTOUR_CAP or built in).
    #[arg(long, global = true)]
    cap: Option<u128>,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum, gap constant and assumption verdicts for a model.
    CheckModel {
        #[arg(long)]
        model: PathBuf,
    },
    /// Seeded random windows through the exact Peierls comparison.
    Peierls {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Contour decomposition of a window file.
    Contours {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        window: PathBuf,
    },
    /// Exact count of contours of one size through a vertex.
    CountContours {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        l: usize,
        /// Vertex the contours must touch ("-" for the root).
        #[arg(long, default_value = "-")]
        x: String,
        #[arg(long, default_value_t = 1)]
        boundary: Spin,
    },
    /// Outer-boundary and ball-count formulas on random connected subgraphs.
    Lemma44 {
        #[arg(long, default_value_t = 2)]
        k: u8,
        #[arg(long, default_value_t = 1)]
        rprime: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 30)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Finite-volume Gibbs summary (log partition and root marginals).
    Gibbs {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        boundary: Spin,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "dp")]
        engine: String,
    },
    /// Probability of a fixed contour against its exponential bound.
    ContourProb {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        contour: PathBuf,
        #[arg(long)]
        n: usize,
        /// Comma-separated temperatures.
        #[arg(long, value_delimiter = ',')]
        beta: Vec<f64>,
    },
    /// Root marginals for every ground-state boundary over a beta grid.
    CoexistScan {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        beta_from: f64,
        #[arg(long)]
        beta_to: f64,
        #[arg(long)]
        beta_step: f64,
        #[arg(long, default_value = "dp")]
        engine: String,
    },
}

fn run(cli: &Cli) -> cayley_contour::Result<CommandReport> {
    let cap = cli.cap.unwrap_or_else(default_enum_cap);
    match &cli.command {
        Command::CheckModel { model } => cli::cmd_check_model(model, cap),
        Command::Peierls {
            model,
            samples,
            n_max,
            seed,
        } => cli::cmd_peierls(model, *samples, *n_max, *seed, cap),
        Command::Contours { model, window } => cli::cmd_contours(model, window, cap),
        Command::CountContours {
            model,
            l,
            x,
            boundary,
        } => {
            let x: Vertex = x.parse()?;
            cli::cmd_count_contours(model, *l, &x, *boundary, cap)
        }
        Command::Lemma44 {
            k,
            rprime,
            trials,
            n_max,
            seed,
        } => cli::cmd_lemma44(*k, *rprime, *trials, *n_max, *seed),
        Command::Gibbs {
            model,
            n,
            boundary,
            beta,
            engine,
        } => {
            let engine: Engine = engine.parse()?;
            cli::cmd_gibbs(model, *n, *boundary, *beta, engine, cap)
        }
        Command::ContourProb {
            model,
            contour,
            n,
            beta,
        } => cli::cmd_contour_prob(model, contour, *n, beta, cap),
        Command::CoexistScan {
            model,
            n,
            beta_from,
            beta_to,
            beta_step,
            engine,
        } => {
            let engine: Engine = engine.parse()?;
            cli::cmd_coexist(model, *n, *beta_from, *beta_to, *beta_step, engine, cap)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let rendered = report.body.render();
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::from(report.exit_code.clamp(0, 255) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code().clamp(0, 255) as u8)
        }
    }
}
