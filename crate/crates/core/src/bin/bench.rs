//! `bench run | probe | verify-lemmas`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::json;

use nonsep_bcd::bench::{self, synth, BenchError, ExperimentSpec, ProbeSetting, RunOptions};
use nonsep_bcd::diagnostics;

#[derive(Parser)]
#[command(name = "bench", version, about = "Block coordinate descent experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every grid point × method × trial of an experiment file.
    Run {
        spec: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory (overrides the experiment file and BENCH_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed (overrides the experiment file).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check whether a saved final point is coordinate-wise stationary.
    Probe {
        /// `final_*.csv` written by `bench run`.
        point: PathBuf,
        /// exhaustive | sampled:COUNT
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Experiment file that produced the point.
        #[arg(long)]
        spec: PathBuf,
        /// Grid-point index (the middle field of the file name).
        #[arg(long, default_value_t = 0)]
        grid: usize,
        /// Block size; defaults to the grid point's k.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the random-block expectation identities and curvature bounds.
    VerifyLemmas {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cmd: Command) -> Result<bool, BenchError> {
    match cmd {
        Command::Run { spec, jobs, out, seed } => {
            let spec = ExperimentSpec::from_file(&spec)?;
            let outcome = bench::run_experiment(&spec, &RunOptions { jobs, out_dir: out, seed })?;
            println!(
                "{}",
                json!({ "status": "ok", "runs": outcome.rows.len(), "out_dir": outcome.out_dir.display().to_string() })
            );
            Ok(true)
        }
        Command::Probe { point, mode, spec, grid, k, seed } => {
            let spec = ExperimentSpec::from_file(&spec)?;
            let gp = *spec
                .grid_points()
                .get(grid)
                .ok_or_else(|| BenchError::Spec(format!("grid index {grid} out of range")))?;
            let (a, y) = bench::load_data(&spec)?;
            let p = bench::build_instance(&spec, &a, &y, &gp)?;
            let x = bench::load_vector_csv(&point)?;
            let mode = match ProbeSetting::parse(&mode, seed)? {
                ProbeSetting::Mode(m) => m,
                ProbeSetting::None => return Err(BenchError::Spec("probe mode must not be 'none'".into())),
            };
            let report = diagnostics::probe_cws(&p, &x, k.unwrap_or(gp.k), mode)?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(true)
        }
        Command::VerifyLemmas { n, k, trials, seed } => {
            let ids = diagnostics::verify_lemma7_identities(n, k, trials, seed)?;
            let g = synth::gen_randn(n, n, seed);
            let q: DMatrix<f64> = (&g + g.transpose()) * 0.5;
            let bounds = diagnostics::check_curvature_bounds(&q, k, 1e-4)?;
            let ok = ids.passed && bounds.holds;
            println!("{}", json!({ "block_identities": ids, "curvature_bounds": bounds, "passed": ok }));
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
