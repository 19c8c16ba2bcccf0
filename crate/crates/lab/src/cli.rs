//! The `loe-lab` command line, kept in the library so the whole surface can
//! be exercised in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use loe_core::haar::derive_weights;
use serde::Serialize;

use crate::checks::{run_suite, Suite};
use crate::{plan, run_to_dir, ExperimentConfig, LabError};

#[derive(Parser)]
#[command(name = "loe-lab", version, about = "Local operator entanglement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: the config's `out`, else `out/<experiment>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        override_size_guard: bool,
        /// Print the work plan with cost estimates and exit.
        #[arg(long)]
        dry_run: bool,
    },
    /// Print the 13 Haar weights for a cut as JSON.
    Weights {
        #[arg(long = "dA")]
        d_a: usize,
        #[arg(long = "dB")]
        d_b: usize,
    },
    /// Run a self-check suite.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

#[derive(Serialize)]
struct WeightsDoc<'a> {
    #[serde(rename = "d_A")]
    d_a: usize,
    #[serde(rename = "d_B")]
    d_b: usize,
    d: usize,
    weights: &'a [f64],
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 2 when an assertion fails, 1 otherwise.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match run(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), LabError> {
    match cli.command {
        Command::Run { config, out: dir, threads, seed, override_size_guard, dry_run } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.validate()?;
            cfg.check_size_guard(override_size_guard)?;
            if dry_run {
                for line in plan(&cfg)? {
                    writeln!(out, "{line}")?;
                }
                return Ok(());
            }
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                if n == 0 {
                    return Err(LabError::Usage("--threads must be at least 1".into()));
                }
                pool = pool.num_threads(n);
            }
            let pool = pool.build().map_err(|e| LabError::Usage(e.to_string()))?;
            let dir = dir
                .or_else(|| cfg.out.clone())
                .unwrap_or_else(|| PathBuf::from("out").join(cfg.experiment.name()));
            let result = pool.install(|| run_to_dir(&cfg, &dir));
            match &result {
                Ok(m) => {
                    for c in &m.checks {
                        writeln!(out, "{}", c.line())?;
                    }
                    writeln!(out, "wrote {} ({:.2} s)", dir.display(), m.wall_time_s)?;
                }
                Err(LabError::Assertion(_)) => writeln!(err, "outputs kept in {}", dir.display())?,
                Err(_) => {}
            }
            result.map(|_| ())
        }
        Command::Weights { d_a, d_b } => {
            let w = derive_weights(d_a, d_b)?;
            let doc = WeightsDoc { d_a, d_b, d: d_a * d_b, weights: w.weights() };
            writeln!(out, "{}", serde_json::to_string(&doc).expect("weights serialize"))?;
            Ok(())
        }
        Command::Check { suite } => {
            let results = run_suite(suite)?;
            let mut failed = Vec::new();
            for c in &results {
                writeln!(out, "{}", c.line())?;
                if !c.pass {
                    failed.push(c.name.clone());
                }
            }
            writeln!(out, "{} checks, {} failed", results.len(), failed.len())?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(LabError::Assertion(failed.join("; ")))
            }
        }
    }
}
