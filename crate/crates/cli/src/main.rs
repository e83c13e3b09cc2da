use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sigtensor::bench::{run_bench, BenchConfig};
use sigtensor::io::{generate_instance, InstanceFile, MatrixFile, TextFormat, TraceFile};
use sigtensor::{recover, Error, RecoveryConfig, Tensor3};

/// Exact path recovery from third-level signature tensors.
#[derive(Parser)]
#[command(name = "sigtensor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the mode-1 folding of the core tensor.
    Core {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        dim: u64,
    },
    /// Generate a random instance `A * C` with its ground truth.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        dim: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the matrix of an instance file.
    Recover {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        deterministic_pivot: bool,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
        max_retries: u32,
        /// Write the recovered matrix as a matrix file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the replayable trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Time recoveries over a range of dimensions.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [5usize, 10, 20, 40])]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        bound: u32,
        /// Run trials one at a time.
        #[arg(long)]
        sequential: bool,
        /// Write the machine-readable report (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check `G = A * C` exactly.
    Verify {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
    },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::NotInOrbit { .. } => EXIT_FAILURE,
                _ => EXIT_USAGE,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::Core { dim } => {
            print!("{}", Tensor3::core(dim as usize));
        }
        Command::Gen {
            dim,
            seed,
            bound,
            out,
        } => {
            let inst = generate_instance(dim as usize, seed, bound)?;
            emit(&inst.to_text(), out)?;
        }
        Command::Recover {
            input,
            seed,
            deterministic_pivot,
            max_retries,
            out,
            trace,
        } => {
            let g = InstanceFile::read(&input)?.tensor()?;
            let cfg = RecoveryConfig {
                rng_seed: seed,
                deterministic_pivot,
                max_retries,
                ..RecoveryConfig::default()
            };
            let rec = recover(&g, &cfg)?;
            print!("{}", rec.matrix);
            if let Some(path) = out {
                MatrixFile::from_matrix(&rec.matrix).write(&path)?;
            }
            if let Some(path) = trace {
                TraceFile::new(rec.trace).write(&path)?;
            }
        }
        Command::Bench {
            dims,
            trials,
            seed,
            bound,
            sequential,
            out,
        } => {
            if let Some(bad) = dims.iter().find(|&&d| d < 2) {
                return Err(Error::InvalidArgument(format!("dimension {bad} is below 2")));
            }
            let cfg = BenchConfig {
                dims,
                trials,
                seed,
                bound,
                parallel: !sequential,
                ..BenchConfig::default()
            };
            match run_bench(&cfg) {
                Ok((report, _)) => {
                    print!("{}", report.table());
                    if let Some(path) = out {
                        let text = serde_json::to_string_pretty(&report).expect("serializable");
                        std::fs::write(&path, text + "\n")
                            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
                    }
                }
                Err(fail) => {
                    eprintln!("error: {fail}");
                    return Ok(ExitCode::from(EXIT_FAILURE));
                }
            }
        }
        Command::Verify { tensor, matrix } => {
            let g = InstanceFile::read(&tensor)?.tensor()?;
            let a = MatrixFile::read(&matrix)?.matrix()?;
            if a.rows() != g.dim() || a.cols() != g.dim() {
                return Err(Error::DimensionMismatch {
                    expected: g.dim(),
                    found: a.rows(),
                });
            }
            if Tensor3::core(g.dim()).congruence(&a)? == g {
                println!("ok");
            } else {
                println!("mismatch");
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(text: &str, out: Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
