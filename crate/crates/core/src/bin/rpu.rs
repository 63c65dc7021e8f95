use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rpu_core::harness::{self, Budget, ExperimentSpec};
use rpu_core::kv::KvDoc;
use rpu_core::{hw, mnist};

#[derive(Parser)]
#[command(name = "rpu", about = "RPU crossbar training simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a catalog experiment (or every `name.*` entry), or a config file.
    Run {
        target: String,
        /// Replace the experiment's seed list with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated seed list.
        #[arg(long, conflicts_with = "seed")]
        seeds: Option<String>,
        /// Override the epoch count (the last learning rate is held).
        #[arg(long)]
        epochs: Option<usize>,
        /// full, ci or smoke; catalog entries default to full.
        #[arg(long)]
        budget: Option<String>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// List catalog experiments, or print the config of the named ones.
    List { name: Option<String> },
    /// Summarize CSV logs; with --baseline also report penalties.
    Report {
        csv: Vec<PathBuf>,
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Hardware design arithmetic; `default` uses built-in parameters.
    Hwcalc {
        #[arg(default_value = "default")]
        config: String,
        /// Also write the quantities as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print the effective parameters as a config file and exit.
        #[arg(long)]
        dump_params: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn read_kv(path: &Path) -> rpu_core::Result<KvDoc> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| rpu_core::Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    KvDoc::parse(&text)
}

fn run(cli: Cli) -> rpu_core::Result<()> {
    match cli.command {
        Command::List { name: None } => {
            for e in harness::catalog() {
                println!("{:<22} {}", e.name, e.summary);
            }
        }
        Command::List { name: Some(name) } => {
            for e in harness::find(&name)? {
                println!("{}", e.to_kv().render());
            }
        }
        Command::Run {
            target,
            seed,
            seeds,
            epochs,
            budget,
            out,
            data_dir,
            threads,
        } => {
            let mut specs = if Path::new(&target).is_file() {
                vec![ExperimentSpec::from_kv(&read_kv(Path::new(&target))?)?]
            } else {
                harness::find(&target)?
            };
            let budget = budget.as_deref().map(Budget::parse).transpose()?;
            for spec in &mut specs {
                if let Some(b) = budget {
                    *spec = spec.clone().with_budget(b);
                }
                if let Some(n) = epochs {
                    spec.epochs = n;
                }
                if let Some(s) = seed {
                    spec.seeds = vec![s];
                }
                if let Some(list) = &seeds {
                    spec.seeds = list
                        .split(',')
                        .map(|s| {
                            s.trim().parse().map_err(|_| {
                                rpu_core::Error::InvalidConfig(format!("bad seed `{s}`"))
                            })
                        })
                        .collect::<rpu_core::Result<_>>()?;
                }
            }
            let (train, test) =
                mnist::load_dataset(data_dir.unwrap_or_else(mnist::default_data_dir))?;
            let progress = |r: &harness::LogRow| {
                eprintln!(
                    "{} seed {} epoch {:>2}: {:.2}% ({:.1}s)",
                    r.experiment, r.seed, r.epoch, r.test_error_percent, r.wallclock
                );
            };
            for spec in &specs {
                let res =
                    harness::run_experiment(spec, &train, &test, &out, threads, Some(&progress))?;
                println!(
                    "{:<22} final {:.2}%  -> {}",
                    res.name,
                    res.mean_final_error(),
                    res.csv_path.display()
                );
            }
        }
        Command::Report { csv, baseline } => {
            let base = baseline.as_deref().map(harness::read_log).transpose()?;
            for path in &csv {
                let rows = harness::read_log(path)?;
                let s = harness::final_summary(&rows)?;
                print!(
                    "{:<22} epoch {:>2}  mean {:.2}%  range [{:.2}, {:.2}]  seeds {}",
                    s.experiment,
                    s.epoch,
                    s.mean,
                    s.min,
                    s.max,
                    s.per_seed.len()
                );
                if let Some(b) = &base {
                    let p = harness::penalty_report(b, &rows)?;
                    print!(
                        "  penalty {:+.2} [{:+.2}, {:+.2}]",
                        p.penalty, p.range.0, p.range.1
                    );
                }
                println!();
            }
        }
        Command::Hwcalc {
            config,
            csv,
            dump_params,
        } => {
            let params = if config == "default" {
                hw::HwParams::default()
            } else {
                hw::HwParams::from_kv(&read_kv(Path::new(&config))?)?
            };
            if dump_params {
                print!("{}", params.to_kv().render());
                return Ok(());
            }
            let derived = hw::derive(&params)?;
            print!("{}", derived.report_text(&params));
            if let Some(path) = csv {
                std::fs::write(&path, derived.report_csv()).map_err(|e| {
                    rpu_core::Error::InvalidConfig(format!("{}: {e}", path.display()))
                })?;
            }
        }
    }
    Ok(())
}
