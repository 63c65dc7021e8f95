use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::Result;
use crate::harness::catalog::ExperimentSpec;
use crate::harness::log::{create_log, LogRow};
use crate::mnist::Dataset;
use crate::network::{TrainRun, Trainer};

#[derive(Debug)]
pub struct ExperimentResult {
    pub name: String,
    pub csv_path: PathBuf,
    /// One run per seed, in the spec's seed order.
    pub runs: Vec<TrainRun>,
}

impl ExperimentResult {
    pub fn mean_final_error(&self) -> f64 {
        let finals: Vec<f64> = self.runs.iter().filter_map(TrainRun::final_error).collect();
        finals.iter().sum::<f64>() / finals.len().max(1) as f64
    }
}

/// Train every seed of `spec` on up to `threads` worker threads and log to
/// `out_dir/<name>.csv`. Output is independent of the thread count.
pub fn run_experiment(
    spec: &ExperimentSpec,
    train: &Dataset,
    test: &Dataset,
    out_dir: &Path,
    threads: usize,
    progress: Option<&(dyn Fn(&LogRow) + Sync)>,
) -> Result<ExperimentResult> {
    let config = spec.train_config();
    config.network.validate()?;
    let csv_path = out_dir.join(format!("{}.csv", spec.name));
    let sink = Mutex::new(create_log(&csv_path, spec.seeds.len(), config.epochs)?);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<TrainRun>>>> =
        Mutex::new((0..spec.seeds.len()).map(|_| None).collect());

    let worker = || loop {
        let slot = next.fetch_add(1, Ordering::Relaxed);
        let Some(&seed) = spec.seeds.get(slot) else {
            break;
        };
        let outcome = Trainer::new(config.clone(), seed).and_then(|mut t| {
            t.run(train, test, |rec| {
                let row = LogRow::from_record(&spec.name, seed, rec);
                if let Some(p) = progress {
                    p(&row);
                }
                sink.lock().expect("log sink poisoned").push(slot, row)
            })
        });
        results.lock().expect("results poisoned")[slot] = Some(outcome);
    };
    let workers = threads.clamp(1, spec.seeds.len().max(1));
    std::thread::scope(|s| {
        for _ in 1..workers {
            s.spawn(worker);
        }
        worker();
    });

    let runs = results
        .into_inner()
        .expect("results poisoned")
        .into_iter()
        .map(|r| r.expect("every slot is claimed"))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        name: spec.name.clone(),
        csv_path,
        runs,
    })
}
