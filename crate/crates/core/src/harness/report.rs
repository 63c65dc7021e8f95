//! Final-epoch summaries and error penalties from CSV logs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harness::log::LogRow;

#[derive(Debug, Clone, PartialEq)]
pub struct FinalSummary {
    pub experiment: String,
    pub epoch: usize,
    /// Final-epoch error per seed, sorted by seed.
    pub per_seed: Vec<(u64, f64)>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Summarize the last epoch reached by every seed of one experiment.
pub fn final_summary(rows: &[LogRow]) -> Result<FinalSummary> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Validation("empty log".into()))?;
    if let Some(other) = rows.iter().find(|r| r.experiment != first.experiment) {
        return Err(Error::Validation(format!(
            "log mixes experiments `{}` and `{}`",
            first.experiment, other.experiment
        )));
    }
    let mut last: BTreeMap<u64, &LogRow> = BTreeMap::new();
    for r in rows {
        let slot = last.entry(r.seed).or_insert(r);
        if r.epoch > slot.epoch {
            *slot = r;
        }
    }
    let epoch = last.values().map(|r| r.epoch).max().unwrap_or(0);
    if let Some(r) = last.values().find(|r| r.epoch != epoch) {
        return Err(Error::Validation(format!(
            "seed {} stops at epoch {} of {epoch}",
            r.seed, r.epoch
        )));
    }
    let per_seed: Vec<(u64, f64)> = last
        .iter()
        .map(|(&s, r)| (s, r.test_error_percent))
        .collect();
    let errs = per_seed.iter().map(|p| p.1);
    Ok(FinalSummary {
        experiment: first.experiment.clone(),
        epoch,
        mean: errs.clone().sum::<f64>() / per_seed.len() as f64,
        min: errs.clone().fold(f64::INFINITY, f64::min),
        max: errs.fold(f64::NEG_INFINITY, f64::max),
        per_seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Penalty {
    pub experiment: String,
    pub mean_error: f64,
    pub baseline_error: f64,
    /// `mean_error - baseline_error`, percentage points.
    pub penalty: f64,
    /// Smallest and largest per-seed penalty.
    pub range: (f64, f64),
}

/// Penalty of `experiment` over `baseline`; both must cover the same seeds
/// and final epoch.
pub fn penalty_report(baseline: &[LogRow], experiment: &[LogRow]) -> Result<Penalty> {
    let b = final_summary(baseline)?;
    let e = final_summary(experiment)?;
    let seeds = |s: &FinalSummary| s.per_seed.iter().map(|p| p.0).collect::<Vec<_>>();
    if seeds(&b) != seeds(&e) {
        return Err(Error::SeedMismatch(format!(
            "baseline seeds {:?} vs experiment seeds {:?}",
            seeds(&b),
            seeds(&e)
        )));
    }
    if b.epoch != e.epoch {
        return Err(Error::SeedMismatch(format!(
            "baseline ends at epoch {} but experiment at {}",
            b.epoch, e.epoch
        )));
    }
    let diffs: Vec<f64> = b
        .per_seed
        .iter()
        .zip(&e.per_seed)
        .map(|(x, y)| y.1 - x.1)
        .collect();
    Ok(Penalty {
        experiment: e.experiment,
        mean_error: e.mean,
        baseline_error: b.mean,
        penalty: e.mean - b.mean,
        range: (
            diffs.iter().copied().fold(f64::INFINITY, f64::min),
            diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
    })
}
