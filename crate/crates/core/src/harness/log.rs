//! Per-epoch CSV logs.
//!
//! Columns: `experiment,seed,epoch,test_error_percent,saturation_fraction,wallclock`.
//! Every column except `wallclock` is a pure function of the experiment and
//! seed, so two runs can be compared byte for byte after dropping it.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::EpochRecord;

pub const HEADER: [&str; 6] = [
    "experiment",
    "seed",
    "epoch",
    "test_error_percent",
    "saturation_fraction",
    "wallclock",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub experiment: String,
    pub seed: u64,
    pub epoch: usize,
    pub test_error_percent: f64,
    pub saturation_fraction: f64,
    pub wallclock: f64,
}

impl LogRow {
    pub fn from_record(experiment: &str, seed: u64, rec: &EpochRecord) -> Self {
        LogRow {
            experiment: experiment.to_string(),
            seed,
            epoch: rec.epoch,
            test_error_percent: rec.test_error,
            saturation_fraction: rec.saturation_fraction,
            wallclock: rec.wallclock_s,
        }
    }

    fn fields(&self) -> [String; 6] {
        [
            self.experiment.clone(),
            self.seed.to_string(),
            self.epoch.to_string(),
            format!("{:.2}", self.test_error_percent),
            format!("{:.6}", self.saturation_fraction),
            format!("{:.3}", self.wallclock),
        ]
    }
}

/// CSV writer that accepts rows from concurrent seeds in any order and
/// emits them sorted by (seed slot, epoch) as soon as they are contiguous.
pub struct OrderedSink<W: Write> {
    out: csv::Writer<W>,
    epochs: usize,
    slots: usize,
    next: usize,
    pending: BTreeMap<usize, LogRow>,
}

impl<W: Write> OrderedSink<W> {
    pub fn new(out: W, slots: usize, epochs: usize) -> Result<Self> {
        let mut out = csv::Writer::from_writer(out);
        out.write_record(HEADER)?;
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(OrderedSink {
            out,
            epochs,
            slots,
            next: 0,
            pending: BTreeMap::new(),
        })
    }

    /// Queue the row for `slot` (seed position) and flush whatever is ready.
    pub fn push(&mut self, slot: usize, row: LogRow) -> Result<()> {
        if slot >= self.slots || row.epoch == 0 || row.epoch > self.epochs {
            return Err(Error::Validation(format!(
                "row slot {slot} epoch {} out of range",
                row.epoch
            )));
        }
        self.pending.insert(slot * self.epochs + row.epoch - 1, row);
        while let Some(row) = self.pending.remove(&self.next) {
            self.out.write_record(row.fields())?;
            self.next += 1;
        }
        self.out.flush().map_err(|e| Error::io("<csv>", e))
    }

    pub fn is_complete(&self) -> bool {
        self.next == self.slots * self.epochs
    }

    pub fn into_inner(self) -> Result<W> {
        self.out
            .into_inner()
            .map_err(|e| Error::io("<csv>", e.into_error()))
    }
}

pub fn create_log(path: &Path, slots: usize, epochs: usize) -> Result<OrderedSink<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    OrderedSink::new(f, slots, epochs)
}

pub fn read_log(path: &Path) -> Result<Vec<LogRow>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_log(f)
}

pub fn parse_log(reader: impl std::io::Read) -> Result<Vec<LogRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::Validation(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |col: usize| -> Result<f64> {
            rec[col].parse().map_err(|_| {
                Error::Validation(format!(
                    "row {}: bad {} `{}`",
                    i + 1,
                    HEADER[col],
                    &rec[col]
                ))
            })
        };
        rows.push(LogRow {
            experiment: rec[0].to_string(),
            seed: rec[1]
                .parse()
                .map_err(|_| Error::Validation(format!("row {}: bad seed", i + 1)))?,
            epoch: rec[2]
                .parse()
                .map_err(|_| Error::Validation(format!("row {}: bad epoch", i + 1)))?,
            test_error_percent: num(3)?,
            saturation_fraction: num(4)?,
            wallclock: num(5)?,
        });
    }
    Ok(rows)
}

/// CSV text with the wallclock column removed.
pub fn strip_wallclock(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}
