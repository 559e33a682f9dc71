//! Append-only run persistence.
//!
//! Layout per run directory:
//!
//! ```text
//! run_00/
//!   periods.jsonl    one PeriodRecord per line (schema v1, deterministic)
//!   timings.csv      wall-clock decision latencies (never deterministic)
//!   io/              raw prompt/response sidecars, keyed by round and agent
//!   abort.json       present only if the run was aborted
//! ```
//!
//! Every period is flushed as it completes so a killed multi-hour run keeps
//! everything it produced.

use super::{EngineError, PeriodRecord};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Run-log schema version written into manifests.
pub const LOG_SCHEMA_VERSION: u32 = 1;

pub struct RunWriter {
    dir: PathBuf,
    jsonl: BufWriter<File>,
    timings: BufWriter<File>,
}

impl RunWriter {
    pub fn create(dir: &Path) -> Result<Self, EngineError> {
        fs::create_dir_all(dir)?;
        let jsonl = BufWriter::new(File::create(dir.join("periods.jsonl"))?);
        let mut timings = BufWriter::new(File::create(dir.join("timings.csv"))?);
        writeln!(timings, "round,agent,latency_us")?;
        Ok(Self { dir: dir.to_path_buf(), jsonl, timings })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write prompt/response sidecars for one agent-round and return the
    /// io reference stored in the record (relative to the run directory).
    pub fn write_io(
        &mut self,
        round: usize,
        agent: usize,
        prompt: Option<&str>,
        response: Option<&str>,
    ) -> Result<String, EngineError> {
        let io_dir = self.dir.join("io");
        fs::create_dir_all(&io_dir)?;
        let stem = format!("r{round:06}_a{agent}");
        if let Some(p) = prompt {
            fs::write(io_dir.join(format!("{stem}_prompt.txt")), p)?;
        }
        if let Some(r) = response {
            fs::write(io_dir.join(format!("{stem}_response.txt")), r)?;
        }
        Ok(format!("io/{stem}"))
    }

    /// Append one record to the log and its latencies to the timing sidecar,
    /// flushing both.
    pub fn append(&mut self, record: &PeriodRecord) -> Result<(), EngineError> {
        serde_json::to_writer(&mut self.jsonl, record)?;
        self.jsonl.write_all(b"\n")?;
        self.jsonl.flush()?;
        for (agent, us) in record.latencies_us.iter().enumerate() {
            writeln!(self.timings, "{},{},{}", record.t, agent, us)?;
        }
        self.timings.flush()?;
        Ok(())
    }

    /// Record an abort diagnostic next to the partial log.
    pub fn write_abort(&mut self, diagnostic: &str) -> Result<(), EngineError> {
        self.jsonl.flush()?;
        self.timings.flush()?;
        let body = serde_json::json!({ "aborted": true, "diagnostic": diagnostic });
        fs::write(self.dir.join("abort.json"), serde_json::to_string_pretty(&body)?)?;
        Ok(())
    }
}

/// Load a periods.jsonl file back into records.
pub fn load_jsonl(path: &Path) -> Result<Vec<PeriodRecord>, EngineError> {
    let file = File::open(path)?;
    let mut records = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

/// Write a condition-level summary CSV with the canonical column set.
pub fn write_summary_csv(
    path: &Path,
    condition: &str,
    summaries: &[super::RunSummary],
) -> Result<(), EngineError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["condition", "run", "converged", "rounds", "avg_price", "elevation", "terminal_lowest"])
        .map_err(csv_err)?;
    for (i, s) in summaries.iter().enumerate() {
        w.write_record([
            condition.to_string(),
            i.to_string(),
            s.converged.to_string(),
            s.rounds_to_convergence.map(|r| r.to_string()).unwrap_or_default(),
            format!("{}", s.avg_price),
            format!("{}", s.price_elevation),
            format!("{}", s.terminal_lowest_price),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a summary CSV, parsed back.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub condition: String,
    pub run: usize,
    pub converged: bool,
    pub rounds: Option<usize>,
    pub avg_price: f64,
    pub elevation: f64,
    pub terminal_lowest: f64,
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>, EngineError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let get = |i: usize| record.get(i).unwrap_or("").to_string();
        rows.push(SummaryRow {
            condition: get(0),
            run: get(1).parse().map_err(|e| EngineError::Stats(format!("bad run index: {e}")))?,
            converged: get(2) == "true",
            rounds: if get(3).is_empty() {
                None
            } else {
                Some(get(3).parse().map_err(|e| EngineError::Stats(format!("bad rounds: {e}")))?)
            },
            avg_price: get(4).parse().map_err(|e| EngineError::Stats(format!("bad avg_price: {e}")))?,
            elevation: get(5).parse().map_err(|e| EngineError::Stats(format!("bad elevation: {e}")))?,
            terminal_lowest: get(6)
                .parse()
                .map_err(|e| EngineError::Stats(format!("bad terminal_lowest: {e}")))?,
        });
    }
    Ok(rows)
}

fn csv_err(e: csv::Error) -> EngineError {
    EngineError::Stats(format!("csv: {e}"))
}
