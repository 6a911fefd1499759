//! Append-only JSONL event log. Line 1 is a header holding the genesis;
//! each further line is one event.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};
use crate::state::{Genesis, LogEvent};

pub const LOG_FORMAT: &str = "rescue-log/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub genesis: Genesis,
}

pub struct EventLog {
    path: Option<PathBuf>,
    file: Option<File>,
    /// Kept for in-memory logs.
    lines: Vec<String>,
}

fn log_err(path: &Path, e: impl std::fmt::Display) -> ServiceError {
    ServiceError::Log(format!("{}: {e}", path.display()))
}

impl EventLog {
    pub fn in_memory(genesis: &Genesis) -> Self {
        let header = serde_json::to_string(&LogHeader { format: LOG_FORMAT.into(), genesis: genesis.clone() })
            .expect("header serializes");
        EventLog { path: None, file: None, lines: vec![header] }
    }

    /// Creates a new log file; fails if one already exists.
    pub fn create(path: &Path, genesis: &Genesis) -> Result<Self> {
        let mut file = OpenOptions::new().write(true).create_new(true).open(path).map_err(|e| log_err(path, e))?;
        let header = LogHeader { format: LOG_FORMAT.into(), genesis: genesis.clone() };
        let line = serde_json::to_string(&header).expect("header serializes");
        writeln!(file, "{line}").map_err(|e| log_err(path, e))?;
        file.sync_data().map_err(|e| log_err(path, e))?;
        Ok(EventLog { path: Some(path.to_path_buf()), file: Some(file), lines: Vec::new() })
    }

    /// Reads an existing log and reopens it for appending.
    pub fn open(path: &Path) -> Result<(Self, Genesis, Vec<LogEvent>)> {
        let (genesis, events) = read_log(path)?;
        let file = OpenOptions::new().append(true).open(path).map_err(|e| log_err(path, e))?;
        Ok((EventLog { path: Some(path.to_path_buf()), file: Some(file), lines: Vec::new() }, genesis, events))
    }

    pub fn append(&mut self, ev: &LogEvent) -> Result<()> {
        let line = serde_json::to_string(ev).expect("event serializes");
        match (&mut self.file, &self.path) {
            (Some(f), Some(p)) => {
                writeln!(f, "{line}").map_err(|e| log_err(p, e))?;
                f.sync_data().map_err(|e| log_err(p, e))?;
            }
            _ => self.lines.push(line),
        }
        Ok(())
    }

    /// Lines written to an in-memory log, header first.
    pub fn memory_lines(&self) -> &[String] {
        &self.lines
    }
}

pub fn read_log(path: &Path) -> Result<(Genesis, Vec<LogEvent>)> {
    let file = File::open(path).map_err(|e| log_err(path, e))?;
    parse_lines(BufReader::new(file).lines().map(|l| l.map_err(|e| log_err(path, e))))
}

pub fn parse_lines(lines: impl IntoIterator<Item = Result<String>>) -> Result<(Genesis, Vec<LogEvent>)> {
    let mut lines = lines.into_iter();
    let header = lines.next().ok_or_else(|| ServiceError::Log("empty log".into()))??;
    let header: LogHeader =
        serde_json::from_str(&header).map_err(|e| ServiceError::Log(format!("line 1: {e}")))?;
    if header.format != LOG_FORMAT {
        return Err(ServiceError::Log(format!("line 1: expected format `{LOG_FORMAT}`, got `{}`", header.format)));
    }
    let mut events = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ev: LogEvent =
            serde_json::from_str(&line).map_err(|e| ServiceError::Log(format!("line {}: {e}", i + 2)))?;
        events.push(ev);
    }
    Ok((header.genesis, events))
}
