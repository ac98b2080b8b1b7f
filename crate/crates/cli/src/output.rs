//! Serialized output: JSON lines or CSV, buffered and written once.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

#[derive(Serialize)]
struct Stamped<'a, T> {
    #[serde(flatten)]
    record: &'a T,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_ms: Option<u128>,
}

pub struct Sink {
    format: Format,
    timestamps: bool,
    buf: Vec<u8>,
}

impl Sink {
    pub fn new(format: Format, timestamps: bool) -> Self {
        Self {
            format,
            timestamps,
            buf: Vec::new(),
        }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    fn now_ms(&self) -> Option<u128> {
        self.timestamps.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0)
        })
    }

    pub fn json<T: Serialize>(&mut self, record: &T) -> Result<(), CliError> {
        let stamped = Stamped {
            record,
            timestamp_ms: self.now_ms(),
        };
        serde_json::to_writer(&mut self.buf, &stamped)?;
        self.buf.push(b'\n');
        Ok(())
    }

    /// A CSV table with a header row.
    pub fn table<T: Serialize>(&mut self, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(&mut self.buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON lines or a CSV table of the same records.
    pub fn records<T: Serialize>(&mut self, rows: &[T]) -> Result<(), CliError> {
        match self.format {
            Format::Jsonl => rows.iter().try_for_each(|r| self.json(r)),
            Format::Csv => self.table(rows),
        }
    }

    pub fn finish(self, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
        match out {
            Some(path) => std::fs::write(path, &self.buf)?,
            None => stdout.write_all(&self.buf)?,
        }
        Ok(())
    }
}
