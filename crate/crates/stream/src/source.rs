//! Line-delimited stream sources: files, stdin, or a TCP endpoint, in
//! CSV (`seq,value`) or JSON-lines form, auto-detected.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::net::TcpStream;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use fairstream_core::{AttributeSchema, Item};
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSpec {
    Stdin,
    File(PathBuf),
    /// `host:port` to connect to.
    Tcp(String),
}

impl SourceSpec {
    /// `-`/`stdin`, `tcp://host:port` (or `tcp:host:port`), else a path.
    pub fn parse(text: &str) -> Self {
        match text {
            "-" | "stdin" => SourceSpec::Stdin,
            t if t.starts_with("tcp://") => SourceSpec::Tcp(t["tcp://".len()..].to_string()),
            t if t.starts_with("tcp:") => SourceSpec::Tcp(t["tcp:".len()..].to_string()),
            t => SourceSpec::File(PathBuf::from(t)),
        }
    }

    /// Opens the source as a buffered line reader.
    pub fn open(&self) -> std::io::Result<Box<dyn BufRead + Send>> {
        Ok(match self {
            SourceSpec::Stdin => Box::new(BufReader::new(std::io::stdin())),
            SourceSpec::File(path) => Box::new(BufReader::new(File::open(path)?)),
            SourceSpec::Tcp(addr) => Box::new(BufReader::new(TcpStream::connect(addr)?)),
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("line {line}: stream position {got} not after {prev}")]
    NonMonotonic { line: u64, prev: u64, got: u64 },
    #[error("line {line}: {source}")]
    Schema {
        line: u64,
        source: fairstream_core::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Format {
    Csv,
    JsonLines,
}

#[derive(Deserialize)]
struct JsonRecord {
    seq: u64,
    value: String,
}

/// Iterator of validated items from a line source. The format is fixed by
/// the first non-empty line; positions must be strictly increasing.
pub struct RecordReader {
    input: Box<dyn BufRead + Send>,
    schema: AttributeSchema,
    format: Option<Format>,
    line: u64,
    prev_seq: Option<u64>,
    pacer: Option<Pacer>,
}

impl RecordReader {
    pub fn new(input: Box<dyn BufRead + Send>, schema: AttributeSchema) -> Self {
        Self {
            input,
            schema,
            format: None,
            line: 0,
            prev_seq: None,
            pacer: None,
        }
    }

    /// Caps delivery at `items_per_sec`.
    pub fn with_rate(mut self, items_per_sec: u64) -> Self {
        if items_per_sec > 0 {
            self.pacer = Some(Pacer::new(items_per_sec));
        }
        self
    }

    fn parse_line(&mut self, text: &str) -> Result<Item, SourceError> {
        let format = *self.format.get_or_insert_with(|| {
            if text.trim_start().starts_with('{') {
                Format::JsonLines
            } else {
                Format::Csv
            }
        });
        let (seq, value) = match format {
            Format::Csv => {
                let (seq_text, value_text) =
                    text.split_once(',').ok_or_else(|| SourceError::Malformed {
                        line: self.line,
                        reason: "expected `seq,value`".into(),
                    })?;
                let seq = seq_text
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| SourceError::Malformed {
                        line: self.line,
                        reason: format!("bad position: {e}"),
                    })?;
                (seq, value_text.trim().to_string())
            }
            Format::JsonLines => {
                let record: JsonRecord =
                    serde_json::from_str(text).map_err(|e| SourceError::Malformed {
                        line: self.line,
                        reason: e.to_string(),
                    })?;
                (record.seq, record.value)
            }
        };
        if let Some(prev) = self.prev_seq {
            if seq <= prev {
                return Err(SourceError::NonMonotonic {
                    line: self.line,
                    prev,
                    got: seq,
                });
            }
        }
        self.prev_seq = Some(seq);
        let item = self
            .schema
            .item(seq, &value)
            .map_err(|source| SourceError::Schema {
                line: self.line,
                source,
            })?;
        Ok(item)
    }
}

impl Iterator for RecordReader {
    type Item = Result<Item, SourceError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let mut buf = String::new();
            match self.input.read_line(&mut buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line += 1;
            if buf.trim().is_empty() {
                continue;
            }
            if let Some(pacer) = self.pacer.as_mut() {
                pacer.wait();
            }
            return Some(self.parse_line(buf.trim_end()));
        }
    }
}

/// Simple pacing: the n-th item is released no earlier than `n / rate`
/// seconds after the first call.
struct Pacer {
    per_item: Duration,
    start: Option<Instant>,
    delivered: u32,
}

impl Pacer {
    fn new(rate: u64) -> Self {
        Self {
            per_item: Duration::from_secs_f64(1.0 / rate as f64),
            start: None,
            delivered: 0,
        }
    }

    fn wait(&mut self) {
        let start = *self.start.get_or_insert_with(Instant::now);
        let due = start + self.per_item * self.delivered;
        let now = Instant::now();
        if due > now {
            std::thread::sleep(due - now);
        }
        self.delivered += 1;
    }
}
