use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

/// Lines handed to the worker pool at once.
const CHUNK_LINES: usize = 1024;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({"error": {"kind": self.kind, "message": self.message}}).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

macro_rules! from_error {
    ($($ty:ty => $kind:literal),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new($kind, e.to_string())
            }
        })*
    };
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        let kind = if e.kind() == io::ErrorKind::BrokenPipe {
            BROKEN_PIPE
        } else {
            "io"
        };
        CliError::new(kind, e.to_string())
    }
}

/// Reader went away (`kpi-edgar score ... | head`); not worth a report.
pub const BROKEN_PIPE: &str = "broken_pipe";

from_error! {
    serde_json::Error => "json",
    kpi_edgar::IngestError => "input",
    kpi_edgar::MetricsError => "metrics",
    kpi_edgar::ModelError => "model",
    kpi_edgar::IobesError => "iobes",
}

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::new("io", format!("cannot read {}: {e}", path.display())))
}

/// Destination of the command output.
pub struct Output {
    inner: Box<dyn Write>,
}

impl Output {
    pub fn create(path: Option<&Path>) -> Result<Self, CliError> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
                CliError::new("io", format!("cannot write {}: {e}", p.display()))
            })?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self { inner })
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut self.inner, value)?;
        self.inner.write_all(b"\n")?;
        Ok(())
    }

    pub fn json_line<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        serde_json::to_writer(&mut self.inner, value)?;
        self.inner.write_all(b"\n")?;
        Ok(())
    }

    pub fn text(&mut self, s: &str) -> Result<(), CliError> {
        self.inner.write_all(s.as_bytes())?;
        if !s.ends_with('\n') {
            self.inner.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush()?;
        Ok(())
    }
}

/// One non-blank input line with its 1-based line number and 0-based record index.
pub struct Line {
    pub text: String,
    pub line: usize,
    pub record: usize,
}

/// Streams a JSON Lines file through `work` on the pool, chunk by chunk, and
/// hands the results to `sink` in input order. The first failing record (in
/// input order) aborts the run.
pub fn stream_jsonl<T, W, S>(
    reader: impl BufRead,
    pool: &ThreadPool,
    work: W,
    mut sink: S,
) -> Result<(), CliError>
where
    T: Send,
    W: Fn(&Line) -> Result<T, CliError> + Sync,
    S: FnMut(T) -> Result<(), CliError>,
{
    let mut chunk: Vec<Line> = Vec::with_capacity(CHUNK_LINES);
    let mut record = 0;
    let mut flush = |chunk: &mut Vec<Line>| -> Result<(), CliError> {
        let results: Vec<Result<T, CliError>> =
            pool.install(|| chunk.par_iter().map(&work).collect());
        chunk.clear();
        results.into_iter().try_for_each(|r| sink(r?))
    };
    for (i, line) in reader.lines().enumerate() {
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        chunk.push(Line {
            text,
            line: i + 1,
            record,
        });
        record += 1;
        if chunk.len() == CHUNK_LINES {
            flush(&mut chunk)?;
        }
    }
    flush(&mut chunk)
}
