use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// Buffered destination for command output: a file or standard output.
pub struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { inner })
    }

    pub fn line(&mut self, s: &str) -> io::Result<()> {
        writeln!(self.inner, "{s}")
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut self.inner, value)?;
        writeln!(self.inner)
    }

    pub fn csv_header(&mut self, columns: &[&str]) -> io::Result<()> {
        self.line(&columns.join(","))
    }

    pub fn csv_row(&mut self, fields: &[Field]) -> io::Result<()> {
        let row: Vec<String> = fields.iter().map(Field::render).collect();
        self.line(&row.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

pub enum Field {
    Num(f64),
    Opt(Option<f64>),
    Text(&'static str),
    Bool(bool),
}

impl Field {
    /// Floats use Rust's shortest round-trip formatting; missing values are
    /// empty fields.
    fn render(&self) -> String {
        match self {
            Field::Num(x) => x.to_string(),
            Field::Opt(Some(x)) => x.to_string(),
            Field::Opt(None) => String::new(),
            Field::Text(s) => (*s).to_string(),
            Field::Bool(b) => b.to_string(),
        }
    }
}

/// Reads the first two numeric columns of a CSV with one header row.
pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = || -> Result<f64, String> {
            cols.next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| format!("{} line {}: expected two numeric columns", path.display(), i + 1))
        };
        let r = next()?;
        let m = next()?;
        rows.push((r, m));
    }
    Ok(rows)
}
