use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A header plus string records; the CSV face of a report.
pub struct Rows {
    header: Vec<String>,
    body: Vec<Vec<String>>,
}

impl Rows {
    pub fn new<H, S, B>(header: H, body: B) -> Self
    where
        H: IntoIterator<Item = S>,
        S: Into<String>,
        B: IntoIterator<Item = Vec<String>>,
    {
        Rows {
            header: header.into_iter().map(Into::into).collect(),
            body: body.into_iter().collect(),
        }
    }
}

pub struct Emitter {
    format: Format,
    path: Option<PathBuf>,
}

impl Emitter {
    pub fn new(format: Format, path: Option<PathBuf>) -> Self {
        Emitter { format, path }
    }

    fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    pub fn emit<T: Serialize>(&self, report: &T, rows: &Rows) -> io::Result<()> {
        match self.format {
            Format::Json => {
                let mut out = self.sink()?;
                serde_json::to_writer_pretty(&mut out, report)?;
                out.write_all(b"\n")?;
                out.flush()
            }
            Format::Csv => self.rows(rows),
        }
    }

    pub fn rows(&self, rows: &Rows) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(self.sink()?);
        out.write_record(&rows.header)?;
        for record in &rows.body {
            out.write_record(record)?;
        }
        out.flush()
    }
}
