use std::fmt::Display;
use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Plain,
    Csv,
}

/// What a command prints: a table for `--format csv` and free-form lines for
/// `--format plain`.
#[derive(Debug, Default)]
pub struct Report {
    /// Printed first in either format, e.g. an auto-chosen seed.
    pub preamble: Vec<String>,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Plain rendering. Falls back to space-separated rows when empty.
    pub plain: Vec<String>,
}

impl Report {
    pub fn table(headers: &[&'static str]) -> Self {
        Report {
            headers: headers.to_vec(),
            ..Default::default()
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn line(&mut self, line: impl Into<String>) {
        self.plain.push(line.into());
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Plain => {
                for line in &self.preamble {
                    writeln!(out, "{line}")?;
                }
                if self.plain.is_empty() {
                    writeln!(out, "{}", self.headers.join(" "))?;
                    for row in &self.rows {
                        writeln!(out, "{}", row.join(" "))?;
                    }
                } else {
                    for line in &self.plain {
                        writeln!(out, "{line}")?;
                    }
                }
            }
            Format::Csv => {
                for line in &self.preamble {
                    writeln!(out, "# {line}")?;
                }
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// Decimal rendering, cut to `digits` leading digits with a length marker.
pub fn show(x: &impl Display, digits: Option<usize>) -> String {
    let s = x.to_string();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", s.as_str()),
    };
    match digits {
        Some(d) if body.len() > d => format!("{sign}{}…({} digits)", &body[..d], body.len()),
        _ => s,
    }
}

pub fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}
