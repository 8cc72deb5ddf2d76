use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use mmdose::{Error, Result};

pub struct CsvOut {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvOut {
    /// CSV to `path`, or to stdout when there is none.
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(File::create(p).map_err(|e| io_error(p.display(), e))?),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Self {
            writer: csv::Writer::from_writer(sink),
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => io_kind_error(io),
                other => io_error("output", format!("{other:?}")),
            })
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(io_kind_error)
    }
}

/// A closed downstream pipe (`mmdose … | head`) ends the program quietly.
fn io_kind_error(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    io_error("output", e)
}

fn io_error(what: impl std::fmt::Display, e: impl std::fmt::Display) -> Error {
    Error::Io {
        what: what.to_string(),
        message: e.to_string(),
    }
}

pub fn num(x: f64) -> String {
    x.to_string()
}

/// Evenly spaced values `start, start + step, …, stop`. The values are
/// rounded to the decimals of `step` so that printed grids stay tidy.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
        return Err(Error::Usage(format!(
            "invalid range {start}..{stop} with step {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    if count > 10_000_000 {
        return Err(Error::Usage("range has too many points".into()));
    }
    let decimals = decimals_of(step).max(decimals_of(start));
    Ok((0..=count)
        .map(|i| {
            let x = start + i as f64 * step;
            format!("{x:.decimals$}").parse().unwrap()
        })
        .collect())
}

fn decimals_of(x: f64) -> usize {
    let s = x.to_string();
    match s.split_once('.') {
        Some((_, frac)) if !s.contains('e') => frac.len().min(9),
        _ => {
            if s.contains('e') {
                9
            } else {
                0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_tidy() {
        let g = grid(0.0, 0.1, 0.01).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.03);
        assert_eq!(g[10], 0.1);
        assert_eq!(
            grid(40.0, 100.0, 20.0).unwrap(),
            vec![40.0, 60.0, 80.0, 100.0]
        );
        assert!(grid(1.0, 0.0, 0.1).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }
}
