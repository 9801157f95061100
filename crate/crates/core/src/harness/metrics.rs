use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One tick of the learning curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub tick: u64,
    pub happy: f64,
    pub sad: f64,
    pub novelty: f64,
    pub expectedness: f64,
    pub feedback: f64,
    pub hits: u64,
    pub misses: u64,
    /// Hit fraction over the last 100 hit/miss events.
    pub hit_rate: f64,
    pub explored: bool,
    pub energy: f64,
}

pub const HEADER: [&str; 11] = [
    "tick",
    "happy",
    "sad",
    "novelty",
    "expectedness",
    "feedback",
    "hits",
    "misses",
    "hit_rate",
    "explored",
    "energy",
];

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv stream>", io),
        other => Error::Load {
            field: "csv".into(),
            message: format!("{other:?}"),
        },
    }
}

/// Header plus one line per row, reals with six decimals, LF line ends.
pub fn write_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER).map_err(csv_err)?;
    for r in rows {
        let f = |v: f64| format!("{v:.6}");
        w.write_record([
            r.tick.to_string(),
            f(r.happy),
            f(r.sad),
            f(r.novelty),
            f(r.expectedness),
            f(r.feedback),
            r.hits.to_string(),
            r.misses.to_string(),
            f(r.hit_rate),
            u8::from(r.explored).to_string(),
            f(r.energy),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv stream>", e))?;
    Ok(())
}

pub fn emit_csv(rows: &[MetricsRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(rows, BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<MetricsRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if !header.iter().eq(HEADER) {
        return Err(Error::Load {
            field: "header".into(),
            message: format!("unexpected columns {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let get = |i: usize| -> Result<&str> {
            rec.get(i).ok_or_else(|| Error::Load {
                field: format!("row {}: {}", line + 1, HEADER[i]),
                message: "missing".into(),
            })
        };
        let bad = |i: usize, e: String| Error::Load {
            field: format!("row {}: {}", line + 1, HEADER[i]),
            message: e,
        };
        let real = |i: usize| -> Result<f64> {
            get(i)?
                .parse()
                .map_err(|e: std::num::ParseFloatError| bad(i, e.to_string()))
        };
        let int = |i: usize| -> Result<u64> {
            get(i)?
                .parse()
                .map_err(|e: std::num::ParseIntError| bad(i, e.to_string()))
        };
        rows.push(MetricsRow {
            tick: int(0)?,
            happy: real(1)?,
            sad: real(2)?,
            novelty: real(3)?,
            expectedness: real(4)?,
            feedback: real(5)?,
            hits: int(6)?,
            misses: int(7)?,
            hit_rate: real(8)?,
            explored: match get(9)? {
                "0" => false,
                "1" => true,
                other => return Err(bad(9, format!("expected 0 or 1, got {other}"))),
            },
            energy: real(10)?,
        });
    }
    Ok(rows)
}

pub fn parse_csv(path: impl AsRef<Path>) -> Result<Vec<MetricsRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file)
}
