//! Mark configuration files: one line `edge_id time kind` per mark with
//! kind `X` (cross) or `B` (bar), sorted by time, preceded by a comment
//! header `# t u seed` recording the generation parameters.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{Mark, MarkConfig, MarkKind};

/// Generation parameters carried in the file header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarksHeader {
    pub t: f64,
    pub u: f64,
    pub seed: u64,
}

pub fn write_marks_file(
    cfg: &MarkConfig,
    header: MarksHeader,
    path: &Path,
) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "# {:.16e} {:.16e} {}", header.t, header.u, header.seed)?;
    for m in cfg.marks() {
        let kind = match m.kind {
            MarkKind::Cross => "X",
            MarkKind::Bar => "B",
        };
        writeln!(f, "{} {:.16e} {}", m.edge, m.time, kind)?;
    }
    Ok(())
}

/// Reads a configuration for a graph with `edge_count` edges. Duplicate
/// times are rejected at load.
pub fn read_marks_file(path: &Path, edge_count: usize) -> Result<(MarkConfig, Option<MarksHeader>)> {
    let f = BufReader::new(std::fs::File::open(path)?);
    let mut header = None;
    let mut marks = Vec::new();
    for (i, line) in f.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if header.is_none() && fields.len() == 3 {
                header = Some(MarksHeader {
                    t: parse(fields[0], i)?,
                    u: parse(fields[1], i)?,
                    seed: fields[2]
                        .parse()
                        .map_err(|e| Error::Parse(format!("line {}: bad seed: {e}", i + 1)))?,
                });
            }
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected `edge time kind`", i + 1)));
        }
        let edge: u32 = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad edge id: {e}", i + 1)))?;
        let time: f64 = parse(fields[1], i)?;
        let kind = match fields[2] {
            "X" => MarkKind::Cross,
            "B" => MarkKind::Bar,
            other => {
                return Err(Error::Parse(format!("line {}: unknown kind {other:?}", i + 1)))
            }
        };
        marks.push(Mark { edge, time, kind });
    }
    Ok((MarkConfig::new(edge_count, marks)?, header))
}

fn parse(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|e| Error::Parse(format!("line {}: bad number {s:?}: {e}", line + 1)))
}
