//! Plain-text graph and degree-sequence files.
//!
//! Graph format: first line `n m`, then `m` lines `x y` with 0-based ids
//! in ascending lexicographic order. Degree files hold one integer per
//! line.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::Graph;

pub fn write_graph_file(g: &Graph, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{} {}", g.n(), g.edge_count())?;
    for &(x, y) in g.edges() {
        writeln!(f, "{x} {y}")?;
    }
    Ok(())
}

pub fn read_graph_file(path: &Path) -> Result<Graph> {
    let f = BufReader::new(std::fs::File::open(path)?);
    let mut lines = f.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty graph file".into()))??;
    let mut it = header.split_whitespace();
    let n: usize = parse_field(it.next(), "n")?;
    let m: usize = parse_field(it.next(), "m")?;
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let x: u32 = parse_field(it.next(), "edge endpoint")?;
        let y: u32 = parse_field(it.next(), "edge endpoint")?;
        if x >= y {
            return Err(Error::Parse(format!(
                "line {}: endpoints must satisfy x < y, got {x} {y}",
                i + 2
            )));
        }
        edges.push((x, y));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header promises {m} edges, file has {}",
            edges.len()
        )));
    }
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse("edges not in ascending lexicographic order".into()));
    }
    Graph::new(n, edges)
}

pub fn read_degree_file(path: &Path) -> Result<Vec<usize>> {
    let f = BufReader::new(std::fs::File::open(path)?);
    let mut degrees = Vec::new();
    for line in f.lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        degrees.push(
            t.parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad degree {t:?}: {e}")))?,
        );
    }
    Ok(degrees)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let s = field.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
    s.parse()
        .map_err(|e| Error::Parse(format!("bad {what} {s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let g = Graph::complete(4);
        let dir = std::env::temp_dir().join("loopmodel_graph_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("k4.txt");
        write_graph_file(&g, &path).unwrap();
        let h = read_graph_file(&path).unwrap();
        assert_eq!(g, h);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("4 6\n0 1\n"));
    }

    #[test]
    fn rejects_unsorted_edges() {
        let dir = std::env::temp_dir().join("loopmodel_graph_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.txt");
        std::fs::write(&path, "3 2\n1 2\n0 1\n").unwrap();
        assert!(read_graph_file(&path).is_err());
    }
}
