//! Graph files.
//!
//! Edge lists follow the SNAP convention: one `u v` pair of integer ids per
//! line separated by whitespace, `#` starts a comment line, LF or CRLF line
//! endings. Attribute files hold one `node_id<ws>label1,label2,...` entry
//! per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use dufs_core::DirectedGraph;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

fn content_lines<'a, R: BufRead + 'a>(reader: R, origin: &'a str) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader.lines().enumerate().filter_map(move |(i, line)| match line {
        Err(e) => Some(Err(CliError::Data(format!("{origin}: line {}: {e}", i + 1)))),
        Ok(line) => {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, trimmed.to_owned())))
            }
        }
    })
}

/// Parses an edge list into id pairs.
pub fn parse_edgelist<R: BufRead>(reader: R, origin: &str) -> Result<Vec<(u64, u64)>> {
    let mut pairs = Vec::new();
    for item in content_lines(reader, origin) {
        let (number, line) = item?;
        let mut fields = line.split_whitespace();
        let mut id = || -> Result<u64> {
            let field = fields.next().ok_or_else(|| CliError::Data(format!("{origin}: line {number}: expected two node ids")))?;
            field
                .parse()
                .map_err(|_| CliError::Data(format!("{origin}: line {number}: '{field}' is not a node id")))
        };
        let u = id()?;
        let v = id()?;
        pairs.push((u, v));
    }
    Ok(pairs)
}

pub fn load_snap_edgelist(path: &Path, symmetrize: bool) -> Result<DirectedGraph> {
    let origin = path.display().to_string();
    let pairs = parse_edgelist(open(path)?, &origin)?;
    if pairs.is_empty() {
        return Err(CliError::Data(format!("{origin}: no edges")));
    }
    Ok(DirectedGraph::from_id_pairs(&pairs, symmetrize)?)
}

pub fn parse_attributes<R: BufRead>(reader: R, origin: &str) -> Result<Vec<(u64, Vec<String>)>> {
    let mut entries = Vec::new();
    for item in content_lines(reader, origin) {
        let (number, line) = item?;
        let (id, rest) = line.split_once(char::is_whitespace).unwrap_or((line.as_str(), ""));
        let id = id
            .parse()
            .map_err(|_| CliError::Data(format!("{origin}: line {number}: '{id}' is not a node id")))?;
        let labels = rest
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        entries.push((id, labels));
    }
    Ok(entries)
}

/// Attaches node attributes; returns how many entries named unknown nodes.
pub fn load_attributes(graph: DirectedGraph, path: &Path) -> Result<(DirectedGraph, usize)> {
    let entries = parse_attributes(open(path)?, &path.display().to_string())?;
    Ok(graph.with_attributes(&entries))
}

/// Writes the edge list with original ids, in internal order.
pub fn write_edgelist<W: Write>(graph: &DirectedGraph, mut out: W) -> std::io::Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{} {}", graph.original_id(u), graph.original_id(v))?;
    }
    Ok(())
}

pub fn save_edgelist(graph: &DirectedGraph, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_edgelist(graph, &mut out).and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Hash of the canonical edge list and attributes, independent of the
/// input file's formatting and line order.
pub fn graph_hash(graph: &DirectedGraph) -> String {
    let mut h = Sha256::new();
    for (u, v) in graph.edges() {
        h.update(format!("{} {}\n", graph.original_id(u), graph.original_id(v)).as_bytes());
    }
    if graph.has_attributes() {
        for v in 0..graph.node_count() as u32 {
            let names: Vec<&str> = graph.attributes(v).iter().filter_map(|&a| graph.attribute_name(a)).collect();
            h.update(format!("@{} {}\n", graph.original_id(v), names.join(",")).as_bytes());
        }
    }
    hex::encode(h.finalize())
}
