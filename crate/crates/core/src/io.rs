//! Plain-text graph and vertex-list formats.
//!
//! Graph files start with a `n m` header followed by `m` lines `u v`
//! (0-indexed). Anything after `#` on a line is ignored, as are blank lines.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::set::VertexSet;

/// Non-empty, comment-stripped lines paired with their 1-based line numbers.
pub(crate) fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(line) => line,
            Err(e) => {
                return Some(Err(Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                }))
            }
        };
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then(|| Ok((i + 1, body.to_string())))
    })
}

pub(crate) fn parse_usizes(line_no: usize, body: &str, expected: usize) -> Result<Vec<usize>> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected {expected} integers, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{f}` is not a non-negative integer"),
            })
        })
        .collect()
}

pub fn read_graph<R: Read>(reader: R) -> Result<Graph> {
    let mut lines = content_lines(BufReader::new(reader));
    let (header_line, header) = lines.next().transpose()?.ok_or(Error::Parse {
        line: 1,
        message: "missing `n m` header".into(),
    })?;
    let nm = parse_usizes(header_line, &header, 2)?;
    let (n, m) = (nm[0], nm[1]);
    let mut edges = Vec::with_capacity(m);
    let mut last_line = header_line;
    for item in lines {
        let (line_no, body) = item?;
        last_line = line_no;
        let uv = parse_usizes(line_no, &body, 2)?;
        let (u, v) = (uv[0], uv[1]);
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("vertex index out of range 0..{n}"),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                message: format!("self-loop at vertex {u}"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: last_line,
            message: format!("header declares {m} edges but {} were listed", edges.len()),
        });
    }
    Graph::from_edges(n, edges)
}

pub fn read_graph_str(text: &str) -> Result<Graph> {
    read_graph(text.as_bytes())
}

pub fn read_graph_file(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_graph(file)
}

/// Writes edges sorted lexicographically with `u < v`.
pub fn write_graph<W: Write>(mut writer: W, graph: &Graph) -> std::io::Result<()> {
    writeln!(writer, "{} {}", graph.n(), graph.edge_count())?;
    for (u, v) in graph.edges() {
        writeln!(writer, "{u} {v}")?;
    }
    Ok(())
}

pub fn graph_to_string(graph: &Graph) -> String {
    let mut buf = Vec::new();
    write_graph(&mut buf, graph).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn write_graph_file(path: impl AsRef<Path>, graph: &Graph) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_graph(&mut out, graph).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads whitespace-separated vertex indices as a set over `universe` vertices.
pub fn read_vertex_set<R: Read>(reader: R, universe: usize) -> Result<VertexSet> {
    let mut set = VertexSet::empty(universe);
    for item in content_lines(BufReader::new(reader)) {
        let (line_no, body) = item?;
        for field in body.split_whitespace() {
            let v: usize = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{field}` is not a vertex index"),
            })?;
            set.try_insert(v).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        }
    }
    Ok(set)
}

pub fn read_vertex_set_file(path: impl AsRef<Path>, universe: usize) -> Result<VertexSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_vertex_set(file, universe)
}
