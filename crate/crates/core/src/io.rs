//! Graph file formats.
//!
//! Edge list (TSV):
//!
//! ```text
//! # nodes=3
//! # labels	a	b	c        (optional)
//! 0	1	1.0000000000000000e0
//! 1	2	2.5000000000000000e0
//! ```
//!
//! Dense matrix (CSV): a first line `laplacian` or `adjacency`, then N rows
//! of N comma-separated numbers.
//!
//! Weights are written with 17 significant digits so a round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::spectral::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    DenseLaplacian,
    DenseAdjacency,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" | "edgelist" | "edge-list" => Ok(Self::EdgeList),
            "laplacian" | "laplacian-csv" => Ok(Self::DenseLaplacian),
            "adjacency" | "adjacency-csv" => Ok(Self::DenseAdjacency),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r'))).filter(|(_, l)| !l.trim().is_empty())
}

/// Parses either format, recognized by its first non-empty line.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let first = content_lines(text).next().map(|(_, l)| l.trim()).unwrap_or("");
    match first {
        "laplacian" => parse_dense(text, GraphFormat::DenseLaplacian),
        "adjacency" => parse_dense(text, GraphFormat::DenseAdjacency),
        _ => parse_edge_list(text),
    }
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let n: usize = header
        .trim()
        .strip_prefix("# nodes=")
        .ok_or_else(|| parse_err(line_no, "expected header `# nodes=N`"))?
        .trim()
        .parse()
        .map_err(|_| parse_err(line_no, "node count is not an integer"))?;
    let mut labels = None;
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        if let Some(rest) = line.strip_prefix("# labels") {
            let ls: Vec<String> = rest.split('\t').skip(1).map(str::to_string).collect();
            if ls.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: ls.len() });
            }
            labels = Some(ls);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected `u<TAB>v<TAB>w`, found {} fields", fields.len())));
        }
        let node = |s: &str| -> Result<usize> {
            let i: usize = s.parse().map_err(|_| parse_err(line_no, format!("bad node index `{s}`")))?;
            if i >= n {
                return Err(parse_err(line_no, format!("node {i} out of range for {n} nodes")));
            }
            Ok(i)
        };
        let w: f64 = fields[2].parse().map_err(|_| parse_err(line_no, format!("bad weight `{}`", fields[2])))?;
        edges.push((node(fields[0])?, node(fields[1])?, w));
    }
    let g = Graph::new(n, edges)?;
    match labels {
        Some(ls) => g.with_labels(ls),
        None => Ok(g),
    }
}

/// Parses a tagged dense CSV matrix, checking shape and symmetry.
pub fn parse_dense_matrix(text: &str) -> Result<(GraphFormat, SymMatrix)> {
    let mut lines = content_lines(text);
    let (line_no, tag) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let format = match tag.trim() {
        "laplacian" => GraphFormat::DenseLaplacian,
        "adjacency" => GraphFormat::DenseAdjacency,
        other => return Err(parse_err(line_no, format!("unknown matrix tag `{other}`"))),
    };
    let mut rows = Vec::new();
    for (line_no, line) in lines {
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| parse_err(line_no, format!("bad number `{}`", s.trim()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let sym = SymMatrix::new(m).map_err(|_| Error::NonSymmetricInput)?;
    Ok((format, sym))
}

fn parse_dense(text: &str, format: GraphFormat) -> Result<Graph> {
    let (found, m) = parse_dense_matrix(text)?;
    debug_assert_eq!(found, format);
    match found {
        GraphFormat::DenseAdjacency => {
            if let Some(i) = (0..m.dim()).find(|&i| m[(i, i)] != 0.0) {
                return Err(parse_err(i + 2, "adjacency matrix has a nonzero diagonal entry"));
            }
            Graph::from_adjacency(&m)
        }
        _ => {
            let scale = m.amax().max(1.0);
            for (i, row) in m.row_iter().enumerate() {
                if row.sum().abs() > 1e-10 * scale * m.dim() as f64 {
                    return Err(parse_err(i + 2, "Laplacian row does not sum to zero"));
                }
            }
            Graph::from_laplacian(&m, 0.0)
        }
    }
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("# nodes={}\n", g.num_nodes());
    if !g.has_default_labels() {
        out.push_str("# labels");
        for l in g.node_labels() {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
    }
    for e in g.edges() {
        let _ = writeln!(out, "{}\t{}\t{:.16e}", e.i, e.j, e.weight);
    }
    out
}

pub fn format_dense(m: &SymMatrix, tag: GraphFormat) -> String {
    let mut out = String::from(match tag {
        GraphFormat::DenseAdjacency => "adjacency\n",
        _ => "laplacian\n",
    });
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn format_graph(g: &Graph, format: GraphFormat) -> String {
    match format {
        GraphFormat::EdgeList => format_edge_list(g),
        GraphFormat::DenseLaplacian => format_dense(g.laplacian().matrix(), format),
        GraphFormat::DenseAdjacency => format_dense(&g.adjacency(), format),
    }
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write_graph(g: &Graph, path: impl AsRef<Path>, format: GraphFormat) -> Result<()> {
    Ok(fs::write(path, format_graph(g, format))?)
}

/// One integer label per non-empty line.
pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    content_lines(text)
        .filter(|(_, l)| !l.starts_with('#'))
        .map(|(n, l)| l.trim().parse().map_err(|_| parse_err(n, format!("bad label `{}`", l.trim()))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip_is_exact() {
        let g = Graph::new(3, [(0, 1, 0.1), (1, 2, 1.0 / 3.0), (0, 2, -2.5e-7)]).unwrap();
        for format in [GraphFormat::EdgeList, GraphFormat::DenseLaplacian, GraphFormat::DenseAdjacency] {
            assert_eq!(parse_graph(&format_graph(&g, format)).unwrap(), g, "{format:?}");
        }
        let labeled = g.with_labels(vec!["x".into(), "y".into(), "z".into()]).unwrap();
        assert_eq!(parse_graph(&format_edge_list(&labeled)).unwrap(), labeled);
    }

    #[test]
    fn triangle_edge_list() {
        let g = parse_graph("# nodes=3\n0\t1\t1\n1\t2\t1\n0\t2\t1\n").unwrap();
        let want = SymMatrix::from_row_slice(3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]).unwrap();
        assert_eq!(g.laplacian().matrix(), &want);
    }

    #[test]
    fn dense_tags() {
        let g = parse_graph("laplacian\n1,-1\n-1,1\n").unwrap();
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert!(matches!(parse_graph("adjacency\n1,-1\n-1,1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("adjacency\n0,1\n2,0\n"), Err(Error::NonSymmetricInput)));
        assert!(matches!(parse_graph("adjacency\n0,1\n1\n"), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(parse_graph("laplacian\n1,-1\n-1,2\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        assert!(matches!(parse_graph("# nodes=2\n0\t1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("# nodes=2\n0\t5\t1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("# nodes=2\n\n0\t1\tx\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_graph("nodes 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn labels_file() {
        assert_eq!(parse_labels("0\n2\n\n1\n").unwrap(), vec![0, 2, 1]);
        assert!(parse_labels("0\nx\n").is_err());
    }
}
