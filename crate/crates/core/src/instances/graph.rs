//! Directed graphs and their vertex-edge incidence matrices.
//!
//! Files use 1-based vertex ids. An edge list has one `tail head` pair per
//! line; a demand file has one `vertex value` pair per line, with unlisted
//! vertices at zero. Blank lines and lines starting with `#` are skipped.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, RealVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n_vertices: usize,
    /// `(tail, head)`, 0-based.
    edges: Vec<(usize, usize)>,
}

impl DirectedGraph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(t, h)) in edges.iter().enumerate() {
            if t >= n_vertices || h >= n_vertices {
                return Err(Error::InvalidArgument(format!(
                    "edge {i} ({t}, {h}) has an endpoint outside 0..{n_vertices}"
                )));
            }
            if t == h {
                return Err(Error::InvalidArgument(format!("edge {i} is a self-loop")));
            }
        }
        Ok(Self { n_vertices, edges })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// `A[v][e] = +1` if edge `e` leaves `v`, `-1` if it enters `v`.
pub fn incidence_matrix(g: &DirectedGraph) -> Result<DenseMatrix> {
    let n = g.n_vertices;
    let m = g.edges.len();
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(
            "incidence matrix needs at least one vertex and one edge".into(),
        ));
    }
    let mut data = vec![0.0; n * m];
    for (e, &(t, h)) in g.edges.iter().enumerate() {
        data[t * m + e] = 1.0;
        data[h * m + e] = -1.0;
    }
    DenseMatrix::new(n, m, data)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_vertex(tok: &str, line: usize, n_vertices: usize) -> Result<usize> {
    let v: usize = tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a vertex id: {tok:?}"),
    })?;
    if v == 0 || v > n_vertices {
        return Err(Error::Parse {
            line,
            message: format!("vertex {v} outside 1..={n_vertices}"),
        });
    }
    Ok(v - 1)
}

fn two_fields(l: &str, line: usize) -> Result<(&str, &str)> {
    let mut it = l.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::Parse {
            line,
            message: "expected exactly two fields".into(),
        }),
    }
}

pub fn parse_edges(text: &str, n_vertices: usize) -> Result<DirectedGraph> {
    let mut edges = Vec::new();
    for (line, l) in content_lines(text) {
        let (t, h) = two_fields(l, line)?;
        let t = parse_vertex(t, line, n_vertices)?;
        let h = parse_vertex(h, line, n_vertices)?;
        if t == h {
            return Err(Error::Parse {
                line,
                message: "self-loop".into(),
            });
        }
        edges.push((t, h));
    }
    DirectedGraph::new(n_vertices, edges)
}

pub fn parse_demand(text: &str, n_vertices: usize) -> Result<RealVector> {
    let mut b = vec![0.0; n_vertices];
    let mut seen = vec![false; n_vertices];
    for (line, l) in content_lines(text) {
        let (v, x) = two_fields(l, line)?;
        let v = parse_vertex(v, line, n_vertices)?;
        let x: f64 = x.parse().map_err(|_| Error::Parse {
            line,
            message: format!("not a number: {x:?}"),
        })?;
        if !x.is_finite() {
            return Err(Error::Parse {
                line,
                message: "non-finite demand".into(),
            });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::Parse {
                line,
                message: format!("vertex {} listed twice", v + 1),
            });
        }
        b[v] = x;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_incidence() {
        let g = DirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let a = incidence_matrix(&g).unwrap();
        assert_eq!(a.as_slice(), &[1.0, 0.0, -1.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn single_edge() {
        let g = DirectedGraph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(incidence_matrix(&g).unwrap().as_slice(), &[1.0, -1.0]);
    }

    #[test]
    fn empty_edge_list_rejected() {
        let g = DirectedGraph::new(3, vec![]).unwrap();
        assert!(incidence_matrix(&g).is_err());
    }

    #[test]
    fn columns_sum_to_zero() {
        let g = DirectedGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let a = incidence_matrix(&g).unwrap();
        for e in 0..a.n_cols() {
            assert_eq!((0..a.n_rows()).map(|v| a.get(v, e)).sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn invalid_graphs() {
        assert!(DirectedGraph::new(2, vec![(0, 2)]).is_err());
        assert!(DirectedGraph::new(2, vec![(1, 1)]).is_err());
    }

    #[test]
    fn parse_files() {
        let g = parse_edges("# path\n1 2\n\n2 3\n", 3).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(matches!(parse_edges("1 2\n2 4\n", 3), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edges("1 1\n", 3), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edges("1\n", 3), Err(Error::Parse { line: 1, .. })));

        assert_eq!(parse_demand("1 1\n3 -1\n", 3).unwrap(), vec![1.0, 0.0, -1.0]);
        assert!(matches!(parse_demand("1 1\n1 2\n", 3), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_demand("0 1\n", 3), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_demand("2 nan\n", 3), Err(Error::Parse { line: 1, .. })));
    }
}
