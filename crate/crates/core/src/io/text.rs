//! DIMACS edge lists, the polynomial text format and dense matrix files.

use std::fmt::Write as _;

use super::sdpa::fmt_f64;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::polysos::{Graph, Polynomial};

/// DIMACS `.col`: `c` comments, one `p edge n m` line, `e i j` edges with
/// 1-based vertices. Edges are undirected and deduplicated.
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if graph.is_some() {
                    return Err(Error::parse(ln, "second problem line"));
                }
                if f.len() < 3 {
                    return Err(Error::parse(ln, "expected 'p edge <n> <m>'"));
                }
                let n: usize = f[2]
                    .parse()
                    .map_err(|e| Error::parse(ln, format!("bad vertex count: {e}")))?;
                graph = Some(Graph::new(n));
            }
            Some("e") => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| Error::parse(ln, "edge before the 'p' line"))?;
                if f.len() != 3 {
                    return Err(Error::parse(ln, "expected 'e <i> <j>'"));
                }
                let mut ends = [0usize; 2];
                for (k, s) in f[1..].iter().enumerate() {
                    ends[k] = s
                        .parse()
                        .map_err(|e| Error::parse(ln, format!("bad vertex '{s}': {e}")))?;
                    if ends[k] == 0 || ends[k] > g.num_vertices() {
                        return Err(Error::parse(
                            ln,
                            format!("vertex {} out of range 1..={}", ends[k], g.num_vertices()),
                        ));
                    }
                }
                g.add_edge(ends[0] - 1, ends[1] - 1)
                    .map_err(|e| Error::parse(ln, e.to_string()))?;
            }
            Some(other) => return Err(Error::parse(ln, format!("unknown line type '{other}'"))),
        }
    }
    graph.ok_or_else(|| Error::Input("DIMACS file has no 'p edge' line".into()))
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut s = format!("p edge {} {}\n", g.num_vertices(), g.num_edges());
    for (i, j) in g.edges() {
        writeln!(s, "e {} {}", i + 1, j + 1).unwrap();
    }
    s
}

/// Polynomial text format: a `nvars N` header, then one `coeff e₁ … e_N`
/// term per line. Blank lines and `#` comments are ignored; repeated
/// exponents are summed.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let mut poly: Option<Polynomial> = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let Some(p) = poly.as_mut() else {
            if f.len() != 2 || f[0] != "nvars" {
                return Err(Error::parse(ln, "expected header 'nvars <N>'"));
            }
            let n: usize = f[1]
                .parse()
                .map_err(|e| Error::parse(ln, format!("bad variable count: {e}")))?;
            if n == 0 {
                return Err(Error::parse(ln, "need at least one variable"));
            }
            poly = Some(Polynomial::zero(n));
            continue;
        };
        if f.len() != p.num_vars() + 1 {
            return Err(Error::parse(
                ln,
                format!(
                    "expected a coefficient and {} exponents, got {} fields",
                    p.num_vars(),
                    f.len()
                ),
            ));
        }
        let c: f64 = f[0]
            .parse()
            .map_err(|e| Error::parse(ln, format!("bad coefficient '{}': {e}", f[0])))?;
        let exp = f[1..]
            .iter()
            .map(|s| {
                s.parse::<u32>()
                    .map_err(|e| Error::parse(ln, format!("bad exponent '{s}': {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        p.add_term(exp, c)
            .map_err(|e| Error::parse(ln, e.to_string()))?;
    }
    poly.ok_or_else(|| Error::Input("polynomial file has no 'nvars' header".into()))
}

/// Canonical form: header, then terms in increasing exponent order.
pub fn write_polynomial(p: &Polynomial) -> String {
    let mut s = format!("nvars {}\n", p.num_vars());
    for (e, c) in p.terms() {
        let exps: Vec<String> = e.iter().map(|k| k.to_string()).collect();
        writeln!(s, "{} {}", fmt_f64(c), exps.join(" ")).unwrap();
    }
    s
}

/// Dense square matrix, one whitespace-separated row per line; `#`
/// comments allowed. Symmetrized on read.
pub fn parse_dense_matrix(text: &str) -> Result<SymMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::parse(ln, format!("bad entry '{s}': {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::parse(
                    ln,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || rows[0].len() != n {
        return Err(Error::Shape(format!(
            "matrix file must hold a square matrix, got {n} rows of {}",
            rows.first().map_or(0, |r| r.len())
        )));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    SymMatrix::from_row_slice(n, &flat)
}

pub fn write_dense_matrix(m: &SymMatrix) -> String {
    let n = m.dim();
    let mut s = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| fmt_f64(m.get(i, j))).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    s
}
