//! SDPA sparse format (`.dat-s`).
//!
//! The file describes SDPA's block problem `max ⟨F₀, Y⟩` s.t.
//! `⟨F_i, Y⟩ = c_i`, `Y ⪰ 0`, which is read as the standard form
//! `min ⟨−F₀, Y⟩`, `⟨F_i, Y⟩ = c_i`. Positive block sizes are PSD blocks,
//! negative ones diagonal (orthant) blocks. Only upper-triangle entries
//! are allowed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::affine::{AffineMap, SparseRow};
use crate::cones::{BlockPoint, ConeSpec};
use crate::error::{Error, Result};
use crate::regsolver::LinearConicProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SdpaOptions {
    /// Accept lower-triangle entries by mirroring them instead of failing.
    pub lenient: bool,
}

/// Where each SDPA block lands in the cone.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Psd { block: usize, dim: usize },
    Diag { offset: usize, dim: usize },
}

/// Splits the content lines of an SDPA file, dropping comments and the
/// separator characters `{ } ( ) ,`.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, String)> + '_ {
    text.lines().enumerate().filter_map(|(i, line)| {
        let t = line.trim();
        if t.is_empty() || t.starts_with('*') || t.starts_with('"') {
            return None;
        }
        let cleaned: String = t
            .chars()
            .map(|c| if "{}(),".contains(c) { ' ' } else { c })
            .collect();
        Some((i + 1, cleaned))
    })
}

fn first_int(line: usize, s: &str, what: &str) -> Result<i64> {
    s.split_whitespace()
        .next()
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|e| Error::parse(line, format!("bad {what}: {e}")))
}

fn number(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|e| Error::parse(line, format!("bad number '{s}': {e}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite number '{s}'")));
    }
    Ok(v)
}

pub fn parse_sdpa(text: &str, opts: SdpaOptions) -> Result<LinearConicProblem> {
    let mut lines = content_lines(text);
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::Input(format!("SDPA file ends before {what}")))
    };

    let (ln, l) = next("mDIM")?;
    let m = first_int(ln, &l, "mDIM")?;
    if m < 1 {
        return Err(Error::parse(ln, "mDIM must be at least 1"));
    }
    let m = m as usize;
    let (ln, l) = next("nBLOCK")?;
    let nblock = first_int(ln, &l, "nBLOCK")?;
    if nblock < 1 {
        return Err(Error::parse(ln, "nBLOCK must be at least 1"));
    }
    let (ln, l) = next("block sizes")?;
    let sizes: Vec<i64> = l
        .split_whitespace()
        .map(|s| {
            s.parse()
                .map_err(|e| Error::parse(ln, format!("bad block size '{s}': {e}")))
        })
        .collect::<Result<_>>()?;
    if sizes.len() < nblock as usize {
        return Err(Error::parse(
            ln,
            format!("expected {nblock} block sizes, found {}", sizes.len()),
        ));
    }
    let sizes = &sizes[..nblock as usize];
    if sizes.contains(&0) {
        return Err(Error::parse(ln, "block size 0"));
    }

    let psd: Vec<usize> = sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| s as usize)
        .collect();
    let nonneg: usize = sizes
        .iter()
        .filter(|&&s| s < 0)
        .map(|&s| (-s) as usize)
        .sum();
    let cone = ConeSpec::new(psd, vec![], nonneg)?;
    let mut slots = Vec::with_capacity(sizes.len());
    let (mut pb, mut diag) = (0, 0);
    for &s in sizes {
        if s > 0 {
            slots.push(Slot::Psd {
                block: pb,
                dim: s as usize,
            });
            pb += 1;
        } else {
            slots.push(Slot::Diag {
                offset: cone.nonneg_offset() + diag,
                dim: (-s) as usize,
            });
            diag += (-s) as usize;
        }
    }

    let mut rhs = Vec::with_capacity(m);
    let mut rhs_line = 0;
    while rhs.len() < m {
        let (ln, l) = next("the objective vector")?;
        rhs_line = ln;
        for s in l.split_whitespace() {
            rhs.push(number(ln, s)?);
        }
    }
    if rhs.len() > m {
        return Err(Error::parse(
            rhs_line,
            format!("expected {m} objective entries, found {}", rhs.len()),
        ));
    }

    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m + 1];
    for (ln, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::parse(
                ln,
                format!("expected 'matno blkno i j value', got {} fields", f.len()),
            ));
        }
        let ints: Vec<usize> = f[..4]
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|e| Error::parse(ln, format!("bad index '{s}': {e}")))
            })
            .collect::<Result<_>>()?;
        let (mat, blk, mut i, mut j) = (ints[0], ints[1], ints[2], ints[3]);
        let v = number(ln, f[4])?;
        if mat > m {
            return Err(Error::parse(
                ln,
                format!("matrix number {mat} exceeds mDIM {m}"),
            ));
        }
        if blk == 0 || blk > slots.len() {
            return Err(Error::parse(ln, format!("block number {blk} out of range")));
        }
        if i > j {
            if !opts.lenient {
                return Err(Error::parse(ln, format!("lower-triangle entry ({i}, {j})")));
            }
            std::mem::swap(&mut i, &mut j);
        }
        let dim = match slots[blk - 1] {
            Slot::Psd { dim, .. } | Slot::Diag { dim, .. } => dim,
        };
        if i == 0 || j > dim {
            return Err(Error::parse(
                ln,
                format!("entry ({i}, {j}) outside a block of size {dim}"),
            ));
        }
        let out = &mut entries[mat];
        match slots[blk - 1] {
            Slot::Psd { block, .. } => {
                out.push((cone.psd_index(block, i - 1, j - 1), v));
                if i != j {
                    out.push((cone.psd_index(block, j - 1, i - 1), v));
                }
            }
            Slot::Diag { offset, .. } => {
                if i != j {
                    return Err(Error::parse(
                        ln,
                        format!("off-diagonal entry ({i}, {j}) in a diagonal block"),
                    ));
                }
                out.push((offset + i - 1, v));
            }
        }
    }

    let mut it = entries.into_iter();
    let obj = SparseRow::from_entries(it.next().expect("objective slot"));
    let mut c = BlockPoint::zeros(&cone);
    for (&i, &v) in obj.idx.iter().zip(&obj.val) {
        c.data[i] = -v;
    }
    let rows = it.map(SparseRow::from_entries).collect();
    let a = AffineMap::from_rows(cone.ambient_dim(), rows, rhs)?;
    LinearConicProblem::new(c, a, cone)
}

/// Shortest decimal that reads back to the same `f64` (at most 17
/// significant digits).
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{v:?}");
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}

/// Upper-triangle entries of a flat point, grouped by SDPA block.
fn block_entries(cone: &ConeSpec, data: &[(usize, f64)]) -> BTreeMap<(usize, usize, usize), f64> {
    let mut out = BTreeMap::new();
    let lp_block = cone.psd.len() + 1;
    let nn = cone.nonneg_offset();
    for &(idx, v) in data {
        if v == 0.0 {
            continue;
        }
        if idx >= nn {
            out.insert((lp_block, idx - nn + 1, idx - nn + 1), v);
            continue;
        }
        let mut b = 0;
        while idx >= cone.psd_offset(b) + cone.psd[b] * cone.psd[b] {
            b += 1;
        }
        let local = idx - cone.psd_offset(b);
        let d = cone.psd[b];
        let (i, j) = (local / d, local % d);
        if i <= j {
            out.insert((b + 1, i + 1, j + 1), v);
        }
    }
    out
}

/// Writes the canonical form: PSD blocks first, then one diagonal block;
/// entries sorted by matrix, block, row, column.
pub fn write_sdpa(lcp: &LinearConicProblem) -> Result<String> {
    let cone = &lcp.cone;
    if !cone.soc.is_empty() {
        return Err(Error::Unsupported(
            "second-order blocks cannot be written in SDPA format".into(),
        ));
    }
    let mut s = String::new();
    let mut sizes: Vec<String> = cone.psd.iter().map(|d| d.to_string()).collect();
    if cone.nonneg > 0 {
        sizes.push(format!("-{}", cone.nonneg));
    }
    writeln!(s, "{}", lcp.m()).unwrap();
    writeln!(s, "{}", sizes.len()).unwrap();
    writeln!(s, "{}", sizes.join(" ")).unwrap();
    let rhs: Vec<String> = lcp.b().iter().map(|&v| fmt_f64(v)).collect();
    writeln!(s, "{}", rhs.join(" ")).unwrap();
    let obj: Vec<(usize, f64)> = lcp
        .c
        .data
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, -v))
        .collect();
    let mut mats = vec![block_entries(cone, &obj)];
    for r in lcp.a.rows() {
        let e: Vec<(usize, f64)> = r.idx.iter().copied().zip(r.val.iter().copied()).collect();
        mats.push(block_entries(cone, &e));
    }
    for (k, mat) in mats.iter().enumerate() {
        for (&(b, i, j), &v) in mat {
            writeln!(s, "{k} {b} {i} {j} {}", fmt_f64(v)).unwrap();
        }
    }
    Ok(s)
}
