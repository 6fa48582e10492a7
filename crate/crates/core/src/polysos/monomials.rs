use std::collections::HashMap;

use super::polynomial::Exponent;
use crate::error::{Error, Result};

/// Largest basis `monomials_upto` will build.
pub const MONOMIAL_CAP: usize = 2_000_000;

/// `C(n, k)`, saturating at `usize::MAX`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// All exponents `α ∈ ℕᴺ` with `|α| ≤ d`, in graded lexicographic order:
/// by total degree, then lexicographically descending within a degree
/// (`v₁ ≻ v₂ ≻ …`).
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialBasis {
    pub num_vars: usize,
    pub degree: u32,
    pub exponents: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn index_of(&self, exp: &[u32]) -> Option<usize> {
        self.index.get(exp).copied()
    }

    /// `π(v)`: every basis monomial evaluated at `v`.
    pub fn eval(&self, v: &[f64]) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|e| e.iter().zip(v).map(|(&k, &x)| x.powi(k as i32)).product())
            .collect()
    }
}

/// Builds the basis of all monomials of total degree at most `d`.
pub fn monomials_upto(num_vars: usize, d: u32) -> Result<MonomialBasis> {
    monomials_upto_capped(num_vars, d, MONOMIAL_CAP)
}

pub fn monomials_upto_capped(num_vars: usize, d: u32, cap: usize) -> Result<MonomialBasis> {
    if num_vars == 0 {
        return Err(Error::Input(
            "a monomial basis needs at least one variable".into(),
        ));
    }
    let size = binomial(num_vars + d as usize, num_vars);
    if size > cap {
        return Err(Error::SizeCap {
            what: "monomial basis",
            size,
            cap,
        });
    }
    let mut exponents = Vec::with_capacity(size);
    for k in 0..=d {
        let mut cur = vec![0u32; num_vars];
        push_degree(&mut exponents, &mut cur, 0, k);
    }
    debug_assert_eq!(exponents.len(), size);
    let index = exponents
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    Ok(MonomialBasis {
        num_vars,
        degree: d,
        exponents,
        index,
    })
}

/// Appends all exponents of total degree `left` on variables `pos..`, the
/// largest power of the earliest variable first.
fn push_degree(out: &mut Vec<Exponent>, cur: &mut Exponent, pos: usize, left: u32) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = left;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        push_degree(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}
