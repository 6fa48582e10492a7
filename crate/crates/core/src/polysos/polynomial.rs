use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Exponent multi-index `α ∈ ℕᴺ`.
pub type Exponent = Vec<u32>;

/// Sparse multivariate polynomial `Σ p_α v^α` with real coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality
/// of polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Exponent, f64>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: f64) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c)
            .expect("constant term has the right arity");
        p
    }

    /// The coordinate polynomial `v_i`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn monomial(exp: Exponent, coeff: f64) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, coeff)
            .expect("arity matches by construction");
        p
    }

    pub fn from_terms(
        num_vars: usize,
        terms: impl IntoIterator<Item = (Exponent, f64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    /// Adds `coeff·v^exp`, merging with an existing term.
    pub fn add_term(&mut self, exp: Exponent, coeff: f64) -> Result<()> {
        if exp.len() != self.num_vars {
            return Err(Error::Input(format!(
                "exponent has {} entries, polynomial has {} variables",
                exp.len(),
                self.num_vars
            )));
        }
        if !coeff.is_finite() {
            return Err(Error::NonFinite("polynomial coefficient"));
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if coeff != 0.0 {
                    v.insert(coeff);
                }
            }
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coeff(&self, exp: &[u32]) -> f64 {
        self.terms.get(exp).copied().unwrap_or(0.0)
    }

    /// Total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        assert_eq!(
            v.len(),
            self.num_vars,
            "evaluation point has the wrong dimension"
        );
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(v)
                    .map(|(&k, &x)| x.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.num_vars);
        if s != 0.0 {
            for (e, c) in &self.terms {
                out.terms.insert(e.clone(), c * s);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.num_vars, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Largest coefficient-wise difference.
    pub fn max_coeff_diff(&self, other: &Polynomial) -> f64 {
        (self - other)
            .terms
            .values()
            .fold(0.0, |m, c| m.max(c.abs()))
    }

    fn combine(&self, other: &Polynomial, sign: f64) -> Polynomial {
        assert_eq!(self.num_vars, other.num_vars, "variable counts differ");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let entry = out.terms.entry(e.clone()).or_insert(0.0);
            *entry += sign * c;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.num_vars, rhs.num_vars, "variable counts differ");
        let mut terms: BTreeMap<Exponent, f64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        terms.retain(|_, c| *c != 0.0);
        Polynomial {
            num_vars: self.num_vars,
            terms,
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*v{}", i + 1)?,
                    _ => write!(f, "*v{}^{k}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let v = Polynomial::var(1, 0);
        let one = Polynomial::constant(1, 1.0);
        let p = (&v - &one).pow(2);
        assert_eq!(p.coeff(&[2]), 1.0);
        assert_eq!(p.coeff(&[1]), -2.0);
        assert_eq!(p.coeff(&[0]), 1.0);
        assert_eq!(p.eval(&[3.0]), 4.0);
        assert_eq!(p.degree(), 2);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn merging_drops_zeros() {
        let mut p = Polynomial::zero(2);
        p.add_term(vec![1, 0], 2.0).unwrap();
        p.add_term(vec![1, 0], -2.0).unwrap();
        assert!(p.is_zero());
        assert!(p.add_term(vec![1], 1.0).is_err());
    }
}
