//! Binary relations, in predicate form and as boolean matrices over a sample.

use std::fmt;

use crate::error::{Error, Result};

/// A binary relation on points of type `P`.
pub trait Relation<P> {
    fn holds(&self, x: &P, y: &P) -> bool;
}

impl<P, F: Fn(&P, &P) -> bool> Relation<P> for F {
    fn holds(&self, x: &P, y: &P) -> bool {
        self(x, y)
    }
}

/// The usual order `<=` on the reals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RealOrder;

impl Relation<f64> for RealOrder {
    fn holds(&self, x: &f64, y: &f64) -> bool {
        x <= y
    }
}

/// The reversed order `>=` on the reals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReverseRealOrder;

impl Relation<f64> for ReverseRealOrder {
    fn holds(&self, x: &f64, y: &f64) -> bool {
        x >= y
    }
}

/// Square boolean matrix indexed by sample order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl BoolMatrix {
    pub fn empty(n: usize) -> Self {
        Self { n, bits: vec![false; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| i == j)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                bits.push(f(i, j));
            }
        }
        Self { n, bits }
    }

    /// Rows must all have the same length as the number of rows.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::arg(format!(
                "relation matrix is not square: row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        Ok(Self { n, bits: rows.iter().flatten().copied().collect() })
    }

    /// Evaluates `rel` on every ordered pair of `points`.
    pub fn materialize<P, R: Relation<P> + ?Sized>(rel: &R, points: &[P]) -> Self {
        Self::from_fn(points.len(), |i, j| rel.holds(&points[i], &points[j]))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.bits[i * self.n + j] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_zero(&self) -> bool {
        !self.bits.contains(&true)
    }

    /// Relational composition: `(i, k)` holds when `self(i, j)` and `other(j, k)` for some `j`.
    pub fn compose(&self, other: &BoolMatrix) -> BoolMatrix {
        assert_eq!(self.n, other.n, "composing relations of different sizes");
        let n = self.n;
        let mut out = BoolMatrix::empty(n);
        for i in 0..n {
            for j in 0..n {
                if !self.get(i, j) {
                    continue;
                }
                let row = &other.bits[j * n..(j + 1) * n];
                for (k, &b) in row.iter().enumerate() {
                    if b {
                        out.bits[i * n + k] = true;
                    }
                }
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &BoolMatrix) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    pub fn symmetrized(&self) -> BoolMatrix {
        BoolMatrix::from_fn(self.n, |i, j| self.get(i, j) || self.get(j, i))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i))
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || !(self.get(i, j) && self.get(j, i))))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset_of(self)
    }

    pub fn is_partial_order(&self) -> bool {
        self.is_reflexive() && self.is_antisymmetric() && self.is_transitive()
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.bits.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }
}

impl Relation<usize> for BoolMatrix {
    fn holds(&self, x: &usize, y: &usize) -> bool {
        *x < self.n && *y < self.n && self.get(*x, *y)
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix({})", self.n)?;
        for i in 0..self.n {
            let row: String = (0..self.n).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}
