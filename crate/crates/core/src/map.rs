//! Self-maps `T : X -> X` and coupled maps `F : X x X -> X`.

use crate::error::{Error, Result};

/// A map from a space to itself. Evaluation may fail with a domain or
/// numeric error.
pub trait SelfMap<P> {
    fn apply(&self, x: &P) -> Result<P>;
}

impl<P, F: Fn(&P) -> P> SelfMap<P> for F {
    fn apply(&self, x: &P) -> Result<P> {
        Ok(self(x))
    }
}

/// Adapts a fallible closure.
#[derive(Debug, Clone, Copy)]
pub struct Fallible<F>(pub F);

impl<P, F: Fn(&P) -> Result<P>> SelfMap<P> for Fallible<F> {
    fn apply(&self, x: &P) -> Result<P> {
        (self.0)(x)
    }
}

/// A self-map on point indices `0..n`, given as a table of images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedMap {
    images: Vec<usize>,
}

impl TabulatedMap {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if let Some(i) = images.iter().position(|&t| t >= n) {
            return Err(Error::domain(format!("image of point {i} is {} outside 0..{n}", images[i])));
        }
        Ok(Self { images })
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

impl SelfMap<usize> for TabulatedMap {
    fn apply(&self, x: &usize) -> Result<usize> {
        self.images.get(*x).copied().ok_or_else(|| Error::domain(format!("point {x} is outside the tabulated map")))
    }
}

/// A self-map on a finite set of reals given as `(x, Tx)` rows. Looking up a
/// point that is not in the table is a domain error.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTableMap {
    rows: Vec<(f64, f64)>,
}

impl RealTableMap {
    pub fn new(mut rows: Vec<(f64, f64)>) -> Result<Self> {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::arg(format!("point {} is tabulated twice", w[0].0)));
        }
        if rows.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Numeric("tabulated map has a non-finite entry".into()));
        }
        Ok(Self { rows })
    }

    pub fn domain(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.0).collect()
    }
}

impl SelfMap<f64> for RealTableMap {
    fn apply(&self, x: &f64) -> Result<f64> {
        self.rows
            .binary_search_by(|r| r.0.total_cmp(x))
            .map(|i| self.rows[i].1)
            .map_err(|_| Error::domain(format!("point {x} is not in the tabulated map")))
    }
}

/// A map `F : X x X -> X`.
pub trait CoupledMap<P> {
    fn apply(&self, x: &P, y: &P) -> P;
}

impl<P, F: Fn(&P, &P) -> P> CoupledMap<P> for F {
    fn apply(&self, x: &P, y: &P) -> P {
        self(x, y)
    }
}

impl<P> CoupledMap<P> for Box<dyn CoupledMap<P> + '_> {
    fn apply(&self, x: &P, y: &P) -> P {
        (**self).apply(x, y)
    }
}

/// Borrows a coupled map where an owned one is expected.
#[derive(Debug)]
pub struct CoupledRef<'a, F: ?Sized>(pub &'a F);

impl<F: ?Sized> Clone for CoupledRef<'_, F> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<F: ?Sized> Copy for CoupledRef<'_, F> {}

impl<P, F: CoupledMap<P> + ?Sized> CoupledMap<P> for CoupledRef<'_, F> {
    fn apply(&self, x: &P, y: &P) -> P {
        self.0.apply(x, y)
    }
}

/// A coupled map on indices `0..n`, stored row-major: `F(x, y) = table[x * n + y]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedCoupledMap {
    n: usize,
    table: Vec<usize>,
}

impl TabulatedCoupledMap {
    pub fn new(n: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != n * n {
            return Err(Error::arg(format!("coupled table has {} entries, expected {}", table.len(), n * n)));
        }
        if table.iter().any(|&v| v >= n) {
            return Err(Error::domain("coupled table has an image outside the point set"));
        }
        Ok(Self { n, table })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

impl CoupledMap<usize> for TabulatedCoupledMap {
    fn apply(&self, x: &usize, y: &usize) -> usize {
        self.table[x * self.n + y]
    }
}
