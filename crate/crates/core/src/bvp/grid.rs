use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{vec_summary, Metric, PointRepr, SupNorm};

/// Largest allowed deviation of an imported node from `i / m`.
pub const GRID_UNIFORMITY_TOLERANCE: f64 = 1e-15;

/// Nodes `t_i = i / m`, `i = 0..=m`, with `m` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UniformGrid {
    intervals: usize,
}

impl UniformGrid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < 2 || intervals % 2 == 1 {
            return Err(Error::arg(format!("grid needs an even interval count >= 2, got {intervals}")));
        }
        Ok(Self { intervals })
    }

    /// Grid with `count` nodes; `count` must be odd and at least 3.
    pub fn with_nodes(count: usize) -> Result<Self> {
        if count < 3 {
            return Err(Error::arg(format!("grid needs at least 3 nodes, got {count}")));
        }
        Self::new(count - 1)
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn node_count(&self) -> usize {
        self.intervals + 1
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.intervals as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.intervals).map(|i| self.node(i)).collect()
    }
}

/// Node values of a function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: UniformGrid,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    t: f64,
    x: f64,
}

impl GridFunction {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::arg(format!("{} values for a grid of {} nodes", values.len(), grid.node_count())));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Self {
        Self { values: grid.nodes().into_iter().map(f).collect(), grid }
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self { values: vec![0.0; grid.node_count()], grid }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pointwise maximum; the grids must agree.
    pub fn max_with(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, f64::max)
    }

    pub fn min_with(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, f64::min)
    }

    fn zip_with(&self, other: &GridFunction, op: fn(f64, f64) -> f64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::arg("grid functions live on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| op(*a, *b)).collect();
        Ok(GridFunction { grid: self.grid, values })
    }

    /// Writes `t,x` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (i, x) in self.values.iter().enumerate() {
            w.serialize(Row { t: self.grid.node(i), x: *x }).map_err(format_error)?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))
    }

    /// Reads `t,x` rows; the `t` column must be a uniform grid of `[0, 1]`
    /// with an even interval count.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (k, rec) in csv::Reader::from_reader(input).deserialize::<Row>().enumerate() {
            rows.push(rec.map_err(|e| Error::Format(format!("grid row {}: {e}", k + 1)))?);
        }
        if rows.len() < 3 {
            return Err(Error::Format(format!("grid function needs at least 3 rows, got {}", rows.len())));
        }
        let grid = UniformGrid::with_nodes(rows.len()).map_err(|e| Error::Format(e.to_string()))?;
        for (i, row) in rows.iter().enumerate() {
            if (row.t - grid.node(i)).abs() > GRID_UNIFORMITY_TOLERANCE {
                return Err(Error::Format(format!("node {i} at t = {} is off the uniform grid", row.t)));
            }
            if !row.x.is_finite() {
                return Err(Error::Format(format!("node {i} has a non-finite value")));
            }
        }
        Ok(Self { grid, values: rows.into_iter().map(|r| r.x).collect() })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        self.write_csv(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }
}

fn format_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Max over nodes; NaN across different grids.
impl Metric<GridFunction> for SupNorm {
    fn distance(&self, a: &GridFunction, b: &GridFunction) -> f64 {
        if a.grid != b.grid {
            return f64::NAN;
        }
        self.distance(&a.values, &b.values)
    }

    fn contains(&self, p: &GridFunction) -> bool {
        p.values.iter().all(|v| v.is_finite())
    }
}

impl PointRepr for GridFunction {
    fn repr(&self) -> String {
        vec_summary(&self.values)
    }
}
