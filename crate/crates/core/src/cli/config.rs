//! Problem configuration: one JSON document per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alpha::DEFAULT_BOUNDARY_TOLERANCE;
use crate::bvp::DEFAULT_GRID_NODES;
use crate::error::{Error, Result};
use crate::map::RealTableMap;
use crate::picard::{DEFAULT_CAUCHY_WINDOW, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use crate::relation::BoolMatrix;
use crate::verify::DEFAULT_EPSILON_CAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    FixedPoint,
    Coupled,
    Cyclic,
    Bvp,
    Verify,
}

/// Built-in self-maps of the real line, or a tabulated `x,Tx` CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    /// `x / 2`
    Halving,
    /// `x + offset`
    Shift {
        offset: f64,
    },
    /// `factor * x`
    Scale {
        factor: f64,
    },
    Constant {
        value: f64,
    },
    Identity,
    /// `-x / 2`
    NegateHalf,
    Tabulated {
        path: PathBuf,
    },
}

/// Built-in coupled maps `F(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoupledSpec {
    /// `(x - y) / 4`
    QuarterDifference,
    Constant {
        value: f64,
    },
    /// `F(x, y) = x`
    Projection,
}

/// Source terms `f(t, x)` of the boundary value problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    /// `f = 1`
    Unit,
    Zero,
    /// `f = mu x + g`
    Linear {
        mu: f64,
        g: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderDirection {
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlphaSpec {
    Constant {
        value: f64,
    },
    Exponential,
    /// 0/1 matrix CSV with a header row of point labels.
    RelationMatrix {
        path: PathBuf,
    },
    /// Closed intervals `[lo, hi]`, visited in order.
    Cyclic {
        sets: Vec<(f64, f64)>,
        #[serde(default = "default_boundary_tolerance")]
        boundary_tolerance: f64,
    },
    Order {
        direction: OrderDirection,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartSpec {
    Real(f64),
    Pair(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationSettings {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_cauchy_window")]
    pub cauchy_window: usize,
}

impl Default for IterationSettings {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            cauchy_window: DEFAULT_CAUCHY_WINDOW,
        }
    }
}

/// Sample points: explicit, or `count` evenly spaced on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SampleSpec {
    Points { points: Vec<f64> },
    Uniform { lo: f64, hi: f64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparatorPreset {
    /// `xi(a, b) = b - a`
    Forward,
    /// `xi(a, b) = a - b`
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BvpSettings {
    #[serde(default = "default_grid_nodes")]
    pub grid_nodes: usize,
    /// Simpson subintervals over `[0, 1]`; defaults to the grid interval count.
    #[serde(default)]
    pub quadrature_subintervals: Option<usize>,
    /// `t,x` CSV for the start function; zero when absent.
    #[serde(default)]
    pub start_path: Option<PathBuf>,
    /// Slope `k` of the linear gauge `phi(u) = k u` used by the checks.
    #[serde(default = "default_gauge_slope")]
    pub gauge_slope: f64,
    #[serde(default = "default_comparator")]
    pub comparator: ComparatorPreset,
}

impl Default for BvpSettings {
    fn default() -> Self {
        Self {
            grid_nodes: DEFAULT_GRID_NODES,
            quadrature_subintervals: None,
            start_path: None,
            gauge_slope: default_gauge_slope(),
            comparator: default_comparator(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    #[serde(default)]
    pub map: Option<MapSpec>,
    #[serde(default)]
    pub coupled_map: Option<CoupledSpec>,
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub alpha: Option<AlphaSpec>,
    #[serde(default)]
    pub start: Option<StartSpec>,
    #[serde(default)]
    pub iteration: IterationSettings,
    #[serde(default)]
    pub sample: Option<SampleSpec>,
    /// Explicit epsilon grid for the Meir-Keeler probe; derived from the
    /// sample when absent.
    #[serde(default)]
    pub epsilon_grid: Option<Vec<f64>>,
    #[serde(default = "default_epsilon_cap")]
    pub epsilon_cap: usize,
    /// `N` for the transitivity check; the number of cyclic sets when absent.
    #[serde(default)]
    pub transitivity_n: Option<usize>,
    #[serde(default)]
    pub bvp: BvpSettings,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Directory relative paths resolve against; set by [`ProblemConfig::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}
fn default_max_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}
fn default_cauchy_window() -> usize {
    DEFAULT_CAUCHY_WINDOW
}
fn default_epsilon_cap() -> usize {
    DEFAULT_EPSILON_CAP
}
fn default_grid_nodes() -> usize {
    DEFAULT_GRID_NODES
}
fn default_boundary_tolerance() -> f64 {
    DEFAULT_BOUNDARY_TOLERANCE
}
fn default_gauge_slope() -> f64 {
    0.5
}
fn default_comparator() -> ComparatorPreset {
    ComparatorPreset::Forward
}

/// Default sample when the config gives none.
pub const DEFAULT_SAMPLE: (f64, f64, usize) = (-1.0, 1.0, 41);

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn sample_points(&self) -> Result<Vec<f64>> {
        match &self.sample {
            Some(SampleSpec::Points { points }) => Ok(points.clone()),
            Some(SampleSpec::Uniform { lo, hi, count }) => uniform(*lo, *hi, *count),
            None => match &self.map {
                Some(MapSpec::Tabulated { path }) => Ok(load_table(&self.resolve(path))?.domain()),
                _ => uniform(DEFAULT_SAMPLE.0, DEFAULT_SAMPLE.1, DEFAULT_SAMPLE.2),
            },
        }
    }

    pub fn real_start(&self) -> Result<f64> {
        match self.start {
            Some(StartSpec::Real(x)) => Ok(x),
            Some(StartSpec::Pair(..)) => Err(Error::Format("start must be a single number for this kind".into())),
            None => Err(Error::Format("config needs a start point".into())),
        }
    }

    pub fn pair_start(&self) -> Result<(f64, f64)> {
        match self.start {
            Some(StartSpec::Pair(x, y)) => Ok((x, y)),
            Some(StartSpec::Real(_)) => Err(Error::Format("start must be a pair [x, y] for a coupled problem".into())),
            None => Err(Error::Format("config needs a start pair".into())),
        }
    }
}

fn uniform(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(hi > lo) {
        return Err(Error::Format("uniform sample needs count >= 2 and lo < hi".into()));
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { hi } else { lo + step * i as f64 }).collect())
}

/// Reads an `x,Tx` table.
pub fn load_table(path: &Path) -> Result<RealTableMap> {
    #[derive(Deserialize)]
    struct Row {
        x: f64,
        #[serde(rename = "Tx")]
        tx: f64,
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let rows = reader
        .deserialize::<Row>()
        .enumerate()
        .map(|(k, r)| {
            r.map(|r| (r.x, r.tx)).map_err(|e| Error::Format(format!("{} row {}: {e}", path.display(), k + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    RealTableMap::new(rows)
}

/// Reads a relation matrix: a header row of labels, then one row of 0/1
/// entries per label.
pub fn load_relation(path: &Path) -> Result<(Vec<String>, BoolMatrix)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let labels: Vec<String> =
        reader.headers().map_err(|e| Error::Format(e.to_string()))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("{} row {}: {e}", path.display(), k + 1)))?;
        let row = rec
            .iter()
            .map(|v| match v {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::Format(format!("relation entry {other:?} in row {} is not 0 or 1", k + 1))),
            })
            .collect::<Result<Vec<bool>>>()?;
        rows.push(row);
    }
    if rows.len() != labels.len() {
        return Err(Error::Format(format!("relation has {} labels but {} rows", labels.len(), rows.len())));
    }
    let matrix = BoolMatrix::from_rows(&rows).map_err(|e| Error::Format(e.to_string()))?;
    Ok((labels, matrix))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ProblemConfig::parse(r#"{"kind": "fixed-point", "map": {"name": "halving"}, "start": 1.0}"#).unwrap();
        assert_eq!(cfg.iteration, IterationSettings::default());
        assert_eq!(cfg.bvp.grid_nodes, 201);
        assert_eq!(cfg.epsilon_cap, DEFAULT_EPSILON_CAP);
        assert_eq!(cfg.real_start().unwrap(), 1.0);
        assert!(cfg.pair_start().is_err());
    }

    #[test]
    fn tagged_specs() {
        let cfg = ProblemConfig::parse(
            r#"{"kind": "cyclic", "map": {"name": "shift", "offset": 1},
                "alpha": {"kind": "cyclic", "sets": [[-1, 0], [0, 1]]},
                "sample": {"lo": 0, "hi": 4, "count": 5}, "start": [1, 3]}"#,
        )
        .unwrap();
        assert_eq!(cfg.map, Some(MapSpec::Shift { offset: 1.0 }));
        assert_eq!(cfg.sample_points().unwrap(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(cfg.pair_start().unwrap(), (1.0, 3.0));
        match cfg.alpha {
            Some(AlphaSpec::Cyclic { boundary_tolerance, .. }) => assert_eq!(boundary_tolerance, 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_and_kinds_rejected() {
        assert!(ProblemConfig::parse(r#"{"kind": "nope"}"#).is_err());
        assert!(ProblemConfig::parse(r#"{"kind": "bvp", "grid": 3}"#).is_err());
        assert!(ProblemConfig::parse("not json").is_err());
    }
}
