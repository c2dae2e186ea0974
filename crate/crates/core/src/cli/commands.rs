use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::alpha::{
    Alpha, AlphaRef, ConstantAlpha, CyclicFamily, ExponentialAlpha, RelationAlpha, DEFAULT_BOUNDARY_TOLERANCE,
};
use crate::bvp::conditions::{
    check_j1, check_j2, check_j3, check_j4, check_j5, check_k1, gauge_mk_check, ComparatorFunction, GaugeFunction,
    MEASURE_ZERO_CAVEAT, SAMPLE_LEVEL,
};
use crate::bvp::{row_integral_exact, solve_bvp, GridFunction, IntegralOperator, QuadratureSpec, UniformGrid};
use crate::cli::config::{
    load_relation, load_table, AlphaSpec, ComparatorPreset, CoupledSpec, MapSpec, OrderDirection, ProblemConfig,
    ProblemKind, SourceSpec,
};
use crate::cli::trace::{read_trace, trace_rows, write_trace, TraceRow};
use crate::error::{Error, Result};
use crate::map::{CoupledMap, CoupledRef, SelfMap};
use crate::metric::{PointRepr, ProductMetric, RealLine, SampledSpace, TRIANGLE_SLACK};
use crate::picard::{
    iterate, iterate_with_alpha, rate_estimate, residual_monotone, FixedPointResult, IterationConfig, IterationFailure,
    Slack, Status, FLOAT_SLACK,
};
use crate::reductions::{
    check_cyclic_invariance, mixed_monotone_check, solve_coupled, solve_cyclic, BetaAlpha, LiftedMap, PairAlpha,
};
use crate::relation::{BoolMatrix, RealOrder, ReverseRealOrder};
use crate::verify::{
    all_pairs, check_admissible, check_connected, check_n_transitive, check_strict_contraction, default_epsilon_grid,
    probe_meir_keeler,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

pub const TRACE_FILE: &str = "trace.csv";
pub const SOLVE_REPORT_FILE: &str = "report.json";
pub const VERIFY_REPORT_FILE: &str = "verify_report.json";
pub const SOLUTION_FILE: &str = "solution.csv";

/// Pair sample size used by coupled checks when the config gives none.
const DEFAULT_COUPLED_SAMPLE: usize = 11;
/// Orbit points fed to the Meir-Keeler probe after a cyclic solve.
const ORBIT_PROBE_CAP: usize = 200;

/// Every numeric default in effect, echoed into each report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cauchy_window: usize,
    pub epsilon_cap: usize,
    pub epsilon_grid: Option<Vec<f64>>,
    pub transitivity_n: Option<usize>,
    pub boundary_tolerance: f64,
    pub grid_nodes: usize,
    pub quadrature_subintervals: usize,
    pub gauge_slope: f64,
    pub comparator: ComparatorPreset,
    pub monotone_slack: f64,
    pub triangle_slack: f64,
}

impl Settings {
    fn of(cfg: &ProblemConfig) -> Self {
        let boundary_tolerance = match &cfg.alpha {
            Some(AlphaSpec::Cyclic { boundary_tolerance, .. }) => *boundary_tolerance,
            _ => DEFAULT_BOUNDARY_TOLERANCE,
        };
        let monotone_slack = match (slack_for(cfg), FLOAT_SLACK) {
            (Slack::Relative(r), _) => r,
            (Slack::Exact, _) => 0.0,
        };
        Self {
            tolerance: cfg.iteration.tolerance,
            max_iterations: cfg.iteration.max_iterations,
            cauchy_window: cfg.iteration.cauchy_window,
            epsilon_cap: cfg.epsilon_cap,
            epsilon_grid: cfg.epsilon_grid.clone(),
            transitivity_n: cfg.transitivity_n,
            boundary_tolerance,
            grid_nodes: cfg.bvp.grid_nodes,
            quadrature_subintervals: cfg.bvp.quadrature_subintervals.unwrap_or(cfg.bvp.grid_nodes.saturating_sub(1)),
            gauge_slope: cfg.bvp.gauge_slope,
            comparator: cfg.bvp.comparator,
            monotone_slack,
            triangle_slack: TRIANGLE_SLACK,
        }
    }
}

fn slack_for(cfg: &ProblemConfig) -> Slack {
    match cfg.map {
        Some(MapSpec::Tabulated { .. }) if cfg.kind != ProblemKind::Bvp => Slack::Exact,
        _ => FLOAT_SLACK,
    }
}

/// One verification check. Informational checks never affect the exit code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub informational: bool,
    pub passed: bool,
    pub violations: usize,
    pub detail: Value,
}

impl Check {
    fn new(name: &str, violations: usize, detail: Value) -> Self {
        Self { name: name.into(), informational: false, passed: violations == 0, violations, detail }
    }

    fn info(name: &str, detail: Value) -> Self {
        Self { name: name.into(), informational: true, passed: true, violations: 0, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub kind: ProblemKind,
    pub exit_code: u8,
    pub violation_count: usize,
    pub sample_size: usize,
    pub settings: Settings,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub residual: f64,
    pub residual_monotone: Option<bool>,
    pub first_offending: Option<usize>,
    pub rate_estimate: Option<f64>,
    pub orbital: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub command: &'static str,
    pub kind: ProblemKind,
    pub status: Option<Status>,
    pub exit_code: u8,
    pub settings: Settings,
    pub diagnostics: Option<Diagnostics>,
    pub result: Value,
    pub error: Option<String>,
    pub trace_file: String,
    pub solution_file: Option<String>,
}

/// Where a command writes: `--out`, else the config's `output_dir`, else the
/// working directory.
pub fn output_dir(cfg: &ProblemConfig, out: Option<&Path>) -> PathBuf {
    match (out, &cfg.output_dir) {
        (Some(dir), _) => dir.to_path_buf(),
        (None, Some(dir)) => cfg.resolve(dir),
        (None, None) => PathBuf::from("."),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Format(format!("{}: {e}", dir.display())))
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize")
}

type RealMap = Box<dyn SelfMap<f64>>;
type RealAlpha = Box<dyn Alpha<f64>>;

fn real_map(cfg: &ProblemConfig) -> Result<RealMap> {
    let spec = cfg.map.as_ref().ok_or_else(|| Error::Format("config needs a map".into()))?;
    Ok(match spec.clone() {
        MapSpec::Halving => Box::new(|x: &f64| x / 2.0),
        MapSpec::Shift { offset } => Box::new(move |x: &f64| x + offset),
        MapSpec::Scale { factor } => Box::new(move |x: &f64| factor * x),
        MapSpec::Constant { value } => Box::new(move |_: &f64| value),
        MapSpec::Identity => Box::new(|x: &f64| *x),
        MapSpec::NegateHalf => Box::new(|x: &f64| -x / 2.0),
        MapSpec::Tabulated { path } => Box::new(load_table(&cfg.resolve(&path))?),
    })
}

fn coupled_map(cfg: &ProblemConfig) -> Result<Box<dyn CoupledMap<f64>>> {
    let spec = cfg.coupled_map.as_ref().ok_or_else(|| Error::Format("config needs a coupled_map".into()))?;
    Ok(match spec.clone() {
        CoupledSpec::QuarterDifference => Box::new(|x: &f64, y: &f64| (x - y) / 4.0),
        CoupledSpec::Constant { value } => Box::new(move |_: &f64, _: &f64| value),
        CoupledSpec::Projection => Box::new(|x: &f64, _: &f64| *x),
    })
}

fn source_fn(cfg: &ProblemConfig) -> Result<Box<dyn Fn(f64, f64) -> f64>> {
    let spec = cfg.source.as_ref().ok_or_else(|| Error::Format("config needs a source".into()))?;
    Ok(match *spec {
        SourceSpec::Unit => Box::new(|_, _| 1.0),
        SourceSpec::Zero => Box::new(|_, _| 0.0),
        SourceSpec::Linear { mu, g } => Box::new(move |_, x| mu * x + g),
    })
}

fn cyclic_family(cfg: &ProblemConfig) -> Result<Option<CyclicFamily<f64>>> {
    match &cfg.alpha {
        Some(AlphaSpec::Cyclic { sets, boundary_tolerance }) => {
            Ok(Some(CyclicFamily::intervals(sets, *boundary_tolerance).map_err(|e| Error::Format(e.to_string()))?))
        }
        _ => Ok(None),
    }
}

/// The weight on reals; `None` when the config attaches none.
fn real_alpha(cfg: &ProblemConfig) -> Result<Option<RealAlpha>> {
    Ok(match &cfg.alpha {
        None => None,
        Some(AlphaSpec::Constant { value }) => Some(Box::new(ConstantAlpha(*value))),
        Some(AlphaSpec::Exponential) => Some(Box::new(ExponentialAlpha)),
        Some(AlphaSpec::Order { direction: OrderDirection::Le }) => Some(Box::new(RelationAlpha(RealOrder))),
        Some(AlphaSpec::Order { direction: OrderDirection::Ge }) => Some(Box::new(RelationAlpha(ReverseRealOrder))),
        Some(AlphaSpec::Cyclic { .. }) => Some(Box::new(cyclic_family(cfg)?.expect("cyclic spec").alpha())),
        Some(AlphaSpec::RelationMatrix { .. }) => {
            return Err(Error::Format(
                "a relation-matrix alpha applies to labelled points only, not to real maps".into(),
            ))
        }
    })
}

fn real_space(points: Vec<f64>) -> Result<SampledSpace<f64, RealLine>> {
    SampledSpace::real(points).map_err(|e| Error::Format(format!("sample: {e}")))
}

fn epsilon_grid<P, M: crate::metric::Metric<P>>(cfg: &ProblemConfig, space: &SampledSpace<P, M>) -> Vec<f64> {
    cfg.epsilon_grid.clone().unwrap_or_else(|| default_epsilon_grid(space, cfg.epsilon_cap))
}

/// Runs every check applicable to the problem kind, writes
/// `verify_report.json` and returns the report.
pub fn cmd_verify(cfg: &ProblemConfig, out: Option<&Path>) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let sample_size = match cfg.kind {
        ProblemKind::Bvp => verify_bvp(cfg, &mut checks)?,
        ProblemKind::Coupled => verify_coupled(cfg, &mut checks)?,
        ProblemKind::Verify if matches!(cfg.alpha, Some(AlphaSpec::RelationMatrix { .. })) => {
            verify_relation(cfg, &mut checks)?
        }
        ProblemKind::Cyclic if cyclic_family(cfg)?.is_none() => {
            return Err(Error::Format("a cyclic problem needs a cyclic alpha".into()))
        }
        ProblemKind::FixedPoint | ProblemKind::Cyclic | ProblemKind::Verify => verify_real(cfg, &mut checks)?,
    };
    let violation_count = checks.iter().filter(|c| !c.informational).map(|c| c.violations).sum();
    let exit_code = if violation_count == 0 { EXIT_OK } else { EXIT_VIOLATION };
    let report = VerifyReport {
        command: "verify",
        kind: cfg.kind,
        exit_code,
        violation_count,
        sample_size,
        settings: Settings::of(cfg),
        checks,
    };
    let dir = output_dir(cfg, out);
    create_dir(&dir)?;
    write_json(&dir.join(VERIFY_REPORT_FILE), &report)?;
    Ok(report)
}

fn verify_real(cfg: &ProblemConfig, checks: &mut Vec<Check>) -> Result<usize> {
    let map = real_map(cfg)?;
    let points = cfg.sample_points()?;
    let space = real_space(points.clone())?;
    let alpha = real_alpha(cfg)?.unwrap_or_else(|| Box::new(ConstantAlpha(1.0)));

    let strict = check_strict_contraction(&space, &*map, &alpha)?;
    checks.push(Check::new("strict_contraction", strict.len(), json!({ "violations": strict })));

    let grid = epsilon_grid(cfg, &space);
    let mk = probe_meir_keeler(&space, &*map, &alpha, &grid)?;
    checks.push(Check::new(
        "meir_keeler",
        mk.violations.len(),
        json!({ "violated_epsilons": mk.violated_epsilons(), "probe": mk }),
    ));

    let admissible = check_admissible(&all_pairs(&points), &*map, &alpha)?;
    checks.push(Check::new("admissible", admissible.len(), json!({ "violations": admissible })));

    if let Some(family) = cyclic_family(cfg)? {
        let inv = check_cyclic_invariance(&*map, &family, &points)?;
        checks.push(Check::new("cyclic_invariance", inv.len(), json!({ "violations": inv })));
        let n = cfg.transitivity_n.unwrap_or(family.len());
        checks.push(transitivity_check(
            &BoolMatrix::materialize(&|x: &f64, y: &f64| alpha.admits(x, y), &points),
            n,
            None,
        ));
    } else if let Some(n) = cfg.transitivity_n {
        checks.push(transitivity_check(
            &BoolMatrix::materialize(&|x: &f64, y: &f64| alpha.admits(x, y), &points),
            n,
            None,
        ));
    }

    let conn = check_connected(&space, &alpha);
    checks.push(Check::info(
        "connectivity",
        json!({ "connected": conn.connected(), "components": conn.components.len() }),
    ));
    Ok(points.len())
}

fn transitivity_check(rel: &BoolMatrix, n: usize, labels: Option<&[String]>) -> Check {
    let report = check_n_transitive(rel, n);
    let chain_labels = match (labels, &report.counterexample) {
        (Some(l), Some(c)) => Some(c.iter().map(|&i| l[i].clone()).collect::<Vec<_>>()),
        _ => None,
    };
    Check::new(
        "n_transitive",
        usize::from(!report.passes),
        json!({ "n": n, "passes": report.passes, "counterexample": report.counterexample, "counterexample_labels": chain_labels }),
    )
}

fn verify_relation(cfg: &ProblemConfig, checks: &mut Vec<Check>) -> Result<usize> {
    let Some(AlphaSpec::RelationMatrix { path }) = &cfg.alpha else {
        unreachable!("caller matched a relation matrix");
    };
    let (labels, rel) = load_relation(&cfg.resolve(path))?;
    checks.push(transitivity_check(&rel, cfg.transitivity_n.unwrap_or(1), Some(&labels)));
    checks.push(Check::info(
        "relation_properties",
        json!({
            "reflexive": rel.is_reflexive(),
            "antisymmetric": rel.is_antisymmetric(),
            "transitive": rel.is_transitive(),
            "partial_order": rel.is_partial_order(),
        }),
    ));
    Ok(labels.len())
}

fn verify_coupled(cfg: &ProblemConfig, checks: &mut Vec<Check>) -> Result<usize> {
    let f = coupled_map(cfg)?;
    let points = match cfg.sample {
        Some(_) => cfg.sample_points()?,
        None => {
            (0..DEFAULT_COUPLED_SAMPLE).map(|k| -1.0 + 2.0 * k as f64 / (DEFAULT_COUPLED_SAMPLE - 1) as f64).collect()
        }
    };
    real_space(points.clone())?;
    let alpha0 = real_alpha(cfg)?.unwrap_or_else(|| Box::new(ConstantAlpha(1.0)));
    let beta = BetaAlpha(PairAlpha(AlphaRef(&*alpha0)));
    let lifted = LiftedMap(CoupledRef(&*f));
    let space = SampledSpace::trusted(all_pairs(&points), ProductMetric(RealLine))?;

    let strict = check_strict_contraction(&space, &lifted, &beta)?;
    checks.push(Check::new("strict_contraction", strict.len(), json!({ "violations": strict })));
    let mk = probe_meir_keeler(&space, &lifted, &beta, &epsilon_grid(cfg, &space))?;
    checks.push(Check::new(
        "meir_keeler",
        mk.violations.len(),
        json!({ "violated_epsilons": mk.violated_epsilons(), "probe": mk }),
    ));
    if let Some(AlphaSpec::Order { direction }) = &cfg.alpha {
        let v = match direction {
            OrderDirection::Le => mixed_monotone_check(&*f, &RealOrder, &points),
            OrderDirection::Ge => mixed_monotone_check(&*f, &ReverseRealOrder, &points),
        };
        checks.push(Check::new("mixed_monotone", v.len(), json!({ "violations": v })));
    }
    Ok(space.len())
}

fn verify_bvp(cfg: &ProblemConfig, checks: &mut Vec<Check>) -> Result<usize> {
    let f = source_fn(cfg)?;
    let (grid, quad) = bvp_grid(cfg)?;
    let phi = GaugeFunction::linear(cfg.bvp.gauge_slope);
    let xi = comparator(cfg.bvp.comparator);
    let reals = cfg.sample_points()?;
    let space = real_space(reals.clone())?;

    let ts = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut triples = Vec::new();
    for &t in &ts {
        for &a in &reals {
            for &b in &reals {
                triples.push((t, a, b));
            }
        }
    }
    let k1 = check_k1(&*f, &phi, &triples);
    checks.push(Check::new(
        "k1",
        k1.len(),
        json!({ "scope": SAMPLE_LEVEL, "caveat": MEASURE_ZERO_CAVEAT, "violations": k1 }),
    ));
    let j2 = check_j2(&*f, &xi, &phi, &triples);
    checks.push(Check::new(
        "j2",
        j2.len(),
        json!({ "scope": SAMPLE_LEVEL, "caveat": MEASURE_ZERO_CAVEAT, "violations": j2 }),
    ));

    let eps = epsilon_grid(cfg, &space);
    let us: Vec<f64> = (0..space.len())
        .flat_map(|i| (0..space.len()).map(move |j| (i, j)))
        .map(|(i, j)| space.distance(i, j))
        .collect();
    let gauge = gauge_mk_check(&phi, &eps, &us);
    let gauge_violations = gauge.violations.len() + usize::from(!gauge.nondecreasing);
    checks.push(Check::new("gauge", gauge_violations, to_json(&gauge)));

    let j1 = check_j1(&xi, &reals, cfg.transitivity_n.unwrap_or(1));
    checks.push(Check::new("j1", usize::from(!j1.passes), json!({ "scope": SAMPLE_LEVEL, "report": j1 })));

    let op = IntegralOperator::new(&*f, grid, quad);
    let candidates = vec![
        GridFunction::zeros(grid),
        GridFunction::from_fn(grid, row_integral_exact),
        GridFunction::from_fn(grid, |t| t * (1.0 - t)),
        GridFunction::from_fn(grid, |t| -t * (1.0 - t)),
        GridFunction::from_fn(grid, |t| (std::f64::consts::PI * t).sin() / 10.0),
    ];
    let j3 = check_j3(&xi, &op, &candidates)?;
    checks.push(Check::new("j3", j3.violations.len(), to_json(&j3)));
    let j4 = check_j4(&xi, &op, &candidates)?;
    checks.push(Check::new("j4", usize::from(!j4.holds()), to_json(&j4)));
    let j5 = check_j5(&xi, &candidates)?;
    let unchained = j5.links.iter().filter(|l| l.2.is_none()).count();
    checks.push(Check::new("j5", unchained, to_json(&j5)));
    Ok(reals.len())
}

fn comparator(preset: ComparatorPreset) -> ComparatorFunction {
    match preset {
        ComparatorPreset::Forward => ComparatorFunction::forward(),
        ComparatorPreset::Reverse => ComparatorFunction::reverse(),
    }
}

fn bvp_grid(cfg: &ProblemConfig) -> Result<(UniformGrid, QuadratureSpec)> {
    let grid = UniformGrid::with_nodes(cfg.bvp.grid_nodes).map_err(|e| Error::Format(e.to_string()))?;
    let quad = QuadratureSpec::new(cfg.bvp.quadrature_subintervals.unwrap_or(grid.intervals()))
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok((grid, quad))
}

fn iteration_config<P>(cfg: &ProblemConfig, start: P) -> IterationConfig<P> {
    IterationConfig::new(start)
        .with_tolerance(cfg.iteration.tolerance)
        .with_max_iterations(cfg.iteration.max_iterations)
        .with_cauchy_window(cfg.iteration.cauchy_window)
}

/// What a solver produced, before it is written out.
struct Solved {
    status: Option<Status>,
    rows: Vec<TraceRow>,
    diagnostics: Option<Diagnostics>,
    result: Value,
    error: Option<String>,
    solution: Option<GridFunction>,
}

impl Solved {
    fn from_outcome<P: PointRepr>(
        outcome: std::result::Result<FixedPointResult<P>, IterationFailure<P>>,
        slack: Slack,
        result: impl FnOnce(&FixedPointResult<P>) -> Value,
    ) -> Self {
        match outcome {
            Ok(res) => {
                let verdict = residual_monotone(&res.trace.residuals, slack).ok();
                Solved {
                    status: Some(res.status()),
                    rows: trace_rows(&res.trace),
                    diagnostics: Some(Diagnostics {
                        iterations: res.iterations,
                        residual: res.residual,
                        residual_monotone: verdict.as_ref().map(|v| v.pass),
                        first_offending: verdict.and_then(|v| v.first_offending),
                        rate_estimate: rate_estimate(&res.trace.residuals),
                        orbital: res.trace.orbital(),
                    }),
                    result: result(&res),
                    error: None,
                    solution: None,
                }
            }
            Err(fail) => Solved {
                status: Some(fail.trace.status),
                rows: trace_rows(&fail.trace),
                diagnostics: None,
                result: Value::Null,
                error: Some(fail.error.to_string()),
                solution: None,
            },
        }
    }
}

/// Runs the solver for the problem kind and writes `trace.csv`,
/// `report.json` and, for boundary value problems, `solution.csv`.
pub fn cmd_solve(cfg: &ProblemConfig, out: Option<&Path>) -> Result<SolveReport> {
    let slack = slack_for(cfg);
    let solved = match cfg.kind {
        ProblemKind::FixedPoint | ProblemKind::Verify => {
            let map = real_map(cfg)?;
            let icfg = iteration_config(cfg, cfg.real_start()?);
            let outcome = match real_alpha(cfg)? {
                Some(alpha) => iterate_with_alpha(&*map, &RealLine, &alpha, &icfg),
                None => iterate(&*map, &RealLine, &icfg),
            };
            Solved::from_outcome(outcome, slack, |r| json!({ "point": r.point }))
        }
        ProblemKind::Coupled => solve_coupled_kind(cfg, slack)?,
        ProblemKind::Cyclic => solve_cyclic_kind(cfg, slack)?,
        ProblemKind::Bvp => solve_bvp_kind(cfg, slack)?,
    };

    let dir = output_dir(cfg, out);
    create_dir(&dir)?;
    let trace_path = dir.join(TRACE_FILE);
    let file =
        std::fs::File::create(&trace_path).map_err(|e| Error::Format(format!("{}: {e}", trace_path.display())))?;
    write_trace(&solved.rows, file)?;
    let solution_file = match &solved.solution {
        Some(sol) => {
            sol.save(&dir.join(SOLUTION_FILE))?;
            Some(SOLUTION_FILE.to_string())
        }
        None => None,
    };
    let exit_code = match (&solved.error, solved.status) {
        (Some(_), _) => EXIT_ERROR,
        (None, Some(Status::Converged)) => EXIT_OK,
        (None, _) => EXIT_VIOLATION,
    };
    let report = SolveReport {
        command: "solve",
        kind: cfg.kind,
        status: solved.status,
        exit_code,
        settings: Settings::of(cfg),
        diagnostics: solved.diagnostics,
        result: solved.result,
        error: solved.error,
        trace_file: TRACE_FILE.to_string(),
        solution_file,
    };
    write_json(&dir.join(SOLVE_REPORT_FILE), &report)?;
    Ok(report)
}

fn solve_coupled_kind(cfg: &ProblemConfig, slack: Slack) -> Result<Solved> {
    let f = coupled_map(cfg)?;
    let icfg = iteration_config(cfg, cfg.pair_start()?);
    let alpha0 = real_alpha(cfg)?;
    let pair_alpha = alpha0.as_ref().map(|a| PairAlpha(AlphaRef(&**a)));
    let dyn_alpha = pair_alpha.as_ref().map(|a| a as &dyn Alpha<(f64, f64)>);
    Ok(match solve_coupled(&*f, &RealLine, dyn_alpha, &icfg) {
        Ok(c) => {
            let result = json!({
                "x_star": c.x_star,
                "y_star": c.y_star,
                "diagonal": c.diagonal,
                "coupled_residuals": [c.coupled_residuals.0, c.coupled_residuals.1],
                "start_condition": c.start_condition,
                "regular_indices": c.regular_indices.as_ref().map(Vec::len),
            });
            Solved::from_outcome(Ok(c.result), slack, |_| result)
        }
        Err(fail) => Solved::from_outcome(Err(fail), slack, |_| Value::Null),
    })
}

fn solve_cyclic_kind(cfg: &ProblemConfig, slack: Slack) -> Result<Solved> {
    let map = real_map(cfg)?;
    let family = cyclic_family(cfg)?.ok_or_else(|| Error::Format("a cyclic problem needs a cyclic alpha".into()))?;
    let icfg = iteration_config(cfg, cfg.real_start()?);
    Ok(match solve_cyclic(&*map, &RealLine, &family, &icfg) {
        Ok(c) => {
            let mut orbit: Vec<f64> = c.result.trace.iterates.iter().rev().take(ORBIT_PROBE_CAP).copied().collect();
            orbit.sort_by(f64::total_cmp);
            orbit.dedup();
            let probe = if orbit.len() >= 2 {
                let space = SampledSpace::real(orbit)?;
                let report =
                    probe_meir_keeler(&space, &*map, &family.alpha(), &default_epsilon_grid(&space, cfg.epsilon_cap))?;
                json!({ "violated": report.violated(), "violated_epsilons": report.violated_epsilons() })
            } else {
                Value::Null
            };
            let result = json!({
                "point": c.result.point,
                "membership": c.membership,
                "in_intersection": c.in_intersection,
                "follows_rotation": c.follows_rotation,
                "orbit_sets": c.orbit_sets,
                "invariance_violations": c.invariance_violations,
                "caveat": c.caveat(),
                "orbit_meir_keeler": probe,
            });
            Solved::from_outcome(Ok(c.result), slack, |_| result)
        }
        Err(fail) => Solved::from_outcome(Err(fail), slack, |_| Value::Null),
    })
}

fn solve_bvp_kind(cfg: &ProblemConfig, slack: Slack) -> Result<Solved> {
    let f = source_fn(cfg)?;
    let (grid, quad) = bvp_grid(cfg)?;
    let start = match &cfg.bvp.start_path {
        Some(path) => GridFunction::load(&cfg.resolve(path))?,
        None => GridFunction::zeros(grid),
    };
    if start.grid() != &grid {
        return Err(Error::Format("start function grid differs from bvp.grid_nodes".into()));
    }
    let icfg = iteration_config(cfg, start);
    Ok(match solve_bvp(&*f, &grid, &quad, &icfg) {
        Ok(sol) => {
            let result = to_json(&sol.report);
            let point = sol.result.point.clone();
            let mut solved = Solved::from_outcome(Ok(sol.result), slack, |_| result);
            solved.solution = Some(point);
            solved
        }
        Err(fail) => Solved::from_outcome(Err(fail), slack, |_| Value::Null),
    })
}

/// Human-readable summary of a trace file.
pub fn cmd_report(path: &Path) -> Result<String> {
    let file = std::fs::File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let rows = read_trace(file)?;
    let residuals: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let last = rows.last().expect("read_trace rejects empty traces");
    let monotone = match residual_monotone(&residuals, FLOAT_SLACK) {
        Ok(v) if v.pass => "pass".to_string(),
        Ok(v) => format!("fail at index {}", v.first_offending.expect("failing verdicts name an index")),
        Err(_) => "n/a".to_string(),
    };
    let rate = rate_estimate(&residuals).map_or("n/a".to_string(), |r| format!("{r:.6}"));
    let alpha = match rows.iter().filter_map(|r| r.alpha_ok).collect::<Vec<_>>() {
        flags if flags.is_empty() => "n/a".to_string(),
        flags => format!("{}/{} steps admitted", flags.iter().filter(|b| **b).count(), flags.len()),
    };
    Ok(format!(
        "trace: {}\nsteps: {}\nfinal residual: {:e}\nlast point: {}\nresidual monotone: {monotone}\nrate estimate: {rate}\nalpha: {alpha}\n",
        path.display(),
        rows.len(),
        last.residual,
        last.point_repr,
    ))
}

impl SolveReport {
    pub fn residual_history(&self) -> Option<Vec<f64>> {
        self.result.get("residual_history").and_then(|v| serde_json::from_value(v.clone()).ok())
    }
}
