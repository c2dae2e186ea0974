//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Every expected value is computed here,
//! independently of the library code under test.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mkfix::alpha::{Alpha, ConstantAlpha, CyclicFamily, ExponentialAlpha, DEFAULT_BOUNDARY_TOLERANCE};
use mkfix::bvp::{kernel_row_integral, solve_bvp, GridFunction, QuadratureSpec, UniformGrid};
use mkfix::map::{CoupledMap, CoupledRef, TabulatedCoupledMap, TabulatedMap};
use mkfix::metric::{DistanceMatrix, RealLine, SampledSpace};
use mkfix::picard::{iterate, residual_monotone, IterationConfig, Slack, Status};
use mkfix::reductions::{alpha_from_alpha0, beta_from_alpha, s_compose, solve_coupled, solve_cyclic, Projection};
use mkfix::relation::BoolMatrix;
use mkfix::verify::{
    check_n_transitive, check_strict_contraction, default_epsilon_grid, probe_meir_keeler, DEFAULT_EPSILON_CAP,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SQRT3_OVER_27: f64 = 0.064_150_029_909_958_41;

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("row integral reproduction", criterion_1),
        ("bvp with unit source", criterion_2),
        ("bvp with linear source against dense solve", criterion_3),
        ("meir-keeler falsifier", criterion_4),
        ("n-transitivity", criterion_5),
        ("coupled solver", criterion_6),
        ("cyclic solver", criterion_7),
        ("residual monotonicity on tabulated contractions", criterion_8),
        ("s-composition laws", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn node(i: usize, m: usize) -> f64 {
    i as f64 / m as f64
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let quad = QuadratureSpec::new(200).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..=200 {
        let t = node(i, 200);
        let v = kernel_row_integral(t, &quad).map_err(|e| e.to_string())?;
        worst = worst.max((v - (t - t * t * t) / 6.0).abs());
        if v > best.1 {
            best = (t, v);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let max_gap = (best.1 - SQRT3_OVER_27).abs();
    let msg = format!(
        "node error {worst:.2e} (< 1e-10); grid max {:.10} at t = {} vs sqrt(3)/27 = {SQRT3_OVER_27:.10}, gap {max_gap:.3e} (< 1e-6); {elapsed:.3} s (< 1 s)",
        best.1, best.0
    );
    check(worst < 1e-10 && max_gap < 1e-6 && elapsed < 1.0, msg)
}

fn criterion_2() -> Outcome {
    let grid = UniformGrid::with_nodes(201).map_err(|e| e.to_string())?;
    let quad = QuadratureSpec::new(200).map_err(|e| e.to_string())?;
    let cfg = IterationConfig::new(GridFunction::zeros(grid));
    let sol = solve_bvp(|_, _| 1.0, &grid, &quad, &cfg).map_err(|f| f.error.to_string())?;
    let err = sol
        .result
        .point
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let t = node(i, 200);
            (v - (t - t * t * t) / 6.0).abs()
        })
        .fold(0.0, f64::max);
    let status = sol.result.status();
    check(
        status == Status::Converged && sol.result.iterations == 1 && err < 1e-10,
        format!("status {status:?}, {} iteration(s) (= 1), sup-node error {err:.2e} (< 1e-10)", sol.result.iterations),
    )
}

/// Green's kernel of `x''' + f = 0`, `x(0) = x(1) = x''(0) = 0`.
fn green(t: f64, s: f64) -> f64 {
    if s <= t {
        (1.0 - t) * (t - s * s) / 2.0
    } else {
        t * (1.0 - s).powi(2) / 2.0
    }
}

/// Composite Simpson nodes and weights on `[a, b]` with `n` (even) subintervals.
fn simpson_nodes(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|k| {
            let c = match k {
                0 => 1.0,
                k if k == n => 1.0,
                k if k % 2 == 1 => 4.0,
                _ => 2.0,
            };
            let s = if k == n { b } else { a + k as f64 * h };
            (s, c * h / 3.0)
        })
        .collect()
}

/// Cubic Lagrange basis values at `s` on the 4-node stencil around its cell.
fn lagrange(m: usize, s: f64) -> Vec<(usize, f64)> {
    let pos = s * m as f64;
    if (pos - pos.round()).abs() < 1e-9 {
        return vec![(pos.round() as usize, 1.0)];
    }
    let cell = (pos.floor() as usize).min(m - 1);
    let first = cell.saturating_sub(1).min(m - 3);
    let idx: Vec<usize> = (first..first + 4).collect();
    idx.iter()
        .map(|&j| {
            let mut l = 1.0;
            for &k in &idx {
                if k != j {
                    l *= (s - node(k, m)) / (node(j, m) - node(k, m));
                }
            }
            (j, l)
        })
        .collect()
}

/// Node-wise kernel matrix: Simpson split at `s = t_i` with a subinterval
/// density of `m` per unit length, source interpolated by cubic Lagrange.
fn kernel_matrix(m: usize) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(m + 1, m + 1);
    for i in 1..m {
        let t = node(i, m);
        for (a, b) in [(0.0, t), (t, 1.0)] {
            let mut n = ((b - a) * m as f64 - 1e-9).ceil().max(2.0) as usize;
            n += n % 2;
            for (s, w) in simpson_nodes(a, b, n) {
                for (j, l) in lagrange(m, s) {
                    k[(i, j)] += w * green(t, s) * l;
                }
            }
        }
    }
    k
}

fn criterion_3() -> Outcome {
    let m = 200;
    let k = kernel_matrix(m);
    let rows = &k * DVector::from_element(m + 1, 1.0);
    let system = DMatrix::identity(m + 1, m + 1) - &k * 9.0;
    let oracle = system.lu().solve(&rows).ok_or("dense system is singular")?;

    let grid = UniformGrid::with_nodes(m + 1).map_err(|e| e.to_string())?;
    let quad = QuadratureSpec::new(m).map_err(|e| e.to_string())?;
    let cfg = IterationConfig::new(GridFunction::zeros(grid));
    let sol = solve_bvp(|_, x| 9.0 * x + 1.0, &grid, &quad, &cfg).map_err(|f| f.error.to_string())?;
    let gap = sol.result.point.values().iter().zip(oracle.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let r = &sol.result.trace.residuals;
    let tail: Vec<f64> = r.windows(2).filter(|w| w[0] > 0.0 && w[1] > 0.0).map(|w| w[1] / w[0]).collect();
    let last: Vec<f64> = tail.iter().rev().take(5).copied().collect();
    let ratio = last.iter().sum::<f64>() / last.len().max(1) as f64;
    let target = 9.0 * SQRT3_OVER_27;
    let ratio_ok = !last.is_empty() && (ratio - target).abs() <= 0.1 * target;
    check(
        sol.result.converged() && gap < 1e-8 && ratio_ok,
        format!(
            "status {:?}; sup-node gap to dense solve {gap:.2e} (< 1e-8); successive-residual ratio {ratio:.4} vs 9 sqrt(3)/27 = {target:.4} (within 10%: {ratio_ok})",
            sol.result.status()
        ),
    )
}

fn criterion_4() -> Outcome {
    // Dyadic points keep every distance and image distance exact.
    let mut points: Vec<f64> = (0..999).map(|k| k as f64 * 4.0 / 1024.0).collect();
    points.push(4.0);
    let space = SampledSpace::real(points).map_err(|e| e.to_string())?;
    let grid = default_epsilon_grid(&space, DEFAULT_EPSILON_CAP);
    let one = ConstantAlpha(1.0);

    let shift = probe_meir_keeler(&space, &|x: &f64| x + 1.0, &one, &grid).map_err(|e| e.to_string())?;
    let flagged = shift.violated_epsilons();
    let first_flagged = flagged.first() == grid.first();

    let half = probe_meir_keeler(&space, &|x: &f64| x / 2.0, &one, &grid).map_err(|e| e.to_string())?;
    let short =
        grid.iter().zip(&half.delta_estimates).filter(|(eps, d)| !matches!(d, Some(delta) if *delta >= **eps)).count();
    check(
        first_flagged && half.violations.is_empty() && short == 0,
        format!(
            "x+1 flagged at {}/{} epsilons, first at {:?}; x/2 has {} violations and {short} epsilons with delta < epsilon ({} points, {} epsilons)",
            flagged.len(),
            grid.len(),
            flagged.first(),
            half.violations.len(),
            space.len(),
            grid.len()
        ),
    )
}

/// Every tuple `x_0 .. x_{N+1}` with related links has related endpoints.
fn brute_n_transitive(rel: &[Vec<bool>], n: usize) -> bool {
    let size = rel.len();
    let mut tuple = vec![0usize; n + 2];
    loop {
        if tuple.windows(2).all(|w| rel[w[0]][w[1]]) && !rel[tuple[0]][tuple[n + 1]] {
            return false;
        }
        let mut k = 0;
        loop {
            if k == tuple.len() {
                return true;
            }
            tuple[k] += 1;
            if tuple[k] < size {
                break;
            }
            tuple[k] = 0;
            k += 1;
        }
    }
}

fn valid_counterexample(rel: &[Vec<bool>], n: usize, chain: &[usize]) -> bool {
    chain.len() == n + 2 && chain.windows(2).all(|w| rel[w[0]][w[1]]) && !rel[chain[0]][chain[n + 1]]
}

fn agree(rows: &[Vec<bool>], n: usize) -> bool {
    let report = check_n_transitive(&BoolMatrix::from_rows(rows).expect("square"), n);
    let brute = brute_n_transitive(rows, n);
    report.passes == brute && report.counterexample.as_deref().is_none_or(|c| valid_counterexample(rows, n, c))
}

fn criterion_5() -> Outcome {
    let family =
        CyclicFamily::intervals(&[(-1.0, 0.0), (0.0, 1.0)], DEFAULT_BOUNDARY_TOLERANCE).map_err(|e| e.to_string())?;
    let alpha = family.alpha();
    // The shared point 0 is left out: it relates to everything and makes
    // chains through it escape the rotation.
    let sample = [-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0];
    let rel = BoolMatrix::materialize(&|x: &f64, y: &f64| alpha.admits(x, y), &sample);
    let two = check_n_transitive(&rel, 2);
    let one = check_n_transitive(&rel, 1);
    let chain_len = one.counterexample.as_ref().map_or(0, Vec::len);

    let mut cases = 0usize;
    let mut disagreements = 0usize;
    for size in 1..=3usize {
        for bits in 0u32..1 << (size * size) {
            let rows: Vec<Vec<bool>> =
                (0..size).map(|i| (0..size).map(|j| bits >> (i * size + j) & 1 == 1).collect()).collect();
            for n in 1..=3 {
                cases += 1;
                disagreements += usize::from(!agree(&rows, n));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let size = rng.gen_range(1..=5usize);
        let density = rng.gen_range(0.1..0.9);
        let rows: Vec<Vec<bool>> = (0..size).map(|_| (0..size).map(|_| rng.gen_bool(density)).collect()).collect();
        let n = rng.gen_range(1..=3);
        cases += 1;
        disagreements += usize::from(!agree(&rows, n));
    }
    check(
        two.passes && !one.passes && chain_len == 3 && disagreements == 0,
        format!(
            "cyclic indicator: N=2 passes {}, N=1 passes {} with chain {:?}; {disagreements} disagreements with tuple enumeration over {cases} cases",
            two.passes, one.passes, one.counterexample
        ),
    )
}

fn criterion_6() -> Outcome {
    let f = |x: &f64, y: &f64| (x - y) / 4.0;
    let one = ConstantAlpha(1.0);
    let pair = alpha_from_alpha0(one);
    let cfg = IterationConfig::new((1.0, 3.0));
    let res = solve_coupled(&f, &RealLine, Some(&pair), &cfg).map_err(|e| e.error.to_string())?;
    let dist = (res.x_star.abs() + res.y_star.abs()) / 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let table: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..2.0)).collect();
    let bucket = |x: f64| ((x + 4.0) * 8.0).clamp(0.0, 63.0) as usize;
    let tabled = |x: &f64, y: &f64| table[(bucket(*x) + 7 * bucket(*y)) % 64];
    let mut mismatches = 0;
    for _ in 0..1000 {
        let mut p = || (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let (a, b) = (p(), p());
        let exp = (
            beta_from_alpha(alpha_from_alpha0(ExponentialAlpha)).eval(&a, &b),
            alpha_from_alpha0(ExponentialAlpha).eval(&a, &b),
        );
        let tab = (beta_from_alpha(alpha_from_alpha0(tabled)).eval(&a, &b), alpha_from_alpha0(tabled).eval(&a, &b));
        mismatches += usize::from(exp.0 != exp.1) + usize::from(tab.0 != tab.1);
    }
    check(
        res.result.converged() && dist < 1e-10 && res.diagonal && mismatches == 0,
        format!(
            "limit ({:e}, {:e}) at product distance {dist:.2e} from (0, 0) (< 1e-10), diagonal {}; {mismatches} beta mismatches over 1000 pair-pairs",
            res.x_star, res.y_star, res.diagonal
        ),
    )
}

fn criterion_7() -> Outcome {
    let family =
        CyclicFamily::intervals(&[(-1.0, 0.0), (0.0, 1.0)], DEFAULT_BOUNDARY_TOLERANCE).map_err(|e| e.to_string())?;
    let res = solve_cyclic(&|x: &f64| -x / 2.0, &RealLine, &family, &IterationConfig::new(-1.0))
        .map_err(|e| e.error.to_string())?;
    let point = res.result.point;
    let alternates = res.result.trace.iterates.iter().enumerate().all(|(n, x)| {
        let expected = if n % 2 == 0 { *x < 0.0 && *x >= -1.0 } else { *x > 0.0 && *x <= 1.0 };
        expected && res.orbit_sets[n] == vec![n % 2]
    });
    check(
        res.result.converged() && point.abs() < 1e-10 && res.membership == vec![true, true] && alternates,
        format!(
            "|x*| = {:.2e} (< 1e-10), membership {:?}, orbit of {} iterates alternates A1, A2: {alternates}",
            point.abs(),
            res.membership,
            res.result.trace.iterates.len()
        ),
    )
}

/// A random tree on `0..n` rooted at a single fixed point, with the
/// ultrametric `d(i, j) = max(w_i, w_j)` where `w` drops strictly along
/// every edge. Every such map is a strict contraction.
fn random_contraction(rng: &mut ChaCha8Rng) -> (TabulatedMap, DistanceMatrix, usize) {
    let n = rng.gen_range(2..=200usize);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let root = order[0];
    let mut parent = vec![root; n];
    let mut depth = vec![0usize; n];
    for k in 1..n {
        let p = order[rng.gen_range(0..k)];
        parent[order[k]] = p;
        depth[order[k]] = depth[p] + 1;
    }
    let w: Vec<f64> = depth.iter().map(|&d| d as f64 + 1.0 + rng.gen_range(0.0..1.0)).collect();
    let entries = (0..n * n).map(|k| if k / n == k % n { 0.0 } else { w[k / n].max(w[k % n]) }).collect();
    (TabulatedMap::new(parent).expect("parents in range"), DistanceMatrix::new(n, entries).expect("square"), root)
}

/// Fixed points on the eventual cycle of the orbit from `start`.
fn reachable_fixed_points(images: &[usize], start: usize) -> Vec<usize> {
    let mut seen = vec![false; images.len()];
    let mut x = start;
    while !seen[x] {
        seen[x] = true;
        x = images[x];
    }
    if images[x] == x {
        vec![x]
    } else {
        Vec::new()
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let mut steps = 0;
    for case in 0..100 {
        let (map, metric, _) = random_contraction(&mut rng);
        let n = map.len();
        let space = SampledSpace::trusted((0..n).collect(), &metric).map_err(|e| e.to_string())?;
        if !check_strict_contraction(&space, &map, &ConstantAlpha(1.0)).map_err(|e| e.to_string())?.is_empty() {
            failures.push(format!("case {case}: generator produced a non-contraction"));
            continue;
        }
        let start = rng.gen_range(0..n);
        let res = iterate(&map, &metric, &IterationConfig::new(start)).map_err(|e| e.error.to_string())?;
        let r = &res.trace.residuals;
        steps += r.len();
        let monotone = r.len() < 2 || residual_monotone(r, Slack::Exact).map_err(|e| e.to_string())?.pass;
        if !monotone {
            failures.push(format!("case {case}: residuals not monotone"));
        }
        if !res.converged() || reachable_fixed_points(map.images(), start) != vec![res.point] {
            failures.push(format!("case {case}: iterate returned {} ({:?})", res.point, res.status()));
        }
    }
    check(failures.is_empty(), format!("100 maps, {steps} residuals checked; failures: {failures:?}"))
}

fn random_coupled(rng: &mut ChaCha8Rng, n: usize) -> TabulatedCoupledMap {
    TabulatedCoupledMap::new(n, (0..n * n).map(|_| rng.gen_range(0..n)).collect()).expect("valid table")
}

fn same_on<A: CoupledMap<usize>, B: CoupledMap<usize>>(a: &A, b: &B, n: usize) -> bool {
    (0..n).all(|x| (0..n).all(|y| a.apply(&x, &y) == b.apply(&x, &y)))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut identity_fail, mut assoc_fail) = (0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=20usize);
        let (f, g, h) = (random_coupled(&mut rng, n), random_coupled(&mut rng, n), random_coupled(&mut rng, n));
        if !(same_on(&s_compose(CoupledRef(&f), Projection), &f, n)
            && same_on(&s_compose(Projection, CoupledRef(&f)), &f, n))
        {
            identity_fail += 1;
        }
        if !same_on(
            &s_compose(s_compose(CoupledRef(&h), CoupledRef(&g)), CoupledRef(&f)),
            &s_compose(CoupledRef(&h), s_compose(CoupledRef(&g), CoupledRef(&f))),
            n,
        ) {
            assoc_fail += 1;
        }
    }
    check(
        identity_fail == 0 && assoc_fail == 0,
        format!("1000 random maps: {identity_fail} identity failures, {assoc_fail} associativity failures"),
    )
}
