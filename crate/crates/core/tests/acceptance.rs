//! Acceptance suite. Runs every criterion and prints one line per criterion.
//!
//! ```text
//! cargo test -p sigtensor --test acceptance                  # AC1..AC8
//! cargo test -p sigtensor --test acceptance -- --ignored     # adds d = 50
//! cargo test -p sigtensor --test acceptance -- ac2 ac8       # by name
//! ```
//!
//! Exits non-zero if any selected criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use rayon::prelude::*;
use sigtensor::bench::{run_bench, run_trial, trial_seed, BenchConfig};
use sigtensor::chen::PiecewiseLinearPath;
use sigtensor::recovery::{up_three, up_two};
use sigtensor::{
    recover, AntisymSystem, ExactScalar, GaussOp, Matrix, RecoveryConfig, RecoveryTrace, StepRole,
    Tensor3,
};

type Check = Result<String, String>;

struct Criterion {
    id: &'static str,
    name: &'static str,
    opt_in: bool,
    run: fn() -> Check,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: "AC1", name: "worked example", opt_in: false, run: ac1 },
    Criterion { id: "AC2", name: "round trip d=2..12", opt_in: false, run: ac2 },
    Criterion { id: "AC3", name: "degenerate branches", opt_in: false, run: ac3 },
    Criterion { id: "AC4", name: "signature oracle", opt_in: false, run: ac4 },
    Criterion { id: "AC5", name: "linear-system rank and solvability", opt_in: false, run: ac5 },
    Criterion { id: "AC6a", name: "multiplication-count slope", opt_in: false, run: ac6a },
    Criterion { id: "AC6b", name: "d=25 wall clock", opt_in: false, run: ac6b },
    Criterion { id: "AC6c", name: "d=50 long run", opt_in: true, run: ac6c },
    Criterion { id: "AC7", name: "structured vs dense action", opt_in: false, run: ac7 },
    Criterion { id: "AC8", name: "loop invariants", opt_in: false, run: ac8 },
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let opt_in = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    let only_opt_in = args.iter().any(|a| a == "--ignored");
    let filters: Vec<String> = args
        .iter()
        .filter(|a| !a.starts_with('-'))
        .map(|a| a.to_lowercase())
        .collect();

    let selected: Vec<&Criterion> = CRITERIA
        .iter()
        .filter(|c| filters.is_empty() || filters.iter().any(|f| c.id.to_lowercase().contains(f.as_str())))
        .filter(|c| if only_opt_in { c.opt_in } else { !c.opt_in || opt_in })
        .collect();

    let mut failed = 0;
    for c in &selected {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("{} {}: PASS ({detail}) [{secs:.1} s]", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("{} {}: FAIL ({detail}) [{secs:.1} s]", c.id, c.name);
            }
        }
    }
    let skipped = CRITERIA.len() - selected.len();
    println!(
        "\nacceptance: {} passed, {failed} failed, {skipped} not selected",
        selected.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ac1() -> Check {
    let start = Instant::now();
    let g = input_g();
    let a = recovered_a();
    ensure(Tensor3::core(4).congruence(&a).unwrap() == g, || "input is not A * C".into())?;
    let rec = recover(&g, &RecoveryConfig::default()).map_err(|e| e.to_string())?;
    ensure(rec.matrix == a, || format!("recovered\n{}", rec.matrix))?;
    ensure(rec.trace.total_retries() == 0, || "unexpected retries".into())?;

    // Every intermediate must show up, in order, while replaying the trace.
    let checkpoints = [
        ("first upper step", h_step1()),
        ("first lower/diagonal step", g_step1()),
        ("G'", g_prime()),
        ("G''", g_double_prime()),
        ("second upper step", h_step2()),
        ("core tensor", Tensor3::core(4)),
    ];
    let mut t = g.clone();
    let mut next = 0;
    for step in &rec.trace.steps {
        step.op.apply_in_place(&mut t).unwrap();
        if next < checkpoints.len() && t == checkpoints[next].1 {
            next += 1;
        }
    }
    ensure(next == checkpoints.len(), || format!("checkpoint {:?} not reached", checkpoints[next].0))?;

    let sys = AntisymSystem::build_reduced(&g, 1);
    let m = Matrix::from_i64_rows(&[[-12, -9, -15], [9, 6, 12], [9, 9, 12]]).unwrap();
    ensure(sys.matrix == m, || format!("system matrix\n{}", sys.matrix))?;
    ensure(sys.rhs == vec![q(-12), q(9), q(9)], || "system right-hand side".into())?;

    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("A exact, {} checkpoints, {} ms", checkpoints.len(), elapsed.as_millis()))
}

struct SuiteRun {
    dim: usize,
    input: Tensor3,
    trace: RecoveryTrace,
}

/// Suite 2: 50 seeded invertible A per d in 2..=12, entries in [-3, 3].
fn suite_two() -> &'static Result<Vec<SuiteRun>, String> {
    static RUNS: OnceLock<Result<Vec<SuiteRun>, String>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let jobs: Vec<(usize, u64)> = (2..=12).flat_map(|d| (0..50).map(move |t| (d, t))).collect();
        jobs.par_iter()
            .map(|&(d, t)| {
                let a = random_gl(d, 3, 1_000 * d as u64 + t);
                let g = Tensor3::core(d).congruence(&a).unwrap();
                let rec = recover(&g, &RecoveryConfig::with_seed(t))
                    .map_err(|e| format!("d={d}, trial {t}: {e}"))?;
                if rec.matrix != a {
                    return Err(format!("d={d}, trial {t}: wrong matrix"));
                }
                Ok(SuiteRun { dim: d, input: g, trace: rec.trace })
            })
            .collect()
    })
}

fn ac2() -> Check {
    let runs = suite_two().as_ref()?;
    let retried = runs.iter().filter(|r| r.trace.total_retries() > 0).count();
    ensure(runs.len() == 550, || format!("{} runs", runs.len()))?;
    let max_d = runs.iter().map(|r| r.dim).max().unwrap_or(0);
    Ok(format!("{}/550 exact up to d={max_d}, {retried} with retries", runs.len()))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

fn permutation_matrix(p: &[usize]) -> Matrix {
    let mut m = Matrix::zeros(p.len(), p.len());
    for (i, &j) in p.iter().enumerate() {
        m.set(i + 1, j + 1, q(1));
    }
    m
}

fn exact_round_trip(a: &Matrix) -> Result<RecoveryTrace, String> {
    let g = Tensor3::core(a.rows()).congruence(a).unwrap();
    let rec = recover(&g, &RecoveryConfig::default()).map_err(|e| format!("{e} for\n{a}"))?;
    ensure(&rec.matrix == a, || format!("wrong matrix for\n{a}"))?;
    check_trace_invariants(&g, &rec.trace)?;
    Ok(rec.trace)
}

fn ac3() -> Check {
    // All permutation matrices, d <= 6.
    let perms: Vec<Vec<usize>> = (1..=6).flat_map(permutations).collect();
    let traces: Vec<RecoveryTrace> = perms
        .par_iter()
        .map(|p| exact_round_trip(&permutation_matrix(p)))
        .collect::<Result<_, _>>()?;
    let perm_retried = traces.iter().filter(|t| t.total_retries() > 0).count();

    // d = 2 with A_22 = 0 takes the swap branch.
    let mut swaps = 0;
    for (a11, b, c) in [(0, 1, 1), (3, 2, -1), (1, -3, 2), (-2, 1, -1), (0, -1, 1)] {
        let a = Matrix::from_i64_rows(&[[a11, b], [c, 0]]).unwrap();
        let g = Tensor3::core(2).congruence(&a).unwrap();
        ensure(matches!(up_two(&g), GaussOp::Perm { .. }), || format!("no swap for\n{a}"))?;
        let trace = exact_round_trip(&a)?;
        swaps += trace.steps.iter().filter(|s| matches!(s.op, GaussOp::Perm { .. })).count();
    }
    ensure(swaps >= 5, || format!("only {swaps} swaps observed"))?;

    // A = I_{d-3} ⊕ P: the three-dimensional step meets a zero denominator
    // for some P and must change coordinates.
    let mut zero_denominators = 0;
    let mut observed = 0;
    for d in 3..=6 {
        for p in permutations(3) {
            let mut full: Vec<usize> = (0..d - 3).collect();
            full.extend(p.iter().map(|&i| i + d - 3));
            let a = permutation_matrix(&full);
            let g = Tensor3::core(d).congruence(&a).unwrap();
            let step = up_three(&g, &RecoveryConfig::default(), &mut rng(d as u64)).map_err(|e| e.to_string())?;
            if step.retries > 0 {
                zero_denominators += 1;
                if step.ops.iter().any(|(role, _)| *role == StepRole::Random) {
                    observed += 1;
                }
            }
            let trace = exact_round_trip(&a)?;
            ensure(trace.retries.len() == d - 1, || "retry log length".into())?;
        }
    }
    ensure(zero_denominators > 0 && observed == zero_denominators, || {
        format!("{zero_denominators} zero denominators, {observed} visible in the trace")
    })?;
    Ok(format!(
        "{} permutations ({perm_retried} retried), {swaps} swaps, {zero_denominators} zero denominators recovered",
        perms.len()
    ))
}

fn rational_matrix(d: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    let a = random_gl(d, 4, seed);
    let entries = a
        .as_slice()
        .iter()
        .map(|x| x.checked_div(&ExactScalar::from(r.gen_range(1..=4))).unwrap())
        .collect();
    Matrix::new(d, d, entries).unwrap()
}

fn ac4() -> Check {
    let six = ExactScalar::from(6);
    for d in 1..=8 {
        let sig = PiecewiseLinearPath::unit_axis(d).signature();
        ensure(sig.level3.scale(&six) == Tensor3::core(d), || format!("axis path, d={d}"))?;
    }
    let mut checked = 0;
    for d in 1..=6 {
        for t in 0..20u64 {
            let a = rational_matrix(d, 1000 * d as u64 + t);
            let axis = PiecewiseLinearPath::unit_axis(d);
            let moved = PiecewiseLinearPath::from_columns(&a);
            let lhs = moved.signature().level3;
            let rhs = axis.signature().level3.congruence(&a).unwrap();
            ensure(lhs == rhs, || format!("equivariance, d={d}, trial {t}"))?;
            checked += 1;
        }
    }
    Ok(format!("core tensor d=1..8, equivariance on {checked} instances"))
}

fn ac5() -> Check {
    let mut elementary = 0;
    for d in 4..=10 {
        for s in 1..d - 2 {
            let mut e = Matrix::identity(d);
            e.set(d, s, q(1));
            let g = Tensor3::core(d).congruence(&e).unwrap();
            let rank = AntisymSystem::build(&g, s).rank();
            ensure(rank == d - s, || format!("(I + E_{{d,s}}) * C: rank {rank} at d={d}, s={s}"))?;
            elementary += 1;
        }
    }

    for t in 0..50u64 {
        let d = 5 + (t % 4) as usize;
        let s = 1 + (t as usize % (d - 3));
        let w = Matrix::random_invertible_seeded(d, s, 3, 7000 + t).unwrap();
        let g = Tensor3::core(d).congruence(&w).unwrap();
        let full = AntisymSystem::build(&g, s);
        let reduced = AntisymSystem::build_reduced(&g, s);
        ensure(full.solve() == reduced.solve(), || format!("reduced vs full, trial {t}"))?;
    }

    let counts: Vec<(usize, u64)> = (5..=10usize)
        .into_par_iter()
        .map(|d| (d, generic_full_rank_count(d, 100)))
        .collect();
    let worst = counts.iter().map(|&(_, c)| c).min().unwrap();
    ensure(worst >= 99, || format!("full-rank counts per d: {counts:?}"))?;
    Ok(format!(
        "{elementary} elementary cases, 50 reduced/full agreements, full rank >= {worst}/100 per d"
    ))
}

fn ac6a() -> Check {
    let cfg = BenchConfig {
        dims: vec![10, 20, 40],
        trials: 2,
        seed: 6,
        ..BenchConfig::default()
    };
    let (report, _) = run_bench(&cfg).map_err(|e| e.to_string())?;
    let slope = report.mul_count_slope.ok_or("no slope")?;
    let counts: Vec<String> = report
        .records
        .iter()
        .map(|r| format!("d={}: {:.3e}", r.dim, r.mean_mul_count))
        .collect();
    ensure(slope <= 4.5, || format!("slope {slope:.2} > 4.5; {}", counts.join(", ")))?;
    Ok(format!("slope {slope:.2} <= 4.5; {}", counts.join(", ")))
}

fn ac6b() -> Check {
    let rec = run_trial(25, 0, trial_seed(25, 25, 0), 3, &RecoveryConfig::default()).map_err(|e| e.to_string())?;
    ensure(rec.seconds < 600.0, || format!("{:.1} s", rec.seconds))?;
    Ok(format!("{:.1} s, {} multiplications", rec.seconds, rec.mul_count))
}

fn ac6c() -> Check {
    let rec = run_trial(50, 0, trial_seed(50, 50, 0), 3, &RecoveryConfig::default()).map_err(|e| e.to_string())?;
    Ok(format!("{:.1} s, {} multiplications, {} retries", rec.seconds, rec.mul_count, rec.retries))
}

fn random_scalar(r: &mut impl Rng) -> ExactScalar {
    ExactScalar::ratio(r.gen_range(-60..=60), r.gen_range(1..=12)).unwrap()
}

fn random_op(d: usize, r: &mut impl Rng) -> GaussOp {
    let s = r.gen_range(1..=d);
    match r.gen_range(0..5) {
        0 => GaussOp::Lower { pivot: s, coeffs: (s..d).map(|_| random_scalar(r)).collect() },
        1 => GaussOp::Upper { pivot: s, coeffs: (s..d).map(|_| random_scalar(r)).collect() },
        2 => loop {
            let root = random_scalar(r);
            if !root.is_zero() {
                break GaussOp::Diag { pivot: s, root };
            }
        },
        3 => GaussOp::Perm { pivot: s, target: r.gen_range(s..=d) },
        _ => GaussOp::General {
            pivot: s,
            matrix: Matrix::random_invertible(d, s, 3, r).unwrap(),
        },
    }
}

fn ac7() -> Check {
    let mut r = rng(7);
    let mut kinds = [0usize; 5];
    for n in 0..200 {
        let d = r.gen_range(1..=6);
        let op = random_op(d, &mut r);
        let entries = (0..d * d * d).map(|_| random_scalar(&mut r)).collect();
        let t = Tensor3::new(d, entries).unwrap();
        kinds[match op {
            GaussOp::Lower { .. } => 0,
            GaussOp::Upper { .. } => 1,
            GaussOp::Diag { .. } => 2,
            GaussOp::Perm { .. } => 3,
            GaussOp::General { .. } => 4,
        }] += 1;
        let dense = t.congruence(&op.to_matrix(d).unwrap()).unwrap();
        ensure(op.apply(&t).unwrap() == dense, || format!("pair {n}: {op:?}"))?;
        let mut inplace = t.clone();
        op.apply_in_place(&mut inplace).unwrap();
        ensure(inplace == dense, || format!("pair {n} in place: {op:?}"))?;
    }
    Ok(format!("200 pairs (lower/upper/diag/perm/general = {kinds:?})"))
}

fn ac8() -> Check {
    let runs = suite_two().as_ref()?;
    let checks: usize = runs
        .par_iter()
        .map(|run| {
            let n = check_trace_invariants(&run.input, &run.trace)
                .map_err(|e| format!("d={}: {e}", run.dim))?;
            // One lower-readiness and one orbit check per iteration.
            ensure(n == 2 * (run.dim - 1), || format!("d={}: {n} checks", run.dim))?;
            Ok(n)
        })
        .sum::<Result<usize, String>>()?;
    Ok(format!("{checks} checks over {} runs", runs.len()))
}
