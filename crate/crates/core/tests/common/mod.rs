//! Worked d = 4 instance and its intermediate tensors, transcribed from
//! their mode-1 foldings, plus small shared helpers.

#![allow(dead_code)]

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigtensor::io::parse_folded;
use sigtensor::{AntisymSystem, ExactScalar, Matrix, RecoveryTrace, StepRole, Tensor3};

pub fn folded(text: &str) -> Tensor3 {
    parse_folded(text).expect("well-formed folding")
}

pub fn q(n: i64) -> ExactScalar {
    ExactScalar::from(n)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn core4() -> Tensor3 {
    folded(
        "1 0 0 0 | 3 3 0 0 | 3 6 3 0 | 3 6 6 3
         0 0 0 0 | 0 1 0 0 | 0 3 3 0 | 0 3 6 3
         0 0 0 0 | 0 0 0 0 | 0 0 1 0 | 0 0 3 3
         0 0 0 0 | 0 0 0 0 | 0 0 0 0 | 0 0 0 1",
    )
}

/// The input tensor of the worked recovery.
pub fn input_g() -> Tensor3 {
    folded(
        "-8  8   4  10 |   8 -8 -4 -10 |   7 -7 -4 -10 |  10 -10 -4 -13
         -4 -2   5  -7 |   4  1 -4   6 |   2  2 -3   5 |   5   0 -4   6
         13 -7 -10  -4 | -13  8  9   5 | -10  6  8   6 | -16  11  9   8
         -8  2   5  -4 |   8 -3 -4   3 |   5 -1 -3   2 |  11  -6 -4   1",
    )
}

/// `U^(1,[1,0,0]) * input_g()`, ready for the lower step at `s = 1`.
pub fn h_step1() -> Tensor3 {
    folded(
        "-1 -1  1 -1 |  5 -7 -8 -4 |  4 -5 -7 -5 |  5 -10 -8 -7
         -1 -1  1 -1 |  5  1 -4  6 |  4  2 -3  5 |  5   0 -4  6
          1  1 -1  1 | -5  8  9  5 | -4  6  8  6 | -5  11  9  8
         -1 -1  1 -1 |  5 -3 -4  3 |  4 -1 -3  2 |  5  -6 -4  1",
    )
}

/// The tensor after the lower and diagonal step at `s = 1`.
pub fn g_step1() -> Tensor3 {
    folded(
        "1 0 0 0 | 6 12 3  9 | 3 9 3  9 | 6 15 3 12
         0 0 0 0 | 0  8 4 10 | 0 7 4 10 | 0 10 4 13
         0 0 0 0 | 0  1 1  1 | 0 1 1  1 | 0  1 1  1
         0 0 0 0 | 0  4 4  7 | 0 4 4  7 | 0  4 4  8",
    )
}

/// First intermediate of the three-dimensional upper step at `s = 2`.
pub fn g_prime() -> Tensor3 {
    folded(
        "1 0 0 0 | 6 12 -6  9 | -3 -6  3 -3 | 6 15 -9 12
         0 0 0 0 | 0  8 -6 10 |  0 -3  3 -3 | 0 10 -9 13
         0 0 0 0 | 0 -3  3 -6 |  0  0 -1  1 | 0 -3  4 -7
         0 0 0 0 | 0  4 -3  7 |  0  0  1 -1 | 0  4 -4  8",
    )
}

/// Second intermediate of the three-dimensional upper step.
pub fn g_double_prime() -> Tensor3 {
    folded(
        "1 0 0 0 | 0  0  3 -3 | -3 -3  3 -3 | 6  3 -9 12
         0 0 0 0 | 0  0  2 -2 |  0 -1  2 -2 | 0  1 -5  5
         0 0 0 0 | 0 -1 -1  1 |  0 -1 -1  1 | 0  4  4 -7
         0 0 0 0 | 0  1  1 -1 |  0  1  1 -1 | 0 -4 -4  8",
    )
}

/// Result of the three-dimensional upper step, ready for `s = 2`.
pub fn h_step2() -> Tensor3 {
    folded(
        "1 0 0 0 | 3 3 0 0 | -3 -6  3 -3 | 6 12 -9 12
         0 0 0 0 | 0 1 0 0 |  0 -3  3 -3 | 0  6 -9 12
         0 0 0 0 | 0 0 0 0 |  0  0 -1  1 | 0  0  4 -7
         0 0 0 0 | 0 0 0 0 |  0  0  1 -1 | 0  0 -4  8",
    )
}

/// The matrix recovered from [`input_g`].
pub fn recovered_a() -> Matrix {
    Matrix::from_i64_rows(&[
        vec![0, -1, 0, -1],
        vec![-1, 1, 0, 1],
        vec![1, 0, 0, 1],
        vec![-1, 0, 1, 1],
    ])
    .unwrap()
}

/// `A * T` by the defining triple sum, independent of the library's mode
/// products.
pub fn naive_congruence(a: &Matrix, t: &Tensor3) -> Tensor3 {
    let d = t.dim();
    Tensor3::from_fn(d, |i, j, k| {
        let mut acc = ExactScalar::zero();
        for x in 1..=d {
            for y in 1..=d {
                for z in 1..=d {
                    let v = t.at(x, y, z);
                    if !v.is_zero() {
                        acc += &(v * a.at(i, x) * a.at(j, y) * a.at(k, z));
                    }
                }
            }
        }
        acc
    })
}

/// Random invertible integer matrix with entries in `[-bound, bound]`.
pub fn random_gl(d: usize, bound: u32, seed: u64) -> Matrix {
    Matrix::random_invertible_seeded(d, 1, bound, seed).unwrap()
}

/// Replays a trace step by step and checks that the tensor is lower-ready
/// right before each lower op and satisfies the orbit conditions right
/// after each diagonal op. Returns the number of checks performed.
pub fn check_trace_invariants(g: &Tensor3, trace: &RecoveryTrace) -> Result<usize, String> {
    let mut t = g.clone();
    let mut checks = 0;
    for step in &trace.steps {
        let s = step.iteration;
        if step.role == StepRole::Lower {
            if !t.check_lower_ready(s) {
                return Err(format!("not lower-ready before the lower op at s={s}"));
            }
            checks += 1;
        }
        step.op.apply_in_place(&mut t).map_err(|e| e.to_string())?;
        if step.role == StepRole::Diag {
            if !t.check_orbit_conditions(s) {
                return Err(format!("orbit conditions fail after iteration s={s}"));
            }
            checks += 1;
        }
    }
    if t != Tensor3::core(g.dim()) {
        return Err("replay does not end at the core tensor".into());
    }
    Ok(checks)
}

/// Number of `trials` seeded orbit tensors `A * C` at dimension `d` (with `A`
/// a random invertible integer matrix, entries in `[-3, 3]`) whose matrix
/// `M` has full column rank. The pivot cycles through `1..d-2`.
pub fn generic_full_rank_count(d: usize, trials: u64) -> u64 {
    (0..trials)
        .filter(|&t| {
            let s = 1 + (t as usize % (d - 3));
            let a = random_gl(d, 3, 100_000 * d as u64 + t);
            let sys = AntisymSystem::build_reduced(&Tensor3::core(d).congruence(&a).unwrap(), s);
            sys.rank() == d - s
        })
        .count() as u64
}
