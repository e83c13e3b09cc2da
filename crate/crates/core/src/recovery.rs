//! Recovering `A` from `G = A * C`.
//!
//! The tensor is driven to the core tensor one pivot at a time. At pivot `s`
//! an upper step makes the tensor satisfy the lower-ready relations, then a
//! lower op and a diagonal scaling move it into `(I_s ⊕ GL_{d-s}) * C`.
//! After the last pivot a single scaling reaches `C` itself, and `A` is the
//! inverse of the accumulated transformation.
//!
//! The upper step depends on how many coordinates remain:
//!
//! * `s < d - 2`: solve the antisymmetry system ([`up_general`]),
//! * `s = d - 2`: three closed-form upper ops ([`up_three`]),
//! * `s = d - 1`: one closed-form upper op or a swap ([`up_two`]).
//!
//! Degenerate inputs are handled by random changes of coordinates drawn from
//! a seeded generator, bounded by [`RecoveryConfig::max_retries`].

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::gauss::GaussOp;
use crate::linear_system::AntisymSystem;
use crate::matrix::{Matrix, SolveOutcome};
use crate::scalar::ExactScalar;
use crate::tensor::Tensor3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub rng_seed: u64,
    /// Entries of random coordinate changes are drawn from
    /// `[-random_entry_bound, random_entry_bound]`.
    pub random_entry_bound: u32,
    /// Coordinate changes allowed per upper step before giving up.
    pub max_retries: u32,
    /// Check `A * C = G` with a dense congruence before returning.
    pub verify_result: bool,
    /// In the general regime, try the transpositions `(s, t)` for
    /// `t = s+1..d` before falling back to random coordinate changes.
    pub deterministic_pivot: bool,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            random_entry_bound: 5,
            max_retries: 32,
            verify_result: true,
            deterministic_pivot: false,
        }
    }
}

impl RecoveryConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRole {
    /// Change of coordinates taken after a degenerate attempt.
    Random,
    Upper,
    Lower,
    Diag,
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub role: StepRole,
    pub op: GaussOp,
}

/// Every op applied during a recovery, in application order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryTrace {
    pub dim: usize,
    pub random_seed: u64,
    pub steps: Vec<TraceStep>,
    /// Coordinate changes used at pivot `s` are at index `s - 1`.
    pub retries: Vec<u32>,
    pub final_matrix: Matrix,
}

impl RecoveryTrace {
    /// Applies all steps to `g`. For the tensor the trace was recorded on,
    /// the result is the core tensor.
    pub fn replay(&self, g: &Tensor3) -> Result<Tensor3> {
        let mut t = g.clone();
        for step in &self.steps {
            step.op.apply_in_place(&mut t)?;
        }
        Ok(t)
    }

    /// Product of all step matrices, latest on the left.
    pub fn accumulated(&self) -> Result<Matrix> {
        self.steps
            .iter()
            .try_fold(Matrix::identity(self.dim), |q, step| step.op.accumulate(&q))
    }

    pub fn total_retries(&self) -> u32 {
        self.retries.iter().sum()
    }

    pub fn ops_with_role(&self, role: StepRole) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(move |s| s.role == role)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovered {
    pub matrix: Matrix,
    pub trace: RecoveryTrace,
}

/// Output of an upper step: ops in application order and the tensor they
/// produce.
#[derive(Debug, Clone)]
pub struct UpStep {
    pub ops: Vec<(StepRole, GaussOp)>,
    pub retries: u32,
    pub tensor: Tensor3,
}

/// Recovers the unique `A` with `g = A * C`.
pub fn recover(g: &Tensor3, cfg: &RecoveryConfig) -> Result<Recovered> {
    let d = g.dim();
    if d == 0 {
        return Err(Error::InvalidArgument("tensor dimension must be >= 1".into()));
    }
    if cfg.max_retries == 0 || cfg.random_entry_bound == 0 {
        return Err(Error::InvalidArgument(
            "max_retries and random_entry_bound must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut cur = g.clone();
    let mut steps = Vec::new();
    let mut retries = Vec::with_capacity(d);

    for s in 1..d {
        let up = if s + 2 < d {
            up_general(&cur, s, cfg, &mut rng)?
        } else if s + 2 == d {
            up_three(&cur, cfg, &mut rng)?
        } else {
            let op = up_two(&cur);
            let tensor = op.apply(&cur)?;
            UpStep {
                ops: vec![(StepRole::Upper, op)],
                retries: 0,
                tensor,
            }
        };
        let stage = match d - s {
            1 => Stage::UpTwo,
            2 => Stage::UpThree,
            _ => Stage::UpGeneral,
        };
        if !up.tensor.check_lower_ready(s) {
            return Err(not_in_orbit(stage, s, "upper step did not reach a lower-ready tensor"));
        }
        retries.push(up.retries);
        steps.extend(up.ops.into_iter().map(|(role, op)| TraceStep {
            iteration: s,
            role,
            op,
        }));

        let h = up.tensor;
        let (lower, diag) = lower_diag_step(&h, s)?;
        cur = h;
        lower.apply_in_place(&mut cur)?;
        diag.apply_in_place(&mut cur)?;
        if !cur.check_orbit_conditions(s) {
            return Err(not_in_orbit(
                Stage::OrbitConditions,
                s,
                "tensor does not match the core tensor on the fixed index set",
            ));
        }
        steps.push(TraceStep {
            iteration: s,
            role: StepRole::Lower,
            op: lower,
        });
        steps.push(TraceStep {
            iteration: s,
            role: StepRole::Diag,
            op: diag,
        });
    }

    let last = final_scale(&cur)?;
    steps.push(TraceStep {
        iteration: d,
        role: StepRole::Final,
        op: last,
    });

    let mut q = Matrix::identity(d);
    for step in &steps {
        q = step.op.accumulate(&q)?;
    }
    let a = q
        .inverse()
        .map_err(|_| not_in_orbit(Stage::Verification, d, "accumulated transform is singular"))?;
    if cfg.verify_result && Tensor3::core(d).congruence(&a)? != *g {
        return Err(not_in_orbit(Stage::Verification, d, "A * C differs from the input"));
    }
    Ok(Recovered {
        trace: RecoveryTrace {
            dim: d,
            random_seed: cfg.rng_seed,
            steps,
            retries,
            final_matrix: a.clone(),
        },
        matrix: a,
    })
}

/// Upper step for `1 <= s < d - 2`.
///
/// Solves the reduced antisymmetry system; a unique solution `x` gives
/// `U^{(s,x)}`. When the system is not uniquely solvable, or the result is
/// not lower-ready, the tensor is moved by a change of coordinates in
/// `I_{s-1} ⊕ GL_{d-s+1}` and the step is retried.
pub fn up_general<R: Rng + ?Sized>(
    g: &Tensor3,
    s: usize,
    cfg: &RecoveryConfig,
    rng: &mut R,
) -> Result<UpStep> {
    let d = g.dim();
    if s == 0 || s + 2 >= d {
        return Err(Error::InvalidArgument(format!(
            "up_general needs 1 <= s < d - 2, got s={s}, d={d}"
        )));
    }
    let mut prefix: Vec<GaussOp> = Vec::new();
    let mut cur = g.clone();
    let sweep_len = if cfg.deterministic_pivot { d - s } else { 0 };

    for attempt in 0..=cfg.max_retries {
        if let Some((up, h)) = try_upper_from_system(&cur, s)? {
            let mut ops: Vec<(StepRole, GaussOp)> =
                prefix.into_iter().map(|op| (StepRole::Random, op)).collect();
            ops.push((StepRole::Upper, up));
            return Ok(UpStep {
                ops,
                retries: attempt,
                tensor: h,
            });
        }
        if attempt == cfg.max_retries {
            break;
        }
        let k = attempt as usize;
        if k < sweep_len {
            // Transpositions are tried against the original tensor.
            let op = GaussOp::Perm {
                pivot: s,
                target: s + 1 + k,
            };
            cur = op.apply(g)?;
            prefix = vec![op];
        } else {
            if k == sweep_len && sweep_len > 0 {
                cur = g.clone();
                prefix.clear();
            }
            let w = Matrix::random_invertible(d, s, cfg.random_entry_bound, rng)?;
            let op = GaussOp::General { pivot: s, matrix: w };
            op.apply_in_place(&mut cur)?;
            prefix.push(op);
        }
    }
    Err(not_in_orbit(
        Stage::UpGeneral,
        s,
        &format!(
            "no uniquely solvable antisymmetry system after {} coordinate changes",
            cfg.max_retries
        ),
    ))
}

fn try_upper_from_system(g: &Tensor3, s: usize) -> Result<Option<(GaussOp, Tensor3)>> {
    let sys = AntisymSystem::build_reduced(g, s);
    let SolveOutcome::Unique(x) = sys.solve() else {
        return Ok(None);
    };
    let up = GaussOp::Upper {
        pivot: s,
        coeffs: x,
    };
    let h = up.apply(g)?;
    Ok(h.check_lower_ready(s).then_some((up, h)))
}

/// Upper step for `s = d - 2`, `d >= 3`.
///
/// With `p, q, r = d-2, d-1, d` this applies, in order,
/// `I + c1 E_{q,r}`, `I + c2 E_{p,r}` and `I + c3 E_{p,q}` where each
/// coefficient is read off the current tensor:
///
/// * `c1 = (G_rqq - G_qrq) / (G_qrr - G_rqr)`
/// * `c2 = (G_rqp - G_qrp) / (G_qrr - G_rqr)`
/// * `c3 = (G_qpp - G_pqp) / (G_pqq - G_qpq)`
///
/// If a denominator vanishes or the resulting `G_ppp` is zero, the input is
/// moved by a random `W` in `I_{d-3} ⊕ GL_3` and the step restarts.
pub fn up_three<R: Rng + ?Sized>(g: &Tensor3, cfg: &RecoveryConfig, rng: &mut R) -> Result<UpStep> {
    let d = g.dim();
    if d < 3 {
        return Err(Error::InvalidArgument(format!("up_three needs d >= 3, got {d}")));
    }
    let p = d - 2;
    let mut prefix: Vec<GaussOp> = Vec::new();
    let mut init = g.clone();
    for attempt in 0..=cfg.max_retries {
        if let Some((ups, h)) = try_up_three(&init)? {
            let mut ops: Vec<(StepRole, GaussOp)> =
                prefix.into_iter().map(|op| (StepRole::Random, op)).collect();
            ops.extend(ups.into_iter().map(|op| (StepRole::Upper, op)));
            return Ok(UpStep {
                ops,
                retries: attempt,
                tensor: h,
            });
        }
        if attempt == cfg.max_retries {
            break;
        }
        let w = Matrix::random_invertible(d, p, cfg.random_entry_bound, rng)?;
        let op = GaussOp::General { pivot: p, matrix: w };
        op.apply_in_place(&mut init)?;
        prefix.push(op);
    }
    Err(not_in_orbit(
        Stage::UpThree,
        p,
        &format!("degenerate after {} coordinate changes", cfg.max_retries),
    ))
}

fn try_up_three(g: &Tensor3) -> Result<Option<(Vec<GaussOp>, Tensor3)>> {
    let d = g.dim();
    let (p, q, r) = (d - 2, d - 1, d);

    let den = g.at(q, r, r) - g.at(r, q, r);
    if den.is_zero() {
        return Ok(None);
    }
    let c1 = (g.at(r, q, q) - g.at(q, r, q)).checked_div(&den)?;
    let q1 = GaussOp::Upper {
        pivot: q,
        coeffs: vec![c1],
    };
    let g1 = q1.apply(g)?;

    // I + c E_{q,r} leaves G_qrr - G_rqr unchanged.
    let den = g1.at(q, r, r) - g1.at(r, q, r);
    let c2 = (g1.at(r, q, p) - g1.at(q, r, p)).checked_div(&den)?;
    let q2 = GaussOp::Upper {
        pivot: p,
        coeffs: vec![ExactScalar::zero(), c2],
    };
    let g2 = q2.apply(&g1)?;

    let den = g2.at(p, q, q) - g2.at(q, p, q);
    if den.is_zero() {
        return Ok(None);
    }
    let c3 = (g2.at(q, p, p) - g2.at(p, q, p)).checked_div(&den)?;
    let q3 = GaussOp::Upper {
        pivot: p,
        coeffs: vec![c3, ExactScalar::zero()],
    };
    let h = q3.apply(&g2)?;
    if h.at(p, p, p).is_zero() || !h.check_lower_ready(p) {
        return Ok(None);
    }
    Ok(Some((vec![q1, q2, q3], h)))
}

/// Upper step for `s = d - 1`, `d >= 2`: `U^{(d-1, c)}` with
/// `c = (G_{d,d-1,d-1} - G_{d-1,d,d-1}) / (G_{d-1,d,d} - G_{d,d-1,d})`, or
/// the transposition of the last two coordinates when the denominator is
/// zero.
pub fn up_two(g: &Tensor3) -> GaussOp {
    let d = g.dim();
    assert!(d >= 2, "up_two needs d >= 2");
    let (q, r) = (d - 1, d);
    let den = g.at(q, r, r) - g.at(r, q, r);
    if den.is_zero() {
        return GaussOp::Perm {
            pivot: q,
            target: r,
        };
    }
    let c = (g.at(r, q, q) - g.at(q, r, q))
        .checked_div(&den)
        .expect("denominator checked nonzero");
    GaussOp::Upper {
        pivot: q,
        coeffs: vec![c],
    }
}

/// Lower and diagonal ops at pivot `s` for a lower-ready `h`:
/// `L^{(s,y)}` with `y_i = -H_{s,s+i,s} / H_sss` and the scaling whose
/// cube is `1 / H_sss`.
pub fn lower_diag_step(h: &Tensor3, s: usize) -> Result<(GaussOp, GaussOp)> {
    let d = h.dim();
    if s == 0 || s >= d {
        return Err(Error::InvalidArgument(format!(
            "lower step needs 1 <= s < d, got s={s}, d={d}"
        )));
    }
    if !h.check_lower_ready(s) {
        return Err(not_in_orbit(Stage::LowerDiag, s, "tensor is not lower-ready"));
    }
    let hsss = h.at(s, s, s);
    let inv = hsss.recip()?;
    let coeffs = (1..=d - s).map(|i| -(h.at(s, s + i, s) * &inv)).collect();
    let diag = GaussOp::diag_from_cube(s, &inv).ok_or_else(|| {
        not_in_orbit(
            Stage::LowerDiag,
            s,
            &format!("pivot entry {hsss} is not a rational cube"),
        )
    })?;
    Ok((GaussOp::Lower { pivot: s, coeffs }, diag))
}

/// The scaling at pivot `d` that turns a tensor in `(I_{d-1} ⊕ GL_1) * C`
/// into `C`.
pub fn final_scale(g: &Tensor3) -> Result<GaussOp> {
    let d = g.dim();
    let gddd = g.at(d, d, d);
    let op = gddd
        .recip()
        .ok()
        .and_then(|inv| GaussOp::diag_from_cube(d, &inv))
        .ok_or_else(|| {
            not_in_orbit(
                Stage::FinalScale,
                d,
                &format!("last diagonal entry {gddd} is not a nonzero rational cube"),
            )
        })?;
    if op.apply(g)? != Tensor3::core(d) {
        return Err(not_in_orbit(
            Stage::FinalScale,
            d,
            "scaled tensor differs from the core tensor",
        ));
    }
    Ok(op)
}

fn not_in_orbit(stage: Stage, iteration: usize, reason: &str) -> Error {
    Error::NotInOrbit {
        stage,
        iteration,
        reason: reason.to_string(),
    }
}
