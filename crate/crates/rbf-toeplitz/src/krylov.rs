//! Conjugate-gradient solvers: plain CG, preconditioned CG, and the
//! projected pair for the equality-constrained multiquadric system.
//!
//! The projected variants solve `A ξ + e y = b`, `eᵀξ = 0` with a
//! positive semidefinite preconditioner whose kernel is `span{e}`. The
//! stable variant re-projects the residual onto `⟨e⟩⊥` every iteration;
//! the unstable one runs the same recurrences without re-projection and
//! exists to demonstrate the drift that motivates the projection.
//!
//! The multiquadric matrix is negative definite on `⟨e⟩⊥`, so the
//! projected solvers can be asked to negate the system internally
//! (`(-A)ξ + e(-y) = -b`); the reported solution and multiplier always
//! refer to the original system.

use crate::error::{Error, Result};
use crate::numkit::{dot, norm2, DenseMatrix};
use crate::precond::ProjectedPreconditioner;
use crate::toeplitz::{BandedSymbol, SymToeplitz};

/// Symmetric linear operator interface shared by every solver.
pub trait LinearOp {
    fn len(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl LinearOp for SymToeplitz {
    fn len(&self) -> usize {
        SymToeplitz::len(self)
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x)
    }
}

impl LinearOp for DenseMatrix {
    fn len(&self) -> usize {
        self.rows()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x)
    }
}

impl LinearOp for ProjectedPreconditioner {
    fn len(&self) -> usize {
        ProjectedPreconditioner::len(self)
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        ProjectedPreconditioner::apply(self, x)
    }
}

/// A banded stencil acting on vectors of a fixed length.
pub struct BandedOperator<'a> {
    pub sym: &'a BandedSymbol,
    pub len: usize,
}

impl LinearOp for BandedOperator<'_> {
    fn len(&self) -> usize {
        self.len
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.sym.matvec(x)
    }
}

pub struct IdentityOp {
    pub len: usize,
}

impl LinearOp for IdentityOp {
    fn len(&self) -> usize {
        self.len
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Preconditioned,
    ProjectedUnstable,
    ProjectedStable,
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// Relative stopping tolerance: converged when `‖ρ‖ < tol·‖b‖` or
    /// `‖δ‖ < tol·‖b‖`.
    pub tol: f64,
    pub max_iters: usize,
    pub record_history: bool,
    pub variant: Variant,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-13,
            max_iters: 200,
            record_history: true,
            variant: Variant::Plain,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    CyclingDetected,
}

#[derive(Clone, Copy, Debug)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub residual_norm: f64,
    pub direction_norm: f64,
    /// `|eᵀρ_k| / ‖ρ_k‖`; meaningful for the projected variants, zero is
    /// expected for the stable one.
    pub e_drift: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub iterations: usize,
    pub history: Vec<HistoryEntry>,
    pub status: SolveStatus,
    pub solution: Vec<f64>,
    pub multiplier: Option<f64>,
}

/// Orthogonal projection onto `⟨e⟩⊥`: `x ↦ x - e (eᵀx)/(eᵀe)`.
pub fn project_q(x: &[f64]) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| v - mean).collect()
}

fn project_q_in_place(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

/// Lagrange multiplier consistent with `A x + e y = b` in least squares:
/// `y = eᵀ(b - Ax) / (2N+1)`.
pub fn recover_multiplier(a: &dyn LinearOp, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.apply(x);
    let mut sum = 0.0;
    for (bi, ai) in b.iter().zip(&ax) {
        sum += bi - ai;
    }
    sum / b.len() as f64
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Standard,
    ProjectedStable,
    ProjectedUnstable,
}

struct CoreOutcome {
    iterations: usize,
    history: Vec<HistoryEntry>,
    status: SolveStatus,
    solution: Vec<f64>,
}

fn pcg_core(
    apply_a: &dyn Fn(&[f64]) -> Vec<f64>,
    apply_c: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    cfg: &SolveConfig,
    mode: Mode,
) -> Result<CoreOutcome> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut history = Vec::new();
    if bnorm == 0.0 {
        return Ok(CoreOutcome {
            iterations: 0,
            history,
            status: SolveStatus::Converged,
            solution: vec![0.0; n],
        });
    }
    let threshold = cfg.tol * bnorm;

    let mut xi = vec![0.0; n];
    let mut rho = b.to_vec();
    if mode == Mode::ProjectedStable {
        project_q_in_place(&mut rho);
    }
    if norm2(&rho) < threshold {
        return Ok(CoreOutcome {
            iterations: 0,
            history,
            status: SolveStatus::Converged,
            solution: xi,
        });
    }

    let mut c_rho = apply_c(&rho);
    let mut delta = c_rho.clone();
    let mut rho_c_rho = dot(&rho, &c_rho);

    if cfg.record_history {
        let rho_norm = norm2(&rho);
        history.push(HistoryEntry {
            iteration: 0,
            residual_norm: rho_norm,
            direction_norm: norm2(&delta),
            e_drift: rho.iter().sum::<f64>().abs() / rho_norm,
        });
    }

    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0;
    let mut min_delta_norm = f64::INFINITY;
    let mut armed = false;
    // best iterate seen, reported if the unstable variant never converges
    let mut best: Option<(f64, Vec<f64>)> = None;

    for k in 0..cfg.max_iters {
        if rho_c_rho <= 0.0 {
            match mode {
                Mode::Standard => return Err(Error::PreconditionerNotPd(rho_c_rho)),
                Mode::ProjectedStable => {
                    return Err(Error::Breakdown(format!(
                        "r^T C r = {rho_c_rho:.3e} at iteration {k}"
                    )))
                }
                Mode::ProjectedUnstable => {
                    status = SolveStatus::CyclingDetected;
                    break;
                }
            }
        }
        let a_delta = apply_a(&delta);
        let d_a_d = dot(&delta, &a_delta);
        if d_a_d <= 0.0 {
            match mode {
                Mode::Standard => return Err(Error::Indefinite(d_a_d)),
                Mode::ProjectedStable => {
                    return Err(Error::Breakdown(format!(
                        "d^T A d = {d_a_d:.3e} at iteration {k}"
                    )))
                }
                // non-descent direction: the instability the stable
                // variant exists to avoid
                Mode::ProjectedUnstable => {
                    status = SolveStatus::CyclingDetected;
                    break;
                }
            }
        }
        let step = rho_c_rho / d_a_d;
        for (x, d) in xi.iter_mut().zip(&delta) {
            *x += step * d;
        }
        for (r, ad) in rho.iter_mut().zip(&a_delta) {
            *r -= step * ad;
        }
        if mode == Mode::ProjectedStable {
            project_q_in_place(&mut rho);
        }
        c_rho = apply_c(&rho);
        let rho_c_rho_next = dot(&rho, &c_rho);
        let beta = rho_c_rho_next / rho_c_rho;
        rho_c_rho = rho_c_rho_next;
        for (d, cr) in delta.iter_mut().zip(&c_rho) {
            *d = cr + beta * *d;
        }

        iterations = k + 1;
        let rho_norm = norm2(&rho);
        let delta_norm = norm2(&delta);
        let e_drift = if rho_norm > 0.0 {
            rho.iter().sum::<f64>().abs() / rho_norm
        } else {
            0.0
        };
        if cfg.record_history {
            history.push(HistoryEntry {
                iteration: iterations,
                residual_norm: rho_norm,
                direction_norm: delta_norm,
                e_drift,
            });
        }

        if mode == Mode::ProjectedUnstable {
            let projected_residual = norm2(&project_q(&rho));
            if best.as_ref().is_none_or(|(b, _)| projected_residual < *b) {
                best = Some((projected_residual, xi.clone()));
            }
            min_delta_norm = min_delta_norm.min(delta_norm);
            if delta_norm < cfg.tol.sqrt() * bnorm {
                armed = true;
            }
            // flag the cycling but keep going: later swings sometimes pass
            // closer to the solution, and best-iterate tracking catches that
            if armed && delta_norm > 1e3 * min_delta_norm {
                status = SolveStatus::CyclingDetected;
            }
        }

        if rho_norm < threshold || delta_norm < threshold {
            status = SolveStatus::Converged;
            break;
        }
    }

    let solution = match (status, best) {
        (SolveStatus::Converged, _) | (_, None) => xi,
        // hand back the best iterate rather than wherever cycling left us
        (_, Some((_, best_xi))) => best_xi,
    };
    Ok(CoreOutcome {
        iterations,
        history,
        status,
        solution,
    })
}

/// Plain conjugate gradients (identity preconditioner) for a symmetric
/// positive definite operator.
pub fn cg(a: &dyn LinearOp, b: &[f64], cfg: &SolveConfig) -> Result<SolveReport> {
    let out = pcg_core(
        &|x| a.apply(x),
        &|x| x.to_vec(),
        b,
        cfg,
        Mode::Standard,
    )?;
    Ok(SolveReport {
        iterations: out.iterations,
        history: out.history,
        status: out.status,
        solution: out.solution,
        multiplier: None,
    })
}

/// Preconditioned conjugate gradients; `c` must be symmetric positive
/// definite.
pub fn pcg(a: &dyn LinearOp, c: &dyn LinearOp, b: &[f64], cfg: &SolveConfig) -> Result<SolveReport> {
    assert_eq!(a.len(), c.len(), "operator and preconditioner disagree on size");
    let out = pcg_core(&|x| a.apply(x), &|x| c.apply(x), b, cfg, Mode::Standard)?;
    Ok(SolveReport {
        iterations: out.iterations,
        history: out.history,
        status: out.status,
        solution: out.solution,
        multiplier: None,
    })
}

fn projected(
    a: &dyn LinearOp,
    c: &ProjectedPreconditioner,
    b: &[f64],
    cfg: &SolveConfig,
    negate: bool,
    mode: Mode,
) -> Result<SolveReport> {
    assert_eq!(a.len(), b.len(), "operator and rhs disagree on size");
    assert_eq!(a.len(), LinearOp::len(c), "operator and preconditioner disagree on size");
    let b_eff: Vec<f64> = if negate { b.iter().map(|v| -v).collect() } else { b.to_vec() };
    let apply_a = |x: &[f64]| -> Vec<f64> {
        let mut y = a.apply(x);
        if negate {
            for v in y.iter_mut() {
                *v = -*v;
            }
        }
        y
    };
    let out = pcg_core(
        &apply_a,
        &|x| ProjectedPreconditioner::apply(c, x),
        &b_eff,
        cfg,
        mode,
    )?;
    // multiplier for the original, un-negated system
    let multiplier = recover_multiplier(a, &out.solution, b);
    Ok(SolveReport {
        iterations: out.iterations,
        history: out.history,
        status: out.status,
        solution: out.solution,
        multiplier: Some(multiplier),
    })
}

/// Projected PCG with residual re-projection onto `⟨e⟩⊥` every iteration.
///
/// With `negate` set, the recurrences run on `(-A, -b)` so the restricted
/// operator is positive definite; the returned solution and multiplier are
/// for the original system.
pub fn projected_pcg_stable(
    a: &dyn LinearOp,
    c: &ProjectedPreconditioner,
    b: &[f64],
    cfg: &SolveConfig,
    negate: bool,
) -> Result<SolveReport> {
    projected(a, c, b, cfg, negate, Mode::ProjectedStable)
}

/// Projected PCG without re-projection; unstable in finite precision and
/// kept for the instability demonstration. Reports `CyclingDetected` when
/// the direction norm rebounds past 10³ times its running minimum after
/// once falling below `√tol·‖b‖`, or when a non-descent direction occurs.
pub fn projected_pcg_unstable(
    a: &dyn LinearOp,
    c: &ProjectedPreconditioner,
    b: &[f64],
    cfg: &SolveConfig,
    negate: bool,
) -> Result<SolveReport> {
    projected(a, c, b, cfg, negate, Mode::ProjectedUnstable)
}
