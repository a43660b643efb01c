//! Riemannian gradient descent on `(S^d)^N` with restarts.
//!
//! Each iteration steps against the tangent gradient, retracts every point
//! back onto the sphere by normalization and backtracks until the Armijo
//! condition holds. Trial step lengths come from the Barzilai-Borwein
//! quotient of the previous step, so the accepted sequence is still a
//! monotone backtracking descent.

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{evaluate, Evaluation, RieszParams};
use crate::error::{Error, Result};
use crate::geometry::{random_uniform, renormalize_rows, Configuration};

const ARMIJO_C1: f64 = 1e-4;
/// Restarts whose energies agree with the best to this relative tolerance
/// count towards the consensus.
pub const CONSENSUS_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Bound on the largest per-point tangent gradient norm.
    pub grad_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// First trial step; `None` means `0.1 / N^{1 + s/d}`.
    pub step_init: Option<f64>,
    pub backtrack_factor: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-10,
            restarts: 8,
            seed: 0,
            step_init: None,
            backtrack_factor: 0.5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(Error::Domain(
                "max_iters and restarts must be positive".into(),
            ));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::Domain(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if let Some(step) = self.step_init {
            if !(step > 0.0) || !step.is_finite() {
                return Err(Error::Domain(format!(
                    "step_init must be positive, got {step}"
                )));
            }
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::Domain(format!(
                "backtrack_factor must lie in (0, 1), got {}",
                self.backtrack_factor
            )));
        }
        Ok(())
    }

    fn initial_step(&self, p: &RieszParams, n: usize) -> f64 {
        self.step_init
            .unwrap_or_else(|| 0.1 / (n as f64).powf(1.0 + p.s / p.dim_d as f64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    #[serde(skip)]
    pub config: Configuration,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restart_index: usize,
    /// Number of restarts whose final energy is within
    /// [`CONSENSUS_REL_TOL`] of the best one (1 for a single descent).
    pub consensus: usize,
    /// Energy after every accepted step, starting with the initial energy.
    pub trace: Vec<f64>,
}

/// Best of `cfg.restarts` descents from uniform random starts seeded with
/// `cfg.seed + restart`.
pub fn minimize(d: usize, s: f64, n: usize, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    let p = RieszParams::new(d, s)?;
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {n}")));
    }
    let runs: Vec<Result<OptimizationResult>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let start = random_uniform(d, n, cfg.seed.wrapping_add(r as u64))?;
            let mut res = descend(start, &p, cfg)?;
            res.restart_index = r;
            Ok(res)
        })
        .collect();
    let runs: Vec<OptimizationResult> = runs.into_iter().collect::<Result<_>>()?;

    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.energy < runs[best].energy {
            best = i;
        }
    }
    let best_energy = runs[best].energy;
    let consensus = runs
        .iter()
        .filter(|r| (r.energy - best_energy).abs() <= CONSENSUS_REL_TOL * best_energy.abs())
        .count();
    let mut out = runs.into_iter().nth(best).expect("at least one restart");
    out.consensus = consensus;
    log::debug!(
        "minimize d={d} s={s} n={n}: best restart {} energy {:.16e} consensus {consensus}/{}",
        out.restart_index,
        out.energy,
        cfg.restarts
    );
    Ok(out)
}

/// Single descent from a given configuration.
pub fn polish(
    c: &Configuration,
    p: &RieszParams,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    descend(c.clone(), p, cfg)
}

fn descend(
    start: Configuration,
    p: &RieszParams,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    let d = start.dim_d();
    let amb = start.ambient_dim();
    let n = start.len();
    let mut current = start;
    let mut eval = evaluate(&current, p)?;
    let mut trace = vec![eval.report.total];
    let step0 = cfg.initial_step(p, n);
    let mut step = step0;
    let mut iterations = 0;

    while iterations < cfg.max_iters && eval.report.grad_tangent_norm > cfg.grad_tol {
        let energy = eval.report.total;
        let grad = &eval.gradient;
        let slope: f64 = grad.iter().map(|g| g * g).sum();

        let mut trial_step = step;
        let mut accepted: Option<(Configuration, Evaluation)> = None;
        // enough halvings to reach the roundoff floor from any BB estimate
        for _ in 0..200 {
            let mut coords: Vec<f64> = current
                .as_flat()
                .iter()
                .zip(grad)
                .map(|(x, g)| x - trial_step * g)
                .collect();
            renormalize_rows(&mut coords, amb);
            let trial = Configuration::from_flat_unchecked(d, coords);
            match evaluate(&trial, p) {
                Ok(e) if e.report.total <= energy - ARMIJO_C1 * trial_step * slope => {
                    accepted = Some((trial, e));
                    break;
                }
                // coincident trial points count as a failed trial
                Ok(_) | Err(Error::CoincidentPoints { .. }) => {
                    trial_step *= cfg.backtrack_factor;
                }
                Err(e) => return Err(e),
            }
        }
        let Some((next, next_eval)) = accepted else {
            log::debug!(
                "line search stalled at iteration {iterations}, grad {:.3e}",
                eval.report.grad_tangent_norm
            );
            break;
        };

        // Barzilai-Borwein quotient for the next trial step
        let mut ss = 0.0;
        let mut sy = 0.0;
        for ((xn, xo), (gn, go)) in next
            .as_flat()
            .iter()
            .zip(current.as_flat())
            .zip(next_eval.gradient.iter().zip(grad))
        {
            let sk = xn - xo;
            ss += sk * sk;
            sy += sk * (gn - go);
        }
        step = if sy > 0.0 && ss > 0.0 {
            (ss / sy).clamp(1e-6 * step0, 1e6 * step0)
        } else {
            trial_step * 2.0
        };

        current = next;
        eval = next_eval;
        trace.push(eval.report.total);
        iterations += 1;
    }

    let grad_norm = eval.report.grad_tangent_norm;
    Ok(OptimizationResult {
        config: current,
        energy: eval.report.total,
        grad_norm,
        iterations,
        converged: grad_norm <= cfg.grad_tol,
        restart_index: 0,
        consensus: 1,
        trace,
    })
}
