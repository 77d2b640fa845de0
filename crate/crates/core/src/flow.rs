//! Iteration of the coupling map `J' = X²J`, `Δ' = Z²/X² Δ`, `D' = (ε₁ − ε₀)/X²`.

use serde::{Deserialize, Serialize};

use crate::block::{block_solution, BlockSolution, Couplings, SINGULAR_TOL};
use crate::error::{Error, Result};

/// Below this change in `(Δ, D)` the flow is treated as converged.
pub const FIXED_POINT_TOL: f64 = 1e-12;

fn next_couplings(c: &Couplings, sol: &BlockSolution) -> Result<Couplings> {
    if !sol.x_ren.is_finite() || sol.x_ren.abs() < SINGULAR_TOL {
        return Err(Error::VanishingXren(sol.x_ren));
    }
    let x2 = sol.x_ren * sol.x_ren;
    let next = Couplings {
        j: x2 * c.j,
        delta: sol.z_ren * sol.z_ren / x2 * c.delta,
        d: (sol.eps1 - sol.eps0) / x2,
    };
    if !(next.j.is_finite() && next.delta.is_finite() && next.d.is_finite()) {
        return Err(Error::SingularBlock { denominator: "x_ren^2", value: x2 });
    }
    Ok(next)
}

/// One QRG step.
pub fn rg_step(c: &Couplings) -> Result<Couplings> {
    next_couplings(c, &block_solution(c.delta, c.d)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowStep {
    pub step: usize,
    /// Sites per block after `step` renormalizations, `3^step`.
    pub block_sites: u64,
    /// Chain length the step describes, `3^(step+1)`.
    pub chain_sites: u64,
    pub couplings: Couplings,
    pub solution: BlockSolution,
}

impl FlowStep {
    pub fn abs_i6(&self) -> f64 {
        self.solution.abs_i6()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FlowStatus {
    Completed,
    /// Step `step` could not be formed; `steps` ends at `step - 1`.
    Singular { step: usize, cause: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub steps: Vec<FlowStep>,
    pub status: FlowStatus,
}

impl FlowTrajectory {
    pub fn is_complete(&self) -> bool {
        self.status == FlowStatus::Completed
    }

    pub fn get(&self, n: usize) -> Result<&FlowStep> {
        self.steps.get(n).ok_or_else(|| match &self.status {
            FlowStatus::Singular { step, cause } => Error::TruncatedFlow {
                last_step: step.saturating_sub(1),
                cause: cause.clone(),
            },
            FlowStatus::Completed => Error::InvalidArgument(format!(
                "step {n} beyond the {} computed",
                self.steps.len()
            )),
        })
    }
}

fn sites(n: usize) -> (u64, u64) {
    let pow = |k: usize| 3u64.checked_pow(k as u32).unwrap_or(u64::MAX);
    (pow(n), pow(n + 1))
}

/// Applies [`rg_step`] `n_steps` times, recording every block solution.
/// Failures end the trajectory with a status instead of an error.
pub fn rg_trajectory(c: &Couplings, n_steps: usize) -> FlowTrajectory {
    let mut steps: Vec<FlowStep> = Vec::with_capacity(n_steps + 1);
    let mut cur = *c;
    for n in 0..=n_steps {
        let solution = match block_solution(cur.delta, cur.d) {
            Ok(s) => s,
            Err(e) => return singular(steps, n, e),
        };
        let (block_sites, chain_sites) = sites(n);
        steps.push(FlowStep { step: n, block_sites, chain_sites, couplings: cur, solution });
        if n == n_steps {
            break;
        }
        let next = match next_couplings(&cur, &solution) {
            Ok(x) => x,
            Err(e) => return singular(steps, n + 1, e),
        };
        let moved = (next.delta - cur.delta).hypot(next.d - cur.d);
        if moved < FIXED_POINT_TOL {
            let x2 = solution.x_ren * solution.x_ren;
            let mut j = cur.j;
            for k in n + 1..=n_steps {
                j *= x2;
                let (block_sites, chain_sites) = sites(k);
                steps.push(FlowStep {
                    step: k,
                    block_sites,
                    chain_sites,
                    couplings: Couplings { j, ..cur },
                    solution,
                });
            }
            break;
        }
        cur = next;
    }
    FlowTrajectory { steps, status: FlowStatus::Completed }
}

fn singular(steps: Vec<FlowStep>, step: usize, e: Error) -> FlowTrajectory {
    FlowTrajectory { steps, status: FlowStatus::Singular { step, cause: e.to_string() } }
}

/// `|I6|` of ψ₀ after `n` steps, from the closed form `8 N₀⁶ a⁴`.
pub fn i6_after_steps(delta: f64, d: f64, n: usize) -> Result<f64> {
    let c = Couplings::new(1.0, delta, d)?;
    Ok(rg_trajectory(&c, n).get(n)?.abs_i6())
}
