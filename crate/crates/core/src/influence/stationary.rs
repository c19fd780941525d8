//! Stationary weight distribution of the delegation matrix, starting from
//! the uniform allocation `[1/n ... 1/n]`.
//!
//! The structural solution gives each ultimate set the share of agents that
//! reach it. An endpoint keeps its whole share. Within a cycle the share is
//! split in proportion to the expected time the weight rests on each member,
//! `1 / (1 - p_i)`; with equal probabilities on the cycle this is an equal
//! split. A delegating agent with `p_i = 1` never forwards and so behaves as
//! an endpoint.

use serde::Serialize;

use super::{delegation_matrix, SuspendibleProfile};
use crate::error::{Error, Result};
use crate::graph::AgentId;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryResult {
    pub agents: Vec<AgentId>,
    /// Probability mass per agent; sums to 1.
    pub distribution: Vec<f64>,
    /// `distribution * n`.
    pub scaled_weight: Vec<f64>,
    /// Power-iteration steps taken, `None` for the structural solution.
    pub iterations: Option<usize>,
}

impl StationaryResult {
    fn new(agents: &[AgentId], distribution: Vec<f64>, iterations: Option<usize>) -> Self {
        let n = distribution.len() as f64;
        let scaled_weight = distribution.iter().map(|m| m * n).collect();
        StationaryResult { agents: agents.to_vec(), distribution, scaled_weight, iterations }
    }

    pub fn mass(&self, agent: &AgentId) -> Option<f64> {
        self.agents.iter().position(|a| a == agent).map(|i| self.distribution[i])
    }

    pub fn scaled(&self, agent: &AgentId) -> Option<f64> {
        self.agents.iter().position(|a| a == agent).map(|i| self.scaled_weight[i])
    }

    /// Max-norm distance between two results over the same agents.
    pub fn max_difference(&self, other: &StationaryResult) -> f64 {
        max_norm_diff(&self.distribution, &other.distribution)
    }
}

fn max_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn stationary_analytic(sp: &SuspendibleProfile) -> StationaryResult {
    let n = sp.len();
    let effective = sp.profile().suspend_where(|i| sp.vote_probability(i) == 1.0);
    let d = effective.decompose();
    let basins = d.basin_sizes();
    let mut mass = vec![0.0; n];
    for (s, members) in d.sets.iter().enumerate() {
        let share = basins[s] as f64 / n as f64;
        let p0 = sp.vote_probability(members[0]);
        if members.iter().all(|&m| sp.vote_probability(m) == p0) {
            let each = share / members.len() as f64;
            for &m in members {
                mass[m] = each;
            }
        } else {
            let hold: Vec<f64> = members.iter().map(|&m| 1.0 / (1.0 - sp.vote_probability(m))).collect();
            let total: f64 = hold.iter().sum();
            for (&m, h) in members.iter().zip(hold) {
                mass[m] = share * h / total;
            }
        }
    }
    StationaryResult::new(sp.profile().agents(), mass, None)
}

/// Power iteration `x <- x P` from the uniform vector until successive
/// iterates differ by less than `tolerance` in max-norm.
///
/// Cycles whose members never vote make the chain periodic; to absorb
/// period-2 oscillation the averages of consecutive iterate pairs are
/// tested as well. Longer periods end in [`Error::NoConvergence`].
pub fn stationary_iterative(sp: &SuspendibleProfile, tolerance: f64, max_iters: usize) -> Result<StationaryResult> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidTolerance(tolerance));
    }
    let matrix = delegation_matrix(sp);
    let n = sp.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut prev_avg: Option<Vec<f64>> = None;
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iters {
        let next = matrix.apply(&x);
        residual = max_norm_diff(&next, &x);
        if residual < tolerance {
            return Ok(StationaryResult::new(sp.profile().agents(), next, Some(iteration)));
        }
        let avg: Vec<f64> = x.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        if let Some(prev) = &prev_avg {
            if max_norm_diff(prev, &avg) < tolerance {
                return Ok(StationaryResult::new(sp.profile().agents(), avg, Some(iteration)));
            }
        }
        prev_avg = Some(avg);
        x = next;
    }
    Err(Error::NoConvergence { iterations: max_iters, residual })
}
