//! Analytic influence measures over (suspendible) delegation profiles.
//!
//! * potential weight: ballots an agent would carry if everybody upstream
//!   abstained, with every cycle member credited for the whole cycle basin;
//! * first-passage probabilities and expected weight: the expected number of
//!   ballots an agent casts given that it votes, when every other delegating
//!   agent votes directly with its own probability and otherwise forwards;
//! * closed forms for chains and stars;
//! * the delegation matrix and its stationary distribution.

mod closed_form;
mod matrix;
mod stationary;

pub use closed_form::{
    expected_weight_chain, expected_weight_chain_limit, expected_weight_star, path_contribution,
    path_contribution_limit,
};
pub use matrix::{delegation_matrix, DelegationMatrix, MatrixRow};
pub use stationary::{stationary_analytic, stationary_iterative, StationaryResult};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{AgentId, DelegationProfile, Predecessors};

/// A delegation profile together with each delegating agent's probability
/// of voting directly. Endpoints always vote.
#[derive(Clone, Debug, PartialEq)]
pub struct SuspendibleProfile {
    profile: DelegationProfile,
    vote_prob: Vec<f64>,
}

pub(crate) fn check_probability(value: f64, agent: Option<&AgentId>) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { agent: agent.cloned(), value })
    }
}

impl SuspendibleProfile {
    /// Every delegating agent votes with probability `p`.
    pub fn uniform(profile: DelegationProfile, p: f64) -> Result<Self> {
        check_probability(p, None)?;
        let vote_prob = (0..profile.len()).map(|i| if profile.is_endpoint(i) { 1.0 } else { p }).collect();
        Ok(SuspendibleProfile { profile, vote_prob })
    }

    /// Per-agent probabilities with an optional fallback for agents not
    /// listed. Entries for endpoints are validated but otherwise ignored.
    pub fn new(
        profile: DelegationProfile,
        probabilities: &BTreeMap<AgentId, f64>,
        default: Option<f64>,
    ) -> Result<Self> {
        if let Some(p) = default {
            check_probability(p, None)?;
        }
        for (agent, &p) in probabilities {
            profile.require(agent)?;
            check_probability(p, Some(agent))?;
        }
        let mut vote_prob = Vec::with_capacity(profile.len());
        for (i, agent) in profile.agents().iter().enumerate() {
            let p = if profile.is_endpoint(i) {
                1.0
            } else {
                probabilities.get(agent).copied().or(default).ok_or_else(|| Error::MissingProbability(agent.clone()))?
            };
            vote_prob.push(p);
        }
        Ok(SuspendibleProfile { profile, vote_prob })
    }

    /// Probabilities aligned with the profile's agent indices.
    pub fn from_probabilities(profile: DelegationProfile, probabilities: Vec<f64>) -> Result<Self> {
        assert_eq!(profile.len(), probabilities.len(), "one probability per agent");
        let mut vote_prob = probabilities;
        for (i, p) in vote_prob.iter_mut().enumerate() {
            if profile.is_endpoint(i) {
                *p = 1.0;
            } else {
                check_probability(*p, Some(profile.agent(i)))?;
            }
        }
        Ok(SuspendibleProfile { profile, vote_prob })
    }

    pub fn profile(&self) -> &DelegationProfile {
        &self.profile
    }

    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }

    /// Probability that agent `index` votes directly (1 for endpoints).
    pub fn vote_probability(&self, index: usize) -> f64 {
        self.vote_prob[index]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.vote_prob
    }

    /// Same probabilities over a profile where `actors` are suspended.
    /// Suspended agents become endpoints and therefore vote with
    /// probability 1.
    pub fn suspend<'a, I>(&self, actors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a AgentId>,
    {
        let profile = self.profile.suspend(actors)?;
        Self::from_probabilities(profile, self.vote_prob.clone())
    }
}

/// One nonnegative value per agent, aligned with the profile's indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightVector {
    agents: Vec<AgentId>,
    values: Vec<f64>,
}

impl WeightVector {
    pub(crate) fn new(agents: &[AgentId], values: Vec<f64>) -> Self {
        debug_assert_eq!(agents.len(), values.len());
        WeightVector { agents: agents.to_vec(), values }
    }

    pub fn get(&self, agent: &AgentId) -> Option<f64> {
        self.agents.iter().position(|a| a == agent).map(|i| self.values[i])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AgentId, f64)> + '_ {
        self.agents.iter().zip(self.values.iter().copied())
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Potential voting weight with compound-endpoint semantics.
///
/// A non-ultimate agent gets 1 plus everybody whose delegation path passes
/// through it. Every member of an ultimate set gets the whole basin of that
/// set, i.e. all agents whose path ends in it (members included).
pub fn potential_weight(profile: &DelegationProfile) -> WeightVector {
    let d = profile.decompose();
    let succ = profile.successors();
    let mut order: Vec<usize> = (0..profile.len()).filter(|&i| !d.is_ultimate(i)).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(d.depth[i]));
    let mut subtree = vec![1usize; profile.len()];
    for i in order {
        subtree[succ[i]] += subtree[i];
    }
    let basins = d.basin_sizes();
    let values =
        (0..profile.len()).map(|i| if d.is_ultimate(i) { basins[d.set_of[i]] } else { subtree[i] } as f64).collect();
    WeightVector::new(profile.agents(), values)
}

/// Literal ultimate-proxy count: `1 + |{j != i : D*(j) = i}|`.
///
/// Differs from [`potential_weight`] on cycles (each member only counts the
/// agents entering the cycle at that member) and on non-ultimate agents
/// (always 1).
pub fn potential_weight_literal(profile: &DelegationProfile) -> WeightVector {
    let d = profile.decompose();
    let mut values = vec![1.0; profile.len()];
    for (j, &e) in d.entry.iter().enumerate() {
        if e != j {
            values[e] += 1.0;
        }
    }
    WeightVector::new(profile.agents(), values)
}

/// Walks the in-tree of `target` once its own outgoing delegation is
/// suspended, calling `visit(agent, reach_probability)` for every agent
/// other than the target.
fn walk_in_tree(sp: &SuspendibleProfile, preds: &Predecessors, target: usize, mut visit: impl FnMut(usize, f64)) {
    let mut stack = vec![(target, 1.0f64)];
    while let Some((node, reach)) = stack.pop() {
        for &j in preds.sources(node) {
            if j == target {
                continue;
            }
            let r = reach * (1.0 - sp.vote_prob[j]);
            visit(j, r);
            stack.push((j, r));
        }
    }
}

/// Probability that each agent's ballot reaches `target` through a chain
/// of non-voting delegators, given that the target votes. The target's
/// own entry is 1; agents without a path to the target get 0.
pub fn first_passage(sp: &SuspendibleProfile, target: &AgentId) -> Result<WeightVector> {
    let t = sp.profile.require(target)?;
    let preds = Predecessors::of(sp.profile.successors());
    let mut reach = vec![0.0; sp.len()];
    reach[t] = 1.0;
    walk_in_tree(sp, &preds, t, |j, r| reach[j] = r);
    Ok(WeightVector::new(sp.profile.agents(), reach))
}

fn expected_weight_at(sp: &SuspendibleProfile, preds: &Predecessors, t: usize) -> f64 {
    let mut total = 1.0;
    walk_in_tree(sp, preds, t, |_, r| total += r);
    total
}

/// Expected number of ballots `target` casts when it votes:
/// 1 plus the sum of first-passage probabilities of all other agents.
pub fn expected_weight(sp: &SuspendibleProfile, target: &AgentId) -> Result<f64> {
    let t = sp.profile.require(target)?;
    let preds = Predecessors::of(sp.profile.successors());
    Ok(expected_weight_at(sp, &preds, t))
}

/// [`expected_weight`] for every agent.
pub fn expected_weights(sp: &SuspendibleProfile, exec: Execution) -> WeightVector {
    let preds = Predecessors::of(sp.profile.successors());
    let values = exec.map_indices(sp.len(), |t| expected_weight_at(sp, &preds, t));
    WeightVector::new(sp.profile.agents(), values)
}

/// Number of maximal delegation paths ending at `target` once its own
/// delegation is suspended (the leaves of its in-tree).
pub fn maximal_path_count(profile: &DelegationProfile, target: &AgentId) -> Result<usize> {
    let t = profile.require(target)?;
    let preds = Predecessors::of(profile.successors());
    let mut leaves = 0;
    let mut stack = vec![t];
    while let Some(node) = stack.pop() {
        let mut children = preds.sources(node).iter().copied().filter(|&j| j != t).peekable();
        if children.peek().is_none() && node != t {
            leaves += 1;
        }
        stack.extend(children);
    }
    Ok(leaves)
}
