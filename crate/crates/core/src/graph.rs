//! Delegation profiles, scoped overlays and the functional-graph structure
//! (ultimate sets, ultimate proxies, delegation distances).
//!
//! A [`DelegationProfile`] is a total successor map: every agent has exactly
//! one proxy and an endpoint is its own proxy. Such a graph is a forest of
//! in-trees whose roots sit on cycles; the cycles (including the self-loops
//! of endpoints) are the *ultimate sets*.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque, orderable agent identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Self {
        AgentId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        AgentId(s.to_owned())
    }
}

impl From<String> for AgentId {
    fn from(s: String) -> Self {
        AgentId(s)
    }
}

/// A total delegation map over a finite universe of agents.
///
/// Agents are addressed internally by dense indices `0..len()`; the
/// index order is the order in which the universe was supplied (sorted when
/// built through [`DelegationProfile::build`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegationProfile {
    agents: Vec<AgentId>,
    index: HashMap<AgentId, usize>,
    successor: Vec<usize>,
}

impl DelegationProfile {
    /// Builds a profile from a universe and a list of delegations. Agents
    /// without an outgoing edge become endpoints. An explicit `a -> a` edge
    /// is accepted and also means "endpoint".
    pub fn build<U, E>(universe: U, edges: E) -> Result<Self>
    where
        U: IntoIterator<Item = AgentId>,
        E: IntoIterator<Item = (AgentId, AgentId)>,
    {
        let agents: Vec<AgentId> = universe.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if agents.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let index = index_agents(&agents)?;
        let mut successor: Vec<usize> = (0..agents.len()).collect();
        let mut seen = vec![false; agents.len()];
        for (from, to) in edges {
            let i = *index.get(&from).ok_or_else(|| Error::UnknownAgent(from.clone()))?;
            let j = *index.get(&to).ok_or(Error::UnknownAgent(to))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateDelegator(from));
            }
            successor[i] = j;
        }
        Ok(DelegationProfile { agents, index, successor })
    }

    /// Builds a profile from agents in a fixed order and a successor index
    /// per agent.
    pub fn from_successor_indices(agents: Vec<AgentId>, successor: Vec<usize>) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        assert_eq!(agents.len(), successor.len(), "one successor per agent");
        let index = index_agents(&agents)?;
        if let Some(&bad) = successor.iter().find(|&&s| s >= agents.len()) {
            return Err(Error::UnknownAgent(AgentId::new(format!("#{bad}"))));
        }
        Ok(DelegationProfile { agents, index, successor })
    }

    /// Profile over agents named `0`, `1`, ... with the given successors.
    /// Handy for generated graphs.
    pub fn from_indices(successor: Vec<usize>) -> Result<Self> {
        let agents = (0..successor.len()).map(|i| AgentId::new(i.to_string())).collect();
        Self::from_successor_indices(agents, successor)
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn agent(&self, index: usize) -> &AgentId {
        &self.agents[index]
    }

    pub fn index_of(&self, agent: &AgentId) -> Option<usize> {
        self.index.get(agent).copied()
    }

    pub(crate) fn require(&self, agent: &AgentId) -> Result<usize> {
        self.index_of(agent).ok_or_else(|| Error::UnknownAgent(agent.clone()))
    }

    pub fn successors(&self) -> &[usize] {
        &self.successor
    }

    pub fn successor_index(&self, index: usize) -> usize {
        self.successor[index]
    }

    pub fn successor(&self, agent: &AgentId) -> Option<&AgentId> {
        self.index_of(agent).map(|i| &self.agents[self.successor[i]])
    }

    pub fn is_endpoint(&self, index: usize) -> bool {
        self.successor[index] == index
    }

    /// Non-self delegations as `(from, to)` pairs in index order.
    pub fn delegations(&self) -> impl Iterator<Item = (&AgentId, &AgentId)> + '_ {
        self.successor.iter().enumerate().filter(|(i, &s)| *i != s).map(|(i, &s)| (&self.agents[i], &self.agents[s]))
    }

    /// Profile with the outgoing delegation of every agent in `actors`
    /// suspended. Incoming delegations are untouched.
    pub fn suspend<'a, I>(&self, actors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a AgentId>,
    {
        let mut successor = self.successor.clone();
        for agent in actors {
            let i = self.require(agent)?;
            successor[i] = i;
        }
        Ok(DelegationProfile { agents: self.agents.clone(), index: self.index.clone(), successor })
    }

    /// Index-based suspension used by the hot paths.
    pub(crate) fn suspend_where(&self, mut suspended: impl FnMut(usize) -> bool) -> Self {
        let successor = self.successor.iter().enumerate().map(|(i, &s)| if suspended(i) { i } else { s }).collect();
        DelegationProfile { agents: self.agents.clone(), index: self.index.clone(), successor }
    }

    /// Full structural decomposition in linear time.
    pub fn decompose(&self) -> Decomposition {
        Decomposition::of(&self.successor)
    }

    pub fn ultimate_sets(&self) -> Vec<UltimateSet> {
        let d = self.decompose();
        d.sets.iter().map(|members| UltimateSet::from_indices(self, members)).collect()
    }

    /// The ultimate set reached from `agent`, the first member of it on the
    /// delegation path (the ultimate proxy) and the number of steps taken.
    pub fn ultimate_proxy(&self, agent: &AgentId) -> Result<UltimateProxy> {
        let start = self.require(agent)?;
        let mut step_of: HashMap<usize, usize> = HashMap::new();
        let mut cur = start;
        let mut step = 0;
        while let std::collections::hash_map::Entry::Vacant(v) = step_of.entry(cur) {
            v.insert(step);
            cur = self.successor[cur];
            step += 1;
        }
        // `cur` is the first repeated node, i.e. the entry into the cycle.
        let entry = cur;
        let mut members = vec![entry];
        let mut next = self.successor[entry];
        while next != entry {
            members.push(next);
            next = self.successor[next];
        }
        Ok(UltimateProxy {
            set: UltimateSet::from_indices(self, &members),
            entry: self.agents[entry].clone(),
            distance: step_of[&entry],
        })
    }

    /// Steps along the unique delegation path from `from` until `to` is
    /// first reached, or `None` if the path never touches `to`.
    pub fn delegation_distance(&self, from: &AgentId, to: &AgentId) -> Result<Option<usize>> {
        let mut cur = self.require(from)?;
        let target = self.require(to)?;
        // Within n steps every node on the path (including the whole cycle)
        // has been visited.
        for step in 0..=self.len() {
            if cur == target {
                return Ok(Some(step));
            }
            cur = self.successor[cur];
        }
        Ok(None)
    }

    /// Sub-profile containing exactly the agents that share `agent`'s
    /// ultimate set (its weakly connected component).
    pub fn component(&self, agent: &AgentId) -> Result<Self> {
        let root = self.require(agent)?;
        let d = self.decompose();
        let set = d.set_of[root];
        let keep: Vec<usize> = (0..self.len()).filter(|&i| d.set_of[i] == set).collect();
        let mut remap = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let agents = keep.iter().map(|&i| self.agents[i].clone()).collect();
        let successor = keep.iter().map(|&i| remap[self.successor[i]]).collect();
        Self::from_successor_indices(agents, successor)
    }
}

fn index_agents(agents: &[AgentId]) -> Result<HashMap<AgentId, usize>> {
    let mut index = HashMap::with_capacity(agents.len());
    for (i, a) in agents.iter().enumerate() {
        if index.insert(a.clone(), i).is_some() {
            return Err(Error::DuplicateAgent(a.clone()));
        }
    }
    Ok(index)
}

/// Per-agent structural data of a functional graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Ultimate sets as index lists in cycle order, starting at the
    /// smallest index of each cycle. Sets are ordered by that index.
    pub sets: Vec<Vec<usize>>,
    /// Index into `sets` of the ultimate set each agent reaches.
    pub set_of: Vec<usize>,
    /// First ultimate-set member on each agent's path (the ultimate proxy).
    pub entry: Vec<usize>,
    /// Steps from each agent to its entry.
    pub depth: Vec<usize>,
}

impl Decomposition {
    pub fn of(successor: &[usize]) -> Self {
        const NEW: u8 = 0;
        const ON_PATH: u8 = 1;
        const DONE: u8 = 2;
        let n = successor.len();
        let mut state = vec![NEW; n];
        let mut set_of = vec![usize::MAX; n];
        let mut entry = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut raw_sets: Vec<Vec<usize>> = Vec::new();
        let mut path = Vec::new();

        for start in 0..n {
            if state[start] != NEW {
                continue;
            }
            path.clear();
            let mut cur = start;
            while state[cur] == NEW {
                state[cur] = ON_PATH;
                path.push(cur);
                cur = successor[cur];
            }
            if state[cur] == ON_PATH {
                let pos = path.iter().position(|&x| x == cur).expect("node is on the current path");
                let id = raw_sets.len();
                let members: Vec<usize> = path.drain(pos..).collect();
                for &m in &members {
                    state[m] = DONE;
                    set_of[m] = id;
                    entry[m] = m;
                    depth[m] = 0;
                }
                raw_sets.push(members);
            }
            while let Some(x) = path.pop() {
                let s = successor[x];
                state[x] = DONE;
                set_of[x] = set_of[s];
                entry[x] = entry[s];
                depth[x] = depth[s] + 1;
            }
        }

        // Canonical order: rotate each cycle to its smallest member, sort
        // sets by that member.
        for members in &mut raw_sets {
            let (pos, _) = members.iter().enumerate().min_by_key(|(_, &m)| m).expect("nonempty");
            members.rotate_left(pos);
        }
        let mut order: Vec<usize> = (0..raw_sets.len()).collect();
        order.sort_by_key(|&s| raw_sets[s][0]);
        let mut rank = vec![0; raw_sets.len()];
        for (r, &s) in order.iter().enumerate() {
            rank[s] = r;
        }
        for s in &mut set_of {
            *s = rank[*s];
        }
        let sets = order.into_iter().map(|s| std::mem::take(&mut raw_sets[s])).collect();
        Decomposition { sets, set_of, entry, depth }
    }

    /// Whether agent `i` lies on a cycle or is an endpoint.
    pub fn is_ultimate(&self, i: usize) -> bool {
        self.depth[i] == 0
    }

    /// Number of agents reaching each ultimate set (component sizes).
    pub fn basin_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.sets.len()];
        for &s in &self.set_of {
            sizes[s] += 1;
        }
        sizes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UltimateKind {
    /// A single agent that delegates to nobody.
    Endpoint,
    /// A delegation cycle of two or more agents.
    Cycle,
}

/// A minimal set `X` with `D(X) = X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltimateSet {
    /// Members in delegation order, starting with the smallest index.
    pub members: Vec<AgentId>,
    pub kind: UltimateKind,
}

impl UltimateSet {
    fn from_indices(profile: &DelegationProfile, members: &[usize]) -> Self {
        // Rotate so equal sets compare equal regardless of where they were
        // entered.
        let start = members.iter().enumerate().min_by_key(|(_, &m)| m).map(|(p, _)| p).unwrap_or(0);
        let members: Vec<AgentId> =
            members[start..].iter().chain(&members[..start]).map(|&m| profile.agent(m).clone()).collect();
        let kind = if members.len() == 1 { UltimateKind::Endpoint } else { UltimateKind::Cycle };
        UltimateSet { members, kind }
    }

    pub fn contains(&self, agent: &AgentId) -> bool {
        self.members.contains(agent)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltimateProxy {
    pub set: UltimateSet,
    /// First member of `set` on the delegation path.
    pub entry: AgentId,
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IssueId(String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AreaId(String);

impl IssueId {
    pub fn new(id: impl Into<String>) -> Self {
        IssueId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl AreaId {
    pub fn new(id: impl Into<String>) -> Self {
        AreaId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Unit a delegation applies to. More specific scopes override less
/// specific ones when a profile is consolidated for an issue.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    #[default]
    Global,
    Area(AreaId),
    Issue(IssueId),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Global => f.write_str("global"),
            Scope::Area(a) => write!(f, "area:{}", a.as_str()),
            Scope::Issue(i) => write!(f, "issue:{}", i.as_str()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopedDelegation {
    pub from: AgentId,
    pub to: AgentId,
    #[serde(default)]
    pub scope: Scope,
}

/// Global, per-area and per-issue delegations over one universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegationOverlay {
    universe: BTreeSet<AgentId>,
    // (agent, scope) -> proxy
    delegations: BTreeMap<(AgentId, Scope), AgentId>,
    area_of: BTreeMap<IssueId, AreaId>,
}

impl DelegationOverlay {
    pub fn new<U, D>(universe: U, delegations: D, area_of: BTreeMap<IssueId, AreaId>) -> Result<Self>
    where
        U: IntoIterator<Item = AgentId>,
        D: IntoIterator<Item = ScopedDelegation>,
    {
        let mut set = BTreeSet::new();
        for agent in universe {
            if !set.insert(agent.clone()) {
                return Err(Error::DuplicateAgent(agent));
            }
        }
        if set.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let mut map = BTreeMap::new();
        for d in delegations {
            for agent in [&d.from, &d.to] {
                if !set.contains(agent) {
                    return Err(Error::UnknownAgent(agent.clone()));
                }
            }
            if d.from == d.to {
                return Err(Error::SelfDelegation(d.from));
            }
            if let Scope::Issue(issue) = &d.scope {
                if !area_of.contains_key(issue) {
                    return Err(Error::UnknownIssue(issue.as_str().to_owned()));
                }
            }
            let key = (d.from, d.scope);
            if map.contains_key(&key) {
                let (agent, scope) = key;
                return Err(Error::DuplicateScope { agent, scope: scope.to_string() });
            }
            map.insert(key, d.to);
        }
        Ok(DelegationOverlay { universe: set, delegations: map, area_of })
    }

    pub fn universe(&self) -> impl Iterator<Item = &AgentId> + '_ {
        self.universe.iter()
    }

    pub fn area_of(&self, issue: &IssueId) -> Option<&AreaId> {
        self.area_of.get(issue)
    }

    /// Whether any delegation is scoped to an area or an issue.
    pub fn has_scoped_delegations(&self) -> bool {
        self.delegations.keys().any(|(_, s)| *s != Scope::Global)
    }

    pub fn delegations(&self) -> impl Iterator<Item = ScopedDelegation> + '_ {
        self.delegations.iter().map(|((from, scope), to)| ScopedDelegation {
            from: from.clone(),
            to: to.clone(),
            scope: scope.clone(),
        })
    }

    /// The profile in force for `issue`: per agent, the issue delegation if
    /// present, else the delegation for the issue's area, else the global
    /// one, else none.
    pub fn consolidate(&self, issue: &IssueId) -> Result<DelegationProfile> {
        let area = self.area_of.get(issue).ok_or_else(|| Error::UnknownIssue(issue.as_str().to_owned()))?;
        let issue_scope = Scope::Issue(issue.clone());
        let area_scope = Scope::Area(area.clone());
        self.consolidate_with(|agent| {
            self.delegations
                .get(&(agent.clone(), issue_scope.clone()))
                .or_else(|| self.delegations.get(&(agent.clone(), area_scope.clone())))
                .or_else(|| self.delegations.get(&(agent.clone(), Scope::Global)))
        })
    }

    /// The profile made of global delegations only.
    pub fn consolidate_global(&self) -> Result<DelegationProfile> {
        self.consolidate_with(|agent| self.delegations.get(&(agent.clone(), Scope::Global)))
    }

    fn consolidate_with<'a>(&'a self, pick: impl Fn(&AgentId) -> Option<&'a AgentId>) -> Result<DelegationProfile> {
        let edges: Vec<(AgentId, AgentId)> =
            self.universe.iter().filter_map(|a| pick(a).map(|to| (a.clone(), to.clone()))).collect();
        DelegationProfile::build(self.universe.iter().cloned(), edges)
    }
}

/// Agents reachable backwards from each node, in compressed sparse form.
#[derive(Clone, Debug)]
pub(crate) struct Predecessors {
    offsets: Vec<usize>,
    sources: Vec<usize>,
}

impl Predecessors {
    /// Reverse adjacency of the non-self edges of `successor`.
    pub(crate) fn of(successor: &[usize]) -> Self {
        let n = successor.len();
        let mut offsets = vec![0usize; n + 1];
        for (i, &s) in successor.iter().enumerate() {
            if s != i {
                offsets[s + 1] += 1;
            }
        }
        for k in 0..n {
            offsets[k + 1] += offsets[k];
        }
        let mut fill = offsets.clone();
        let mut sources = vec![0; offsets[n]];
        for (i, &s) in successor.iter().enumerate() {
            if s != i {
                sources[fill[s]] = i;
                fill[s] += 1;
            }
        }
        Predecessors { offsets, sources }
    }

    pub(crate) fn sources(&self, node: usize) -> &[usize] {
        &self.sources[self.offsets[node]..self.offsets[node + 1]]
    }
}
