//! The lottery view of a suspendible profile: each delegating agent runs an
//! independent Bernoulli trial and either votes (suspending its delegation)
//! or forwards. This module samples and enumerates realized graphs, tallies
//! them, and estimates expected weight both exactly and by Monte Carlo.
//!
//! Monte Carlo sample `k` draws from ChaCha8 seeded with `seed` on stream
//! `k` (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)` followed by
//! `set_stream(k)`). Results therefore depend only on `(seed, samples)` and
//! the agent order, never on thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{AgentId, DelegationProfile};
use crate::influence::SuspendibleProfile;

/// Maximum number of Bernoulli trials [`enumerate_expected_weight`] will
/// expand (2^25 outcomes).
pub const ENUMERATION_LIMIT: usize = 25;

const OUTCOME_CHUNK: usize = 1 << 12;
const SAMPLE_CHUNK: usize = 1 << 10;

/// One draw from the lottery: a profile in which every voter is a
/// self-loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizedGraph {
    profile: DelegationProfile,
}

impl RealizedGraph {
    pub fn new(profile: DelegationProfile) -> Self {
        RealizedGraph { profile }
    }

    pub fn profile(&self) -> &DelegationProfile {
        &self.profile
    }

    pub fn is_voter(&self, index: usize) -> bool {
        self.profile.is_endpoint(index)
    }

    pub fn voters(&self) -> impl Iterator<Item = &AgentId> + '_ {
        (0..self.profile.len()).filter(|&i| self.is_voter(i)).map(|i| self.profile.agent(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TallyResult {
    agents: Vec<AgentId>,
    voter: Vec<bool>,
    cast: Vec<usize>,
    lost: usize,
}

impl TallyResult {
    /// Ballots cast by `agent`, or `None` if it is not a voter.
    pub fn cast(&self, agent: &AgentId) -> Option<usize> {
        let i = self.agents.iter().position(|a| a == agent)?;
        self.voter[i].then_some(self.cast[i])
    }

    /// `(voter, ballots)` pairs in agent order.
    pub fn iter(&self) -> impl Iterator<Item = (&AgentId, usize)> + '_ {
        self.agents.iter().zip(&self.cast).zip(&self.voter).filter(|(_, &v)| v).map(|((a, &c), _)| (a, c))
    }

    /// Ballots that ended in a cycle nobody on it voted in.
    pub fn lost(&self) -> usize {
        self.lost
    }

    pub fn total_cast(&self) -> usize {
        self.cast.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

const UNSEEN: usize = usize::MAX;
const ON_PATH: usize = usize::MAX - 1;
const LOST: usize = usize::MAX - 2;

/// Reusable scratch space for tallying realized successor maps.
struct Tallier {
    resolved: Vec<usize>,
    path: Vec<usize>,
}

impl Tallier {
    fn new(n: usize) -> Self {
        Tallier { resolved: vec![UNSEEN; n], path: Vec::with_capacity(n) }
    }

    /// Resolves every agent to the voter its ballot reaches (or `LOST`).
    fn resolve(&mut self, succ: &[usize]) -> &[usize] {
        self.resolved.fill(UNSEEN);
        for start in 0..succ.len() {
            if self.resolved[start] != UNSEEN {
                continue;
            }
            self.path.clear();
            let mut cur = start;
            let result = loop {
                match self.resolved[cur] {
                    UNSEEN => {}
                    ON_PATH => break LOST,
                    done => break done,
                }
                if succ[cur] == cur {
                    self.resolved[cur] = cur;
                    break cur;
                }
                self.resolved[cur] = ON_PATH;
                self.path.push(cur);
                cur = succ[cur];
            };
            for &x in &self.path {
                self.resolved[x] = result;
            }
        }
        &self.resolved
    }

    fn cast_for(&mut self, succ: &[usize], voter: usize) -> usize {
        self.resolve(succ).iter().filter(|&&r| r == voter).count()
    }
}

/// Credits each ballot to the first voter on its delegation path. Ballots
/// that circle forever among non-voters are lost.
pub fn tally(realized: &RealizedGraph) -> TallyResult {
    let profile = &realized.profile;
    let n = profile.len();
    let mut tallier = Tallier::new(n);
    let mut cast = vec![0usize; n];
    let mut lost = 0;
    for &r in tallier.resolve(profile.successors()) {
        if r == LOST {
            lost += 1;
        } else {
            cast[r] += 1;
        }
    }
    TallyResult { agents: profile.agents().to_vec(), voter: (0..n).map(|i| realized.is_voter(i)).collect(), cast, lost }
}

fn forced_mask(sp: &SuspendibleProfile, forced: &[AgentId]) -> Result<Vec<bool>> {
    let mut mask = vec![false; sp.len()];
    for agent in forced {
        mask[sp.profile().require(agent)?] = true;
    }
    Ok(mask)
}

/// Draws one realized successor map into `out`. Only delegating agents
/// that are not forced consume a random number, in index order.
fn realize_into<R: Rng + ?Sized>(sp: &SuspendibleProfile, rng: &mut R, forced: &[bool], out: &mut [usize]) {
    let succ = sp.profile().successors();
    for (i, slot) in out.iter_mut().enumerate() {
        let votes = succ[i] == i || forced[i] || rng.gen::<f64>() < sp.vote_probability(i);
        *slot = if votes { i } else { succ[i] };
    }
}

/// Samples a realized graph: every delegating agent outside
/// `forced_voters` votes with its probability; forced voters and endpoints
/// always vote.
pub fn sample_graph<R: Rng + ?Sized>(
    sp: &SuspendibleProfile,
    rng: &mut R,
    forced_voters: &[AgentId],
) -> Result<RealizedGraph> {
    let forced = forced_mask(sp, forced_voters)?;
    let mut succ = vec![0; sp.len()];
    realize_into(sp, rng, &forced, &mut succ);
    let profile = DelegationProfile::from_successor_indices(sp.profile().agents().to_vec(), succ)?;
    Ok(RealizedGraph::new(profile))
}

/// Exhaustive view of the lottery with some agents forced to vote.
#[derive(Clone, Debug)]
pub struct Lottery<'a> {
    sp: &'a SuspendibleProfile,
    forced: Vec<bool>,
    /// Agents whose Bernoulli trial is still open, in index order.
    trials: Vec<usize>,
}

impl<'a> Lottery<'a> {
    pub fn new(sp: &'a SuspendibleProfile, forced_voters: &[AgentId]) -> Result<Self> {
        let forced = forced_mask(sp, forced_voters)?;
        let trials: Vec<usize> = (0..sp.len()).filter(|&i| !sp.profile().is_endpoint(i) && !forced[i]).collect();
        if trials.len() > ENUMERATION_LIMIT {
            return Err(Error::TooLarge { trials: trials.len(), limit: ENUMERATION_LIMIT });
        }
        Ok(Lottery { sp, forced, trials })
    }

    pub fn trials(&self) -> impl Iterator<Item = &AgentId> + '_ {
        self.trials.iter().map(|&i| self.sp.profile().agent(i))
    }

    pub fn outcome_count(&self) -> u64 {
        1u64 << self.trials.len()
    }

    /// Writes outcome `mask` into `out` and returns its probability. Bit `k`
    /// of `mask` set means the `k`-th trial agent votes.
    fn outcome_into(&self, mask: u64, out: &mut [usize]) -> f64 {
        let succ = self.sp.profile().successors();
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = if self.forced[i] { i } else { succ[i] };
        }
        let mut prob = 1.0;
        for (k, &i) in self.trials.iter().enumerate() {
            let p = self.sp.vote_probability(i);
            if mask >> k & 1 == 1 {
                out[i] = i;
                prob *= p;
            } else {
                prob *= 1.0 - p;
            }
        }
        prob
    }

    /// Outcome `mask` as a realized graph together with its probability.
    pub fn outcome(&self, mask: u64) -> (f64, RealizedGraph) {
        let mut succ = vec![0; self.sp.len()];
        let prob = self.outcome_into(mask, &mut succ);
        let profile = DelegationProfile::from_successor_indices(self.sp.profile().agents().to_vec(), succ)
            .expect("outcome keeps the universe");
        (prob, RealizedGraph::new(profile))
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (f64, RealizedGraph)> + '_ {
        (0..self.outcome_count()).map(move |m| self.outcome(m))
    }
}

/// Exact expected weight of `target` by brute force over every outcome of
/// the other agents' trials, with the target forced to vote.
pub fn enumerate_expected_weight(sp: &SuspendibleProfile, target: &AgentId, exec: Execution) -> Result<f64> {
    let t = sp.profile().require(target)?;
    let lottery = Lottery::new(sp, std::slice::from_ref(target))?;
    let outcomes = lottery.outcome_count() as usize;
    let partial = exec.map_chunks(outcomes, OUTCOME_CHUNK, |range| {
        let mut succ = vec![0; sp.len()];
        let mut tallier = Tallier::new(sp.len());
        let mut sum = 0.0;
        for mask in range {
            let prob = lottery.outcome_into(mask as u64, &mut succ);
            if prob > 0.0 {
                sum += prob * tallier.cast_for(&succ, t) as f64;
            }
        }
        sum
    });
    Ok(partial.into_iter().sum())
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

/// Monte Carlo estimate of the expected weight of `target`, which is forced
/// to vote in every sample.
pub fn monte_carlo_expected_weight(
    sp: &SuspendibleProfile,
    target: &AgentId,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloResult> {
    let t = sp.profile().require(target)?;
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    let mut forced = vec![false; sp.len()];
    forced[t] = true;
    let base = ChaCha8Rng::seed_from_u64(seed);
    let partial = exec.map_chunks(samples, SAMPLE_CHUNK, |range| {
        let mut rng = base.clone();
        let mut succ = vec![0; sp.len()];
        let mut tallier = Tallier::new(sp.len());
        let mut moments = Moments::default();
        for k in range {
            rng.set_stream(k as u64);
            rng.set_word_pos(0);
            realize_into(sp, &mut rng, &forced, &mut succ);
            moments.push(tallier.cast_for(&succ, t) as f64);
        }
        moments
    });
    let total = partial.into_iter().fold(Moments::default(), Moments::merge);
    let variance = total.m2 / (total.count - 1.0);
    Ok(MonteCarloResult { estimate: total.mean, std_error: (variance.max(0.0) / total.count).sqrt(), samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(names: &[&str], edges: &[(&str, &str)]) -> DelegationProfile {
        DelegationProfile::build(
            names.iter().map(|&n| AgentId::from(n)),
            edges.iter().map(|&(a, b)| (AgentId::from(a), AgentId::from(b))),
        )
        .unwrap()
    }

    fn realized(names: &[&str], edges: &[(&str, &str)]) -> RealizedGraph {
        RealizedGraph::new(profile(names, edges))
    }

    #[test]
    fn sampling_extremes() {
        let p = profile(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let all_vote = SuspendibleProfile::uniform(p.clone(), 1.0).unwrap();
        let g = sample_graph(&all_vote, &mut rng, &[]).unwrap();
        assert_eq!(g.profile().successors(), &[0, 1, 2]);
        let none_vote = SuspendibleProfile::uniform(p.clone(), 0.0).unwrap();
        let g = sample_graph(&none_vote, &mut rng, &[]).unwrap();
        assert_eq!(g.profile(), &p);
        let g = sample_graph(&none_vote, &mut rng, &["b".into()]).unwrap();
        assert_eq!(g.profile().successors(), &[1, 1, 2]);
        assert!(sample_graph(&none_vote, &mut rng, &["zz".into()]).is_err());
    }

    #[test]
    fn chain_lottery_has_four_equiprobable_outcomes() {
        let p = profile(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let sp = SuspendibleProfile::uniform(p, 0.5).unwrap();
        let lottery = Lottery::new(&sp, &["c".into()]).unwrap();
        let outcomes: Vec<_> = lottery.outcomes().collect();
        assert_eq!(outcomes.len(), 4);
        let mut graphs: Vec<Vec<usize>> = outcomes.iter().map(|(_, g)| g.profile().successors().to_vec()).collect();
        graphs.sort();
        assert_eq!(graphs, vec![vec![0, 1, 2], vec![0, 2, 2], vec![1, 1, 2], vec![1, 2, 2]]);
        assert!(outcomes.iter().all(|(p, _)| *p == 0.25));
    }

    #[test]
    fn tally_resolved_chain() {
        let t = tally(&realized(&["a", "b", "c"], &[("b", "c"), ("c", "a")]));
        assert_eq!(t.cast(&"a".into()), Some(3));
        assert_eq!(t.cast(&"b".into()), None);
        assert_eq!(t.lost(), 0);
    }

    #[test]
    fn tally_decoupled_two_cycle() {
        // a and b both vote; x feeds a, y feeds b
        let t = tally(&realized(&["a", "b", "x", "y"], &[("x", "a"), ("y", "b")]));
        assert_eq!(t.cast(&"a".into()), Some(2));
        assert_eq!(t.cast(&"b".into()), Some(2));
    }

    #[test]
    fn tally_voterless_cycle_loses_everything() {
        let t = tally(&realized(&["a", "b", "c", "x"], &[("a", "b"), ("b", "c"), ("c", "a"), ("x", "a")]));
        assert_eq!(t.lost(), 4);
        assert_eq!(t.iter().count(), 0);
        assert_eq!(t.total_cast(), 0);
    }

    #[test]
    fn enumeration_small_cases() {
        let sp = SuspendibleProfile::uniform(profile(&["a", "b"], &[("a", "b")]), 0.5).unwrap();
        assert_eq!(enumerate_expected_weight(&sp, &"b".into(), Execution::Sequential).unwrap(), 1.5);
        assert_eq!(enumerate_expected_weight(&sp, &"a".into(), Execution::Sequential).unwrap(), 1.0);

        let leaves = ["l1", "l2", "l3", "l4", "l5", "l6"];
        let mut names = vec!["hub"];
        names.extend(leaves);
        let edges: Vec<_> = leaves.iter().map(|&l| (l, "hub")).collect();
        let sp = SuspendibleProfile::uniform(profile(&names, &edges), 0.5).unwrap();
        assert_eq!(enumerate_expected_weight(&sp, &"hub".into(), Execution::Parallel).unwrap(), 4.0);
    }

    #[test]
    fn enumeration_guard() {
        let n = ENUMERATION_LIMIT + 2;
        let succ = vec![0; n];
        let sp = SuspendibleProfile::uniform(DelegationProfile::from_indices(succ).unwrap(), 0.5).unwrap();
        let err = enumerate_expected_weight(&sp, &"0".into(), Execution::Sequential).unwrap_err();
        assert_eq!(err, Error::TooLarge { trials: n - 1, limit: ENUMERATION_LIMIT });
    }

    #[test]
    fn monte_carlo_certain_voters() {
        let p = profile(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let sp = SuspendibleProfile::uniform(p, 1.0).unwrap();
        let r = monte_carlo_expected_weight(&sp, &"c".into(), 100, 3, Execution::Sequential).unwrap();
        assert_eq!((r.estimate, r.std_error, r.samples, r.seed), (1.0, 0.0, 100, 3));
        assert!(monte_carlo_expected_weight(&sp, &"c".into(), 1, 3, Execution::Sequential).is_err());
        assert!(monte_carlo_expected_weight(&sp, &"q".into(), 10, 3, Execution::Sequential).is_err());
    }

    #[test]
    fn monte_carlo_is_independent_of_execution_mode() {
        let p = profile(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("d", "c")]);
        let sp = SuspendibleProfile::uniform(p, 0.3).unwrap();
        let seq = monte_carlo_expected_weight(&sp, &"c".into(), 5000, 11, Execution::Sequential).unwrap();
        let par = monte_carlo_expected_weight(&sp, &"c".into(), 5000, 11, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        let other = monte_carlo_expected_weight(&sp, &"c".into(), 5000, 12, Execution::Parallel).unwrap();
        assert_ne!(seq.estimate, other.estimate);
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i * 37 % 11) as f64).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (a, b) = xs.split_at(33);
        let mut left = Moments::default();
        a.iter().for_each(|&x| left.push(x));
        let mut right = Moments::default();
        b.iter().for_each(|&x| right.push(x));
        let merged = left.merge(right);
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-9);
    }
}
