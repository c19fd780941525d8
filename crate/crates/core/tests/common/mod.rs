#![allow(dead_code)]

use liquid_influence::graph::DelegationProfile;
use liquid_influence::influence::SuspendibleProfile;
use proptest::prelude::*;
use rand::Rng;

/// Random functional graph; each agent is an endpoint with probability
/// `endpoint_rate`, otherwise delegates to a uniformly chosen other agent.
pub fn random_profile<R: Rng>(rng: &mut R, n: usize, endpoint_rate: f64) -> DelegationProfile {
    let succ = (0..n)
        .map(|i| {
            if n == 1 || rng.gen_bool(endpoint_rate) {
                i
            } else {
                let j = rng.gen_range(0..n - 1);
                if j >= i {
                    j + 1
                } else {
                    j
                }
            }
        })
        .collect();
    DelegationProfile::from_indices(succ).unwrap()
}

/// Probabilities drawn from the open interval (0, 1).
pub fn random_suspendible<R: Rng>(rng: &mut R, n: usize, endpoint_rate: f64) -> SuspendibleProfile {
    let profile = random_profile(rng, n, endpoint_rate);
    let probs = (0..n)
        .map(|_| loop {
            let p: f64 = rng.gen();
            if p > 0.0 {
                break p;
            }
        })
        .collect();
    SuspendibleProfile::from_probabilities(profile, probs).unwrap()
}

pub fn arb_successors(max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(0..n, n))
}

pub fn arb_profile(max_n: usize) -> impl Strategy<Value = DelegationProfile> {
    arb_successors(max_n).prop_map(|s| DelegationProfile::from_indices(s).unwrap())
}

pub fn arb_suspendible(max_n: usize) -> impl Strategy<Value = SuspendibleProfile> {
    arb_successors(max_n)
        .prop_flat_map(|s| {
            let n = s.len();
            (Just(s), prop::collection::vec(0.001f64..0.999, n))
        })
        .prop_map(|(s, p)| {
            SuspendibleProfile::from_probabilities(DelegationProfile::from_indices(s).unwrap(), p).unwrap()
        })
}

/// Naive path walk: agents visited from `start` until the first repeat.
pub fn walk(succ: &[usize], start: usize) -> Vec<usize> {
    let mut seen = vec![false; succ.len()];
    let mut out = Vec::new();
    let mut cur = start;
    while !seen[cur] {
        seen[cur] = true;
        out.push(cur);
        cur = succ[cur];
    }
    out
}

/// The cycle (or endpoint) the walk from `start` ends in, found by
/// iterating n steps then collecting the orbit.
pub fn terminal_cycle(succ: &[usize], start: usize) -> Vec<usize> {
    let mut cur = start;
    for _ in 0..succ.len() {
        cur = succ[cur];
    }
    let mut cycle = vec![cur];
    let mut next = succ[cur];
    while next != cur {
        cycle.push(next);
        next = succ[next];
    }
    cycle.sort_unstable();
    cycle
}
