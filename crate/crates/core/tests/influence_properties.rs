mod common;

use std::collections::BTreeSet;

use approx::assert_relative_eq;
use common::{arb_profile, arb_suspendible, random_profile, terminal_cycle, walk};
use liquid_influence::fixtures;
use liquid_influence::graph::AgentId;
use liquid_influence::influence::{
    delegation_matrix, expected_weight, expected_weight_chain, expected_weight_star, expected_weights, first_passage,
    maximal_path_count, potential_weight, stationary_analytic, stationary_iterative, SuspendibleProfile,
};
use liquid_influence::Execution;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Agents credited with `j`: those on its path, plus every member of the
/// ultimate set it ends in.
fn credited(succ: &[usize], j: usize) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = walk(succ, j).into_iter().collect();
    out.extend(terminal_cycle(succ, j));
    out
}

#[test]
fn potential_weight_matches_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..60 {
        let n = 1 + round * 200 / 60;
        let profile = random_profile(&mut rng, n, 0.15);
        let succ = profile.successors();
        let mut expected = vec![0usize; n];
        for j in 0..n {
            for i in credited(succ, j) {
                expected[i] += 1;
            }
        }
        let w = potential_weight(&profile);
        let got: Vec<usize> = w.values().iter().map(|&x| x as usize).collect();
        assert_eq!(got, expected, "n = {n}");
        let total: usize = (0..n).map(|j| credited(succ, j).len()).sum();
        assert_eq!(w.total() as usize, total);
    }
}

/// Reach probability by walking from `j` until the target or a repeat.
fn naive_reach(sp: &SuspendibleProfile, j: usize, t: usize) -> f64 {
    if j == t {
        return 1.0;
    }
    let succ = sp.profile().successors();
    let mut prob = 1.0;
    let mut seen = vec![false; succ.len()];
    let mut cur = j;
    while cur != t {
        if seen[cur] || succ[cur] == cur {
            return 0.0;
        }
        seen[cur] = true;
        prob *= 1.0 - sp.vote_probability(cur);
        cur = succ[cur];
    }
    prob
}

proptest! {
    #[test]
    fn first_passage_matches_path_products(sp in arb_suspendible(30)) {
        for t in 0..sp.len() {
            let fp = first_passage(&sp, sp.profile().agent(t)).unwrap();
            for j in 0..sp.len() {
                let naive = naive_reach(&sp, j, t);
                prop_assert!((fp.values()[j] - naive).abs() <= 1e-12, "t={} j={}", t, j);
            }
            let psi = expected_weight(&sp, sp.profile().agent(t)).unwrap();
            prop_assert!((psi - fp.total()).abs() <= 1e-9);
        }
    }

    #[test]
    fn expected_weight_is_bounded_by_potential(sp in arb_suspendible(40)) {
        let potential = potential_weight(sp.profile());
        let psi = expected_weights(&sp, Execution::Sequential);
        for t in 0..sp.len() {
            prop_assert!(psi.values()[t] >= 1.0);
            prop_assert!(psi.values()[t] <= potential.values()[t] + 1e-9);
        }
    }

    #[test]
    fn path_bound_holds(sp in arb_suspendible(40)) {
        for t in 0..sp.len() {
            let agent = sp.profile().agent(t);
            let fp = first_passage(&sp, agent).unwrap();
            let in_tree: Vec<usize> = (0..sp.len()).filter(|&j| j != t && fp.values()[j] > 0.0).collect();
            let psi = expected_weight(&sp, agent).unwrap();
            if in_tree.is_empty() {
                prop_assert_eq!(psi, 1.0);
                continue;
            }
            let p_min = in_tree.iter().map(|&j| sp.vote_probability(j)).fold(1.0, f64::min);
            let f = maximal_path_count(sp.profile(), agent).unwrap() as f64;
            prop_assert!(psi <= 1.0 + f * (1.0 - p_min) / p_min + 1e-9);
        }
    }

    #[test]
    fn delegation_matrix_rows_are_stochastic(sp in arb_suspendible(40)) {
        let m = delegation_matrix(&sp);
        let succ = sp.profile().successors();
        for (i, &s) in succ.iter().enumerate() {
            prop_assert!((m.row_sum(i) - 1.0).abs() <= 1e-12);
            let nonzero = (0..m.len()).filter(|&j| m.get(i, j) != 0.0 && j != i && j != s).count();
            prop_assert_eq!(nonzero, 0);
        }
    }

    #[test]
    fn stationary_mass_sits_on_ultimate_sets(sp in arb_suspendible(30)) {
        let analytic = stationary_analytic(&sp);
        let d = sp.profile().decompose();
        for i in 0..sp.len() {
            if !d.is_ultimate(i) {
                prop_assert_eq!(analytic.distribution[i], 0.0);
            }
        }
        for set in &d.sets {
            let p0 = sp.vote_probability(set[0]);
            if set.iter().all(|&m| sp.vote_probability(m) == p0) {
                let m0 = analytic.distribution[set[0]];
                for &m in set {
                    prop_assert!((analytic.distribution[m] - m0).abs() <= 1e-15);
                }
            }
        }
        prop_assert!((analytic.distribution.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let iterative = stationary_iterative(&sp, 1e-12, 200_000).unwrap();
        prop_assert!(analytic.max_difference(&iterative) <= 1e-8);
    }

    #[test]
    fn uniform_cycles_share_stationary_mass_equally(profile in arb_profile(30), p in 0.01f64..0.99) {
        let sp = SuspendibleProfile::uniform(profile, p).unwrap();
        let analytic = stationary_analytic(&sp);
        for set in sp.profile().ultimate_sets() {
            let masses: Vec<f64> = set.members.iter().map(|a| analytic.mass(a).unwrap()).collect();
            prop_assert!(masses.iter().all(|&m| m == masses[0]));
        }
    }

    #[test]
    fn cycle_targets_decouple_from_their_own_delegation(sp in arb_suspendible(30)) {
        for t in 0..sp.len() {
            let agent = sp.profile().agent(t);
            let suspended = sp.suspend([agent]).unwrap();
            prop_assert_eq!(expected_weight(&sp, agent).unwrap(), expected_weight(&suspended, agent).unwrap());
        }
    }
}

#[test]
fn limit_facts_on_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid: Vec<f64> = (1..=20).map(|k| k as f64 / 21.0).collect();
    for round in 0..200 {
        let n = 1 + round % 50;
        let profile = random_profile(&mut rng, n, 0.1);
        let potential = potential_weight(&profile);
        let certain =
            expected_weights(&SuspendibleProfile::uniform(profile.clone(), 1.0).unwrap(), Execution::Sequential);
        assert!(certain.values().iter().all(|&x| x == 1.0));
        let tiny =
            expected_weights(&SuspendibleProfile::uniform(profile.clone(), 1e-9).unwrap(), Execution::Sequential);
        for (a, b) in tiny.values().iter().zip(potential.values()) {
            assert!((a - b).abs() <= 1e-5, "{a} vs {b}");
        }
        let mut previous = potential.values().to_vec();
        for &p in &grid {
            let current =
                expected_weights(&SuspendibleProfile::uniform(profile.clone(), p).unwrap(), Execution::Sequential);
            for (c, prev) in current.values().iter().zip(&previous) {
                assert!(*c <= prev + 1e-12, "not monotone at p = {p}");
            }
            previous = current.values().to_vec();
        }
    }
}

#[test]
fn explicit_chains_and_stars_match_closed_forms() {
    for p in [0.1, 0.25, 0.5, 0.9] {
        for n in 0..=64usize {
            let profile = fixtures::chain(n).profile(None).unwrap();
            let sp = SuspendibleProfile::uniform(profile, p).unwrap();
            let built = expected_weight(&sp, &AgentId::from("t")).unwrap();
            assert_relative_eq!(built, expected_weight_chain(n as u64, p).unwrap(), max_relative = 1e-12);
        }
        for k in 0..=64usize {
            let profile = fixtures::star(k).profile(None).unwrap();
            let sp = SuspendibleProfile::uniform(profile, p).unwrap();
            let built = expected_weight(&sp, &AgentId::from("hub")).unwrap();
            assert_relative_eq!(built, expected_weight_star(k as u64, p).unwrap(), max_relative = 1e-12);
        }
    }
}

#[test]
fn sequential_and_parallel_weights_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sp = common::random_suspendible(&mut rng, 3000, 0.05);
    let a = expected_weights(&sp, Execution::Sequential);
    let b = expected_weights(&sp, Execution::Parallel);
    assert_eq!(a, b);
}
