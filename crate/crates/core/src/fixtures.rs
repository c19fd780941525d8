//! Bundled graphs: the three worked examples (a resolved 3-cycle, the
//! 24-agent mixed topology and its 9-agent cycle component), a lone agent,
//! and generated chains and stars.
//!
//! The 24-agent topology was transcribed by hand from a drawing; agent
//! `nXX` is node `XX` there. A misread edge would show up as a wrong golden
//! value in the tests.

use std::collections::BTreeMap;

use crate::graph::{AgentId, Scope, ScopedDelegation};
use crate::io::{parse_graph, GraphDocument};

pub const FIGURE1: &str = include_str!("../fixtures/figure1.json");
pub const FIGURE2: &str = include_str!("../fixtures/figure2.json");
pub const FIGURE3: &str = include_str!("../fixtures/figure3.json");
pub const SINGLE_AGENT: &str = include_str!("../fixtures/single_agent.json");
pub const OVERLAY_EXAMPLE: &str = include_str!("../fixtures/overlay_example.json");

/// Names accepted by [`builtin`], besides `chain-N` and `star-K`.
pub const NAMES: [&str; 5] = ["figure1", "figure2", "figure3", "single_agent", "overlay_example"];

/// Looks up a bundled fixture by name. A trailing `.json` is ignored.
pub fn builtin(name: &str) -> Option<GraphDocument> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    let text = match name {
        "figure1" => FIGURE1,
        "figure2" => FIGURE2,
        "figure3" => FIGURE3,
        "single_agent" => SINGLE_AGENT,
        "overlay_example" => OVERLAY_EXAMPLE,
        _ => {
            if let Some(n) = name.strip_prefix("chain-").and_then(|n| n.parse().ok()) {
                return Some(chain(n));
            }
            if let Some(k) = name.strip_prefix("star-").and_then(|k| k.parse().ok()) {
                return Some(star(k));
            }
            return None;
        }
    };
    Some(parse_graph(text).expect("bundled fixtures are valid"))
}

fn padded(prefix: &str, i: usize, count: usize) -> AgentId {
    let width = count.to_string().len();
    AgentId::new(format!("{prefix}{i:0width$}"))
}

fn document(agents: Vec<AgentId>, edges: Vec<(AgentId, AgentId)>) -> GraphDocument {
    GraphDocument {
        agents,
        delegations: edges.into_iter().map(|(from, to)| ScopedDelegation { from, to, scope: Scope::Global }).collect(),
        areas: BTreeMap::new(),
        probabilities: BTreeMap::new(),
        default_probability: None,
    }
}

/// `d1 -> d2 -> ... -> dN -> t`: a single chain with `n` delegators ending
/// in the endpoint `t`.
pub fn chain(n: usize) -> GraphDocument {
    let mut agents: Vec<AgentId> = (1..=n).map(|i| padded("d", i, n)).collect();
    let mut edges: Vec<(AgentId, AgentId)> = agents.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    let terminal = AgentId::from("t");
    if let Some(last) = agents.last() {
        edges.push((last.clone(), terminal.clone()));
    }
    agents.push(terminal);
    document(agents, edges)
}

/// `k` leaves `l1..lK` delegating directly to `hub`.
pub fn star(k: usize) -> GraphDocument {
    let hub = AgentId::from("hub");
    let leaves: Vec<AgentId> = (1..=k).map(|i| padded("l", i, k)).collect();
    let edges = leaves.iter().map(|l| (l.clone(), hub.clone())).collect();
    let mut agents = vec![hub];
    agents.extend(leaves);
    document(agents, edges)
}
