#![allow(dead_code)]

use std::path::PathBuf;

use teamsim::graph::CollabGraph;
use teamsim::metrics::ComponentSummary;
use teamsim::{AgentId, Culture, RngStream};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Random graph with up to `max_nodes` agents and independent edge draws.
pub fn random_graph(rng: &mut RngStream, max_nodes: usize) -> CollabGraph {
    let n = rng.index(max_nodes + 1);
    let density = rng.unit() * 0.15;
    let mut g = CollabGraph::new();
    for i in 0..n {
        let culture = if rng.bernoulli(0.5) { Culture::Basic } else { Culture::Clinical };
        g.insert_agent(AgentId(i as u64), culture, 0);
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.unit() < density {
                g.add_edge(AgentId(a as u64), AgentId(b as u64));
            }
        }
    }
    g
}

/// Component census by exhaustive depth-first search.
pub fn dfs_census(g: &CollabGraph) -> Vec<ComponentSummary> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for start in g.ids() {
        if !seen.insert(start) {
            continue;
        }
        let mut c = ComponentSummary { size: 0, basic: 0, clinical: 0 };
        let mut stack = vec![start];
        while let Some(id) = stack.pop() {
            c.size += 1;
            match g.culture(id).unwrap() {
                Culture::Basic => c.basic += 1,
                Culture::Clinical => c.clinical += 1,
            }
            for next in g.agent(id).unwrap().collaborators().keys() {
                if seen.insert(*next) {
                    stack.push(*next);
                }
            }
        }
        out.push(c);
    }
    out.sort_by(|x, y| y.cmp(x));
    out
}

pub fn dfs_giant_pct(g: &CollabGraph) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    let largest = dfs_census(g).iter().map(|c| c.size).max().unwrap_or(0);
    100.0 * largest as f64 / g.len() as f64
}
