//! Network observables: giant-component share, interdisciplinary share,
//! windowed team size, component censuses and team-composition statistics.
//! Every percentage is taken over active agents only.

use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{Draw, SimState, Team};
use crate::graph::CollabGraph;
use crate::types::{AgentId, Culture};

pub const CSV_HEADER: &str =
    "tick,avg_team_size,pct_giant,pct_interdisciplinary,active_agents,active_basic,active_clinical";

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// One connected component: total size and its culture split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ComponentSummary {
    pub size: usize,
    pub basic: usize,
    pub clinical: usize,
}

/// Components sorted by descending size, then descending basic count.
pub fn component_census(graph: &CollabGraph) -> Vec<ComponentSummary> {
    let ids: Vec<AgentId> = graph.ids().collect();
    let pos = |id: AgentId| ids.binary_search(&id).expect("edge endpoint is active");
    let mut dsu = DisjointSet::new(ids.len());
    for (a, b, _) in graph.edges() {
        dsu.union(pos(a), pos(b));
    }
    let mut by_root = vec![ComponentSummary { size: 0, basic: 0, clinical: 0 }; ids.len()];
    for (i, agent) in graph.agents().enumerate() {
        let c = &mut by_root[dsu.find(i)];
        c.size += 1;
        match agent.culture {
            Culture::Basic => c.basic += 1,
            Culture::Clinical => c.clinical += 1,
        }
    }
    let mut census: Vec<ComponentSummary> = by_root.into_iter().filter(|c| c.size > 0).collect();
    census.sort_unstable_by(|x, y| y.cmp(x));
    census
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

/// Share of active agents in the largest connected component.
pub fn giant_component_pct(graph: &CollabGraph) -> f64 {
    let largest = component_census(graph).first().map_or(0, |c| c.size);
    pct(largest, graph.len())
}

/// Share of active agents with at least one collaborator of the other culture.
pub fn interdisciplinary_pct(graph: &CollabGraph) -> f64 {
    pct(interdisciplinary_count(graph), graph.len())
}

fn interdisciplinary_count(graph: &CollabGraph) -> usize {
    graph
        .agents()
        .filter(|a| {
            a.collaborators()
                .keys()
                .any(|c| graph.culture(*c) == Some(a.culture.opposite()))
        })
        .count()
}

/// Mean member count over a window of teams; 0 for an empty window.
pub fn avg_team_size<'a>(teams: impl IntoIterator<Item = &'a Team>) -> f64 {
    let (n, total) = teams
        .into_iter()
        .fold((0usize, 0usize), |(n, total), t| (n + 1, total + t.size()));
    if n == 0 {
        0.0
    } else {
        total as f64 / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CompositionStats {
    pub team_count: usize,
    pub avg_size: f64,
    pub avg_incumbent_fraction: f64,
    pub pct_teams_with_2plus_incumbents: f64,
}

/// Size and incumbency statistics of the teams originating in `culture`.
pub fn team_composition_stats<'a>(
    teams: impl IntoIterator<Item = &'a Team>,
    culture: Culture,
) -> CompositionStats {
    let mut n = 0usize;
    let mut size_sum = 0usize;
    let mut frac_sum = 0.0;
    let mut two_plus = 0usize;
    for t in teams.into_iter().filter(|t| t.origin_culture == culture) {
        n += 1;
        size_sum += t.size();
        frac_sum += t.incumbent_count as f64 / t.size() as f64;
        if t.incumbent_count >= 2 {
            two_plus += 1;
        }
    }
    if n == 0 {
        return CompositionStats::default();
    }
    CompositionStats {
        team_count: n,
        avg_size: size_sum as f64 / n as f64,
        avg_incumbent_fraction: frac_sum / n as f64,
        pct_teams_with_2plus_incumbents: pct(two_plus, n),
    }
}

/// Per-tick observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsRow {
    pub tick: u64,
    pub avg_team_size: f64,
    pub pct_giant: f64,
    pub pct_interdisciplinary: f64,
    pub active_agents: usize,
    pub active_basic: usize,
    pub active_clinical: usize,
}

/// Metric names in CSV column order, excluding `tick`.
pub const METRIC_NAMES: [&str; 6] = [
    "avg_team_size",
    "pct_giant",
    "pct_interdisciplinary",
    "active_agents",
    "active_basic",
    "active_clinical",
];

impl MetricsRow {
    pub fn observe<R: Draw>(state: &SimState<R>) -> Self {
        let graph = state.graph();
        let counts = graph.culture_counts();
        Self {
            tick: state.tick(),
            avg_team_size: avg_team_size(state.team_log()),
            pct_giant: giant_component_pct(graph),
            pct_interdisciplinary: interdisciplinary_pct(graph),
            active_agents: graph.len(),
            active_basic: counts.basic,
            active_clinical: counts.clinical,
        }
    }

    /// Metric values in [`METRIC_NAMES`] order.
    pub fn values(&self) -> [f64; 6] {
        [
            self.avg_team_size,
            self.pct_giant,
            self.pct_interdisciplinary,
            self.active_agents as f64,
            self.active_basic as f64,
            self.active_clinical as f64,
        ]
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.tick,
            self.avg_team_size,
            self.pct_giant,
            self.pct_interdisciplinary,
            self.active_agents,
            self.active_basic,
            self.active_clinical
        )
    }
}

pub fn series_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

pub fn census_csv(census: &[ComponentSummary]) -> String {
    let mut out = String::from("size,basic_count,clinical_count\n");
    for c in census {
        let _ = writeln!(out, "{},{},{}", c.size, c.basic, c.clinical);
    }
    out
}
