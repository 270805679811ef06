mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use teamsim::graph::CollabGraph;
use teamsim::metrics::{component_census, giant_component_pct, interdisciplinary_pct, MetricsRow};
use teamsim::{AgentId, Culture, CultureParams, ModelParams, RngStream, SimState};

use common::{dfs_census, dfs_giant_pct};

fn arb_graph() -> impl Strategy<Value = CollabGraph> {
    (0usize..30).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((0..n.max(1), 0..n.max(1), 1u32..4), 0..(2 * n + 1)),
        )
            .prop_map(move |(basic, edges)| {
                let mut g = CollabGraph::new();
                for (i, b) in basic.iter().enumerate() {
                    let c = if *b { Culture::Basic } else { Culture::Clinical };
                    g.insert_agent(AgentId(i as u64), c, 0);
                }
                for (a, b, w) in edges {
                    if a < n && b < n {
                        g.add_edge_weight(AgentId(a as u64), AgentId(b as u64), w);
                    }
                }
                g
            })
    })
}

fn arb_culture() -> impl Strategy<Value = CultureParams> {
    (0.0..=1.0f64, 0.0..=1.0f64, 2.0..9.0f64, 0u32..2).prop_map(|(p, q, mean, jitter)| {
        let jitter = if mean.round() as i64 - i64::from(jitter) < 2 { 0 } else { jitter };
        CultureParams {
            p_incumbent: p,
            q_repeat: q,
            mean_team_size: mean,
            team_size_jitter: jitter,
        }
    })
}

fn arb_params() -> impl Strategy<Value = ModelParams> {
    (arb_culture(), arb_culture(), 0.0..=1.0f64, 0.0..0.3f64, 0.0..=1.0f64, 1u64..30, any::<u64>()).prop_map(
        |(basic, clinical, mixing, mixing_jitter, w, max_downtime, seed)| {
            let mut p = ModelParams {
                mixing,
                mixing_jitter,
                team_culture_weight_basic: w,
                max_downtime,
                seed,
                ..ModelParams::default()
            };
            p.per_culture.basic = basic;
            p.per_culture.clinical = clinical;
            p
        },
    )
}

fn interdisciplinary_oracle(g: &CollabGraph) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    let mut mixed = BTreeSet::new();
    for (a, b, _) in g.edges() {
        if g.culture(a) != g.culture(b) {
            mixed.insert(a);
            mixed.insert(b);
        }
    }
    100.0 * mixed.len() as f64 / g.len() as f64
}

proptest! {
    #[test]
    fn census_matches_dfs(g in arb_graph()) {
        prop_assert_eq!(component_census(&g), dfs_census(&g));
        prop_assert_eq!(giant_component_pct(&g), dfs_giant_pct(&g));
        prop_assert_eq!(interdisciplinary_pct(&g), interdisciplinary_oracle(&g));
    }

    #[test]
    fn edges_are_symmetric(g in arb_graph()) {
        for agent in g.agents() {
            for (other, w) in agent.collaborators() {
                prop_assert_ne!(*other, agent.id);
                prop_assert_eq!(g.weight(*other, agent.id), *w);
            }
        }
    }

    #[test]
    fn simulation_invariants(params in arb_params(), ticks in 1u64..150) {
        prop_assert!(params.validate().is_ok());
        let mut state = SimState::new(RngStream::new(params.seed, 0), 20);
        let mut newcomers = 0u64;
        let mut last_created = 0u64;
        for t in 1..=ticks {
            let team = state.step(&params);
            prop_assert_eq!(team.tick, t);
            prop_assert_eq!(state.tick(), t);
            prop_assert!(team.size() >= 2);
            prop_assert_eq!(team.newcomer_count + team.incumbent_count, team.size());
            let distinct: BTreeSet<_> = team.members.iter().collect();
            prop_assert_eq!(distinct.len(), team.size());
            prop_assert!((0.0..=1.0).contains(&team.effective_mixing));

            newcomers += team.newcomer_count as u64;
            prop_assert_eq!(state.created_count(), newcomers);
            prop_assert!(state.created_count() >= last_created);
            last_created = state.created_count();
            prop_assert_eq!(state.created_count(), state.active_count() as u64 + state.retired_count());
            prop_assert!(state.downtime_bound_holds(&params));

            let g = state.graph();
            for (a, b, w) in g.edges() {
                prop_assert!(a < b);
                prop_assert_eq!(g.weight(b, a), w);
                if params.mixing == 0.0 && params.mixing_jitter == 0.0 {
                    prop_assert_eq!(g.culture(a), g.culture(b));
                }
            }
            let row = MetricsRow::observe(&state);
            for v in [row.pct_giant, row.pct_interdisciplinary] {
                prop_assert!((0.0..=100.0).contains(&v));
            }
            prop_assert_eq!(row.active_basic + row.active_clinical, row.active_agents);
        }
    }

    #[test]
    fn no_incumbents_means_every_member_is_new(seed in any::<u64>(), ticks in 1u64..60) {
        let mut params = ModelParams { seed, ..ModelParams::default() };
        params.per_culture.basic.p_incumbent = 0.0;
        params.per_culture.clinical.p_incumbent = 0.0;
        let mut state = SimState::new(RngStream::new(seed, 0), 10);
        for _ in 0..ticks {
            let team = state.step(&params);
            prop_assert_eq!(team.incumbent_count, 0);
        }
    }
}

#[test]
fn identical_streams_give_identical_runs() {
    let params = ModelParams::default();
    let run = |stream| {
        let mut rows = Vec::new();
        teamsim::run(&params, 300, RngStream::new(params.seed, stream), 100, |_, s| {
            rows.push(MetricsRow::observe(s))
        });
        rows
    };
    assert_eq!(run(3), run(3));
    assert_ne!(run(3), run(4));
}
