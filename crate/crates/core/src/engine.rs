//! One-team-per-tick assembly dynamics.
//!
//! Each tick assembles a single team. The team's originating culture, its
//! effective mixing and its size are drawn once; then every slot draws its
//! culture (with the effective mixing probability the slot ignores culture
//! and picks either one with equal chance, otherwise it keeps the origin's),
//! whether it is an incumbent or a newcomer, and for incumbents whether it
//! repeats a collaboration of someone already on the team. All members are
//! linked pairwise, stamped active, and agents idle for longer than
//! `max_downtime` ticks retire.

use std::collections::VecDeque;

use indexmap::IndexSet;

use crate::graph::CollabGraph;
use crate::rng::RngStream;
use crate::types::{AgentId, Culture, ModelParams, PerCulture};

pub const DEFAULT_WINDOW: usize = 100;

/// Source of the draws consumed by [`SimState::step`].
pub trait Draw {
    /// Uniform in `[0, 1)`.
    fn unit(&mut self) -> f64;
    /// Uniform in `0..n`, `n > 0`.
    fn index(&mut self, n: usize) -> usize;
    /// Uniform in `lo..=hi`.
    fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64;
}

impl Draw for RngStream {
    fn unit(&mut self) -> f64 {
        RngStream::unit(self)
    }
    fn index(&mut self, n: usize) -> usize {
        RngStream::index(self, n)
    }
    fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        RngStream::int_inclusive(self, lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Team {
    pub tick: u64,
    pub origin_culture: Culture,
    /// In slot order; no duplicates.
    pub members: Vec<AgentId>,
    pub newcomer_count: usize,
    pub incumbent_count: usize,
    pub effective_mixing: f64,
}

impl Team {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone)]
pub struct SimState<R = RngStream> {
    tick: u64,
    graph: CollabGraph,
    /// Active agents by culture, for uniform incumbent draws.
    pools: PerCulture<IndexSet<AgentId>>,
    next_id: u64,
    retired_count: u64,
    teams_formed: u64,
    team_log: VecDeque<Team>,
    window: usize,
    rng: R,
}

impl<R: Draw> SimState<R> {
    pub fn new(rng: R, window: usize) -> Self {
        Self::with_graph(CollabGraph::new(), 0, rng, window)
    }

    /// Starts from an existing population. New ids continue after the
    /// largest id present.
    pub fn with_graph(graph: CollabGraph, tick: u64, rng: R, window: usize) -> Self {
        let mut pools: PerCulture<IndexSet<AgentId>> = PerCulture::default();
        for a in graph.agents() {
            pools[a.culture].insert(a.id);
        }
        let next_id = graph.ids().last().map_or(0, |id| id.0 + 1);
        Self {
            tick,
            graph,
            pools,
            next_id,
            retired_count: 0,
            teams_formed: 0,
            team_log: VecDeque::with_capacity(window.max(1)),
            window: window.max(1),
            rng,
        }
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn graph(&self) -> &CollabGraph {
        &self.graph
    }

    /// Most recent teams, oldest first, at most `window` long.
    pub fn team_log(&self) -> &VecDeque<Team> {
        &self.team_log
    }

    pub fn retired_count(&self) -> u64 {
        self.retired_count
    }

    /// Agents ever created in this run.
    pub fn created_count(&self) -> u64 {
        self.next_id
    }

    pub fn teams_formed(&self) -> u64 {
        self.teams_formed
    }

    pub fn active_count(&self) -> usize {
        self.graph.len()
    }

    /// Advances one tick and returns the team assembled in it.
    pub fn step(&mut self, params: &ModelParams) -> Team {
        let now = self.tick + 1;

        let origin = if self.rng.unit() < params.team_culture_weight_basic {
            Culture::Basic
        } else {
            Culture::Clinical
        };
        let effective_mixing = if params.mixing_jitter > 0.0 {
            let lo = params.mixing - params.mixing_jitter;
            let hi = params.mixing + params.mixing_jitter;
            (lo + (hi - lo) * self.rng.unit()).clamp(0.0, 1.0)
        } else {
            params.mixing
        };
        let size = self.draw_team_size(params, origin);

        let mut members: Vec<AgentId> = Vec::with_capacity(size);
        let mut incumbents: Vec<AgentId> = Vec::new();
        let mut newcomers: Vec<(AgentId, Culture)> = Vec::new();

        for _ in 0..size {
            let culture = if self.rng.unit() < effective_mixing {
                if self.rng.unit() < 0.5 {
                    Culture::Basic
                } else {
                    Culture::Clinical
                }
            } else {
                origin
            };
            let rules = &params.per_culture[culture];
            let pick = if self.rng.unit() < rules.p_incumbent {
                if !incumbents.is_empty() && self.rng.unit() < rules.q_repeat {
                    self.pick_repeat(&incumbents, &members, culture)
                } else {
                    self.pick_incumbent(&incumbents, culture)
                }
            } else {
                None
            };
            match pick {
                Some(id) => {
                    incumbents.push(id);
                    members.push(id);
                }
                None => {
                    let id = AgentId(self.next_id);
                    self.next_id += 1;
                    newcomers.push((id, culture));
                    members.push(id);
                }
            }
        }

        for &(id, culture) in &newcomers {
            self.graph.insert_agent(id, culture, now);
            self.pools[culture].insert(id);
        }
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                self.graph.add_edge(a, b);
            }
            self.graph.touch(a, now);
        }
        self.tick = now;
        self.teams_formed += 1;
        self.retire_inactive(params);

        let team = Team {
            tick: now,
            origin_culture: origin,
            newcomer_count: newcomers.len(),
            incumbent_count: incumbents.len(),
            members,
            effective_mixing,
        };
        if self.team_log.len() == self.window {
            self.team_log.pop_front();
        }
        self.team_log.push_back(team.clone());

        debug_assert!(self.downtime_bound_holds(params));
        team
    }

    fn draw_team_size(&mut self, params: &ModelParams, origin: Culture) -> usize {
        let rules = &params.per_culture[origin];
        let size = if rules.team_size_jitter == 0 {
            let base = rules.mean_team_size.floor();
            let frac = rules.mean_team_size - base;
            if frac > 0.0 && self.rng.unit() < frac {
                base as i64 + 1
            } else {
                base as i64
            }
        } else {
            let center = rules.mean_team_size.round() as i64;
            let j = i64::from(rules.team_size_jitter);
            self.rng.int_inclusive(center - j, center + j)
        };
        size.max(2) as usize
    }

    /// A previous collaborator, of `culture`, of a random incumbent already
    /// on the team.
    fn pick_repeat(
        &mut self,
        incumbents: &[AgentId],
        members: &[AgentId],
        culture: Culture,
    ) -> Option<AgentId> {
        let anchor = incumbents[self.rng.index(incumbents.len())];
        let candidates: Vec<AgentId> = self
            .graph
            .agent(anchor)
            .expect("incumbents are active")
            .collaborators()
            .keys()
            .copied()
            .filter(|c| !members.contains(c) && self.graph.culture(*c) == Some(culture))
            .collect();
        if candidates.is_empty() {
            None
        } else {
            Some(candidates[self.rng.index(candidates.len())])
        }
    }

    /// A uniformly random active agent of `culture` not yet on the team.
    fn pick_incumbent(&mut self, incumbents: &[AgentId], culture: Culture) -> Option<AgentId> {
        let pool = &self.pools[culture];
        let taken = incumbents
            .iter()
            .filter(|id| self.graph.culture(**id) == Some(culture))
            .count();
        if pool.len() <= taken {
            return None;
        }
        loop {
            let id = *pool.get_index(self.rng.index(pool.len())).expect("in range");
            if !incumbents.contains(&id) {
                return Some(id);
            }
        }
    }

    /// Removes every agent idle for more than `max_downtime` ticks together
    /// with its edges. Returns how many retired.
    pub fn retire_inactive(&mut self, params: &ModelParams) -> usize {
        let now = self.tick;
        let stale: Vec<(AgentId, Culture)> = self
            .graph
            .agents()
            .filter(|a| now.saturating_sub(a.last_active_tick) > params.max_downtime)
            .map(|a| (a.id, a.culture))
            .collect();
        for &(id, culture) in &stale {
            self.graph.remove_agent(id);
            self.pools[culture].swap_remove(&id);
        }
        self.retired_count += stale.len() as u64;
        stale.len()
    }

    pub fn downtime_bound_holds(&self, params: &ModelParams) -> bool {
        self.graph
            .agents()
            .all(|a| self.tick - a.last_active_tick <= params.max_downtime)
    }
}

/// Runs `ticks` steps from an empty population, calling `observer` after
/// every step with the new team and the updated state.
pub fn run<F>(
    params: &ModelParams,
    ticks: u64,
    rng: RngStream,
    window: usize,
    mut observer: F,
) -> SimState
where
    F: FnMut(&Team, &SimState),
{
    let mut state = SimState::new(rng, window);
    for _ in 0..ticks {
        let team = state.step(params);
        observer(&team, &state);
    }
    state
}
