//! The collaboration graph over active agents.
//!
//! The agent registry doubles as an undirected weighted adjacency structure:
//! each agent stores its collaborators with co-membership counts, and every
//! mutation keeps the relation symmetric.

use std::collections::BTreeMap;

use crate::types::{AgentId, Culture, PerCulture};

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub id: AgentId,
    pub culture: Culture,
    pub last_active_tick: u64,
    collaborators: BTreeMap<AgentId, u32>,
}

impl Agent {
    pub fn collaborators(&self) -> &BTreeMap<AgentId, u32> {
        &self.collaborators
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollabGraph {
    agents: BTreeMap<AgentId, Agent>,
}

impl CollabGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an agent with no collaborators. Panics if the id is taken.
    pub fn insert_agent(&mut self, id: AgentId, culture: Culture, tick: u64) {
        let prev = self.agents.insert(
            id,
            Agent {
                id,
                culture,
                last_active_tick: tick,
                collaborators: BTreeMap::new(),
            },
        );
        assert!(prev.is_none(), "agent {id} inserted twice");
    }

    /// Increments the weight of the edge `a`–`b`. Self-loops are ignored.
    pub fn add_edge(&mut self, a: AgentId, b: AgentId) {
        self.add_edge_weight(a, b, 1);
    }

    pub fn add_edge_weight(&mut self, a: AgentId, b: AgentId, weight: u32) {
        if a == b || weight == 0 {
            return;
        }
        assert!(
            self.agents.contains_key(&a) && self.agents.contains_key(&b),
            "edge {a}-{b} references an unknown agent"
        );
        for (x, y) in [(a, b), (b, a)] {
            let agent = self.agents.get_mut(&x).expect("checked above");
            *agent.collaborators.entry(y).or_insert(0) += weight;
        }
    }

    /// Removes an agent and all incident edges.
    pub fn remove_agent(&mut self, id: AgentId) -> Option<Agent> {
        let agent = self.agents.remove(&id)?;
        for other in agent.collaborators.keys() {
            if let Some(o) = self.agents.get_mut(other) {
                o.collaborators.remove(&id);
            }
        }
        Some(agent)
    }

    pub fn touch(&mut self, id: AgentId, tick: u64) {
        if let Some(a) = self.agents.get_mut(&id) {
            a.last_active_tick = tick;
        }
    }

    pub fn agent(&self, id: AgentId) -> Option<&Agent> {
        self.agents.get(&id)
    }

    pub fn contains(&self, id: AgentId) -> bool {
        self.agents.contains_key(&id)
    }

    pub fn culture(&self, id: AgentId) -> Option<Culture> {
        self.agents.get(&id).map(|a| a.culture)
    }

    /// Agents in ascending id order.
    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.agents.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.agents.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn weight(&self, a: AgentId, b: AgentId) -> u32 {
        self.agents
            .get(&a)
            .and_then(|x| x.collaborators.get(&b))
            .copied()
            .unwrap_or(0)
    }

    /// Each undirected edge once, as `(low, high, weight)` in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (AgentId, AgentId, u32)> + '_ {
        self.agents.values().flat_map(|a| {
            a.collaborators
                .range(a.id..)
                .filter(move |(b, _)| **b != a.id)
                .map(move |(b, w)| (a.id, *b, *w))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn culture_counts(&self) -> PerCulture<usize> {
        let mut counts = PerCulture::new(0, 0);
        for a in self.agents.values() {
            counts[a.culture] += 1;
        }
        counts
    }
}
