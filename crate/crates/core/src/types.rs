//! Domain types shared by the simulator, the metrics and the calibration
//! pipeline: cultures, per-culture assembly rules, global model parameters
//! and their validation.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A scientific culture. Culture is fixed when an agent is created.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Culture {
    Basic,
    Clinical,
}

impl Culture {
    pub const ALL: [Culture; 2] = [Culture::Basic, Culture::Clinical];

    pub fn opposite(self) -> Culture {
        match self {
            Culture::Basic => Culture::Clinical,
            Culture::Clinical => Culture::Basic,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Culture::Basic => "basic",
            Culture::Clinical => "clinical",
        }
    }
}

impl fmt::Display for Culture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown culture tag `{0}` (expected `basic` or `clinical`)")]
pub struct UnknownCulture(pub String);

impl FromStr for Culture {
    type Err = UnknownCulture;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(Culture::Basic),
            "clinical" => Ok(Culture::Clinical),
            other => Err(UnknownCulture(other.to_string())),
        }
    }
}

/// One value per culture. Indexing by [`Culture`] is total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerCulture<T> {
    pub basic: T,
    pub clinical: T,
}

impl<T> PerCulture<T> {
    pub fn new(basic: T, clinical: T) -> Self {
        Self { basic, clinical }
    }

    pub fn from_fn(mut f: impl FnMut(Culture) -> T) -> Self {
        Self {
            basic: f(Culture::Basic),
            clinical: f(Culture::Clinical),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Culture, &T)> {
        [(Culture::Basic, &self.basic), (Culture::Clinical, &self.clinical)].into_iter()
    }
}

impl<T> Index<Culture> for PerCulture<T> {
    type Output = T;

    fn index(&self, culture: Culture) -> &T {
        match culture {
            Culture::Basic => &self.basic,
            Culture::Clinical => &self.clinical,
        }
    }
}

impl<T> IndexMut<Culture> for PerCulture<T> {
    fn index_mut(&mut self, culture: Culture) -> &mut T {
        match culture {
            Culture::Basic => &mut self.basic,
            Culture::Clinical => &mut self.clinical,
        }
    }
}

/// Team-assembly rules of one culture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CultureParams {
    /// Chance a slot is filled by an incumbent rather than a newcomer.
    pub p_incumbent: f64,
    /// Chance an incumbent slot goes to a previous collaborator of an
    /// incumbent already on the team.
    pub q_repeat: f64,
    /// Center of the team-size law.
    pub mean_team_size: f64,
    /// Half-width of the uniform integer jitter around `mean_team_size`.
    pub team_size_jitter: u32,
}

impl CultureParams {
    /// Smallest team size the size law can produce.
    pub fn min_team_size(&self) -> i64 {
        if self.team_size_jitter == 0 {
            self.mean_team_size.floor() as i64
        } else {
            self.mean_team_size.round() as i64 - i64::from(self.team_size_jitter)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub per_culture: PerCulture<CultureParams>,
    /// Per-slot probability that a member comes from the culture opposite to
    /// the team's originating culture.
    pub mixing: f64,
    /// Half-width of the uniform jitter applied to `mixing` once per team.
    pub mixing_jitter: f64,
    /// Probability that a new team originates in the basic culture.
    pub team_culture_weight_basic: f64,
    /// Ticks of inactivity after which an agent retires.
    pub max_downtime: u64,
    pub seed: u64,
}

impl Default for ModelParams {
    /// Parameters calibrated to the institutional team profiles,
    /// at the 14% mixing scenario.
    fn default() -> Self {
        Self {
            per_culture: PerCulture {
                basic: CultureParams {
                    p_incumbent: 0.22,
                    q_repeat: 0.5,
                    mean_team_size: 7.48,
                    team_size_jitter: 1,
                },
                clinical: CultureParams {
                    p_incumbent: 0.45,
                    q_repeat: 0.5,
                    mean_team_size: 4.78,
                    team_size_jitter: 1,
                },
            },
            mixing: 0.14,
            mixing_jitter: 0.0,
            team_culture_weight_basic: 0.3,
            max_downtime: 40,
            seed: 2019,
        }
    }
}

/// One violated parameter constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub value: String,
    pub constraint: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.field, self.value, self.constraint)
    }
}

/// Every constraint a parameter set violates.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParamErrors(pub Vec<Violation>);

impl fmt::Display for ParamErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid parameters:")?;
        for v in &self.0 {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

fn is_probability(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl ModelParams {
    /// Lists every violated constraint; empty when the parameters are valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: String, value: String, constraint: &'static str| {
            if !ok {
                out.push(Violation { field, value, constraint });
            }
        };

        check(is_probability(self.mixing), "mixing".into(), self.mixing.to_string(), "mixing out of [0,1]");
        check(
            self.mixing_jitter.is_finite() && self.mixing_jitter >= 0.0,
            "mixing_jitter".into(),
            self.mixing_jitter.to_string(),
            "mixing_jitter must be a non-negative number",
        );
        check(
            is_probability(self.team_culture_weight_basic),
            "team_culture_weight_basic".into(),
            self.team_culture_weight_basic.to_string(),
            "team_culture_weight_basic out of [0,1]",
        );
        check(
            self.max_downtime >= 1,
            "max_downtime".into(),
            self.max_downtime.to_string(),
            "max_downtime must be at least 1",
        );

        for (culture, cp) in self.per_culture.iter() {
            check(
                is_probability(cp.p_incumbent),
                format!("{culture}.p_incumbent"),
                cp.p_incumbent.to_string(),
                "p_incumbent out of [0,1]",
            );
            check(
                is_probability(cp.q_repeat),
                format!("{culture}.q_repeat"),
                cp.q_repeat.to_string(),
                "q_repeat out of [0,1]",
            );
            let mean_ok = cp.mean_team_size.is_finite() && cp.mean_team_size >= 2.0;
            check(
                mean_ok,
                format!("{culture}.mean_team_size"),
                cp.mean_team_size.to_string(),
                "mean_team_size must be at least 2",
            );
            if mean_ok {
                check(
                    cp.min_team_size() >= 2,
                    format!("{culture}.team_size_jitter"),
                    format!(
                        "{} (mean_team_size = {})",
                        cp.team_size_jitter, cp.mean_team_size
                    ),
                    "minimum drawn team size below 2",
                );
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ParamErrors> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ParamErrors(v))
        }
    }
}

/// Returns the parameters unchanged when valid, otherwise every violation.
pub fn validate_params(params: ModelParams) -> Result<ModelParams, ParamErrors> {
    params.validate().map(|()| params)
}

/// Sequential identifier of an agent, never reused within a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub u64);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
