use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Errors in a job document; all map to exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error("line {line}, column {column}: {message}\n    {context}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
        context: String,
    },
    #[error("invalid job: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub a: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub m: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Spectrum,
    Transform,
    Classify,
    Verify,
    Sample,
}

/// One element of a job's `chain` list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Selector {
    /// Sector state by increasing real energy.
    State(usize),
    ConjPair,
    GroundChain,
}

impl FromStr for Selector {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "conj-pair" => Ok(Self::ConjPair),
            "ground-chain" => Ok(Self::GroundChain),
            _ => s
                .strip_prefix("state:")
                .and_then(|i| i.parse().ok())
                .map(Self::State)
                .ok_or_else(|| {
                    format!(
                        "malformed selector {s:?} (expected \"state:<index>\", \"conj-pair\" or \"ground-chain\")"
                    )
                }),
        }
    }
}

impl TryFrom<String> for Selector {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Selector> for String {
    fn from(s: Selector) -> String {
        s.to_string()
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::State(i) => write!(f, "state:{i}"),
            Self::ConjPair => write!(f, "conj-pair"),
            Self::GroundChain => write!(f, "ground-chain"),
        }
    }
}

fn default_x_min() -> f64 {
    0.05
}
fn default_x_max() -> f64 {
    4.0
}
fn default_points() -> usize {
    400
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_x_min")]
    pub x_min: f64,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_min: default_x_min(),
            x_max: default_x_max(),
            points: default_points(),
        }
    }
}

impl GridSpec {
    pub fn xs(&self) -> Vec<f64> {
        let h = (self.x_max - self.x_min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.x_min + h * i as f64).collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub model: ModelSpec,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<Selector>,
    #[serde(default)]
    pub grid: GridSpec,
    /// Report destination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Grid sample destination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// The construction a chain list asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    None,
    FirstOrder(usize),
    Pair(usize, usize),
    ConjPair,
    GroundChain,
}

impl Job {
    pub fn construction(&self) -> Construction {
        match self.chain.as_slice() {
            [Selector::State(i)] => Construction::FirstOrder(*i),
            [Selector::State(i), Selector::State(j)] => Construction::Pair(*i, *j),
            [Selector::ConjPair] => Construction::ConjPair,
            [Selector::GroundChain] => Construction::GroundChain,
            _ => Construction::None,
        }
    }

    fn validate(&self) -> Result<(), JobError> {
        let bad = |m: String| Err(JobError::Invalid(m));
        let ModelSpec { a, s, m } = self.model;
        if !(a > 0.0 && a.is_finite()) {
            return bad(format!("model.a must be positive, got {a}"));
        }
        if !s.is_finite() {
            return bad("model.s must be finite".into());
        }
        let g = &self.grid;
        if !(g.x_min > 0.0 && g.x_max > g.x_min && g.x_max.is_finite()) {
            return bad(format!("grid needs 0 < x_min < x_max, got [{}, {}]", g.x_min, g.x_max));
        }
        if g.points < 2 {
            return bad(format!("grid needs at least 2 points, got {}", g.points));
        }
        match (self.construction(), self.chain.is_empty()) {
            (Construction::None, false) => {
                let list: Vec<String> = self.chain.iter().map(|s| s.to_string()).collect();
                return bad(format!(
                    "unsupported chain [{}]: use one or two state selectors, \"conj-pair\" or \"ground-chain\"",
                    list.join(", ")
                ));
            }
            (Construction::None, true) if matches!(self.action, Action::Transform | Action::Classify) => {
                return bad(format!("action {:?} needs a chain", self.action).to_lowercase());
            }
            (c, _) if c != Construction::None && self.action == Action::Spectrum => {
                return bad("action spectrum takes no chain".into());
            }
            _ => {}
        }
        for sel in &self.chain {
            if let Selector::State(i) = sel {
                if *i > m as usize {
                    return bad(format!("{sel}: the sector has states 0..={m}"));
                }
            }
        }
        if let Construction::Pair(i, j) = self.construction() {
            if i == j {
                return bad(format!("state:{i} selected twice"));
            }
        }
        if self.action == Action::Classify && matches!(self.construction(), Construction::FirstOrder(_)) {
            return bad("classify needs two states, \"conj-pair\" or \"ground-chain\"".into());
        }
        if self.construction() == Construction::GroundChain && m == 0 {
            return bad("ground-chain needs M ≥ 1".into());
        }
        Ok(())
    }
}

/// Parses and validates a JSON job document, applying defaults.
pub fn parse_job(text: &str) -> Result<Job, JobError> {
    let job: Job = serde_json::from_str(text).map_err(|e| {
        let line = e.line();
        let context = text.lines().nth(line.saturating_sub(1)).unwrap_or("").trim().to_string();
        JobError::Parse {
            line,
            column: e.column(),
            message: e.to_string(),
            context,
        }
    })?;
    job.validate()?;
    Ok(job)
}
