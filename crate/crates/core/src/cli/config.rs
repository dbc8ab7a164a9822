//! Scenario configuration files.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{OrbintError, Result};
use crate::groups::{TruncationPolicy, DEFAULT_CELLS_PER_UNIT, DEFAULT_STABILIZATION_TOL};

/// Inclusive integer range written `a..b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub start: u64,
    pub end: u64,
}

impl IntRange {
    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.start..=self.end
    }
}

impl FromStr for IntRange {
    type Err = OrbintError;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| OrbintError::Config(format!("expected a range a..b, got {s:?}")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| OrbintError::Config(format!("bad range bound {v:?}")))
        };
        let (start, end) = (parse(a)?, parse(b)?);
        if start > end {
            return Err(OrbintError::Config(format!("empty range {s:?}")));
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Level schedule: `dyadic:a..b` lists exponents `k` (levels of order or
/// inverse step `2^k`), `all:a..b` lists every `n`, `list:n1,n2,...` lists
/// values explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelSchedule {
    Dyadic(IntRange),
    All(IntRange),
    List(Vec<u64>),
}

impl LevelSchedule {
    /// The scheduled values: exponents for `dyadic`, `n` otherwise.
    pub fn values(&self) -> Vec<u64> {
        match self {
            LevelSchedule::Dyadic(r) | LevelSchedule::All(r) => r.iter().collect(),
            LevelSchedule::List(v) => v.clone(),
        }
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self, LevelSchedule::Dyadic(_))
    }
}

impl FromStr for LevelSchedule {
    type Err = OrbintError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| OrbintError::Config(format!("level schedule {s:?} needs a kind prefix")))?;
        match kind.trim() {
            "dyadic" => Ok(LevelSchedule::Dyadic(rest.parse()?)),
            "all" => Ok(LevelSchedule::All(rest.parse()?)),
            "list" => {
                let v = rest
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<u64>()
                            .map_err(|_| OrbintError::Config(format!("bad level {p:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if v.is_empty() {
                    return Err(OrbintError::Config("empty level list".into()));
                }
                Ok(LevelSchedule::List(v))
            }
            other => Err(OrbintError::Config(format!("unknown schedule kind {other:?}"))),
        }
    }
}

impl fmt::Display for LevelSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelSchedule::Dyadic(r) => write!(f, "dyadic:{r}"),
            LevelSchedule::All(r) => write!(f, "all:{r}"),
            LevelSchedule::List(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "list:{}", parts.join(","))
            }
        }
    }
}

/// Parses a real window `a..b` (bounds may be negative or fractional).
pub fn parse_window(s: &str) -> Result<(f64, f64)> {
    // split on the last ".." so that "-1.5..2" keeps its decimal point
    let idx = s
        .rfind("..")
        .ok_or_else(|| OrbintError::Config(format!("expected a window a..b, got {s:?}")))?;
    let (a, b) = (&s[..idx], &s[idx + 2..]);
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| OrbintError::Config(format!("bad window bound {v:?}")))
    };
    Ok((parse(a)?, parse(b)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Drop sample points that hit a singularity exactly instead of failing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_singular: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance of the scenario's main comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs: Option<f64>,
    /// Allowed fraction of failing sample points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fail_quota: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    /// Windows `a..b`, one per noncompact coordinate (or one for all).
    #[serde(default)]
    pub windows: Vec<String>,
    #[serde(default = "default_cells")]
    pub cells_per_unit: usize,
    #[serde(default = "default_stab")]
    pub stabilization_tol: f64,
}

fn default_cells() -> usize {
    DEFAULT_CELLS_PER_UNIT
}

fn default_stab() -> f64 {
    DEFAULT_STABILIZATION_TOL
}

impl Default for TruncationSection {
    fn default() -> Self {
        Self {
            windows: Vec::new(),
            cells_per_unit: DEFAULT_CELLS_PER_UNIT,
            stabilization_tol: DEFAULT_STABILIZATION_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_json")]
    pub json: String,
    #[serde(default)]
    pub plot_script: bool,
}

fn default_dir() -> String {
    "orbint-out".into()
}

fn default_csv() -> String {
    "trajectories.csv".into()
}

fn default_json() -> String {
    "summary.json".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            csv: default_csv(),
            json: default_json(),
            plot_script: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ScenarioConfig {
    pub fn named(name: &str) -> Self {
        Self {
            scenario: ScenarioSection {
                name: name.to_string(),
                instance: None,
                levels: None,
                sample_size: None,
                seed: None,
                skip_singular: None,
            },
            tolerances: Tolerances::default(),
            truncation: TruncationSection::default(),
            output: OutputSection::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| OrbintError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| OrbintError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.level_schedule()?;
        self.truncation_policy()?;
        if let Some(q) = self.tolerances.fail_quota {
            if !(0.0..=1.0).contains(&q) {
                return Err(OrbintError::Config(format!("fail_quota {q} outside [0, 1]")));
            }
        }
        if let Some(t) = self.tolerances.abs {
            if t.is_nan() || t < 0.0 {
                return Err(OrbintError::Config(format!("tolerance {t} must be nonnegative")));
            }
        }
        Ok(())
    }

    pub fn level_schedule(&self) -> Result<Option<LevelSchedule>> {
        self.scenario.levels.as_deref().map(str::parse).transpose()
    }

    /// Truncation policy; `None` when no window is given.
    pub fn truncation_policy(&self) -> Result<Option<TruncationPolicy>> {
        if self.truncation.windows.is_empty() {
            if self.truncation.cells_per_unit == 0 {
                return Err(OrbintError::InvalidTruncation("cells_per_unit must be positive".into()));
            }
            return Ok(None);
        }
        let windows = self
            .truncation
            .windows
            .iter()
            .map(|w| parse_window(w))
            .collect::<Result<Vec<_>>>()?;
        TruncationPolicy::new(windows, self.truncation.cells_per_unit, self.truncation.stabilization_tol).map(Some)
    }
}
