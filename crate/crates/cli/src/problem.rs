//! Problem documents: TOML with `[algebra]`, `[setup]` and `[budgets]`.

use serde::{Deserialize, Serialize};

use nilterm_core::counting::{validate_setup, Budgets, CoverKind, Setup, ValidatedSetup};
use nilterm_core::orbits::Partition;
use nilterm_core::rootsys::{AlgebraFamily, Family};
use nilterm_core::twist::{DEFAULT_MAX_GROUP, DEFAULT_MAX_NODES};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    /// Target partition; written before the tables so the document is valid TOML.
    pub orbit: Vec<u32>,
    pub algebra: AlgebraSpec,
    pub setup: SetupSpec,
    #[serde(default)]
    pub budgets: BudgetSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub family: String,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupSpec {
    pub half_blocks: Vec<usize>,
    pub middle_core: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gl_orbits: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    pub cover: CoverKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    #[serde(default = "default_nodes")]
    pub max_nodes: usize,
    #[serde(default = "default_group")]
    pub max_group: usize,
}

fn default_nodes() -> usize {
    DEFAULT_MAX_NODES
}

fn default_group() -> usize {
    DEFAULT_MAX_GROUP
}

impl Default for BudgetSpec {
    fn default() -> Self {
        BudgetSpec {
            max_nodes: DEFAULT_MAX_NODES,
            max_group: DEFAULT_MAX_GROUP,
        }
    }
}

fn invalid(field: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.to_string(),
    }
}

fn partition(field: &str, parts: &[u32]) -> Result<Partition, CliError> {
    if parts.contains(&0) {
        return Err(invalid(field, "parts must be positive"));
    }
    Ok(Partition::new(parts.to_vec()))
}

impl ProblemSpec {
    pub fn to_setup(&self) -> Result<Setup, CliError> {
        let family: Family = self.algebra.family.parse().map_err(|e| invalid("algebra.family", e))?;
        let algebra = AlgebraFamily::new(family, self.algebra.rank).map_err(|e| invalid("algebra.rank", e))?;
        let gl_orbits = match &self.setup.gl_orbits {
            None => None,
            Some(v) => Some(
                v.iter()
                    .enumerate()
                    .map(|(j, q)| partition(&format!("setup.gl_orbits[{j}]"), q))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        if self.budgets.max_nodes == 0 {
            return Err(invalid("budgets.max_nodes", "must be positive"));
        }
        if self.budgets.max_group == 0 {
            return Err(invalid("budgets.max_group", "must be positive"));
        }
        Ok(Setup {
            algebra,
            target: partition("orbit", &self.orbit)?,
            half_blocks: self.setup.half_blocks.clone(),
            middle_core: partition("setup.middle_core", &self.setup.middle_core)?,
            gl_orbits,
            cover: self.setup.cover,
            budgets: Budgets {
                max_nodes: self.budgets.max_nodes,
                max_group: self.budgets.max_group,
            },
        })
    }

    pub fn validate(&self) -> Result<ValidatedSetup, CliError> {
        let setup = self.to_setup()?;
        validate_setup(&setup).map_err(|e| invalid(e.field, e.error))
    }
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, CliError> {
    let spec: ProblemSpec = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

pub fn emit_problem(spec: &ProblemSpec) -> String {
    toml::to_string(spec).expect("problem specs serialize")
}
