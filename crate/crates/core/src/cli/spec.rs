//! Problem specification files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genrand::GenSpec;
use crate::ljb_core::LjbParams;
use crate::linalg::{CMat, C64};

/// A matrix as rows of `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraSpec {
    /// All Hermitian `n × n` matrices.
    Full,
    /// Real span of the given Hermitian matrices.
    Basis(Vec<JsonMatrix>),
    /// Drawn by the instance generator; its `n` must match the ambient size.
    Generated(GenSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Verify,
    ReduceIdeal,
    ReduceSubalgebra,
    TReduce,
    Equivalence,
    States,
    Gns,
    Purity,
    All,
}

impl Task {
    pub const ORDERED: [Task; 8] = [
        Task::Verify,
        Task::ReduceIdeal,
        Task::ReduceSubalgebra,
        Task::TReduce,
        Task::Equivalence,
        Task::States,
        Task::Gns,
        Task::Purity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Verify => "verify",
            Task::ReduceIdeal => "reduce-ideal",
            Task::ReduceSubalgebra => "reduce-subalgebra",
            Task::TReduce => "t-reduce",
            Task::Equivalence => "equivalence",
            Task::States => "states",
            Task::Gns => "gns",
            Task::Purity => "purity",
            Task::All => "all",
        }
    }
}

fn default_lambda() -> f64 {
    0.5
}

fn default_kappa() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub n: usize,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    pub algebra: AlgebraSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subalgebra: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<JsonMatrix>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

impl ProblemSpec {
    /// Parses and validates: shapes, parameters, generator spec.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        self.params()?;
        let mut all: Vec<&JsonMatrix> = Vec::new();
        match &self.algebra {
            AlgebraSpec::Full => {}
            AlgebraSpec::Basis(b) => all.extend(b),
            AlgebraSpec::Generated(g) => {
                if g.n != self.n {
                    return Err(Error::Parse(format!("generator n = {} but n = {}", g.n, self.n)));
                }
                g.validate().map_err(|e| Error::Parse(e.to_string()))?;
            }
        }
        all.extend(self.ideal.iter().flatten());
        all.extend(self.subalgebra.iter().flatten());
        all.extend(&self.constraints);
        all.extend(&self.states);
        for m in all {
            check_shape(m, self.n)?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<LjbParams> {
        LjbParams::new(self.lambda, self.kappa)
    }

    /// Requested tasks in execution order. `all` expands to the tasks whose
    /// inputs are present.
    pub fn ordered_tasks(&self) -> Vec<Task> {
        if self.tasks.contains(&Task::All) {
            return Task::ORDERED.iter().copied().filter(|t| self.has_inputs(*t)).collect();
        }
        Task::ORDERED.iter().copied().filter(|t| self.tasks.contains(t)).collect()
    }
}

impl ProblemSpec {
    fn has_inputs(&self, task: Task) -> bool {
        let constrained = !self.constraints.is_empty();
        let reducible = constrained || self.subalgebra.is_some() || self.ideal.is_some();
        match task {
            Task::Verify => true,
            Task::ReduceIdeal => self.ideal.is_some(),
            Task::ReduceSubalgebra => constrained || self.subalgebra.is_some(),
            Task::TReduce | Task::Equivalence => constrained,
            Task::States | Task::Purity => reducible && (constrained || !self.states.is_empty()),
            Task::Gns => constrained || !self.states.is_empty(),
            Task::All => false,
        }
    }
}

fn check_shape(m: &JsonMatrix, n: usize) -> Result<()> {
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { n, rows: m.len(), cols });
    }
    if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Parse("non-finite matrix entry".into()));
    }
    Ok(())
}

pub fn to_matrix(m: &JsonMatrix) -> CMat {
    let n = m.len();
    CMat::from_fn(n, n, |i, j| C64::new(m[i][j][0], m[i][j][1]))
}

pub fn from_matrix(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let text = r#"{"n": 2, "algebra": "full",
            "constraints": [[[[1,0],[0,0]],[[0,0],[0,0]]]],
            "tasks": ["gns", "verify"]}"#;
        let spec = ProblemSpec::parse(text).unwrap();
        assert_eq!(spec.ordered_tasks(), vec![Task::Verify, Task::Gns]);
        let again = ProblemSpec::parse(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn rejects_bad_params_and_shapes() {
        let bad = r#"{"n": 2, "lambda": 1.0, "kappa": 1.0, "algebra": "full"}"#;
        assert!(matches!(ProblemSpec::parse(bad), Err(Error::InvalidParams { .. })));
        let shape = r#"{"n": 2, "algebra": "full", "states": [[[[1,0]]]]}"#;
        assert!(matches!(ProblemSpec::parse(shape), Err(Error::DimensionMismatch { .. })));
        let task = r#"{"n": 2, "algebra": "full", "tasks": ["fly"]}"#;
        assert!(matches!(ProblemSpec::parse(task), Err(Error::Parse(_))));
    }
}
