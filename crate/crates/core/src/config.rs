//! Versioned JSON experiment configuration and instance construction.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::{checkerboard, qaoa_build, ParamMap, QaoaMode};
use crate::circuit::Circuit;
use crate::hamiltonian::Hamiltonian;
use crate::instances::{gen_3sat, gen_ising_ensemble, gen_maxcut};
use crate::noise::Grouping;
use crate::optimize::{sub_seed, MinimizeOptions};
use crate::{Error, Result, MAX_STATE_QUBITS};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Transverse-field Ising chain on the checkerboard ansatz.
    Ising,
    /// Random 3-SAT on QAOA.
    Sat3,
    /// Erdős–Rényi MAX-CUT on QAOA.
    Maxcut,
    /// Single-target search on QAOA.
    Search,
}

impl Problem {
    pub fn is_qaoa(self) -> bool {
        self != Problem::Ising
    }
}

fn default_instances() -> usize {
    1
}
fn default_samples() -> usize {
    2000
}
fn default_true() -> bool {
    true
}
fn default_h_min() -> f64 {
    0.8
}
fn default_h_max() -> f64 {
    1.2
}
fn default_edge_prob() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub problem: Problem,
    pub n: usize,
    pub depth: usize,
    #[serde(default = "default_instances")]
    pub instance_count: usize,
    #[serde(default)]
    pub sigma_grid: Vec<f64>,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// QAOA noise correlation; decomposed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<QaoaMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,

    /// 3-SAT clause count; `round(4.2·n)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clauses: Option<usize>,
    #[serde(default = "default_true")]
    pub unique: bool,
    #[serde(default = "default_h_min")]
    pub h_min: f64,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
    #[serde(default = "default_edge_prob")]
    pub edge_prob: f64,
    /// Search target bit string; random per instance when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
    /// DIMACS file (3-SAT) or edge list (MAX-CUT) used instead of generation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    /// Time-scan axes; `[depth]` and `[t_max]` when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub depths: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub budgets: Vec<f64>,
    /// Per-parameter sweep offsets.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta_grid: Vec<f64>,
}

/// A Hamiltonian together with its ansatz.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub label: String,
    pub hamiltonian: Hamiltonian,
    pub circuit: Circuit,
    pub pm: ParamMap,
}

fn ascending(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if self.schema != SCHEMA_VERSION {
            return bad(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema));
        }
        if self.n == 0 || self.depth == 0 || self.instance_count == 0 {
            return bad("n, depth and instance_count must be positive".into());
        }
        if self.n > MAX_STATE_QUBITS {
            return bad(format!("n = {} exceeds the {MAX_STATE_QUBITS}-qubit limit", self.n));
        }
        match self.problem {
            Problem::Ising if self.n % 2 == 1 || self.n < 2 => return bad("ising needs an even n ≥ 2".into()),
            Problem::Sat3 if self.n < 3 => return bad("sat3 needs n ≥ 3".into()),
            _ => {}
        }
        if self.mode.is_some() && !self.problem.is_qaoa() {
            return bad("mode applies to QAOA problems only".into());
        }
        if self.sigma_grid.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) || !ascending(&self.sigma_grid) {
            return bad("sigma_grid must be non-negative and ascending".into());
        }
        if self.n_samples < 2 {
            return bad("n_samples must be at least 2".into());
        }
        if self.t_max.is_some_and(|t| !(t >= 0.0)) || self.budgets.iter().any(|t| !(*t >= 0.0)) {
            return bad("execution budgets must be non-negative".into());
        }
        if !ascending(&self.budgets) {
            return bad("budgets must be ascending".into());
        }
        if self.depths.contains(&0) {
            return bad("depths must be positive".into());
        }
        if !(self.h_min <= self.h_max) {
            return bad(format!("field range [{}, {}] is empty", self.h_min, self.h_max));
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return bad(format!("edge_prob {} outside [0, 1]", self.edge_prob));
        }
        if self.clauses == Some(0) {
            return bad("clauses must be positive".into());
        }
        if self.target.is_some_and(|t| t >> self.n != 0) {
            return bad(format!("target does not fit in {} bits", self.n));
        }
        if self.restarts == Some(0) {
            return bad("restarts must be positive".into());
        }
        if self.instance_file.is_some() && !matches!(self.problem, Problem::Sat3 | Problem::Maxcut) {
            return bad("instance_file applies to sat3 and maxcut only".into());
        }
        Ok(())
    }

    pub fn mode(&self) -> QaoaMode {
        self.mode.unwrap_or(QaoaMode::Decomposed)
    }

    /// Layerwise QAOA perturbs whole blocks; everything else is per gate.
    pub fn grouping(&self) -> Grouping {
        match (self.problem.is_qaoa(), self.mode()) {
            (true, QaoaMode::Layerwise) => Grouping::PerLayer,
            _ => Grouping::PerGate,
        }
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.unwrap_or_else(|| (4.2 * self.n as f64).round() as usize)
    }

    pub fn minimize_options(&self, depth: usize, instance: usize) -> MinimizeOptions {
        let opts = MinimizeOptions::for_depth(depth, sub_seed(self.seed, 4, instance as u64));
        match self.restarts {
            Some(r) => opts.with_restarts(r),
            None => opts,
        }
    }

    /// Labeled Hamiltonians, one per instance.
    pub fn hamiltonians(&self) -> Result<Vec<(String, Hamiltonian)>> {
        let seed_of = |i: usize| sub_seed(self.seed, 3, i as u64);
        if let Some(path) = &self.instance_file {
            let reader = std::io::BufReader::new(std::fs::File::open(path)?);
            let h = match self.problem {
                Problem::Sat3 => Hamiltonian::sat3(&crate::io::read_dimacs(reader)?)?,
                _ => Hamiltonian::maxcut(&crate::io::read_edge_list(reader)?)?,
            };
            if h.num_qubits() != self.n {
                return Err(Error::QubitMismatch { expected: self.n, got: h.num_qubits() });
            }
            return Ok(vec![(path.display().to_string(), h)]);
        }
        match self.problem {
            Problem::Ising => Ok(gen_ising_ensemble(self.n, self.h_min, self.h_max, self.instance_count, seed_of(0))?
                .into_iter()
                .map(|i| (format!("ising h={}", i.field), i.hamiltonian))
                .collect()),
            Problem::Sat3 => (0..self.instance_count)
                .map(|i| Ok((format!("sat3 #{i}"), Hamiltonian::sat3(&gen_3sat(self.n, self.clause_count(), self.unique, seed_of(i))?)?)))
                .collect(),
            Problem::Maxcut => (0..self.instance_count)
                .map(|i| Ok((format!("maxcut #{i}"), Hamiltonian::maxcut(&gen_maxcut(self.n, self.edge_prob, seed_of(i))?)?)))
                .collect(),
            Problem::Search => (0..self.instance_count)
                .map(|i| {
                    let t = self.target.unwrap_or_else(|| (seed_of(i) % (1u64 << self.n)) as usize);
                    Ok((format!("search target={t}"), Hamiltonian::search(self.n, t)?))
                })
                .collect(),
        }
    }

    /// Instances with the ansatz built at `depth`.
    pub fn instances_at(&self, depth: usize) -> Result<Vec<ProblemInstance>> {
        self.hamiltonians()?
            .into_iter()
            .map(|(label, hamiltonian)| {
                let (circuit, pm) = if self.problem.is_qaoa() {
                    qaoa_build(&hamiltonian, depth, self.mode())?
                } else {
                    checkerboard(self.n, depth)?
                };
                Ok(ProblemInstance { label, hamiltonian, circuit, pm })
            })
            .collect()
    }

    pub fn instances(&self) -> Result<Vec<ProblemInstance>> {
        self.instances_at(self.depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"schema": 1, "problem": "search", "n": 3, "depth": 2}"#;

    #[test]
    fn defaults_and_round_trip() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!((cfg.instance_count, cfg.n_samples, cfg.seed), (1, 2000, 0));
        assert_eq!(cfg.grouping(), Grouping::PerGate);
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_invalid_configs() {
        let cases = [
            r#"{"schema": 2, "problem": "search", "n": 3, "depth": 2}"#,
            r#"{"schema": 1, "problem": "ising", "n": 3, "depth": 2}"#,
            r#"{"schema": 1, "problem": "search", "n": 3, "depth": 0}"#,
            r#"{"schema": 1, "problem": "search", "n": 3, "depth": 1, "sigma_grid": [0.2, 0.1]}"#,
            r#"{"schema": 1, "problem": "search", "n": 3, "depth": 1, "sigma_grid": [-0.1]}"#,
            r#"{"schema": 1, "problem": "search", "n": 3, "depth": 1, "target": 8}"#,
            r#"{"schema": 1, "problem": "ising", "n": 4, "depth": 1, "mode": "layerwise"}"#,
            r#"{"schema": 1, "problem": "search", "n": 3, "depth": 1, "typo": 1}"#,
            r#"{"schema": 1, "problem": "search", "n": 3"#,
        ];
        for c in cases {
            assert!(ExperimentConfig::from_json(c).is_err(), "{c}");
        }
    }

    #[test]
    fn builds_each_problem_family() {
        for (problem, n) in [("ising", 4), ("sat3", 4), ("maxcut", 4), ("search", 4)] {
            let text = format!(r#"{{"schema": 1, "problem": "{problem}", "n": {n}, "depth": 1, "instance_count": 3, "seed": 5, "unique": false}}"#);
            let cfg = ExperimentConfig::from_json(&text).unwrap();
            let inst = cfg.instances().unwrap();
            assert_eq!(inst.len(), 3);
            let again = cfg.instances().unwrap();
            for (a, b) in inst.iter().zip(&again) {
                assert_eq!(a.hamiltonian.terms(), b.hamiltonian.terms());
                assert_eq!(a.circuit.num_qubits(), n);
            }
        }
        let layer = ExperimentConfig::from_json(r#"{"schema": 1, "problem": "maxcut", "n": 4, "depth": 1, "mode": "layerwise"}"#).unwrap();
        assert_eq!(layer.grouping(), Grouping::PerLayer);
    }
}
