//! Combinatorial problem instances: 3-CNF formulas and simple graphs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A 3-CNF formula with DIMACS-style signed, 1-based literals.
///
/// Variable `xᵢ` maps to qubit `i − 1`; bit value 1 means true.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstance {
    num_vars: usize,
    clauses: Vec<[i32; 3]>,
}

impl CnfInstance {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for (j, clause) in clauses.iter().enumerate() {
            check_clause(num_vars, clause).map_err(|msg| Error::invalid(format!("clause {j}: {msg}")))?;
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// Number of clauses violated by the assignment encoded in `bits`.
    pub fn violated(&self, bits: usize) -> usize {
        self.clauses.iter().filter(|c| !clause_satisfied(c, bits)).count()
    }

    /// Counts satisfying assignments by enumerating all `2ⁿ` bit strings,
    /// stopping once `limit` have been found.
    pub fn count_satisfying(&self, limit: usize) -> usize {
        let mut found = 0;
        for bits in 0..1usize << self.num_vars {
            if self.clauses.iter().all(|c| clause_satisfied(c, bits)) {
                found += 1;
                if found >= limit {
                    break;
                }
            }
        }
        found
    }

    /// All satisfying assignments as bit strings.
    pub fn satisfying_assignments(&self) -> Vec<usize> {
        (0..1usize << self.num_vars)
            .filter(|&bits| self.clauses.iter().all(|c| clause_satisfied(c, bits)))
            .collect()
    }
}

pub(crate) fn check_clause(num_vars: usize, clause: &[i32]) -> std::result::Result<(), String> {
    if clause.len() != 3 {
        return Err(format!("expected 3 literals, found {}", clause.len()));
    }
    for &lit in clause {
        if lit == 0 || lit.unsigned_abs() as usize > num_vars {
            return Err(format!("literal {lit} out of range 1..={num_vars}"));
        }
    }
    let vars: BTreeSet<u32> = clause.iter().map(|l| l.unsigned_abs()).collect();
    if vars.len() != 3 {
        return Err("variable repeated within clause".into());
    }
    Ok(())
}

#[inline]
fn literal_true(lit: i32, bits: usize) -> bool {
    let value = bits >> (lit.unsigned_abs() - 1) & 1 == 1;
    value == (lit > 0)
}

#[inline]
fn clause_satisfied(clause: &[i32; 3], bits: usize) -> bool {
    clause.iter().any(|&l| literal_true(l, bits))
}

/// Undirected simple graph on vertices `0..num_vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges are normalized to `(min, max)` and sorted.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop on vertex {u}")));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range for {num_vertices} vertices")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self { num_vertices, edges: set.into_iter().collect() })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of edges crossing the bipartition encoded in `bits`.
    pub fn cut_size(&self, bits: usize) -> usize {
        self.edges.iter().filter(|&&(u, v)| (bits >> u ^ bits >> v) & 1 == 1).count()
    }
}
