//! Seeded random problem ensembles. Every generator is a pure function of
//! its arguments and seed.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::Hamiltonian;
use crate::problems::{CnfInstance, Graph};
use crate::{Error, Result};

pub const DEFAULT_SAT_ATTEMPTS: usize = 100_000;

/// Random 3-SAT with `m` independent clauses over 3 distinct variables and
/// uniform signs. With `unique`, whole instances are redrawn until exactly
/// one assignment satisfies them.
pub fn gen_3sat(n: usize, m: usize, unique: bool, seed: u64) -> Result<CnfInstance> {
    gen_3sat_with_cap(n, m, unique, seed, DEFAULT_SAT_ATTEMPTS)
}

pub fn gen_3sat_with_cap(n: usize, m: usize, unique: bool, seed: u64, max_attempts: usize) -> Result<CnfInstance> {
    if n < 3 || m == 0 {
        return Err(Error::invalid(format!("3-SAT needs n ≥ 3 and m ≥ 1, got n={n}, m={m}")));
    }
    if n > 30 {
        return Err(Error::invalid("3-SAT enumeration limited to 30 variables"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts.max(1) {
        let clauses: Vec<[i32; 3]> = (0..m)
            .map(|_| {
                let vars = sample(&mut rng, n, 3);
                let mut c = [0i32; 3];
                for (slot, v) in c.iter_mut().zip(vars.iter()) {
                    let lit = v as i32 + 1;
                    *slot = if rng.gen::<bool>() { lit } else { -lit };
                }
                c
            })
            .collect();
        let inst = CnfInstance::new(n, clauses)?;
        if !unique || inst.count_satisfying(2) == 1 {
            return Ok(inst);
        }
    }
    Err(Error::GenerationFailed(max_attempts))
}

/// Erdős–Rényi graph `G(n, p)`.
pub fn gen_maxcut(n: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::invalid(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < edge_prob {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

#[derive(Clone, Debug)]
pub struct IsingInstance {
    pub field: f64,
    pub hamiltonian: Hamiltonian,
}

/// Transverse-field Ising chains with fields drawn uniformly from `[h_min, h_max]`.
pub fn gen_ising_ensemble(n: usize, h_min: f64, h_max: f64, count: usize, seed: u64) -> Result<Vec<IsingInstance>> {
    if !(h_min <= h_max) {
        return Err(Error::invalid(format!("field range [{h_min}, {h_max}] is empty")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let field = if h_min == h_max { h_min } else { rng.gen_range(h_min..=h_max) };
            Ok(IsingInstance { field, hamiltonian: Hamiltonian::ising(n, field)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sat_shape_and_determinism() {
        let a = gen_3sat(6, 26, false, 3).unwrap();
        assert_eq!(a.clauses().len(), 26);
        assert!((26.0 / 6.0 - 4.33f64).abs() < 0.01);
        assert_eq!(a, gen_3sat(6, 26, false, 3).unwrap());
        assert_ne!(a, gen_3sat(6, 26, false, 4).unwrap());
        assert!(gen_3sat(2, 5, false, 0).is_err());
        assert!(gen_3sat(5, 0, false, 0).is_err());
    }

    #[test]
    fn unique_instances_verify_by_enumeration() {
        for seed in 0..10 {
            let inst = gen_3sat(6, 26, true, seed).unwrap();
            assert_eq!(inst.satisfying_assignments().len(), 1);
        }
        // Three clauses can never pin down a unique assignment of 8 variables.
        assert!(matches!(gen_3sat_with_cap(8, 3, true, 0, 50), Err(Error::GenerationFailed(50))));
    }

    #[test]
    fn maxcut_edge_statistics() {
        assert_eq!(gen_maxcut(5, 1.0, 0).unwrap().edges().len(), 10);
        assert!(gen_maxcut(5, 0.0, 0).unwrap().edges().is_empty());
        let total: usize = (0..1000).map(|s| gen_maxcut(10, 0.5, s).unwrap().edges().len()).sum();
        assert!((total as f64 / 1000.0 - 22.5).abs() < 1.0);
        assert!(gen_maxcut(4, 1.5, 0).is_err());
    }

    #[test]
    fn ising_ensemble_range() {
        let e = gen_ising_ensemble(4, 0.8, 1.2, 100, 9).unwrap();
        assert_eq!(e.len(), 100);
        assert!(e.iter().all(|i| (0.8..=1.2).contains(&i.field)));
        let again = gen_ising_ensemble(4, 0.8, 1.2, 100, 9).unwrap();
        assert!(e.iter().zip(&again).all(|(a, b)| a.field == b.field));
        let fixed = gen_ising_ensemble(3, 1.0, 1.0, 3, 0).unwrap();
        assert!(fixed.iter().all(|i| i.hamiltonian.terms() == fixed[0].hamiltonian.terms()));
        assert!(gen_ising_ensemble(3, 1.2, 0.8, 3, 0).is_err());
    }
}
