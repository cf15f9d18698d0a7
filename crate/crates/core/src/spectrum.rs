//! Exact spectral data: ground energy, gap to the first excited level,
//! maximum eigenvalue and the ground subspace.

use num_complex::Complex64;
use serde::Serialize;

use crate::hamiltonian::Hamiltonian;
use crate::linalg::hermitian_eigen;
use crate::state::StateVector;
use crate::{Error, Result, DEFAULT_MAX_DM_QUBITS, LEVEL_TOL, MAX_STATE_QUBITS};

#[derive(Clone, Debug)]
pub enum GroundSpace {
    /// Computational basis states (diagonal Hamiltonians).
    BasisStates(Vec<usize>),
    /// Orthonormal eigenvectors from a dense eigensolve.
    Vectors(Vec<StateVector>),
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralData {
    pub ground_energy: f64,
    /// Distance from the ground energy to the first distinct level above it.
    pub gap: f64,
    pub max_energy: f64,
    pub degeneracy: usize,
    #[serde(skip)]
    pub ground_space: GroundSpace,
}

impl SpectralData {
    /// `E_g + Δ`, the acceptance threshold.
    pub fn first_excited(&self) -> f64 {
        self.ground_energy + self.gap
    }
}

/// Computes exact spectral data. Diagonal Hamiltonians are enumerated up to
/// the state-vector cap; others are diagonalized densely up to `dense_cap`
/// qubits.
pub fn spectral_data_with_cap(h: &Hamiltonian, dense_cap: usize) -> Result<SpectralData> {
    let n = h.num_qubits();
    if let Some(diag) = h.diagonal() {
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits { n, cap: MAX_STATE_QUBITS });
        }
        let eg = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let em = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ground: Vec<usize> = (0..diag.len()).filter(|&z| diag[z] <= eg + LEVEL_TOL).collect();
        let excited = diag.iter().cloned().filter(|&e| e > eg + LEVEL_TOL).fold(f64::INFINITY, f64::min);
        return Ok(SpectralData {
            ground_energy: eg,
            gap: if excited.is_finite() { excited - eg } else { 0.0 },
            max_energy: em,
            degeneracy: ground.len(),
            ground_space: GroundSpace::BasisStates(ground),
        });
    }
    if n > dense_cap {
        return Err(Error::TooManyQubits { n, cap: dense_cap });
    }
    let (values, vectors) = hermitian_eigen(&h.to_dense());
    let eg = values[0];
    let em = *values.last().expect("non-empty spectrum");
    let excited = values.iter().cloned().find(|&e| e > eg + LEVEL_TOL);
    let ground: Vec<StateVector> = values
        .iter()
        .take_while(|&&e| e <= eg + LEVEL_TOL)
        .enumerate()
        .map(|(j, _)| {
            let col: Vec<Complex64> = vectors.column(j).iter().cloned().collect();
            StateVector::from_amplitudes(col).expect("eigenvectors are normalized")
        })
        .collect();
    Ok(SpectralData {
        ground_energy: eg,
        gap: excited.map_or(0.0, |e| e - eg),
        max_energy: em,
        degeneracy: ground.len(),
        ground_space: GroundSpace::Vectors(ground),
    })
}

pub fn spectral_data(h: &Hamiltonian) -> Result<SpectralData> {
    spectral_data_with_cap(h, DEFAULT_MAX_DM_QUBITS)
}

/// Squared norm of the projection of `psi` onto the ground subspace.
pub fn ground_overlap(psi: &StateVector, spec: &SpectralData) -> Result<f64> {
    let overlap = match &spec.ground_space {
        GroundSpace::BasisStates(idx) => {
            let amps = psi.amplitudes();
            if let Some(&bad) = idx.iter().find(|&&z| z >= amps.len()) {
                return Err(Error::invalid(format!("ground index {bad} exceeds state dimension")));
            }
            idx.iter().map(|&z| amps[z].norm_sqr()).sum()
        }
        GroundSpace::Vectors(vs) => {
            let mut total = 0.0;
            for g in vs {
                total += g.inner(psi)?.norm_sqr();
            }
            total
        }
    };
    Ok(overlap.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use crate::problems::Graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ising_two_spins_no_field() {
        let s = spectral_data(&Hamiltonian::ising(2, 0.0).unwrap()).unwrap();
        assert_eq!((s.ground_energy, s.gap, s.max_energy, s.degeneracy), (-2.0, 4.0, 2.0, 2));
    }

    #[test]
    fn ising_two_spins_unit_field() {
        let s = spectral_data(&Hamiltonian::ising(2, 1.0).unwrap()).unwrap();
        assert!((s.ground_energy + 8f64.sqrt()).abs() < 1e-10);
        let GroundSpace::Vectors(vs) = &s.ground_space else { panic!("dense path expected") };
        let h = Hamiltonian::ising(2, 1.0).unwrap();
        for g in vs {
            let hg = h.apply(g).unwrap();
            let err = hg.iter().zip(g.amplitudes()).map(|(a, b)| (a - b * s.ground_energy).norm()).fold(0.0, f64::max);
            assert!(err < 1e-8);
        }
    }

    #[test]
    fn search_and_triangle() {
        for n in 1..7 {
            let s = spectral_data(&Hamiltonian::search(n, n % 2).unwrap()).unwrap();
            assert_eq!((s.ground_energy, s.gap, s.max_energy, s.degeneracy), (0.0, 1.0, 1.0, 1));
            let overlap = ground_overlap(&StateVector::plus(n), &s).unwrap();
            assert!((overlap - 0.5f64.powi(n as i32)).abs() < 1e-14);
        }
        let s = spectral_data(&Hamiltonian::maxcut(&Graph::complete(3)).unwrap()).unwrap();
        assert_eq!((s.ground_energy, s.gap, s.max_energy, s.degeneracy), (-1.0, 4.0, 3.0, 6));
        let s = spectral_data(&Hamiltonian::maxcut(&Graph::new(2, [(0, 1)]).unwrap()).unwrap()).unwrap();
        assert_eq!((s.ground_energy, s.gap, s.max_energy, s.degeneracy), (-1.0, 2.0, 1.0, 2));
    }

    #[test]
    fn overlap_of_ground_and_orthogonal_states() {
        let s = spectral_data(&Hamiltonian::search(3, 5).unwrap()).unwrap();
        assert_eq!(ground_overlap(&StateVector::basis(3, 5), &s).unwrap(), 1.0);
        assert_eq!(ground_overlap(&StateVector::basis(3, 4), &s).unwrap(), 0.0);
    }

    fn random_hamiltonian<R: Rng>(n: usize, rng: &mut R) -> Hamiltonian {
        let terms: Vec<_> = (0..6)
            .map(|_| {
                let label: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]).collect();
                (rng.gen_range(-1.0..1.0), PauliString::from_label(&label).unwrap())
            })
            .collect();
        Hamiltonian::new(n, terms).unwrap()
    }

    #[test]
    fn dense_matches_brute_force_two_qubits() {
        // Characteristic-polynomial-free oracle: power iteration on a shifted
        // matrix for the extreme eigenvalues.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let h = random_hamiltonian(2, &mut rng);
            let s = spectral_data(&h).unwrap();
            let m = h.to_dense();
            let bound: f64 = h.terms().iter().map(|(c, _)| c.abs()).sum::<f64>() + 1.0;
            let extreme = |shift: f64, sign: f64| {
                let a = (&m * Complex64::new(sign, 0.0)) + nalgebra::DMatrix::identity(4, 4) * Complex64::new(shift, 0.0);
                let mut v = nalgebra::DVector::from_element(4, Complex64::new(1.0, 0.3));
                for _ in 0..20000 {
                    v = &a * &v;
                    v /= Complex64::new(v.norm(), 0.0);
                }
                (v.adjoint() * &m * &v)[(0, 0)].re
            };
            let emax = extreme(bound, 1.0);
            let emin = extreme(bound, -1.0);
            assert!((s.max_energy - emax).abs() < 1e-8, "{} vs {}", s.max_energy, emax);
            assert!((s.ground_energy - emin).abs() < 1e-8, "{} vs {}", s.ground_energy, emin);
        }
    }

    #[test]
    fn variational_bound_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let hs: Vec<Hamiltonian> = (1..=3).map(|n| random_hamiltonian(n, &mut rng)).collect();
        let specs: Vec<SpectralData> = hs.iter().map(|h| spectral_data(h).unwrap()).collect();
        for trial in 0..1000 {
            let k = trial % 3;
            let psi = StateVector::random(k + 1, &mut rng);
            let e = hs[k].expectation(&psi).unwrap();
            assert!(e >= specs[k].ground_energy - 1e-9 && e <= specs[k].max_energy + 1e-9);
        }
    }
}
