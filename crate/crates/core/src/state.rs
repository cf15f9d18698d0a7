//! Dense pure states.

use num_complex::Complex64;
use rand::Rng;

use crate::pauli::PauliString;
use crate::{Error, Result, MAX_STATE_QUBITS, NUM_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// `|+⟩^⊗n`.
    pub fn plus(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Self { n, amps: vec![a; dim] }
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let dim = 1usize << n;
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// Wraps raw amplitudes; they must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {dim} is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits { n, cap: MAX_STATE_QUBITS });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NUM_TOL {
            return Err(Error::invalid(format!("state norm² is {norm}, expected 1")));
        }
        Ok(Self { n, amps })
    }

    /// Gaussian-random normalized state (Haar distributed).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let dim = 1usize << n;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                let (a, b) = gaussian_pair(rng);
                Complex64::new(a, b)
            })
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Self { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_qubits(other.n)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub(crate) fn check_qubits(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: n });
        }
        Ok(())
    }

    /// `|ψ⟩ ← e^{iA·angle}|ψ⟩`.
    pub fn apply_gate_mut(&mut self, generator: &PauliString, angle: f64) -> Result<()> {
        self.check_qubits(generator.num_qubits())?;
        generator.rotate_in_place(&mut self.amps, angle);
        Ok(())
    }

    /// `|ψ⟩ ← A|ψ⟩`.
    pub fn apply_pauli_mut(&mut self, p: &PauliString) -> Result<()> {
        self.check_qubits(p.num_qubits())?;
        p.apply_in_place(&mut self.amps);
        Ok(())
    }
}

/// Returns `e^{iA·angle}|ψ⟩ = cos(angle)|ψ⟩ + i·sin(angle)·A|ψ⟩`.
pub fn apply_gate(state: &StateVector, generator: &PauliString, angle: f64) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_gate_mut(generator, angle)?;
    Ok(out)
}

fn gaussian_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    (r * t.cos(), r * t.sin())
}
