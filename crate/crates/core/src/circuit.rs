//! Parameterized circuits of involutory-generator gates.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::Hamiltonian;
use crate::pauli::PauliString;
use crate::state::StateVector;
use crate::{Error, Result, MAX_STATE_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    AllZero,
    AllPlus,
}

/// `e^{iA·(coeff·θ[param_id] + offset)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub generator: PauliString,
    pub param_id: usize,
    pub coeff: f64,
    pub offset: f64,
}

impl Gate {
    #[inline]
    pub fn angle(&self, params: &[f64]) -> f64 {
        self.coeff * params[self.param_id] + self.offset
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    num_params: usize,
    initial_state: InitialState,
    gates: Vec<Gate>,
    #[serde(skip)]
    compiled: OnceLock<Vec<Segment>>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.num_params == other.num_params
            && self.initial_state == other.initial_state
            && self.gates == other.gates
    }
}

impl Circuit {
    pub fn new(n: usize, num_params: usize, initial_state: InitialState) -> Result<Self> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits { n, cap: MAX_STATE_QUBITS });
        }
        Ok(Self { n, num_params, initial_state, gates: Vec::new(), compiled: OnceLock::new() })
    }

    pub fn push(&mut self, generator: PauliString, param_id: usize, coeff: f64, offset: f64) -> Result<()> {
        if generator.num_qubits() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: generator.num_qubits() });
        }
        if param_id >= self.num_params {
            return Err(Error::invalid(format!("param id {param_id} ≥ {}", self.num_params)));
        }
        if coeff == 0.0 || !coeff.is_finite() || !offset.is_finite() {
            return Err(Error::invalid("gate coefficient must be finite and non-zero"));
        }
        self.gates.push(Gate { generator, param_id, coeff, offset });
        self.compiled = OnceLock::new();
        Ok(())
    }

    /// Re-checks every gate after deserialization.
    pub fn validate(&self) -> Result<()> {
        let mut fresh = Circuit::new(self.n, self.num_params, self.initial_state)?;
        for g in &self.gates {
            fresh.push(g.generator.clone(), g.param_id, g.coeff, g.offset)?;
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    /// Gate count `q`.
    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn initial_state(&self) -> InitialState {
        self.initial_state
    }

    pub fn initial_vector(&self) -> StateVector {
        match self.initial_state {
            InitialState::AllZero => StateVector::zero(self.n),
            InitialState::AllPlus => StateVector::plus(self.n),
        }
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::ParamLength { expected: self.num_params, got: params.len() });
        }
        Ok(())
    }

    pub(crate) fn check_angles(&self, angles: &[f64]) -> Result<()> {
        if angles.len() != self.gates.len() {
            return Err(Error::invalid(format!(
                "{} gate angles supplied for {} gates",
                angles.len(),
                self.gates.len()
            )));
        }
        Ok(())
    }

    /// Effective per-gate angles `coeff·θ[param_id] + offset`.
    pub fn gate_angles(&self, params: &[f64]) -> Result<Vec<f64>> {
        self.check_params(params)?;
        Ok(self.gates.iter().map(|g| g.angle(params)).collect())
    }

    /// Applies every gate in order to the initial state.
    pub fn run(&self, params: &[f64]) -> Result<StateVector> {
        self.check_params(params)?;
        let mut psi = self.initial_vector();
        for seg in self.segments() {
            seg.forward(psi.amplitudes_mut(), &self.gates, params);
        }
        Ok(psi)
    }

    /// Runs the circuit with explicit per-gate angles, ignoring the parameter map.
    pub fn run_angles(&self, angles: &[f64]) -> Result<StateVector> {
        self.check_angles(angles)?;
        let mut psi = self.initial_vector();
        for (g, &a) in self.gates.iter().zip(angles) {
            g.generator.rotate_in_place(psi.amplitudes_mut(), a);
        }
        Ok(psi)
    }

    /// `E(θ) = ⟨ψ(θ)|H|ψ(θ)⟩`.
    pub fn energy(&self, params: &[f64], h: &Hamiltonian) -> Result<f64> {
        let psi = self.run(params)?;
        h.expectation(&psi)
    }

    pub fn energy_at_angles(&self, angles: &[f64], h: &Hamiltonian) -> Result<f64> {
        let psi = self.run_angles(angles)?;
        h.expectation(&psi)
    }

    /// Energy and exact logical-parameter gradient by reverse-mode
    /// (adjoint) differentiation: one forward and one backward sweep.
    pub fn energy_and_adjoint_gradient(&self, params: &[f64], h: &Hamiltonian) -> Result<(f64, Vec<f64>)> {
        let psi = self.run(params)?;
        psi.check_qubits(h.num_qubits())?;
        let mut psi = psi.amplitudes().to_vec();
        let energy = h.expectation_unchecked(&psi);
        let mut lambda = vec![Complex64::new(0.0, 0.0); psi.len()];
        h.apply_into(&psi, &mut lambda);
        let mut grad = vec![0.0; self.num_params];
        for seg in self.segments().iter().rev() {
            seg.backward(&mut psi, &mut lambda, &self.gates, params, &mut grad);
        }
        Ok((energy, grad))
    }

    fn segments(&self) -> &[Segment] {
        self.compiled.get_or_init(|| compile(self.n, &self.gates))
    }
}

/// Execution unit of the noiseless fast path. Consecutive diagonal gates
/// sharing one logical parameter collapse into a single phase table
/// `θ·slope(z) + offset(z)`.
#[derive(Clone, Debug)]
enum Segment {
    Gate(usize),
    DiagonalRun { param_id: usize, slope: Vec<f64>, offset: Vec<f64> },
}

fn compile(n: usize, gates: &[Gate]) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < gates.len() {
        let g = &gates[i];
        let mut j = i + 1;
        if g.generator.is_diagonal() {
            while j < gates.len() && gates[j].generator.is_diagonal() && gates[j].param_id == g.param_id {
                j += 1;
            }
        }
        if j - i >= 2 {
            let dim = 1usize << n;
            let mut slope = vec![0.0; dim];
            let mut offset = vec![0.0; dim];
            for gate in &gates[i..j] {
                for z in 0..dim {
                    let d = gate.generator.diagonal_value(z);
                    slope[z] += gate.coeff * d;
                    offset[z] += gate.offset * d;
                }
            }
            out.push(Segment::DiagonalRun { param_id: g.param_id, slope, offset });
        } else {
            out.push(Segment::Gate(i));
        }
        i = j;
    }
    out
}

impl Segment {
    fn forward(&self, amps: &mut [Complex64], gates: &[Gate], params: &[f64]) {
        match self {
            Segment::Gate(k) => {
                let g = &gates[*k];
                g.generator.rotate_in_place(amps, g.angle(params));
            }
            Segment::DiagonalRun { param_id, slope, offset } => {
                let theta = params[*param_id];
                for (z, a) in amps.iter_mut().enumerate() {
                    *a *= Complex64::from_polar(1.0, theta * slope[z] + offset[z]);
                }
            }
        }
    }

    // On entry `psi` is the state after this segment and `lambda` the
    // back-propagated `H|ψ_final⟩`; both are rewound past the segment.
    fn backward(&self, psi: &mut [Complex64], lambda: &mut [Complex64], gates: &[Gate], params: &[f64], grad: &mut [f64]) {
        match self {
            Segment::Gate(k) => {
                let g = &gates[*k];
                let a = &g.generator;
                let flip = a.x_mask() as usize;
                // ⟨λ|A|ψ⟩ = Σ_z conj(λ[z⊕f])·coef(z)·ψ[z]
                let w: Complex64 = psi
                    .iter()
                    .enumerate()
                    .map(|(z, p)| lambda[z ^ flip].conj() * a.coef(z) * p)
                    .sum();
                grad[g.param_id] += g.coeff * (-2.0 * w.im);
                let angle = g.angle(params);
                a.rotate_in_place(psi, -angle);
                a.rotate_in_place(lambda, -angle);
            }
            Segment::DiagonalRun { param_id, slope, offset } => {
                let theta = params[*param_id];
                let mut w = 0.0;
                for z in 0..psi.len() {
                    w += (lambda[z].conj() * psi[z]).im * slope[z];
                    let undo = Complex64::from_polar(1.0, -(theta * slope[z] + offset[z]));
                    psi[z] *= undo;
                    lambda[z] *= undo;
                }
                grad[*param_id] += -2.0 * w;
            }
        }
    }
}
