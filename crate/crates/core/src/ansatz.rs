//! Checkerboard VQE and QAOA circuit builders.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, InitialState};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::{Pauli, PauliString};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Gamma,
    Beta,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamLabel {
    pub kind: ParamKind,
    /// 1-based layer index.
    pub layer: usize,
}

impl ParamLabel {
    /// Upper end of the half-open box `[0, period)` the parameter is reported in.
    pub fn period(&self) -> f64 {
        match self.kind {
            ParamKind::Gamma | ParamKind::Theta => TAU,
            ParamKind::Beta => PI,
        }
    }

    pub fn wrap(&self, value: f64) -> f64 {
        let w = value.rem_euclid(self.period());
        // rem_euclid can round up to the period itself for tiny negatives.
        if w >= self.period() {
            0.0
        } else {
            w
        }
    }
}

impl std::fmt::Display for ParamLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.kind {
            ParamKind::Gamma => "gamma",
            ParamKind::Beta => "beta",
            ParamKind::Theta => "theta",
        };
        write!(f, "{name}_{}", self.layer)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QaoaMode {
    /// Every cost-term gate is perturbed independently.
    Decomposed,
    /// All gates of one cost or mixer block share a perturbation.
    Layerwise,
}

/// Logical parameters, the gates each one drives, and the gate blocks used
/// for correlated noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamMap {
    /// For each logical parameter, its `(gate index, coeff)` pairs.
    pub groups: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<ParamLabel>,
    /// Gate-index blocks that share one perturbation under per-layer noise.
    pub blocks: Vec<Vec<usize>>,
    pub qaoa_mode: Option<QaoaMode>,
    /// Identity coefficient of the cost Hamiltonian (not realized by gates).
    pub constant: f64,
}

impl ParamMap {
    /// Generic map: groups read off the circuit, one block per gate, all
    /// parameters labelled `theta` in layer 1.
    pub fn from_circuit(circuit: &Circuit) -> Self {
        let mut groups = vec![Vec::new(); circuit.num_params()];
        for (k, g) in circuit.gates().iter().enumerate() {
            groups[g.param_id].push((k, g.coeff));
        }
        Self {
            groups,
            labels: vec![ParamLabel { kind: ParamKind::Theta, layer: 1 }; circuit.num_params()],
            blocks: (0..circuit.num_gates()).map(|k| vec![k]).collect(),
            qaoa_mode: None,
            constant: 0.0,
        }
    }

    pub fn num_logical(&self) -> usize {
        self.groups.len()
    }

    pub fn num_gates(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_qaoa(&self) -> bool {
        self.labels.iter().all(|l| matches!(l.kind, ParamKind::Gamma | ParamKind::Beta)) && !self.labels.is_empty()
    }

    /// Number of QAOA layers, or 0 for other ansätze.
    pub fn depth(&self) -> usize {
        if self.is_qaoa() {
            self.labels.iter().map(|l| l.layer).max().unwrap_or(0)
        } else {
            0
        }
    }

    /// Checks that every gate of `circuit` appears in exactly one group with
    /// the circuit's own coefficient.
    pub fn validate(&self, circuit: &Circuit) -> Result<()> {
        if self.groups.len() != circuit.num_params() || self.labels.len() != circuit.num_params() {
            return Err(Error::invalid("parameter map size differs from circuit"));
        }
        let mut seen = vec![false; circuit.num_gates()];
        for (pid, group) in self.groups.iter().enumerate() {
            for &(k, coeff) in group {
                let gate = circuit.gates().get(k).ok_or_else(|| Error::invalid(format!("gate {k} out of range")))?;
                if seen[k] || gate.param_id != pid || gate.coeff != coeff {
                    return Err(Error::invalid(format!("gate {k} inconsistent with parameter map")));
                }
                seen[k] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("a gate is missing from the parameter map"));
        }
        Ok(())
    }

    /// Uniform draw from each parameter's reporting box.
    pub fn random_point<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.labels.iter().map(|l| rng.gen::<f64>() * l.period()).collect()
    }

    /// Box-wrapped representatives of `params`.
    pub fn wrap(&self, params: &[f64]) -> Vec<f64> {
        self.labels.iter().zip(params).map(|(l, &v)| l.wrap(v)).collect()
    }
}

/// Brick-wall ansatz over `|0…0⟩` with `5np` gates, one parameter per gate.
///
/// Each layer has two periodic brick rows, pairs `(0,1),(2,3),…` then
/// `(1,2),…,(n−1,0)`. A brick is an XX gate followed by Z and X rotations on
/// each of its two qubits.
pub fn checkerboard(n: usize, p: usize) -> Result<(Circuit, ParamMap)> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::invalid(format!("checkerboard needs an even qubit count, got {n}")));
    }
    if p == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let q = 5 * n * p;
    let mut circuit = Circuit::new(n, q, InitialState::AllZero)?;
    let mut labels = Vec::with_capacity(q);
    let mut blocks = Vec::with_capacity(p);
    for layer in 1..=p {
        let mut block = Vec::with_capacity(5 * n);
        for row in 0..2 {
            for b in 0..n / 2 {
                let a = (2 * b + row) % n;
                let c = (a + 1) % n;
                let gens = [
                    PauliString::pair(n, a, c, Pauli::X),
                    PauliString::single(n, a, Pauli::Z),
                    PauliString::single(n, a, Pauli::X),
                    PauliString::single(n, c, Pauli::Z),
                    PauliString::single(n, c, Pauli::X),
                ];
                for g in gens {
                    let k = circuit.num_gates();
                    circuit.push(g, k, 1.0, 0.0)?;
                    labels.push(ParamLabel { kind: ParamKind::Theta, layer });
                    block.push(k);
                }
            }
        }
        blocks.push(block);
    }
    let mut pm = ParamMap::from_circuit(&circuit);
    pm.labels = labels;
    pm.blocks = blocks;
    Ok((circuit, pm))
}

/// QAOA `Π e^{−iβₖH_x} e^{−iγₖH} |+⟩^⊗n` with logical parameters ordered
/// `(γ₁, β₁, γ₂, β₂, …)`.
///
/// The cost propagator is realized as one gate `e^{−iγ cⱼPⱼ}` per non-identity
/// term; the mixer as `e^{−iβXⱼ}` on every qubit.
pub fn qaoa_build(h: &Hamiltonian, p: usize, mode: QaoaMode) -> Result<(Circuit, ParamMap)> {
    if !h.is_diagonal() {
        return Err(Error::invalid("QAOA cost Hamiltonian must be diagonal"));
    }
    if p == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let n = h.num_qubits();
    let mut circuit = Circuit::new(n, 2 * p, InitialState::AllPlus)?;
    let mut labels = Vec::with_capacity(2 * p);
    let mut blocks = Vec::with_capacity(2 * p);
    for layer in 1..=p {
        let (gamma, beta) = (2 * layer - 2, 2 * layer - 1);
        let mut block = Vec::new();
        for (c, pauli) in h.non_identity_terms() {
            block.push(circuit.num_gates());
            circuit.push(pauli.clone(), gamma, -c, 0.0)?;
        }
        blocks.push(block);
        let mut block = Vec::with_capacity(n);
        for j in 0..n {
            block.push(circuit.num_gates());
            circuit.push(PauliString::single(n, j, Pauli::X), beta, -1.0, 0.0)?;
        }
        blocks.push(block);
        labels.push(ParamLabel { kind: ParamKind::Gamma, layer });
        labels.push(ParamLabel { kind: ParamKind::Beta, layer });
    }
    let mut pm = ParamMap::from_circuit(&circuit);
    pm.labels = labels;
    pm.blocks = blocks;
    pm.qaoa_mode = Some(mode);
    pm.constant = h.constant();
    Ok((circuit, pm))
}

/// `Σₖ (γₖ + βₖ)` over box-wrapped angles.
pub fn execution_time(pm: &ParamMap, params: &[f64]) -> Result<f64> {
    if !pm.is_qaoa() {
        return Err(Error::invalid("execution time is defined for QAOA parameter maps only"));
    }
    if params.len() != pm.num_logical() {
        return Err(Error::ParamLength { expected: pm.num_logical(), got: params.len() });
    }
    Ok(pm.wrap(params).iter().sum())
}
