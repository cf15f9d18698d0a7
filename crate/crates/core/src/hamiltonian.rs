//! Weighted Pauli-sum Hamiltonians and the problem encodings.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pauli::{Pauli, PauliString};
use crate::problems::{CnfInstance, Graph};
use crate::state::StateVector;
use crate::{Error, Result, MAX_STATE_QUBITS};

/// Coefficients smaller than this are dropped when merging like terms.
const COEFF_EPS: f64 = 1e-14;

/// `H = Σ cⱼ Pⱼ` with real coefficients.
///
/// When every term is Z/I-only the diagonal `h(z) = ⟨z|H|z⟩` is cached and
/// all expectation values go through it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<(f64, PauliString)>,
    #[serde(skip)]
    diagonal: Option<Vec<f64>>,
}

impl Hamiltonian {
    /// Merges like terms (first-occurrence order) and drops vanishing ones.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        let terms = merge_terms(n, terms)?;
        let mut h = Self { n, terms, diagonal: None };
        if h.is_diagonal() && n <= MAX_STATE_QUBITS {
            h.diagonal = Some(diagonal_from_terms(n, &h.terms));
        }
        Ok(h)
    }

    /// Builds a diagonal Hamiltonian whose cache was computed independently.
    pub(crate) fn with_diagonal(n: usize, terms: Vec<(f64, PauliString)>, diagonal: Vec<f64>) -> Result<Self> {
        let terms = merge_terms(n, terms)?;
        debug_assert!(terms.iter().all(|(_, p)| p.is_diagonal()));
        debug_assert_eq!(diagonal.len(), 1 << n);
        Ok(Self { n, terms, diagonal: Some(diagonal) })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Terms other than the identity.
    pub fn non_identity_terms(&self) -> impl Iterator<Item = &(f64, PauliString)> {
        self.terms.iter().filter(|(_, p)| !p.is_identity())
    }

    /// Coefficient of the identity term.
    pub fn constant(&self) -> f64 {
        self.terms.iter().filter(|(_, p)| p.is_identity()).map(|(c, _)| c).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.is_diagonal())
    }

    pub fn diagonal(&self) -> Option<&[f64]> {
        self.diagonal.as_deref()
    }

    /// Restores the diagonal cache after deserialization.
    pub fn rebuild_cache(&mut self) {
        if self.is_diagonal() && self.n <= MAX_STATE_QUBITS {
            self.diagonal = Some(diagonal_from_terms(self.n, &self.terms));
        }
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        psi.check_qubits(self.n)?;
        Ok(self.expectation_unchecked(psi.amplitudes()))
    }

    pub(crate) fn expectation_unchecked(&self, amps: &[Complex64]) -> f64 {
        if let Some(diag) = &self.diagonal {
            return diag.iter().zip(amps).map(|(h, a)| h * a.norm_sqr()).sum();
        }
        let mut total = 0.0;
        for (c, p) in &self.terms {
            let flip = p.x_mask() as usize;
            // ⟨ψ|P|ψ⟩ = Σ_z conj(ψ[z⊕f]) coef(z) ψ[z]
            let v: Complex64 = amps
                .iter()
                .enumerate()
                .map(|(z, a)| amps[z ^ flip].conj() * p.coef(z) * a)
                .sum();
            total += c * v.re;
        }
        total
    }

    /// `out ← H·amps`.
    pub(crate) fn apply_into(&self, amps: &[Complex64], out: &mut [Complex64]) {
        if let Some(diag) = &self.diagonal {
            out.iter_mut().zip(diag.iter().zip(amps)).for_each(|(o, (h, a))| *o = a * h);
            return;
        }
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (c, p) in &self.terms {
            let flip = p.x_mask() as usize;
            for (z, a) in amps.iter().enumerate() {
                out[z ^ flip] += a * p.coef(z) * *c;
            }
        }
    }

    /// `H|ψ⟩`.
    pub fn apply(&self, psi: &StateVector) -> Result<Vec<Complex64>> {
        psi.check_qubits(self.n)?;
        let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
        self.apply_into(psi.amplitudes(), &mut out);
        Ok(out)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in &self.terms {
            let flip = p.x_mask() as usize;
            for z in 0..dim {
                m[(z ^ flip, z)] += p.coef(z) * *c;
            }
        }
        m
    }

    /// `Σⱼ ZⱼZⱼ₊₁ + h Σⱼ Xⱼ` on a periodic chain.
    pub fn ising(n: usize, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("Ising chain needs at least 2 spins"));
        }
        let zz = (0..n).map(|j| (1.0, PauliString::pair(n, j, (j + 1) % n, Pauli::Z)));
        let x = (0..n).map(|j| (h, PauliString::single(n, j, Pauli::X)));
        Self::new(n, zz.chain(x).collect::<Vec<_>>())
    }

    /// `Σⱼ P(j)` where `P(j)` projects onto the assignments violating clause `j`.
    pub fn sat3(inst: &CnfInstance) -> Result<Self> {
        let n = inst.num_vars();
        let mut terms = Vec::new();
        for clause in inst.clauses() {
            // A clause is violated iff every literal is false: bit 0 for xᵢ, bit 1 for ¬xᵢ.
            let bits: Vec<(usize, u8)> = clause
                .iter()
                .map(|&l| (l.unsigned_abs() as usize - 1, u8::from(l < 0)))
                .collect();
            terms.extend(pauli_decompose_projector(n, &bits)?);
        }
        let diag = (0..1usize << n).map(|z| inst.violated(z) as f64).collect();
        Self::with_diagonal(n, terms, diag)
    }

    /// `Σ_{(i,j)∈E} ZᵢZⱼ`.
    pub fn maxcut(g: &Graph) -> Result<Self> {
        let n = g.num_vertices();
        let terms: Vec<_> = g.edges().iter().map(|&(u, v)| (1.0, PauliString::pair(n, u, v, Pauli::Z))).collect();
        let m = g.edges().len() as f64;
        let diag = (0..1usize << n).map(|z| m - 2.0 * g.cut_size(z) as f64).collect();
        Self::with_diagonal(n, terms, diag)
    }

    /// `𝟙 − |t⟩⟨t|`.
    pub fn search(n: usize, target: usize) -> Result<Self> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits { n, cap: MAX_STATE_QUBITS });
        }
        if target >= 1 << n {
            return Err(Error::invalid(format!("target {target} out of range for {n} qubits")));
        }
        let bits: Vec<(usize, u8)> = (0..n).map(|q| (q, (target >> q & 1) as u8)).collect();
        let projector = pauli_decompose_projector(n, &bits)?;
        let terms = std::iter::once((1.0, PauliString::identity(n)))
            .chain(projector.into_iter().map(|(c, p)| (-c, p)))
            .collect();
        let mut diag = vec![1.0; 1 << n];
        diag[target] = 0.0;
        Self::with_diagonal(n, terms, diag)
    }
}

/// Expands `Π (I + (−1)^bit Z_q)/2` into `2^k` Z-strings with coefficients `±2⁻ᵏ`.
pub fn pauli_decompose_projector(n: usize, bits: &[(usize, u8)]) -> Result<Vec<(f64, PauliString)>> {
    let mut seen = 0u64;
    for &(q, b) in bits {
        if q >= n {
            return Err(Error::invalid(format!("qubit {q} out of range for {n} qubits")));
        }
        if b > 1 {
            return Err(Error::invalid(format!("bit value {b} is not 0 or 1")));
        }
        if seen >> q & 1 == 1 {
            return Err(Error::invalid(format!("qubit {q} listed twice")));
        }
        seen |= 1 << q;
    }
    let k = bits.len();
    let scale = 0.5f64.powi(k as i32);
    let terms = (0..1u64 << k)
        .map(|subset| {
            let mut mask = 0u64;
            let mut negative = false;
            for (i, &(q, b)) in bits.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    mask |= 1 << q;
                    negative ^= b == 1;
                }
            }
            (if negative { -scale } else { scale }, PauliString::z_string(n, mask))
        })
        .collect();
    Ok(terms)
}

/// Diagonal of a Z/I-only term list by direct evaluation.
pub fn diagonal_from_terms(n: usize, terms: &[(f64, PauliString)]) -> Vec<f64> {
    (0..1usize << n)
        .map(|z| terms.iter().map(|(c, p)| c * p.diagonal_value(z)).sum())
        .collect()
}

fn merge_terms(n: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Vec<(f64, PauliString)>> {
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut merged: Vec<(f64, PauliString)> = Vec::new();
    for (c, p) in terms {
        if p.num_qubits() != n {
            return Err(Error::QubitMismatch { expected: n, got: p.num_qubits() });
        }
        if !c.is_finite() {
            return Err(Error::invalid("non-finite Hamiltonian coefficient"));
        }
        let (c, p) = if p.is_negative() { (-c, p.negated()) } else { (c, p) };
        match index.get(&(p.x_mask(), p.z_mask())) {
            Some(&i) => merged[i].0 += c,
            None => {
                index.insert((p.x_mask(), p.z_mask()), merged.len());
                merged.push((c, p));
            }
        }
    }
    merged.retain(|(c, _)| c.abs() > COEFF_EPS);
    Ok(merged)
}
