//! Dense density matrices and the averaged single-gate noise channel.

use num_complex::Complex64;

use crate::hamiltonian::Hamiltonian;
use crate::pauli::PauliString;
use crate::state::StateVector;
use crate::{Error, Result};

/// Row-major `2ⁿ×2ⁿ` density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let dim = a.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(a[r] * a[c].conj());
            }
        }
        Self { n: psi.num_qubits(), data }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|z| self.get(z, z)).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `max |ρ − σ|` entrywise.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.dim(), self.dim(), &self.data)
    }

    fn check_qubits(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: n });
        }
        Ok(())
    }

    /// `ρ ← e^{iAφ} ρ e^{−iAφ}`.
    pub fn apply_gate_mut(&mut self, generator: &PauliString, angle: f64) -> Result<()> {
        self.check_qubits(generator.num_qubits())?;
        self.left_rotate(generator, angle);
        self.right_rotate_adjoint(generator, angle);
        Ok(())
    }

    /// `ρ ← U[(1−s)ρ + s·AρA]U†` with `U = e^{iA·angle}`.
    pub fn apply_noisy_gate_mut(&mut self, generator: &PauliString, angle: f64, s: f64) -> Result<()> {
        self.check_qubits(generator.num_qubits())?;
        if !(0.0..=0.5).contains(&s) {
            return Err(Error::invalid(format!("gate error probability {s} outside [0, 1/2]")));
        }
        if s > 0.0 {
            self.mix_with_conjugate(generator, s);
        }
        self.left_rotate(generator, angle);
        self.right_rotate_adjoint(generator, angle);
        Ok(())
    }

    /// `Tr(ρH)`.
    pub fn expectation(&self, h: &Hamiltonian) -> Result<f64> {
        self.check_qubits(h.num_qubits())?;
        if let Some(diag) = h.diagonal() {
            return Ok((0..self.dim()).map(|z| diag[z] * self.get(z, z).re).sum());
        }
        let mut total = 0.0;
        for (coeff, p) in h.terms() {
            let flip = p.x_mask() as usize;
            let tr: Complex64 = (0..self.dim()).map(|z| self.get(z, z ^ flip) * p.coef(z)).sum();
            total += coeff * tr.re;
        }
        Ok(total)
    }

    // ρ ← (1−s)ρ + s·AρA, where (AρA)[r][c] = coef(r⊕f)·coef(c)·ρ[r⊕f][c⊕f].
    fn mix_with_conjugate(&mut self, a: &PauliString, s: f64) {
        let dim = self.dim();
        let flip = a.x_mask() as usize;
        let base2 = a.base_phase() * a.base_phase();
        let old = self.data.clone();
        for r in 0..dim {
            let rf = r ^ flip;
            let pr = a.parity_sign(rf);
            for c in 0..dim {
                let cf = c ^ flip;
                let conj = base2 * (pr * a.parity_sign(c)) * old[rf * dim + cf];
                self.data[r * dim + c] = old[r * dim + c] * (1.0 - s) + conj * s;
            }
        }
    }

    // ρ ← Uρ: row pairs (z, z⊕f) combine as in the state-vector rotation.
    fn left_rotate(&mut self, a: &PauliString, angle: f64) {
        let dim = self.dim();
        let flip = a.x_mask() as usize;
        let (sn, cs) = angle.sin_cos();
        let is_base = Complex64::new(0.0, sn) * a.base_phase();
        for z in 0..dim {
            let w = z ^ flip;
            if flip == 0 {
                let f = Complex64::new(cs, 0.0) + is_base * a.parity_sign(z);
                self.data[z * dim..(z + 1) * dim].iter_mut().for_each(|x| *x *= f);
            } else if z < w {
                let fz = is_base * a.parity_sign(w);
                let fw = is_base * a.parity_sign(z);
                for c in 0..dim {
                    let (xz, xw) = (self.data[z * dim + c], self.data[w * dim + c]);
                    self.data[z * dim + c] = xz * cs + fz * xw;
                    self.data[w * dim + c] = xw * cs + fw * xz;
                }
            }
        }
    }

    // ρ ← ρU†: (ρU†)[r][c] = cos·ρ[r][c] − i·sin·conj(coef(c⊕f))·ρ[r][c⊕f].
    fn right_rotate_adjoint(&mut self, a: &PauliString, angle: f64) {
        let dim = self.dim();
        let flip = a.x_mask() as usize;
        let (sn, cs) = angle.sin_cos();
        let factor: Vec<Complex64> = (0..dim)
            .map(|c| Complex64::new(0.0, -sn) * a.coef(c ^ flip).conj())
            .collect();
        for row in self.data.chunks_exact_mut(dim) {
            if flip == 0 {
                for (c, x) in row.iter_mut().enumerate() {
                    *x *= cs + factor[c];
                }
            } else {
                for c in 0..dim {
                    let w = c ^ flip;
                    if c < w {
                        let (xc, xw) = (row[c], row[w]);
                        row[c] = xc * cs + factor[c] * xw;
                        row[w] = xw * cs + factor[w] * xc;
                    }
                }
            }
        }
    }
}

/// Returns `U[(1−s)ρ + s·AρA]U†` with `U = e^{iA·angle}`.
///
/// This is the exact average of `U(angle+δ)ρU(angle+δ)†` over any
/// zero-symmetric `δ` with `⟨sin²δ⟩ = s`.
pub fn apply_noisy_gate_channel(
    rho: &DensityMatrix,
    generator: &PauliString,
    angle: f64,
    s: f64,
) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    out.apply_noisy_gate_mut(generator, angle, s)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use crate::state::apply_gate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliString {
        let ops: Vec<(usize, Pauli)> = (0..n)
            .map(|q| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]))
            .collect();
        PauliString::from_ops(n, &ops).unwrap()
    }

    fn min_eigenvalue(rho: &DensityMatrix) -> f64 {
        let m = rho.to_nalgebra();
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn zero_noise_is_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let psi = StateVector::random(3, &mut rng);
            let p = random_pauli(3, &mut rng);
            let angle = rng.gen_range(-3.0..3.0);
            let rho = apply_noisy_gate_channel(&DensityMatrix::from_pure(&psi), &p, angle, 0.0).unwrap();
            let expect = DensityMatrix::from_pure(&apply_gate(&psi, &p, angle).unwrap());
            assert!(rho.max_abs_diff(&expect) < 1e-12);
        }
    }

    #[test]
    fn half_flip_on_zero_is_maximally_mixed() {
        let x = PauliString::single(1, 0, Pauli::X);
        let rho = apply_noisy_gate_channel(&DensityMatrix::from_pure(&StateVector::zero(1)), &x, 0.0, 0.5).unwrap();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.5).abs() < 1e-15);
        assert!(rho.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn z_noise_leaves_zero_projector() {
        let z = PauliString::single(1, 0, Pauli::Z);
        let start = DensityMatrix::from_pure(&StateVector::zero(1));
        for s in [0.0, 0.1, 0.3, 0.5] {
            let rho = apply_noisy_gate_channel(&start, &z, 0.0, s).unwrap();
            assert!(rho.max_abs_diff(&start) < 1e-15);
        }
    }

    #[test]
    fn out_of_range_probability_is_rejected() {
        let z = PauliString::single(1, 0, Pauli::Z);
        let start = DensityMatrix::from_pure(&StateVector::zero(1));
        assert!(apply_noisy_gate_channel(&start, &z, 0.0, 0.6).is_err());
        assert!(apply_noisy_gate_channel(&start, &z, 0.0, -0.1).is_err());
        let zz = PauliString::pair(2, 0, 1, Pauli::Z);
        assert!(apply_noisy_gate_channel(&start, &zz, 0.0, 0.1).is_err());
    }

    #[test]
    fn channel_matches_quadrature_average() {
        // Average U(φ+δ)ρU(φ+δ)† over δ ~ uniform(−σ, σ) by midpoint quadrature.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = StateVector::random(2, &mut rng);
        let p = PauliString::from_label("XY").unwrap();
        let (angle, sigma) = (0.8f64, 0.4f64);
        let s = 0.5 - (2.0 * sigma).sin() / (4.0 * sigma);
        let exact = apply_noisy_gate_channel(&DensityMatrix::from_pure(&psi), &p, angle, s).unwrap();
        let m = 4000;
        let mut acc = vec![Complex64::new(0.0, 0.0); 16];
        for k in 0..m {
            let delta = -sigma + (k as f64 + 0.5) * 2.0 * sigma / m as f64;
            let rho = DensityMatrix::from_pure(&apply_gate(&psi, &p, angle + delta).unwrap());
            acc.iter_mut().zip(&rho.data).for_each(|(a, b)| *a += b / m as f64);
        }
        let quad = DensityMatrix { n: 2, data: acc };
        assert!(exact.max_abs_diff(&quad) < 1e-7);
    }

    #[test]
    fn channel_preserves_density_matrix_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rho = DensityMatrix::from_pure(&StateVector::random(3, &mut rng));
        for _ in 0..30 {
            let p = random_pauli(3, &mut rng);
            rho.apply_noisy_gate_mut(&p, rng.gen_range(-3.0..3.0), rng.gen_range(0.0..0.5)).unwrap();
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
        assert!(rho.trace().im.abs() < 1e-10);
        assert!(rho.hermiticity_error() < 1e-10);
        assert!(min_eigenvalue(&rho) > -1e-9);
    }
}
