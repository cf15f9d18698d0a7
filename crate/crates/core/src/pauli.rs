//! Signed Pauli strings acting by index bit manipulation.
//!
//! Qubit `j` corresponds to bit `j` of a basis-state index, so `|z⟩` with
//! `z = Σ bⱼ 2ʲ` has qubit `j` in state `bⱼ`. Labels are written qubit 0
//! first: `"XZI"` is `X₀ Z₁ I₂`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' | '_' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `±P₀⊗P₁⊗…` stored as flip/phase bit masks.
///
/// `x_mask` holds the qubits carrying X or Y, `z_mask` the qubits carrying Z or
/// Y. The operator is Hermitian and squares to the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_mask: u64,
    z_mask: u64,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 63, "at most 63 qubits");
        Self { n, x_mask: 0, z_mask: 0, negative: false }
    }

    /// Builds a string from `(qubit, op)` pairs; unlisted qubits are identity.
    pub fn from_ops(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &(q, op) in ops {
            if q >= n {
                return Err(Error::invalid(format!("qubit {q} out of range for {n} qubits")));
            }
            if p.op(q) != Pauli::I {
                return Err(Error::invalid(format!("qubit {q} listed twice")));
            }
            p.set(q, op);
        }
        Ok(p)
    }

    pub fn single(n: usize, q: usize, op: Pauli) -> Self {
        Self::from_ops(n, &[(q, op)]).expect("qubit in range")
    }

    pub fn pair(n: usize, a: usize, b: usize, op: Pauli) -> Self {
        Self::from_ops(n, &[(a, op), (b, op)]).expect("distinct qubits in range")
    }

    /// Z-string on the qubits set in `mask`.
    pub fn z_string(n: usize, mask: u64) -> Self {
        debug_assert!(mask >> n == 0);
        Self { n, x_mask: 0, z_mask: mask, negative: false }
    }

    /// Parses labels like `"XZI"`, `"+XZ"` or `"-YY"`.
    pub fn from_label(label: &str) -> Result<Self> {
        let (negative, body) = match label.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, label.strip_prefix('+').unwrap_or(label)),
        };
        let n = body.chars().count();
        if n == 0 || n > 63 {
            return Err(Error::invalid(format!("bad Pauli label {label:?}")));
        }
        let mut p = Self::identity(n);
        p.negative = negative;
        for (q, c) in body.chars().enumerate() {
            let op = Pauli::from_char(c)
                .ok_or_else(|| Error::invalid(format!("bad Pauli character {c:?} in {label:?}")))?;
            p.set(q, op);
        }
        Ok(p)
    }

    fn set(&mut self, q: usize, op: Pauli) {
        let bit = 1u64 << q;
        self.x_mask &= !bit;
        self.z_mask &= !bit;
        match op {
            Pauli::I => {}
            Pauli::X => self.x_mask |= bit,
            Pauli::Z => self.z_mask |= bit,
            Pauli::Y => {
                self.x_mask |= bit;
                self.z_mask |= bit;
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn op(&self, q: usize) -> Pauli {
        let bit = 1u64 << q;
        match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn negated(&self) -> Self {
        Self { negative: !self.negative, ..self.clone() }
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// True when the string only contains I and Z.
    pub fn is_diagonal(&self) -> bool {
        self.x_mask == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    /// Phase-free label, e.g. `"XZI"`.
    pub fn ops_label(&self) -> String {
        (0..self.n).map(|q| self.op(q).as_char()).collect()
    }

    /// Value of `⟨z|A|z⟩` for a diagonal string.
    #[inline]
    pub fn diagonal_value(&self, z: usize) -> f64 {
        debug_assert!(self.is_diagonal());
        let odd = ((z as u64) & self.z_mask).count_ones() & 1 == 1;
        if odd != self.negative {
            -1.0
        } else {
            1.0
        }
    }

    /// The matrix element in `A|z⟩ = coef(z)·|z ⊕ x_mask⟩`.
    #[inline]
    pub fn coef(&self, z: usize) -> Complex64 {
        self.base_phase() * self.parity_sign(z)
    }

    /// `sign · i^{#Y}`.
    #[inline]
    pub(crate) fn base_phase(&self) -> Complex64 {
        let ny = (self.x_mask & self.z_mask).count_ones() + if self.negative { 2 } else { 0 };
        match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    #[inline]
    pub(crate) fn parity_sign(&self, z: usize) -> f64 {
        if ((z as u64) & self.z_mask).count_ones() & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// `amps ← A·amps` in place.
    pub fn apply_in_place(&self, amps: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), 1usize << self.n);
        let flip = self.x_mask as usize;
        let base = self.base_phase();
        if flip == 0 {
            for (z, a) in amps.iter_mut().enumerate() {
                *a *= base * self.parity_sign(z);
            }
            return;
        }
        for z in 0..amps.len() {
            let w = z ^ flip;
            if z < w {
                let (az, aw) = (amps[z], amps[w]);
                amps[w] = base * self.parity_sign(z) * az;
                amps[z] = base * self.parity_sign(w) * aw;
            }
        }
    }

    /// `amps ← (cos φ + i sin φ A)·amps = e^{iAφ}·amps` in place.
    pub fn rotate_in_place(&self, amps: &mut [Complex64], angle: f64) {
        debug_assert_eq!(amps.len(), 1usize << self.n);
        let (s, c) = angle.sin_cos();
        let is_base = Complex64::new(0.0, s) * self.base_phase();
        let flip = self.x_mask as usize;
        if flip == 0 {
            // Diagonal: each amplitude picks up e^{±iφ}.
            let plus = Complex64::new(c, 0.0) + is_base;
            let minus = Complex64::new(c, 0.0) - is_base;
            for (z, a) in amps.iter_mut().enumerate() {
                *a *= if self.parity_sign(z) > 0.0 { plus } else { minus };
            }
            return;
        }
        for z in 0..amps.len() {
            let w = z ^ flip;
            if z < w {
                let (az, aw) = (amps[z], amps[w]);
                amps[z] = az * c + is_base * self.parity_sign(w) * aw;
                amps[w] = aw * c + is_base * self.parity_sign(z) * az;
            }
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { '-' } else { '+' }, self.ops_label())
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let label = String::deserialize(d)?;
        PauliString::from_label(&label).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(p: &PauliString) -> Vec<Vec<Complex64>> {
        let dim = 1usize << p.num_qubits();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for z in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[z] = Complex64::new(1.0, 0.0);
            p.apply_in_place(&mut e);
            for (r, v) in e.into_iter().enumerate() {
                m[r][z] = v;
            }
        }
        m
    }

    #[test]
    fn single_qubit_matrices() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(dense(&PauliString::from_label("X").unwrap()), vec![vec![zero, one], vec![one, zero]]);
        assert_eq!(dense(&PauliString::from_label("Y").unwrap()), vec![vec![zero, -i], vec![i, zero]]);
        assert_eq!(dense(&PauliString::from_label("Z").unwrap()), vec![vec![one, zero], vec![zero, -one]]);
        assert_eq!(dense(&PauliString::from_label("-Z").unwrap()), vec![vec![-one, zero], vec![zero, one]]);
    }

    #[test]
    fn label_round_trip_and_ordering() {
        let p = PauliString::from_label("-XZI").unwrap();
        assert_eq!(p.op(0), Pauli::X);
        assert_eq!(p.op(1), Pauli::Z);
        assert_eq!(p.op(2), Pauli::I);
        assert_eq!(p.to_string(), "-XZI");
        assert_eq!(p.weight(), 2);
        assert!(PauliString::from_label("XQ").is_err());
        assert!(PauliString::from_ops(2, &[(0, Pauli::X), (0, Pauli::Z)]).is_err());
    }

    #[test]
    fn diagonal_value_matches_coef() {
        let p = PauliString::from_label("ZIZ").unwrap();
        for z in 0..8 {
            assert_eq!(p.coef(z).re, p.diagonal_value(z));
        }
    }

    #[test]
    fn rotation_matches_cos_plus_i_sin() {
        let p = PauliString::from_label("XYZ").unwrap();
        let amps: Vec<Complex64> =
            (0..8).map(|k| Complex64::new(0.1 * k as f64 + 0.3, 0.05 * (k * k) as f64 - 0.2)).collect();
        let angle = 0.731;
        let mut rotated = amps.clone();
        p.rotate_in_place(&mut rotated, angle);
        let mut applied = amps.clone();
        p.apply_in_place(&mut applied);
        for z in 0..8 {
            let expect = amps[z] * angle.cos() + Complex64::new(0.0, angle.sin()) * applied[z];
            assert!((rotated[z] - expect).norm() < 1e-14);
        }
    }
}
