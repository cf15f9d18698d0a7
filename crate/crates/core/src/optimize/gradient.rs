//! Parameter-shift differentiation.
//!
//! For a gate `e^{iAφ}` with `A² = 1`, any expectation value is of the form
//! `a + b·cos 2φ + c·sin 2φ` in `φ`, so `∂/∂φ = f(φ + π/4) − f(φ − π/4)`
//! exactly. This holds for pure-state energies and for the averaged noisy
//! channel alike.

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;

use crate::ansatz::ParamMap;
use crate::circuit::Circuit;
use crate::hamiltonian::Hamiltonian;
use crate::{Error, Result};

/// Per-gate derivatives `∂f/∂φₖ` of a function of the gate angles.
pub fn gate_shift_gradient<F>(angles: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    (0..angles.len())
        .into_par_iter()
        .map(|k| {
            let mut shifted = angles.to_vec();
            shifted[k] = angles[k] + FRAC_PI_4;
            let up = f(&shifted)?;
            shifted[k] = angles[k] - FRAC_PI_4;
            let down = f(&shifted)?;
            Ok(up - down)
        })
        .collect()
}

/// Chain rule from per-gate derivatives to logical parameters.
pub fn to_logical(pm: &ParamMap, per_gate: &[f64]) -> Vec<f64> {
    pm.groups
        .iter()
        .map(|group| group.iter().map(|&(k, coeff)| coeff * per_gate[k]).sum())
        .collect()
}

pub(crate) fn check_map(circuit: &Circuit, pm: &ParamMap, params: &[f64]) -> Result<()> {
    circuit.check_params(params)?;
    if pm.num_logical() != circuit.num_params() || pm.num_gates() != circuit.num_gates() {
        return Err(Error::invalid("parameter map does not match circuit"));
    }
    Ok(())
}

/// Exact energy gradient with respect to the logical parameters by the
/// parameter-shift rule, summing contributions over every gate a parameter
/// drives.
pub fn energy_gradient(circuit: &Circuit, pm: &ParamMap, params: &[f64], h: &Hamiltonian) -> Result<Vec<f64>> {
    check_map(circuit, pm, params)?;
    let angles = circuit.gate_angles(params)?;
    let per_gate = gate_shift_gradient(&angles, |a| circuit.energy_at_angles(a, h))?;
    Ok(to_logical(pm, &per_gate))
}

/// Per-gate Hessian `∂²f/∂φᵢ∂φⱼ` by nested parameter shifts (four shifted
/// evaluations per pair), symmetrized.
pub fn gate_shift_hessian<F>(angles: &[f64], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let q = angles.len();
    let pairs: Vec<(usize, usize)> = (0..q).flat_map(|i| (i..q).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut a = angles.to_vec();
            let mut eval = |si: f64, sj: f64| {
                a.copy_from_slice(angles);
                a[i] += si;
                a[j] += sj;
                f(&a)
            };
            let s = FRAC_PI_4;
            Ok(eval(s, s)? - eval(s, -s)? - eval(-s, s)? + eval(-s, -s)?)
        })
        .collect::<Result<_>>()?;
    let mut hess = vec![vec![0.0; q]; q];
    for (&(i, j), v) in pairs.iter().zip(values) {
        hess[i][j] = v;
        hess[j][i] = v;
    }
    Ok(hess)
}

/// Logical-parameter Hessian from the per-gate one.
pub fn hessian_to_logical(pm: &ParamMap, per_gate: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = pm.num_logical();
    let mut out = vec![vec![0.0; m]; m];
    for (a, ga) in pm.groups.iter().enumerate() {
        for (b, gb) in pm.groups.iter().enumerate().skip(a) {
            let v: f64 = ga
                .iter()
                .flat_map(|&(i, ci)| gb.iter().map(move |&(j, cj)| ci * cj * per_gate[i][j]))
                .sum();
            out[a][b] = v;
            out[b][a] = v;
        }
    }
    out
}
