//! Stochastic gate-angle noise, evaluated three independent ways:
//! Monte Carlo over sampled perturbations, the exact averaged channel on a
//! density matrix, and the first-order expansion in the gate error
//! probabilities `aₖ = ⟨sin²δₖ⟩`.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{ParamLabel, ParamMap};
use crate::circuit::Circuit;
use crate::density::DensityMatrix;
use crate::hamiltonian::Hamiltonian;
use crate::optimize::{gradient::check_map, task_rng};
use crate::spectrum::SpectralData;
use crate::{Error, Result};

/// Which gates share one sampled perturbation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    /// Every gate angle receives its own `δ`.
    PerGate,
    /// One `δ` per logical parameter, applied through the gate coefficients.
    PerParameter,
    /// One `δ` per block of the parameter map (a QAOA cost or mixer layer).
    PerLayer,
}

/// Uniform `(−σ, σ)` perturbations with one spread per noise group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub grouping: Grouping,
    /// A single value applies to every group.
    pub sigma: Vec<f64>,
}

impl NoiseSpec {
    pub fn uniform(grouping: Grouping, sigma: f64) -> Self {
        Self { grouping, sigma: vec![sigma] }
    }

    pub fn per_group(grouping: Grouping, sigma: Vec<f64>) -> Self {
        Self { grouping, sigma }
    }

    /// Binds the spec to a circuit's gates.
    pub fn resolve(&self, circuit: &Circuit, pm: &ParamMap) -> Result<ResolvedNoise> {
        let members: Vec<Vec<(usize, f64)>> = match self.grouping {
            Grouping::PerGate => (0..circuit.num_gates()).map(|k| vec![(k, 1.0)]).collect(),
            Grouping::PerParameter => pm.groups.clone(),
            Grouping::PerLayer => pm
                .blocks
                .iter()
                .map(|b| b.iter().map(|&k| (k, circuit.gates()[k].coeff)).collect())
                .collect(),
        };
        let mut covered = vec![0usize; circuit.num_gates()];
        for &(k, _) in members.iter().flatten() {
            *covered.get_mut(k).ok_or_else(|| Error::invalid("noise group names a missing gate"))? += 1;
        }
        if covered.iter().any(|&c| c != 1) {
            return Err(Error::invalid("noise groups must partition the gates"));
        }
        let sigma = match self.sigma.len() {
            1 => vec![self.sigma[0]; members.len()],
            len if len == members.len() => self.sigma.clone(),
            len => return Err(Error::invalid(format!("{len} spreads for {} noise groups", members.len()))),
        };
        if sigma.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::invalid("noise spreads must be finite and non-negative"));
        }
        Ok(ResolvedNoise { groups: members.into_iter().zip(sigma).map(|(members, sigma)| NoiseGroup { sigma, members }).collect() })
    }
}

#[derive(Clone, Debug)]
pub struct NoiseGroup {
    pub sigma: f64,
    /// `(gate index, scale)`: the gate angle moves by `scale·δ`.
    pub members: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct ResolvedNoise {
    pub groups: Vec<NoiseGroup>,
}

impl ResolvedNoise {
    /// True when no two gates share a perturbation.
    pub fn is_independent(&self) -> bool {
        self.groups.iter().all(|g| g.members.len() == 1)
    }

    /// Per-gate error probabilities `s(|scale|·σ)`; requires independent groups.
    pub fn gate_probabilities(&self, q: usize) -> Result<Vec<f64>> {
        if !self.is_independent() {
            return Err(Error::CorrelatedNoise("the averaged-channel evaluators"));
        }
        let mut s = vec![0.0; q];
        for g in &self.groups {
            let (k, scale) = g.members[0];
            s[k] = gate_error_probability(scale.abs() * g.sigma);
        }
        Ok(s)
    }

    /// One draw of `δ` per group.
    pub fn sample_delta<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.groups
            .iter()
            .map(|g| if g.sigma == 0.0 { 0.0 } else { (2.0 * rng.gen::<f64>() - 1.0) * g.sigma })
            .collect()
    }

    /// Adds the group perturbations to the gate angles.
    pub fn perturb(&self, angles: &mut [f64], delta: &[f64]) {
        for (g, d) in self.groups.iter().zip(delta) {
            for &(k, scale) in &g.members {
                angles[k] += scale * d;
            }
        }
    }
}

/// `⟨sin²δ⟩` for `δ ~ uniform(−σ, σ)`: `½ − sin(2σ)/(4σ)`.
pub fn gate_error_probability(sigma: f64) -> f64 {
    let s = sigma.abs();
    if s < 1e-2 {
        // Series avoids cancellation: σ²/3 − σ⁴/15 + 2σ⁶/315.
        let s2 = s * s;
        s2 / 3.0 - s2 * s2 / 15.0 + 2.0 * s2 * s2 * s2 / 315.0
    } else {
        0.5 - (2.0 * s).sin() / (4.0 * s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

const MC_CHUNK: usize = 64;

/// Mean and standard error of the energy over `n_samples` perturbed
/// pure-state circuits. Samples are drawn in fixed-size chunks with
/// counter-derived seeds, so the result does not depend on thread count.
pub fn mc_noisy_energy(
    circuit: &Circuit,
    pm: &ParamMap,
    params: &[f64],
    h: &Hamiltonian,
    spec: &NoiseSpec,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_map(circuit, pm, params)?;
    if n_samples < 2 {
        return Err(Error::invalid("Monte Carlo needs at least 2 samples"));
    }
    let noise = spec.resolve(circuit, pm)?;
    let base = circuit.gate_angles(params)?;
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let energies: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = task_rng(seed, 1, c as u64);
            let count = MC_CHUNK.min(n_samples - c * MC_CHUNK);
            let mut angles = base.clone();
            (0..count)
                .map(|_| {
                    let delta = noise.sample_delta(&mut rng);
                    angles.copy_from_slice(&base);
                    noise.perturb(&mut angles, &delta);
                    circuit.energy_at_angles(&angles, h)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let n = energies.len() as f64;
    let mean = energies.iter().sum::<f64>() / n;
    let var = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate { mean, stderr: (var / n).sqrt(), n_samples })
}

/// `Tr(ρ(θ)H)` with `ρ(θ)` built by composing the averaged single-gate
/// channel. Exact for independent zero-symmetric noise.
pub fn exact_noisy_energy(
    circuit: &Circuit,
    pm: &ParamMap,
    params: &[f64],
    h: &Hamiltonian,
    spec: &NoiseSpec,
    max_dm_qubits: usize,
) -> Result<f64> {
    check_map(circuit, pm, params)?;
    let s = spec.resolve(circuit, pm)?.gate_probabilities(circuit.num_gates())?;
    exact_noisy_energy_at_angles(circuit, &circuit.gate_angles(params)?, &s, h, max_dm_qubits)
}

/// Exact averaged-channel energy with explicit gate angles and probabilities.
pub fn exact_noisy_energy_at_angles(
    circuit: &Circuit,
    angles: &[f64],
    s: &[f64],
    h: &Hamiltonian,
    max_dm_qubits: usize,
) -> Result<f64> {
    let n = circuit.num_qubits();
    if n > max_dm_qubits {
        return Err(Error::TooManyQubits { n, cap: max_dm_qubits });
    }
    if angles.len() != circuit.num_gates() || s.len() != circuit.num_gates() {
        return Err(Error::invalid("angle/probability vectors must have one entry per gate"));
    }
    let mut rho = DensityMatrix::from_pure(&circuit.initial_vector());
    for ((g, &a), &sk) in circuit.gates().iter().zip(angles).zip(s) {
        rho.apply_noisy_gate_mut(&g.generator, a, sk)?;
    }
    rho.expectation(h)
}

/// Energies `⟨ψₖ|H|ψₖ⟩` of the circuits with gate `k` advanced by `π/2`.
pub fn shifted_gate_energies(circuit: &Circuit, params: &[f64], h: &Hamiltonian) -> Result<Vec<f64>> {
    let base = circuit.gate_angles(params)?;
    (0..base.len())
        .into_par_iter()
        .map(|k| {
            let mut a = base.clone();
            a[k] += FRAC_PI_2;
            circuit.energy_at_angles(&a, h)
        })
        .collect()
}

/// First-order energy shift `Σₖ aₖ(⟨ψₖ|H|ψₖ⟩ − E)`.
pub fn first_order_delta_e(circuit: &Circuit, pm: &ParamMap, params: &[f64], h: &Hamiltonian, spec: &NoiseSpec) -> Result<f64> {
    check_map(circuit, pm, params)?;
    let s = spec.resolve(circuit, pm)?.gate_probabilities(circuit.num_gates())?;
    let e = circuit.energy(params, h)?;
    let shifted = shifted_gate_energies(circuit, params, h)?;
    Ok(s.iter().zip(&shifted).map(|(a, ek)| a * (ek - e)).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdStatus {
    Ok,
    /// `E* ≥ E_g + Δ`: no noise level keeps the acceptance condition.
    NotAccepted,
    /// `E_m = E*`: the bound places no limit on the spread.
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SigmaThreshold {
    pub sigma: f64,
    pub status: ThresholdStatus,
}

/// Largest spread `√[(Δ − (E* − E_g)) / (q(E_m − E*))]` for which the
/// first-order bound keeps the noisy energy below `E_g + Δ`.
pub fn sigma_threshold(e_star: f64, spec: &SpectralData, q: usize) -> SigmaThreshold {
    let margin = spec.gap - (e_star - spec.ground_energy);
    if margin <= 0.0 {
        return SigmaThreshold { sigma: 0.0, status: ThresholdStatus::NotAccepted };
    }
    let room = spec.max_energy - e_star;
    if room <= 0.0 || q == 0 {
        return SigmaThreshold { sigma: f64::INFINITY, status: ThresholdStatus::Unbounded };
    }
    SigmaThreshold { sigma: (margin / (q as f64 * room)).sqrt(), status: ThresholdStatus::Ok }
}

/// Least-squares `δE ≈ c·σ²` summary attached to a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub coefficient: f64,
    pub residual: f64,
    /// Largest grid spread whose point lies within 10% of the fit.
    pub max_valid_sigma: f64,
    pub points_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub sigma_grid: Vec<f64>,
    pub mean_de: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Exact-channel shift, when the register fits the density-matrix cap and
    /// the noise is independent.
    pub exact_de: Vec<Option<f64>>,
    pub n_samples: usize,
    pub q: usize,
    pub n: usize,
    pub fit: Option<QuadraticFit>,
}

impl PerturbationReport {
    /// Averages per-instance mean shifts; error bars are the standard error
    /// across instances.
    pub fn ensemble(reports: &[PerturbationReport]) -> Result<PerturbationReport> {
        let first = reports.first().ok_or_else(|| Error::invalid("empty ensemble"))?;
        if reports.iter().any(|r| r.sigma_grid != first.sigma_grid) {
            return Err(Error::invalid("ensemble members use different spread grids"));
        }
        let m = reports.len() as f64;
        let points = first.sigma_grid.len();
        let mut mean_de = Vec::with_capacity(points);
        let mut stderr = Vec::with_capacity(points);
        let mut exact_de = Vec::with_capacity(points);
        for i in 0..points {
            let mean = reports.iter().map(|r| r.mean_de[i]).sum::<f64>() / m;
            let err = if reports.len() > 1 {
                (reports.iter().map(|r| (r.mean_de[i] - mean).powi(2)).sum::<f64>() / (m - 1.0) / m).sqrt()
            } else {
                first.stderr[i]
            };
            mean_de.push(mean);
            stderr.push(err);
            let exact: Option<Vec<f64>> = reports.iter().map(|r| r.exact_de[i]).collect();
            exact_de.push(exact.map(|v| v.iter().sum::<f64>() / m));
        }
        let q = (reports.iter().map(|r| r.q).sum::<usize>() as f64 / m).round() as usize;
        Ok(PerturbationReport {
            sigma_grid: first.sigma_grid.clone(),
            mean_de,
            stderr,
            exact_de,
            n_samples: first.n_samples,
            q,
            n: first.n,
            fit: None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub n_samples: usize,
    pub seed: u64,
    pub grouping: Grouping,
    /// Exact values are skipped above this register size.
    pub max_dm_qubits: usize,
}

/// Mean energy shift and standard error at each spread of `sigma_grid`.
pub fn sigma_sweep(
    circuit: &Circuit,
    pm: &ParamMap,
    params: &[f64],
    h: &Hamiltonian,
    sigma_grid: &[f64],
    opts: &SweepOptions,
) -> Result<PerturbationReport> {
    if sigma_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("spread grid must be ascending"));
    }
    let e0 = circuit.energy(params, h)?;
    let mut mean_de = Vec::with_capacity(sigma_grid.len());
    let mut stderr = Vec::with_capacity(sigma_grid.len());
    let mut exact_de = Vec::with_capacity(sigma_grid.len());
    for (i, &sigma) in sigma_grid.iter().enumerate() {
        if sigma == 0.0 {
            mean_de.push(0.0);
            stderr.push(0.0);
            exact_de.push((circuit.num_qubits() <= opts.max_dm_qubits).then_some(0.0));
            continue;
        }
        let spec = NoiseSpec::uniform(opts.grouping, sigma);
        let mc = mc_noisy_energy(circuit, pm, params, h, &spec, opts.n_samples, crate::optimize::sub_seed(opts.seed, 2, i as u64))?;
        mean_de.push(mc.mean - e0);
        stderr.push(mc.stderr);
        let exact = if circuit.num_qubits() <= opts.max_dm_qubits {
            match exact_noisy_energy(circuit, pm, params, h, &spec, opts.max_dm_qubits) {
                Ok(e) => Some(e - e0),
                Err(Error::CorrelatedNoise(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        exact_de.push(exact);
    }
    Ok(PerturbationReport {
        sigma_grid: sigma_grid.to_vec(),
        mean_de,
        stderr,
        exact_de,
        n_samples: opts.n_samples,
        q: circuit.num_gates(),
        n: circuit.num_qubits(),
        fit: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamSweepTable {
    pub labels: Vec<ParamLabel>,
    pub deltas: Vec<f64>,
    /// `energies[k][j]`: parameter `k` shifted by `deltas[j]`.
    pub energies: Vec<Vec<f64>>,
    /// Largest `|E(k, δ) − E*|` over the grid.
    pub sensitivity: Vec<f64>,
    /// Parameter indices, least sensitive first.
    pub ranking: Vec<usize>,
}

/// Pure-state energy with one logical parameter shifted at a time.
pub fn per_parameter_sweep(
    circuit: &Circuit,
    pm: &ParamMap,
    params: &[f64],
    h: &Hamiltonian,
    delta_grid: &[f64],
) -> Result<ParamSweepTable> {
    check_map(circuit, pm, params)?;
    let e_star = circuit.energy(params, h)?;
    let energies: Vec<Vec<f64>> = (0..pm.num_logical())
        .into_par_iter()
        .map(|k| {
            let mut p = params.to_vec();
            delta_grid
                .iter()
                .map(|d| {
                    p[k] = params[k] + d;
                    circuit.energy(&p, h)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let sensitivity: Vec<f64> =
        energies.iter().map(|row| row.iter().fold(0.0f64, |m, e| m.max((e - e_star).abs()))).collect();
    let mut ranking: Vec<usize> = (0..sensitivity.len()).collect();
    ranking.sort_by(|&a, &b| sensitivity[a].total_cmp(&sensitivity[b]).then(a.cmp(&b)));
    Ok(ParamSweepTable { labels: pm.labels.clone(), deltas: delta_grid.to_vec(), energies, sensitivity, ranking })
}
