//! Overlap bounds from the spectral gap, power-law fits of sweep data, and
//! the second-order model of how the optimum moves under noise.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::ParamMap;
use crate::circuit::Circuit;
use crate::hamiltonian::Hamiltonian;
use crate::linalg::symmetric_eigen;
use crate::noise::{NoiseSpec, PerturbationReport, QuadraticFit, SigmaThreshold};
use crate::optimize::gradient::{check_map, energy_gradient, gate_shift_gradient, gate_shift_hessian, hessian_to_logical, to_logical};
use crate::spectrum::SpectralData;
use crate::{Error, Result};

/// Ground-state overlap bounds implied by an energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityBounds {
    /// `1 − (E − E_g)/Δ`; negative values carry no information.
    pub lower: f64,
    /// `1 − (E − E_g)/(E_m − E_g)`.
    pub upper: f64,
    pub lower_clamped: f64,
    pub upper_clamped: f64,
    /// `E < E_g + Δ`.
    pub accepted: bool,
}

pub fn stability_bounds(e: f64, spec: &SpectralData) -> Result<StabilityBounds> {
    let span = spec.max_energy - spec.ground_energy;
    if span <= 0.0 {
        return Err(Error::invalid("flat spectrum has no overlap bounds"));
    }
    let excess = e - spec.ground_energy;
    let lower = 1.0 - excess / spec.gap;
    let upper = 1.0 - excess / span;
    Ok(StabilityBounds {
        lower,
        upper,
        lower_clamped: lower.clamp(0.0, 1.0),
        upper_clamped: upper.clamp(0.0, 1.0),
        accepted: lower > 0.0,
    })
}

/// Weighted least squares `δE ≈ c·σ²` over grid points with `qσ² ≤ validity_cut`.
///
/// Weights are inverse variances; if any used point has zero standard error
/// the fit falls back to equal weights.
pub fn fit_quadratic(report: &PerturbationReport, validity_cut: f64) -> Result<QuadraticFit> {
    let q = report.q as f64;
    let used: Vec<usize> = (0..report.sigma_grid.len())
        .filter(|&i| {
            let s = report.sigma_grid[i];
            s > 0.0 && q * s * s <= validity_cut
        })
        .collect();
    if used.len() < 3 {
        return Err(Error::invalid(format!("quadratic fit needs 3 points below the cut, found {}", used.len())));
    }
    let weighted = used.iter().all(|&i| report.stderr[i] > 0.0);
    let w = |i: usize| if weighted { report.stderr[i].powi(-2) } else { 1.0 };
    let (mut num, mut den) = (0.0, 0.0);
    for &i in &used {
        let x = report.sigma_grid[i].powi(2);
        num += w(i) * x * report.mean_de[i];
        den += w(i) * x * x;
    }
    let c = num / den;
    let (mut res, mut norm) = (0.0, 0.0);
    for &i in &used {
        let y = report.mean_de[i];
        res += w(i) * (y - c * report.sigma_grid[i].powi(2)).powi(2);
        norm += w(i) * y * y;
    }
    let residual = if norm > 0.0 { (res / norm).sqrt() } else { 0.0 };
    let mut max_valid_sigma = 0.0;
    for (i, &s) in report.sigma_grid.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let model = c * s * s;
        if (report.mean_de[i] - model).abs() > 0.1 * model.abs() {
            break;
        }
        max_valid_sigma = s;
    }
    Ok(QuadraticFit { coefficient: c, residual, max_valid_sigma, points_used: used.len() })
}

/// `y ≈ A·xᵇ` fitted by least squares in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub prefactor: f64,
    /// Root-mean-square log residual, roughly the typical relative deviation.
    pub residual: f64,
}

pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid("power-law fit needs at least 2 paired points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("power-law fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("power-law fit needs distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    Ok(PowerLawFit { slope, prefactor: icpt.exp(), residual: (rss / n).sqrt() })
}

/// Rows `Bᵏ = ∂/∂θ ⟨ψₖ|H|ψₖ⟩`, where `ψₖ` has gate `k` advanced by `π/2`.
pub fn noisy_gradients_bk(circuit: &Circuit, pm: &ParamMap, params: &[f64], h: &Hamiltonian) -> Result<DMatrix<f64>> {
    check_map(circuit, pm, params)?;
    let base = circuit.gate_angles(params)?;
    let q = base.len();
    let rows: Vec<Vec<f64>> = (0..q)
        .into_par_iter()
        .map(|k| {
            let mut shifted = base.clone();
            shifted[k] += FRAC_PI_2;
            let per_gate = gate_shift_gradient(&shifted, |a| circuit.energy_at_angles(a, h))?;
            Ok(to_logical(pm, &per_gate))
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(q, pm.num_logical(), |i, j| rows[i][j]))
}

/// Energy Hessian in the logical parameters.
pub fn hessian(circuit: &Circuit, pm: &ParamMap, params: &[f64], h: &Hamiltonian) -> Result<DMatrix<f64>> {
    check_map(circuit, pm, params)?;
    let angles = circuit.gate_angles(params)?;
    let per_gate = gate_shift_hessian(&angles, |a| circuit.energy_at_angles(a, h))?;
    let m = hessian_to_logical(pm, &per_gate);
    let k = m.len();
    Ok(DMatrix::from_fn(k, k, |i, j| 0.5 * (m[i][j] + m[j][i])))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimumShift {
    pub delta_theta_star: Vec<f64>,
    /// Change of the quadratic model at its minimizer, `−½ bᵀH⁺b` with
    /// `b = Σₖ aₖBᵏ`.
    pub predicted_gain: f64,
    pub hessian_rank: usize,
    /// Norm of the noise force `b` projected onto the Hessian's discarded
    /// (flat) eigenspace. The quadratic model only describes the shift when
    /// this vanishes.
    pub flat_drive: f64,
}

pub const STATIONARITY_TOL: f64 = 1e-5;
const PINV_CUTOFF: f64 = 1e-8;

/// Second-order estimate of where the optimum moves once noise is switched on.
pub fn optimum_shift(circuit: &Circuit, pm: &ParamMap, params: &[f64], h: &Hamiltonian, spec: &NoiseSpec) -> Result<OptimumShift> {
    check_map(circuit, pm, params)?;
    let g = energy_gradient(circuit, pm, params, h)?;
    let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if gmax >= STATIONARITY_TOL {
        return Err(Error::NotStationary(gmax));
    }
    let a = spec.resolve(circuit, pm)?.gate_probabilities(circuit.num_gates())?;
    let k = pm.num_logical();
    if a.iter().all(|&v| v == 0.0) {
        return Ok(OptimumShift {
            delta_theta_star: vec![0.0; k],
            predicted_gain: 0.0,
            hessian_rank: hessian_rank(&hessian(circuit, pm, params, h)?),
            flat_drive: 0.0,
        });
    }
    let bk = noisy_gradients_bk(circuit, pm, params, h)?;
    let b: DVector<f64> = bk.transpose() * DVector::from_vec(a);
    let (values, vectors) = symmetric_eigen(&hessian(circuit, pm, params, h)?);
    let cut = PINV_CUTOFF * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut coords = vectors.transpose() * &b;
    let mut rank = 0;
    let mut gain = 0.0;
    let mut flat = 0.0;
    for (c, &lambda) in coords.iter_mut().zip(values.iter()) {
        if lambda.abs() > cut && cut > 0.0 {
            rank += 1;
            gain -= 0.5 * *c * *c / lambda;
            *c /= -lambda;
        } else {
            flat += *c * *c;
            *c = 0.0;
        }
    }
    let delta = &vectors * coords;
    Ok(OptimumShift {
        delta_theta_star: delta.iter().copied().collect(),
        predicted_gain: gain,
        hessian_rank: rank,
        flat_drive: flat.sqrt(),
    })
}

fn hessian_rank(m: &DMatrix<f64>) -> usize {
    let (values, _) = symmetric_eigen(m);
    let cut = PINV_CUTOFF * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if cut == 0.0 {
        return 0;
    }
    values.iter().filter(|v| v.abs() > cut).count()
}

/// Per-instance analysis record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisSummary {
    #[serde(rename = "E_star")]
    pub e_star: f64,
    #[serde(rename = "E_g")]
    pub e_g: f64,
    pub delta: f64,
    #[serde(rename = "E_m")]
    pub e_m: f64,
    pub bounds: StabilityBounds,
    pub sigma_threshold: SigmaThreshold,
    pub fit_c: Option<f64>,
    pub max_valid_sigma: Option<f64>,
}

impl AnalysisSummary {
    pub fn new(e_star: f64, spec: &SpectralData, q: usize, fit: Option<&QuadraticFit>) -> Result<Self> {
        Ok(Self {
            e_star,
            e_g: spec.ground_energy,
            delta: spec.gap,
            e_m: spec.max_energy,
            bounds: stability_bounds(e_star, spec)?,
            sigma_threshold: crate::noise::sigma_threshold(e_star, spec, q),
            fit_c: fit.map(|f| f.coefficient),
            max_valid_sigma: fit.map(|f| f.max_valid_sigma),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::checkerboard;
    use crate::circuit::InitialState;
    use crate::noise::{gate_error_probability, Grouping};
    use crate::pauli::{Pauli, PauliString};
    use crate::spectrum::{ground_overlap, spectral_data};
    use crate::state::StateVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn report(grid: &[f64], de: impl Fn(f64) -> f64, stderr: f64) -> PerturbationReport {
        PerturbationReport {
            sigma_grid: grid.to_vec(),
            mean_de: grid.iter().map(|&s| de(s)).collect(),
            stderr: vec![stderr; grid.len()],
            exact_de: vec![None; grid.len()],
            n_samples: 0,
            q: 1,
            n: 1,
            fit: None,
        }
    }

    fn random_hamiltonian(n: usize, rng: &mut ChaCha8Rng) -> Hamiltonian {
        let ops = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let terms: Vec<(f64, PauliString)> = (0..6)
            .map(|_| {
                let labels: Vec<(usize, Pauli)> = (0..n).map(|q| (q, ops[rng.gen_range(0..4)])).collect();
                (rng.gen_range(-1.0..1.0), PauliString::from_ops(n, &labels).unwrap())
            })
            .collect();
        Hamiltonian::new(n, terms).unwrap()
    }

    #[test]
    fn bounds_at_ground_and_boundary() {
        let spec = spectral_data(&Hamiltonian::search(2, 1).unwrap()).unwrap();
        let b = stability_bounds(0.0, &spec).unwrap();
        assert_eq!((b.lower, b.upper, b.accepted), (1.0, 1.0, true));
        let b = stability_bounds(1.0, &spec).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!(!b.accepted);
        let flat = Hamiltonian::new(1, [(2.0, PauliString::identity(1))]).unwrap();
        let flat = spectral_data(&flat).unwrap();
        assert!(stability_bounds(2.0, &flat).is_err());
    }

    #[test]
    fn bounds_contain_exact_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..1000 {
            let n = 1 + trial % 3;
            let h = random_hamiltonian(n, &mut rng);
            let Ok(spec) = spectral_data(&h) else { continue };
            let psi = StateVector::random(n, &mut rng);
            let Ok(b) = stability_bounds(h.expectation(&psi).unwrap(), &spec) else { continue };
            let overlap = ground_overlap(&psi, &spec).unwrap();
            assert!(overlap >= b.lower_clamped - 1e-9 && overlap <= b.upper_clamped + 1e-9, "trial {trial}");
            assert_eq!(b.accepted, b.lower > 0.0);
        }
    }

    #[test]
    fn quadratic_fit_on_exact_input() {
        let grid = [0.0, 0.01, 0.02, 0.05, 0.1];
        let f = fit_quadratic(&report(&grid, |s| 3.0 * s * s, 0.0), 1.0).unwrap();
        assert!((f.coefficient - 3.0).abs() < 1e-12 && f.residual < 1e-12);
        assert_eq!(f.max_valid_sigma, 0.1);
        assert!(fit_quadratic(&report(&[0.0, 0.1, 0.2], |s| s * s, 0.0), 1.0).is_err());
    }

    #[test]
    fn quadratic_fit_on_single_gate_curve() {
        let grid: Vec<f64> = (1..=10).map(|i| 0.01 * i as f64).collect();
        let f = fit_quadratic(&report(&grid, |s| 1.0 - (2.0 * s).sin() / (2.0 * s), 1e-4), 1.0).unwrap();
        assert!((f.coefficient / (2.0 / 3.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn power_law_recovers_exponent() {
        let x = [0.01, 0.02, 0.05, 0.1];
        let y: Vec<f64> = x.iter().map(|v| 7.0 * v * v * v).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.prefactor - 7.0).abs() < 1e-9 && f.residual < 1e-12);
        assert!(fit_power_law(&x, &[1.0, -1.0, 1.0, 1.0]).is_err());
    }

    fn single_x() -> (Circuit, ParamMap, Hamiltonian) {
        let mut c = Circuit::new(1, 1, InitialState::AllZero).unwrap();
        c.push(PauliString::single(1, 0, Pauli::X), 0, 1.0, 0.0).unwrap();
        let pm = ParamMap::from_circuit(&c);
        let h = Hamiltonian::new(1, [(1.0, PauliString::single(1, 0, Pauli::Z))]).unwrap();
        (c, pm, h)
    }

    #[test]
    fn single_gate_bk_and_hessian() {
        let (c, pm, h) = single_x();
        for theta in [0.3, 1.1, 2.0] {
            let b = noisy_gradients_bk(&c, &pm, &[theta], &h).unwrap();
            assert!((b[(0, 0)] - 2.0 * (2.0 * theta).sin()).abs() < 1e-12);
        }
        let hs = hessian(&c, &pm, &[FRAC_PI_2], &h).unwrap();
        assert!((hs[(0, 0)] - 4.0).abs() < 1e-12);
        let shift = optimum_shift(&c, &pm, &[FRAC_PI_2], &h, &NoiseSpec::uniform(Grouping::PerGate, 0.1)).unwrap();
        assert!(shift.delta_theta_star[0].abs() < 1e-12);
        assert_eq!(shift.hessian_rank, 1);
        assert!(matches!(
            optimum_shift(&c, &pm, &[1.0], &h, &NoiseSpec::uniform(Grouping::PerGate, 0.1)),
            Err(Error::NotStationary(_))
        ));
    }

    #[test]
    fn bk_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ops = [Pauli::X, Pauli::Y, Pauli::Z];
        let mut c = Circuit::new(3, 4, InitialState::AllZero).unwrap();
        for g in 0..10 {
            let gen = PauliString::from_ops(3, &[(g % 3, ops[rng.gen_range(0..3)]), ((g + 1) % 3, ops[rng.gen_range(0..3)])]).unwrap();
            c.push(gen, rng.gen_range(0..4), rng.gen_range(-1.5..1.5), rng.gen_range(0.0..1.0)).unwrap();
        }
        let pm = ParamMap::from_circuit(&c);
        let h = random_hamiltonian(3, &mut rng);
        let params: Vec<f64> = (0..c.num_params()).map(|_| rng.gen_range(0.0..6.0)).collect();
        let b = noisy_gradients_bk(&c, &pm, &params, &h).unwrap();
        let eps = 1e-5;
        for k in [0, 3, c.num_gates() - 1] {
            let shifted_energy = |p: &[f64]| {
                let mut a = c.gate_angles(p).unwrap();
                a[k] += FRAC_PI_2;
                c.energy_at_angles(&a, &h).unwrap()
            };
            for j in 0..c.num_params() {
                let mut up = params.clone();
                let mut dn = params.clone();
                up[j] += eps;
                dn[j] -= eps;
                let fd = (shifted_energy(&up) - shifted_energy(&dn)) / (2.0 * eps);
                assert!((b[(k, j)] - fd).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn shift_vanishes_without_noise_and_model_gain_is_nonpositive() {
        let (c, pm) = checkerboard(2, 1).unwrap();
        let h = Hamiltonian::ising(2, 1.0).unwrap();
        let opts = crate::optimize::MinimizeOptions::for_depth(1, 3).with_restarts(4);
        let opt = crate::optimize::minimize(&c, &pm, &h, &opts).unwrap();
        let hs = hessian(&c, &pm, &opt.params, &h).unwrap();
        assert!((&hs - hs.transpose()).abs().max() < 1e-9);
        assert!(symmetric_eigen(&hs).0[0] > -1e-6);
        let zero = optimum_shift(&c, &pm, &opt.params, &h, &NoiseSpec::uniform(Grouping::PerGate, 0.0)).unwrap();
        assert!(zero.delta_theta_star.iter().all(|v| *v == 0.0));
        let s = optimum_shift(&c, &pm, &opt.params, &h, &NoiseSpec::uniform(Grouping::PerGate, 0.05)).unwrap();
        assert!(s.predicted_gain <= 0.0 && s.delta_theta_star.iter().all(|v| v.is_finite()));
        assert!(gate_error_probability(0.05) > 0.0);
    }
}
