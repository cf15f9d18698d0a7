//! Depth × execution-budget scans of the constrained QAOA optimum.

use serde::Serialize;

use super::{minimize_constrained, sub_seed, MinimizeOptions};
use crate::ansatz::{qaoa_build, QaoaMode};
use crate::hamiltonian::Hamiltonian;
use crate::spectrum::{ground_overlap, spectral_data};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ScanCell {
    pub p: usize,
    pub t_max: f64,
    pub energy: f64,
    pub t_exec: f64,
    pub overlap: f64,
    pub converged: bool,
    pub params: Vec<f64>,
}

/// A run of consecutive budgets at one depth over which `E*` stays flat.
#[derive(Clone, Debug, Serialize)]
pub struct Plateau {
    pub p: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub energy: f64,
    /// Execution time actually used at the start of the plateau.
    pub t_exec: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanTable {
    pub depths: Vec<usize>,
    pub budgets: Vec<f64>,
    /// Row-major: `cells[i * budgets.len() + j]` is depth `i`, budget `j`.
    pub cells: Vec<ScanCell>,
    pub plateaus: Vec<Plateau>,
}

impl ScanTable {
    pub fn cell(&self, depth_idx: usize, budget_idx: usize) -> &ScanCell {
        &self.cells[depth_idx * self.budgets.len() + budget_idx]
    }

    pub fn row(&self, depth_idx: usize) -> &[ScanCell] {
        let w = self.budgets.len();
        &self.cells[depth_idx * w..(depth_idx + 1) * w]
    }

    /// Plateaus at depth `p` whose energies differ pairwise by more than `tol`.
    pub fn distinct_plateaus(&self, p: usize, tol: f64) -> Vec<&Plateau> {
        let mut out: Vec<&Plateau> = Vec::new();
        for pl in self.plateaus.iter().filter(|pl| pl.p == p) {
            if out.iter().all(|o| (o.energy - pl.energy).abs() > tol) {
                out.push(pl);
            }
        }
        out
    }
}

/// Energy differences up to this count as "no improvement" when detecting plateaus.
pub const PLATEAU_TOL: f64 = 1e-6;

/// Runs [`minimize_constrained`] over every `(p, t_max)` cell.
///
/// Each cell is warm-started from the previous budget at the same depth and
/// from the same budget at the previous depth (padded with zero-angle
/// layers), which makes the table non-increasing along both axes.
pub fn depth_time_scan(
    h: &Hamiltonian,
    depths: &[usize],
    budgets: &[f64],
    mode: QaoaMode,
    opts: &MinimizeOptions,
) -> Result<ScanTable> {
    if depths.is_empty() || budgets.is_empty() {
        return Err(Error::invalid("scan grids must be non-empty"));
    }
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    depths.dedup();
    let mut budgets = budgets.to_vec();
    budgets.sort_by(f64::total_cmp);
    budgets.dedup();
    let spec = spectral_data(h)?;
    let mut cells: Vec<ScanCell> = Vec::with_capacity(depths.len() * budgets.len());
    for (i, &p) in depths.iter().enumerate() {
        let (circuit, pm) = qaoa_build(h, p, mode)?;
        for (j, &t_max) in budgets.iter().enumerate() {
            let mut warm = Vec::new();
            if j > 0 {
                warm.push(cells[i * budgets.len() + j - 1].params.clone());
            }
            if i > 0 {
                let mut padded = cells[(i - 1) * budgets.len() + j].params.clone();
                padded.resize(2 * p, 0.0);
                warm.push(padded);
            }
            let cell_opts = MinimizeOptions { seed: sub_seed(opts.seed, p as u64, j as u64), ..*opts };
            let r = minimize_constrained(&circuit, &pm, h, t_max, &cell_opts, &warm)?;
            let overlap = ground_overlap(&circuit.run(&r.params)?, &spec)?;
            cells.push(ScanCell {
                p,
                t_max,
                energy: r.energy,
                t_exec: r.t_exec.unwrap_or(0.0),
                overlap,
                converged: r.converged,
                params: r.params,
            });
        }
    }
    let plateaus = depths
        .iter()
        .enumerate()
        .flat_map(|(i, _)| detect_plateaus(&cells[i * budgets.len()..(i + 1) * budgets.len()]))
        .collect();
    Ok(ScanTable { depths, budgets, cells, plateaus })
}

fn detect_plateaus(row: &[ScanCell]) -> Vec<Plateau> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=row.len() {
        let flat = k < row.len() && (row[k].energy - row[k - 1].energy).abs() <= PLATEAU_TOL;
        if !flat {
            if k - start >= 2 {
                out.push(Plateau {
                    p: row[start].p,
                    t_start: row[start].t_max,
                    t_end: row[k - 1].t_max,
                    energy: row[start].energy,
                    t_exec: row[start].t_exec,
                });
            }
            start = k;
        }
    }
    out
}
