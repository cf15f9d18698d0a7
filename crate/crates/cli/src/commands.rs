use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use vqa_noise::analysis::{fit_power_law, fit_quadratic, AnalysisSummary, PowerLawFit};
use vqa_noise::ansatz::ParamLabel;
use vqa_noise::config::{ExperimentConfig, ProblemInstance};
use vqa_noise::hamiltonian::Hamiltonian;
use vqa_noise::io;
use vqa_noise::noise::{per_parameter_sweep, sigma_sweep as run_sweep, PerturbationReport, QuadraticFit, SweepOptions};
use vqa_noise::optimize::{depth_time_scan, minimize, minimize_constrained, sub_seed, OptResult, Plateau};
use vqa_noise::spectrum::{ground_overlap, spectral_data};

use crate::{gnuplot, Common};

fn load(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&c.config).with_context(|| format!("reading config {}", c.config.display()))?;
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(n) = c.samples {
        cfg.n_samples = n;
    }
    cfg.validate().context("invalid configuration")?;
    fs::create_dir_all(&c.out).with_context(|| format!("creating {}", c.out.display()))?;
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    eprintln!("writing {}", path.display());
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    use std::io::Write;
    writeln!(w)?;
    Ok(())
}

/// Unconstrained, or budget-constrained for QAOA when `t_max` is set.
fn optimize_instance(cfg: &ExperimentConfig, inst: &ProblemInstance, index: usize) -> Result<OptResult> {
    let opts = cfg.minimize_options(inst.pm.depth(), index);
    let r = match cfg.t_max {
        Some(t) if inst.pm.is_qaoa() => minimize_constrained(&inst.circuit, &inst.pm, &inst.hamiltonian, t, &opts, &[])?,
        _ => minimize(&inst.circuit, &inst.pm, &inst.hamiltonian, &opts)?,
    };
    Ok(r)
}

fn progress(i: usize, total: usize, label: &str, what: impl std::fmt::Display) {
    eprintln!("[{}/{total}] {label}: {what}", i + 1);
}

#[derive(Serialize)]
struct OptimizeRecord {
    label: String,
    n: usize,
    q: usize,
    parameter_labels: Vec<ParamLabel>,
    result: OptResult,
    overlap: f64,
    summary: AnalysisSummary,
}

fn optimized_record(cfg: &ExperimentConfig, inst: &ProblemInstance, index: usize) -> Result<OptimizeRecord> {
    let result = optimize_instance(cfg, inst, index)?;
    let spec = spectral_data(&inst.hamiltonian)?;
    let overlap = ground_overlap(&inst.circuit.run(&result.params)?, &spec)?;
    let summary = AnalysisSummary::new(result.energy, &spec, inst.circuit.num_gates(), None)?;
    Ok(OptimizeRecord {
        label: inst.label.clone(),
        n: inst.circuit.num_qubits(),
        q: inst.circuit.num_gates(),
        parameter_labels: inst.pm.labels.clone(),
        result,
        overlap,
        summary,
    })
}

pub fn optimize(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let instances = cfg.instances()?;
    let mut records = Vec::with_capacity(instances.len());
    for (i, inst) in instances.iter().enumerate() {
        let r = optimized_record(&cfg, inst, i)?;
        progress(i, instances.len(), &inst.label, format_args!("E* = {:.10}, accepted = {}", r.result.energy, r.summary.bounds.accepted));
        records.push(r);
    }
    write_json(&c.out, "optimize.json", &records)
}

#[derive(Serialize)]
struct SweepSummary {
    grouping: vqa_noise::noise::Grouping,
    n_samples: usize,
    ensemble_fit: Option<QuadraticFit>,
    ensemble_power_law: Option<PowerLawFit>,
    instances: Vec<SweepInstance>,
}

#[derive(Serialize)]
struct SweepInstance {
    label: String,
    summary: AnalysisSummary,
}

pub fn sigma_sweep(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    if cfg.sigma_grid.is_empty() {
        bail!("sigma-sweep needs a non-empty sigma_grid");
    }
    let instances = cfg.instances()?;
    let mut reports = Vec::with_capacity(instances.len());
    let mut per_instance = Vec::with_capacity(instances.len());
    for (i, inst) in instances.iter().enumerate() {
        let opt = optimize_instance(&cfg, inst, i)?;
        let opts = SweepOptions {
            n_samples: cfg.n_samples,
            seed: sub_seed(cfg.seed, 5, i as u64),
            grouping: cfg.grouping(),
            max_dm_qubits: c.max_dm_qubits,
        };
        let mut report = run_sweep(&inst.circuit, &inst.pm, &opt.params, &inst.hamiltonian, &cfg.sigma_grid, &opts)?;
        report.fit = fit_quadratic(&report, 1.0).ok();
        let spec = spectral_data(&inst.hamiltonian)?;
        let summary = AnalysisSummary::new(opt.energy, &spec, report.q, report.fit.as_ref())?;
        progress(i, instances.len(), &inst.label, format_args!("E* = {:.10}, fit c = {:?}", opt.energy, summary.fit_c));
        per_instance.push(SweepInstance { label: inst.label.clone(), summary });
        reports.push(report);
    }
    let mut ensemble = PerturbationReport::ensemble(&reports)?;
    ensemble.fit = fit_quadratic(&ensemble, 1.0).ok();
    let positive: Vec<(f64, f64)> =
        ensemble.sigma_grid.iter().zip(&ensemble.mean_de).filter(|(s, d)| **s > 0.0 && **d > 0.0).map(|(s, d)| (*s, *d)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
    let power = fit_power_law(&xs, &ys).ok();
    io::write_sweep_csv(create(&c.out, "sigma_sweep.csv")?, &ensemble)?;
    write_json(
        &c.out,
        "sigma_sweep_summary.json",
        &SweepSummary { grouping: cfg.grouping(), n_samples: cfg.n_samples, ensemble_fit: ensemble.fit.clone(), ensemble_power_law: power, instances: per_instance },
    )?;
    if c.gnuplot_script {
        fs::write(script_path(&c.out, "sigma_sweep.gp"), gnuplot::sigma_sweep("sigma_sweep.csv"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ParamRanking {
    label: String,
    e_star: f64,
    /// Parameter labels, least sensitive first.
    ranking: Vec<String>,
    sensitivity: Vec<f64>,
}

fn default_deltas() -> Vec<f64> {
    (-20..=20).map(|k| 0.025 * k as f64).collect()
}

pub fn param_sweep(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let deltas = if cfg.delta_grid.is_empty() { default_deltas() } else { cfg.delta_grid.clone() };
    let instances = cfg.instances()?;
    let mut rankings = Vec::with_capacity(instances.len());
    for (i, inst) in instances.iter().enumerate() {
        let opt = optimize_instance(&cfg, inst, i)?;
        let table = per_parameter_sweep(&inst.circuit, &inst.pm, &opt.params, &inst.hamiltonian, &deltas)?;
        progress(i, instances.len(), &inst.label, format_args!("E* = {:.10}", opt.energy));
        let name = format!("param_sweep_{i}.csv");
        io::write_param_sweep_csv(create(&c.out, &name)?, &table)?;
        if c.gnuplot_script {
            fs::write(script_path(&c.out, &format!("param_sweep_{i}.gp")), gnuplot::param_sweep(&name))?;
        }
        rankings.push(ParamRanking {
            label: inst.label.clone(),
            e_star: opt.energy,
            ranking: table.ranking.iter().map(|&k| table.labels[k].to_string()).collect(),
            sensitivity: table.sensitivity.clone(),
        });
    }
    write_json(&c.out, "param_ranking.json", &rankings)
}

#[derive(Serialize)]
struct ScanSummary {
    label: String,
    depths: Vec<usize>,
    budgets: Vec<f64>,
    plateaus: Vec<Plateau>,
}

pub fn time_scan(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    if !cfg.problem.is_qaoa() {
        bail!("time-scan applies to QAOA problems (sat3, maxcut, search)");
    }
    let depths = if cfg.depths.is_empty() { vec![cfg.depth] } else { cfg.depths.clone() };
    let budgets = match (&cfg.budgets, cfg.t_max) {
        (b, _) if !b.is_empty() => b.clone(),
        (_, Some(t)) => vec![t],
        _ => bail!("time-scan needs budgets or t_max"),
    };
    let hams: Vec<(String, Hamiltonian)> = cfg.hamiltonians()?;
    let max_depth = *depths.iter().max().expect("non-empty");
    let mut summaries = Vec::with_capacity(hams.len());
    for (i, (label, h)) in hams.iter().enumerate() {
        let table = depth_time_scan(h, &depths, &budgets, cfg.mode(), &cfg.minimize_options(max_depth, i))?;
        progress(i, hams.len(), label, format_args!("{} cells, {} plateaus", table.cells.len(), table.plateaus.len()));
        let name = if hams.len() == 1 { "time_scan.csv".to_string() } else { format!("time_scan_{i}.csv") };
        io::write_scan_csv(create(&c.out, &name)?, &table)?;
        if c.gnuplot_script {
            fs::write(script_path(&c.out, &name.replace(".csv", ".gp")), gnuplot::time_scan(&name))?;
        }
        summaries.push(ScanSummary { label: label.clone(), depths: table.depths.clone(), budgets: table.budgets.clone(), plateaus: table.plateaus });
    }
    write_json(&c.out, "time_scan_plateaus.json", &summaries)
}

fn script_path(dir: &Path, name: &str) -> PathBuf {
    let p = dir.join(name);
    eprintln!("writing {}", p.display());
    p
}

