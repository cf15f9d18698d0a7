//! Text formats: DIMACS CNF, edge lists, and CSV result tables.
//!
//! Floating-point CSV fields carry 17 significant digits so every value
//! reads back bit-exactly.

use std::io::{BufRead, Write};

use crate::noise::{ParamSweepTable, PerturbationReport};
use crate::optimize::ScanTable;
use crate::problems::{check_clause, CnfInstance, Graph};
use crate::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn read_dimacs<R: BufRead>(reader: R) -> Result<CnfInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<[i32; 3]> = Vec::new();
    let mut last_line = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('%') {
            break;
        }
        if let Some(rest) = t.strip_prefix('p') {
            if header.is_some() {
                return Err(parse_err(lineno, "duplicate problem line"));
            }
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 3 || f[0] != "cnf" {
                return Err(parse_err(lineno, "expected `p cnf <vars> <clauses>`"));
            }
            let n = f[1].parse().map_err(|_| parse_err(lineno, format!("bad variable count `{}`", f[1])))?;
            let m = f[2].parse().map_err(|_| parse_err(lineno, format!("bad clause count `{}`", f[2])))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_err(lineno, "clause before problem line"))?;
        let lits: Vec<i32> = t
            .split_whitespace()
            .map(|tok| tok.parse().map_err(|_| parse_err(lineno, format!("bad literal `{tok}`"))))
            .collect::<Result<_>>()?;
        match lits.split_last() {
            Some((0, body)) => {
                if body.contains(&0) {
                    return Err(parse_err(lineno, "more than one clause on a line"));
                }
                check_clause(n, body).map_err(|m| parse_err(lineno, m))?;
                clauses.push([body[0], body[1], body[2]]);
            }
            _ => return Err(parse_err(lineno, "clause is missing its 0 terminator")),
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(last_line.max(1), "missing problem line"))?;
    if clauses.len() != m {
        return Err(parse_err(last_line, format!("header declares {m} clauses, found {}", clauses.len())));
    }
    CnfInstance::new(n, clauses)
}

pub fn write_dimacs<W: Write>(mut w: W, inst: &CnfInstance) -> Result<()> {
    writeln!(w, "p cnf {} {}", inst.num_vars(), inst.clauses().len())?;
    for c in inst.clauses() {
        writeln!(w, "{} {} {} 0", c[0], c[1], c[2])?;
    }
    Ok(())
}

/// First non-comment line holds the vertex count; then one `u v` pair per line.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| parse_err(lineno, format!("bad vertex `{s}`")));
        match (n, f.as_slice()) {
            (None, [count]) => n = Some(num(count)?),
            (None, _) => return Err(parse_err(lineno, "expected the vertex count")),
            (Some(nv), [u, v]) => {
                let (u, v) = (num(u)?, num(v)?);
                if u >= nv || v >= nv || u == v {
                    return Err(parse_err(lineno, format!("invalid edge ({u}, {v}) for {nv} vertices")));
                }
                edges.push((u, v));
            }
            (Some(_), _) => return Err(parse_err(lineno, "expected `u v`")),
        }
    }
    let n = n.ok_or_else(|| parse_err(1, "missing vertex count"))?;
    Graph::new(n, edges)
}

pub fn write_edge_list<W: Write>(mut w: W, g: &Graph) -> Result<()> {
    writeln!(w, "{}", g.num_vertices())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub const SWEEP_HEADER: [&str; 6] = ["sigma", "mean_dE", "stderr", "exact_dE", "q", "n"];
pub const PARAM_HEADER: [&str; 4] = ["param_label", "layer", "delta", "energy"];
pub const SCAN_HEADER: [&str; 6] = ["p", "t_max", "E_star", "t_exec", "overlap", "converged"];

pub fn write_sweep_csv<W: Write>(w: W, r: &PerturbationReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_HEADER)?;
    for i in 0..r.sigma_grid.len() {
        out.write_record([
            fmt_f64(r.sigma_grid[i]),
            fmt_f64(r.mean_de[i]),
            fmt_f64(r.stderr[i]),
            r.exact_de[i].map(fmt_f64).unwrap_or_default(),
            r.q.to_string(),
            r.n.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One parsed row of a sweep CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub mean_de: f64,
    pub stderr: f64,
    pub exact_de: Option<f64>,
    pub q: usize,
    pub n: usize,
}

pub fn read_sweep_csv<R: std::io::Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rd = csv::Reader::from_reader(r);
    if rd.headers()?.iter().ne(SWEEP_HEADER) {
        return Err(parse_err(1, "unexpected sweep header"));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let get = |k: usize| rec.get(k).ok_or_else(|| parse_err(line, format!("missing column {}", SWEEP_HEADER[k])));
        let float = |k: usize| -> Result<f64> {
            let s = get(k)?;
            s.parse().map_err(|_| parse_err(line, format!("bad number `{s}`")))
        };
        let int = |k: usize| -> Result<usize> {
            let s = get(k)?;
            s.parse().map_err(|_| parse_err(line, format!("bad count `{s}`")))
        };
        rows.push(SweepRow {
            sigma: float(0)?,
            mean_de: float(1)?,
            stderr: float(2)?,
            exact_de: if get(3)?.is_empty() { None } else { Some(float(3)?) },
            q: int(4)?,
            n: int(5)?,
        });
    }
    Ok(rows)
}

pub fn write_param_sweep_csv<W: Write>(w: W, t: &ParamSweepTable) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(PARAM_HEADER)?;
    for (k, label) in t.labels.iter().enumerate() {
        for (j, d) in t.deltas.iter().enumerate() {
            out.write_record([label.to_string(), label.layer.to_string(), fmt_f64(*d), fmt_f64(t.energies[k][j])])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_scan_csv<W: Write>(w: W, t: &ScanTable) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SCAN_HEADER)?;
    for c in &t.cells {
        out.write_record([
            c.p.to_string(),
            fmt_f64(c.t_max),
            fmt_f64(c.energy),
            fmt_f64(c.t_exec),
            fmt_f64(c.overlap),
            c.converged.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
