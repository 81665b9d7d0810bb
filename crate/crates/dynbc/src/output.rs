//! CSV tables, gnuplot script, mesh and matrix dumps.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use dynbc_core::linalg::SparseMatrix;
use dynbc_core::mesh::Mesh;
use dynbc_core::study::{Scheme, Variable};

use crate::runner::StudyReport;

fn csv_writer(path: &Path) -> io::Result<csv::Writer<File>> {
    Ok(csv::Writer::from_writer(File::create(path)?))
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_errors(report: &StudyReport, path: &Path) -> anyhow::Result<()> {
    let cfg = &report.setup.config;
    let mut w = csv_writer(path)?;
    w.write_record(["problem", "scheme", "h", "tau", "variable", "norm", "error"])?;
    for p in &report.points {
        let Ok(data) = &p.outcome else { continue };
        for variable in [Variable::Bulk, Variable::Surface] {
            for norm in &cfg.norms {
                w.write_record([
                    cfg.problem.name(),
                    p.scheme.name(),
                    &cfg.h.to_string(),
                    &p.tau.to_string(),
                    report.variable_name(variable),
                    norm.name(),
                    &num(data.get(variable, *norm)),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_orders(report: &StudyReport, path: &Path) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["scheme", "variable", "norm", "averaged", "least_squares", "pairwise"])?;
    for row in &report.orders {
        let (avg, ls, pw) = match &row.orders {
            Ok(o) => (
                format!("{:.4}", o.averaged),
                format!("{:.4}", o.least_squares),
                o.pairwise.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>().join(";"),
            ),
            Err(e) => (String::new(), String::new(), format!("error: {e}")),
        };
        w.write_record([row.scheme.name(), report.variable_name(row.variable), row.norm.name(), &avg, &ls, &pw])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_energy(report: &StudyReport, path: &Path) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["scheme", "tau", "step", "t", "energy"])?;
    for p in &report.points {
        let Ok(data) = &p.outcome else { continue };
        for (n, e) in data.energies.iter().enumerate() {
            w.write_record([p.scheme.name(), &p.tau.to_string(), &n.to_string(), &(n as f64 * p.tau).to_string(), &num(*e)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_failures(report: &StudyReport, path: &Path) -> io::Result<()> {
    let mut out = String::new();
    for (p, msg) in report.failures() {
        let _ = writeln!(out, "{} tau={}: {msg}", p.scheme, p.tau);
    }
    std::fs::write(path, out)
}

/// Log-log convergence plots, one PNG per variable and norm, with dotted order-1 and order-2 guides.
pub fn plot_script(report: &StudyReport) -> String {
    let cfg = &report.setup.config;
    let taus = cfg.sorted_taus();
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set logscale xy\nset format y '10^{{%L}}'\nset xlabel 'step size tau'\nset key bottom right\nset grid");
    let schemes: Vec<Scheme> = cfg.schemes.clone();
    for variable in [Variable::Bulk, Variable::Surface] {
        for norm in &cfg.norms {
            let tag = format!("{}_{}", report.variable_name(variable), norm.name());
            let mut first = None;
            for (k, scheme) in schemes.iter().enumerate() {
                let _ = writeln!(s, "$d_{tag}_{k} << EOD");
                for &tau in &taus {
                    if let Some(e) = report.error(*scheme, tau, variable, *norm) {
                        first.get_or_insert((tau, e));
                        let _ = writeln!(s, "{tau:e} {e:e}");
                    }
                }
                let _ = writeln!(s, "EOD");
            }
            let Some((t0, e0)) = first else { continue };
            let _ = writeln!(s, "set output '{tag}.png'");
            let _ = writeln!(s, "set title '{} error in {} ({})'", norm.name(), report.variable_name(variable), cfg.problem.name());
            let mut parts: Vec<String> = schemes
                .iter()
                .enumerate()
                .map(|(k, sc)| format!("$d_{tag}_{k} using 1:2 with linespoints lw 2 title '{}'", sc.name()))
                .collect();
            parts.push(format!("{e0:e}*(x/{t0:e}) with lines dt 3 lc 'gray' title 'order 1'"));
            parts.push(format!("{e0:e}*(x/{t0:e})**2 with lines dt 3 lc 'black' title 'order 2'"));
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
        }
    }
    s
}

/// Writes all study outputs into `dir`.
pub fn write_study(report: &StudyReport, dir: &Path, config_text: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_errors(report, &dir.join("errors.csv"))?;
    write_orders(report, &dir.join("orders.csv"))?;
    write_energy(report, &dir.join("energy.csv"))?;
    std::fs::write(dir.join("plot.gp"), plot_script(report))?;
    std::fs::write(dir.join("config.txt"), config_text)?;
    write_failures(report, &dir.join("failures.txt"))?;
    Ok(())
}

/// Plain-text mesh: a count line `V T B`, then `V` lines `x y`, `T` lines of
/// vertex triples and `B` lines of boundary loop indices.
pub fn write_mesh<W: Write>(mesh: &Mesh, mut w: W) -> io::Result<()> {
    writeln!(w, "{} {} {}", mesh.vertices.len(), mesh.triangles.len(), mesh.boundary_loop.len())?;
    for [x, y] in &mesh.vertices {
        writeln!(w, "{x:e} {y:e}")?;
    }
    for [a, b, c] in &mesh.triangles {
        writeln!(w, "{a} {b} {c}")?;
    }
    for i in &mesh.boundary_loop {
        writeln!(w, "{i}")?;
    }
    Ok(())
}

/// MatrixMarket coordinate format, 1-based.
pub fn write_matrix_market<W: Write>(m: &SparseMatrix, mut w: W) -> io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        writeln!(w, "{} {} {v:e}", i + 1, j + 1)?;
    }
    Ok(())
}

/// `x y value` per vertex.
pub fn write_snapshot<W: Write>(mesh: &Mesh, values: &[f64], mut w: W) -> io::Result<()> {
    for ([x, y], v) in mesh.vertices.iter().zip(values) {
        writeln!(w, "{x:e} {y:e} {v:e}")?;
    }
    Ok(())
}

pub fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}
