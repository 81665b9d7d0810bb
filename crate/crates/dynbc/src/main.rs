use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use dynbc::output;
use dynbc::{parse_step, run_study, HarnessConfig, RunOptions};
use dynbc_core::assembly::{BilinearParams, BlockSystem, CouplingKind};
use dynbc_core::mesh::{generate_disc_mesh, mesh_width};
use dynbc_core::study::{Problem, Scheme};

#[derive(Parser)]
#[command(name = "dynbc", version, about = "Bulk-surface splitting schemes for waves with dynamic boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence study and write errors.csv, orders.csv, energy.csv and plot.gp.
    Run {
        #[command(flatten)]
        study: StudyArgs,
        /// Skip the reference run at twice the reference step.
        #[arg(long)]
        no_reference_check: bool,
    },
    /// Dump nodal values `x y u` at time `t`.
    Snapshot {
        #[command(flatten)]
        study: StudyArgs,
        #[arg(long)]
        t: f64,
        /// Step size (default: the reference step).
        #[arg(long, value_parser = step)]
        tau: Option<f64>,
        /// Output file (default: <out>/snapshot_<t>.txt).
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Write the mesh and assembled matrices (MatrixMarket) into the output directory.
    Export {
        #[command(flatten)]
        study: StudyArgs,
    },
}

fn step(s: &str) -> Result<f64, String> {
    parse_step(s).ok_or_else(|| format!("invalid step size `{s}`"))
}

#[derive(Args)]
struct StudyArgs {
    /// key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated scheme list (lie-euler, lie-cn, strang-euler, strang-cn, reference-cn).
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    h: Option<f64>,
    /// Comma-separated step sizes, e.g. `2^-4,2^-5,0.015625`.
    #[arg(long)]
    tau_list: Option<String>,
    #[arg(long)]
    tau_ref: Option<String>,
    #[arg(long = "T")]
    final_time: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// none, allen-cahn-bulk or allen-cahn-surface.
    #[arg(long)]
    nonlinearity: Option<String>,
    #[arg(long)]
    norms: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mesh width 0.02 and reference step 2^-12.
    #[arg(long)]
    paper_scale: bool,
}

impl StudyArgs {
    fn resolve(&self) -> anyhow::Result<HarnessConfig> {
        let mut cfg = HarnessConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if self.paper_scale {
            cfg.study = cfg.study.clone().paper_scale();
        }
        let num = |v: Option<f64>| v.map(|x| x.to_string());
        let flags = [
            ("problem", self.problem.clone()),
            ("scheme", self.scheme.clone()),
            ("h", num(self.h)),
            ("tau_list", self.tau_list.clone()),
            ("tau_ref", self.tau_ref.clone()),
            ("T", num(self.final_time)),
            ("beta", num(self.beta)),
            ("kappa", num(self.kappa)),
            ("nonlinearity", self.nonlinearity.clone()),
            ("norms", self.norms.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        cfg.study.validate().context("invalid study configuration")?;
        Ok(cfg)
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run { study, no_reference_check } => {
            let cfg = study.resolve()?;
            let report = run_study(&cfg.study, RunOptions { check_reference: !no_reference_check })?;
            output::write_study(&report, &cfg.output_dir, &cfg.to_text())?;
            let mesh = &report.setup.mesh;
            println!(
                "{} study: {} vertices ({} on the boundary), width {:.4}",
                cfg.study.problem.name(),
                mesh.n_vertices(),
                mesh.n_boundary,
                mesh_width(mesh)
            );
            for row in &report.orders {
                if let Ok(o) = &row.orders {
                    println!(
                        "  {:<13} {:<6} {:<7} averaged {:.3}  least-squares {:.3}",
                        row.scheme.name(),
                        report.variable_name(row.variable),
                        row.norm.name(),
                        o.averaged,
                        o.least_squares
                    );
                }
            }
            if let Some(check) = &report.reference_check {
                println!(
                    "  reference check: {} (self difference / smallest error = {:.3})",
                    if check.passed { "ok" } else { "reference too coarse" },
                    check.worst_ratio
                );
            }
            let failed = report.failures().count();
            if failed > 0 {
                eprintln!("{failed} study points failed; see failures.txt");
            }
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::Snapshot { study, t, tau, file } => {
            let cfg = study.resolve()?;
            let scheme = cfg.study.schemes.first().copied().unwrap_or(Scheme::ReferenceCn);
            let tau = tau.unwrap_or(cfg.study.tau_ref);
            let (mesh, values) = dynbc::snapshot(&cfg.study, scheme, tau, t)?;
            let path = file.unwrap_or_else(|| cfg.output_dir.join(format!("snapshot_{t}.txt")));
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            output::write_snapshot(&mesh, &values, output::create(&path)?)?;
            println!("wrote {}", path.display());
        }
        Command::Export { study } => {
            let cfg = study.resolve()?;
            let dir = &cfg.output_dir;
            std::fs::create_dir_all(dir)?;
            let mesh = generate_disc_mesh(cfg.study.h)?;
            let params = BilinearParams::new(cfg.study.beta, cfg.study.kappa)?;
            let kind = match cfg.study.problem {
                Problem::Kinetic => CouplingKind::Kinetic,
                Problem::Acoustic => CouplingKind::Acoustic,
            };
            let b = BlockSystem::assemble(&mesh, &params, kind)?;
            output::write_mesh(&mesh, output::create(&dir.join("mesh.txt"))?)?;
            for (name, m) in [
                ("M_bulk", &b.m_bulk),
                ("A_bulk", &b.a_bulk),
                ("M_surf", &b.m_surf),
                ("A_surf", &b.a_surf),
                ("B", &b.coupling),
            ] {
                output::write_matrix_market(m, output::create(&dir.join(format!("{name}.mtx")))?)?;
            }
            println!("wrote mesh and matrices for {} vertices to {}", mesh.n_vertices(), dir.display());
        }
    }
    Ok(())
}

