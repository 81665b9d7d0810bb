//! Convergence-study harness for the `dynbc-core` splitting schemes: config
//! files, parallel study runs, CSV/gnuplot output and snapshots.

pub mod config;
pub mod output;
pub mod runner;

use dynbc_core::mesh::Mesh;
use dynbc_core::study::{Scheme, StudyConfig, StudySetup};

pub use config::{parse_step, ConfigError, HarnessConfig};
pub use runner::{run_study, RunOptions, StudyReport};

/// Bulk values at time `t` computed with `scheme` and step `tau`.
pub fn snapshot(base: &StudyConfig, scheme: Scheme, tau: f64, t: f64) -> anyhow::Result<(Mesh, Vec<f64>)> {
    anyhow::ensure!(t >= 0.0, "snapshot time must be nonnegative");
    let cfg = StudyConfig { final_time: t.max(tau), tau_list: vec![tau], tau_ref: tau / 4.0, ..base.clone() };
    let setup = StudySetup::new(cfg)?;
    let run = setup.run(scheme, tau, if t == 0.0 { tau } else { t })?;
    let sample = if t == 0.0 { run.trajectory.samples.first() } else { run.trajectory.last() };
    let values = sample.map(|s| s.bulk.clone()).unwrap_or_default();
    Ok((setup.mesh, values))
}
